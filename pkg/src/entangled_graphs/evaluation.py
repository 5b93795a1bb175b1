"""Classification metrics: accuracy, F1, AUC, sensitivity, specificity.

Binary metrics treat class 1 as positive. Multiclass metrics are macro
averages of one-vs-rest values. AUC is the rank-based Mann-Whitney statistic
with midranks for tied scores. A metric whose denominator class is absent is
undefined and reported as None (serialized as null), never coerced to 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .ranks import average_ranks


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    f1: float | None
    auc: float | None
    sensitivity: float | None
    specificity: float | None
    confusion: np.ndarray
    per_class: list[dict]

    def __post_init__(self):
        c = np.asarray(self.confusion)
        c.setflags(write=False)
        object.__setattr__(self, "confusion", c)


def _safe_div(num: float, den: float) -> float | None:
    return num / den if den > 0 else None


def binary_auc(scores, labels) -> float | None:
    """Mann-Whitney AUC of positive-class scores; midranks handle ties."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = average_ranks(scores)
    rank_sum = float(ranks[labels == 1].sum())
    u = rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def evaluate(probabilities, labels, num_classes: int) -> EvalReport:
    """Score predicted class-probability rows against integer labels."""
    probs = np.asarray(probabilities, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if probs.ndim != 2 or probs.shape != (len(labels), num_classes):
        raise ValueError("need one probability row of length num_classes per sample")
    preds = probs.argmax(axis=1)

    confusion = np.zeros((num_classes, num_classes), dtype=int)
    for t, p in zip(labels, preds):
        confusion[t, p] += 1
    acc = float(np.trace(confusion)) / len(labels)

    per_class = []
    for c in range(num_classes):
        tp = int(confusion[c, c])
        fn = int(confusion[c].sum()) - tp
        fp = int(confusion[:, c].sum()) - tp
        tn = len(labels) - tp - fn - fp
        recall = _safe_div(tp, tp + fn)
        precision = _safe_div(tp, tp + fp)
        if precision is None or recall is None:
            f1 = None
        else:
            f1 = _safe_div(2 * precision * recall, precision + recall)
            f1 = 0.0 if f1 is None else f1
        auc = binary_auc(probs[:, c], (labels == c).astype(int))
        per_class.append({
            "class": c,
            "support": tp + fn,
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "specificity": _safe_div(tn, tn + fp),
            "auc": auc,
        })

    def macro(key):
        vals = [pc[key] for pc in per_class]
        if any(v is None for v in vals):
            return None
        return float(np.mean(vals))

    if num_classes == 2:
        pos = per_class[1]
        f1 = pos["f1"]
        sen = pos["recall"]
        spe = pos["specificity"]
        auc = binary_auc(probs[:, 1], labels)
    else:
        f1 = macro("f1")
        sen = macro("recall")
        spe = macro("specificity")
        auc = macro("auc")
    return EvalReport(accuracy=acc, f1=f1, auc=auc, sensitivity=sen,
                      specificity=spe, confusion=confusion, per_class=per_class)


def report_to_json(report: EvalReport) -> dict:
    return {
        "ACC": report.accuracy,
        "F1": report.f1,
        "AUC": report.auc,
        "Sensitivity": report.sensitivity,
        "Specificity": report.specificity,
        "confusion": report.confusion.tolist(),
        "per_class": report.per_class,
    }


def save_report(report: EvalReport, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report_to_json(report), f, sort_keys=True, indent=2)
