import json

import numpy as np
import pytest

from entangled_graphs.evaluation import (binary_auc, evaluate, report_to_json,
                                         save_report)


def brute_auc(scores, labels):
    # concordant-pair count with half credit for ties; exact rationals
    pos = [s for s, l in zip(scores, labels) if l == 1]
    neg = [s for s, l in zip(scores, labels) if l == 0]
    if not pos or not neg:
        return None
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def probs_from_scores(scores):
    s = np.asarray(scores, dtype=float)
    return np.stack([1 - s, s], axis=1)


def test_auc_hand_fixtures():
    assert binary_auc([0.9, 0.4, 0.6, 0.1], [1, 0, 1, 0]) == 1.0
    assert binary_auc([0.9, 0.6, 0.4, 0.1], [1, 0, 1, 0]) == 0.75
    assert binary_auc([0.1, 0.4, 0.6, 0.9], [1, 0, 1, 0]) == 0.25
    assert binary_auc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0]) == 0.5
    assert binary_auc([0.2, 0.8], [1, 1]) is None
    assert binary_auc([0.2, 0.8], [0, 0]) is None


def test_auc_matches_pair_counting():
    rng = np.random.default_rng(0)
    for trial in range(30):
        n = int(rng.integers(4, 25))
        # quantized scores force plenty of ties
        scores = rng.integers(0, 5, size=n) / 4.0
        labels = rng.integers(0, 2, size=n)
        want = brute_auc(scores.tolist(), labels.tolist())
        got = binary_auc(scores, labels)
        if want is None:
            assert got is None
        else:
            assert got == pytest.approx(want, abs=1e-12)


def test_accuracy_is_confusion_trace():
    probs = probs_from_scores([0.9, 0.2, 0.7, 0.4, 0.6])
    labels = [1, 0, 0, 0, 1]
    report = evaluate(probs, labels, 2)
    assert report.confusion.tolist() == [[2, 1], [0, 2]]
    assert report.accuracy == np.trace(report.confusion) / 5
    assert report.accuracy == pytest.approx(0.8)


def test_binary_metrics_hand_fixture():
    # TP=2 FN=1 FP=1 TN=2
    probs = probs_from_scores([0.9, 0.8, 0.3, 0.6, 0.2, 0.1])
    labels = [1, 1, 1, 0, 0, 0]
    report = evaluate(probs, labels, 2)
    assert report.sensitivity == pytest.approx(2 / 3)
    assert report.specificity == pytest.approx(2 / 3)
    precision = 2 / 3
    recall = 2 / 3
    assert report.f1 == pytest.approx(2 * precision * recall / (precision + recall))
    assert report.auc == pytest.approx(brute_auc([0.9, 0.8, 0.3, 0.6, 0.2, 0.1],
                                                 labels), abs=1e-12)


def test_perfect_and_inverted_binary():
    labels = [0, 1, 0, 1]
    perfect = evaluate(probs_from_scores([0.1, 0.9, 0.2, 0.8]), labels, 2)
    assert perfect.accuracy == 1.0 and perfect.auc == 1.0 and perfect.f1 == 1.0
    inverted = evaluate(probs_from_scores([0.9, 0.1, 0.8, 0.2]), labels, 2)
    assert inverted.accuracy == 0.0 and inverted.auc == 0.0


def test_three_class_macro():
    probs = np.array([
        [0.8, 0.1, 0.1],
        [0.1, 0.8, 0.1],
        [0.1, 0.1, 0.8],
        [0.7, 0.2, 0.1],
        [0.2, 0.7, 0.1],
        [0.6, 0.1, 0.3],
    ])
    labels = [0, 1, 2, 0, 1, 2]
    report = evaluate(probs, labels, 3)
    assert report.accuracy == pytest.approx(5 / 6)
    # class 2: recall 1/2; classes 0 and 1: recall 1
    assert report.sensitivity == pytest.approx((1 + 1 + 0.5) / 3)
    assert len(report.per_class) == 3
    assert report.per_class[2]["recall"] == pytest.approx(0.5)
    f1s = [pc["f1"] for pc in report.per_class]
    assert report.f1 == pytest.approx(np.mean(f1s))


def test_missing_class_yields_none():
    probs = probs_from_scores([0.2, 0.3, 0.4])
    report = evaluate(probs, [0, 0, 0], 2)
    assert report.accuracy == 1.0
    assert report.auc is None
    assert report.sensitivity is None
    assert report.f1 is None
    assert report.specificity == 1.0


def test_shape_validation():
    with pytest.raises(ValueError):
        evaluate(np.zeros((3, 2)), [0, 1], 2)
    with pytest.raises(ValueError):
        evaluate(np.zeros(3), [0, 1, 0], 2)


def test_json_serializes_none_as_null(tmp_path):
    report = evaluate(probs_from_scores([0.2, 0.3]), [0, 0], 2)
    payload = report_to_json(report)
    assert set(payload) == {"ACC", "F1", "AUC", "Sensitivity", "Specificity",
                            "confusion", "per_class"}
    path = tmp_path / "eval.json"
    save_report(report, path)
    text = path.read_text()
    assert '"AUC": null' in text
    loaded = json.loads(text)
    assert loaded["ACC"] == 1.0
    assert loaded["AUC"] is None
    assert loaded["confusion"] == [[2, 0], [0, 0]]
