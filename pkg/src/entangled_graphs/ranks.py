"""Rank statistics shared by the entanglement report and the AUC metric."""

from __future__ import annotations

import numpy as np


def average_ranks(values) -> np.ndarray:
    """1-based ranks with ties assigned the mean rank of their group."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=float)
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(a, b) -> tuple[float, bool]:
    """Spearman rank correlation with average ranks.

    Returns ``(rho, ties_degenerate)``. When either vector is entirely
    tied the correlation is undefined; by convention it is reported as
    1.0 with the degenerate-ties flag set.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) != len(b):
        raise ValueError("length mismatch")
    if len(a) < 2 or np.all(a == a[0]) or np.all(b == b[0]):
        return 1.0, True
    ra = average_ranks(a)
    rb = average_ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = np.sqrt((ra * ra).sum() * (rb * rb).sum())
    return float((ra * rb).sum() / denom), False
