"""Evaluation metrics: accuracy and mean average precision.

Both return fractions in ``[0, 1]``.  Average precision follows the
one-vs-rest retrieval convention: each class ranks all samples by its
score column (descending, ties broken toward the lower sample index)
and averages precision at the ranks where true members appear; classes
with no positive instance are skipped.
"""

from __future__ import annotations

import numpy as np

from .errors import MetricError, ShapeError

__all__ = ["accuracy", "mean_average_precision"]


def accuracy(predicted, truth) -> float:
    """Fraction of exactly matching labels."""
    p = np.asarray(predicted)
    t = np.asarray(truth)
    if p.shape != t.shape or p.ndim != 1:
        raise ShapeError(f"label vectors must match, got {p.shape} vs {t.shape}")
    if p.shape[0] == 0:
        raise MetricError("accuracy is undefined on empty label vectors")
    return float(np.mean(p == t))


def mean_average_precision(scores: np.ndarray, truth) -> float:
    """Mean over classes of one-vs-rest average precision.

    Parameters
    ----------
    scores : ndarray, shape (n, c)
        Per-class ranking scores, one row per sample.
    truth : ndarray of int, shape (n,)
        True class ids in ``[0, c)``.

    Raises
    ------
    MetricError
        If no class has a positive instance.
    """
    s = np.asarray(scores, dtype=np.float64)
    t = np.asarray(truth)
    if s.ndim != 2 or t.shape != (s.shape[0],):
        raise ShapeError(f"scores {s.shape} and truth {t.shape} do not align")
    aps = []
    for j in range(s.shape[1]):
        positives = t == j
        n_pos = int(positives.sum())
        if n_pos == 0:
            continue
        # stable sort on negated scores: ties resolve toward lower index
        order = np.argsort(-s[:, j], kind="stable")
        hit = positives[order]
        ranks = np.nonzero(hit)[0] + 1
        found = np.arange(1, n_pos + 1)
        aps.append(float(np.sum(found / ranks)) / n_pos)
    if not aps:
        raise MetricError("mean average precision is undefined: no positives")
    return float(np.mean(aps))
