"""Boundary extraction and tolerance-based boundary precision/recall.

This is a desk-scale matcher: a boundary pixel counts as matched when a
boundary pixel of the other map lies within ``tol_px`` in Chebyshev
(chessboard) distance. Scores are not comparable to benchmark numbers that
use bipartite matching on gradient-based boundaries.
"""

from dataclasses import asdict, dataclass

import numpy as np

__all__ = ["PRFScore", "boundary_map", "dilate", "boundary_fscore", "pixel_accuracy"]


@dataclass(frozen=True)
class PRFScore:
    precision: float
    recall: float
    f_score: float
    matched_pred: int
    n_pred: int
    matched_truth: int
    n_truth: int

    def to_dict(self):
        return asdict(self)


def boundary_map(labels):
    """Mark pixels whose right or lower neighbour carries a different label."""
    lab = np.asarray(labels)
    if lab.ndim != 2:
        raise ValueError(f"label map must be 2-D, got shape {lab.shape}")
    out = np.zeros(lab.shape, dtype=bool)
    out[:, :-1] |= lab[:, :-1] != lab[:, 1:]
    out[:-1, :] |= lab[:-1, :] != lab[1:, :]
    return out


def _dilate_axis(m, radius, axis):
    out = m.copy()
    n = m.shape[axis]
    for s in range(1, min(radius, n - 1) + 1):
        fwd = [slice(None)] * 2
        back = [slice(None)] * 2
        fwd[axis], back[axis] = slice(s, None), slice(None, -s)
        out[tuple(fwd)] |= m[tuple(back)]
        out[tuple(back)] |= m[tuple(fwd)]
    return out


def dilate(mask, radius):
    """Binary dilation with a ``(2r+1) x (2r+1)`` square."""
    m = np.asarray(mask, dtype=bool)
    return _dilate_axis(_dilate_axis(m, radius, 0), radius, 1)


def boundary_fscore(pred, truth, tol_px=2):
    """Precision, recall and F-score of ``pred`` boundaries against ``truth``.

    An empty prediction has precision 1; an empty truth has recall 1.
    """
    p = np.asarray(pred, dtype=bool)
    t = np.asarray(truth, dtype=bool)
    if p.shape != t.shape:
        raise ValueError(f"boundary maps differ in shape: {p.shape} vs {t.shape}")
    if tol_px < 0 or int(tol_px) != tol_px:
        raise ValueError(f"tolerance must be a non-negative integer, got {tol_px!r}")
    n_pred = int(p.sum())
    n_truth = int(t.sum())
    matched_pred = int((p & dilate(t, int(tol_px))).sum())
    matched_truth = int((t & dilate(p, int(tol_px))).sum())
    precision = matched_pred / n_pred if n_pred else 1.0
    recall = matched_truth / n_truth if n_truth else 1.0
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return PRFScore(precision, recall, f, matched_pred, n_pred, matched_truth, n_truth)


def pixel_accuracy(pred, truth):
    """Fraction of pixels labelled correctly under the best one-to-one
    relabelling of ``pred`` (exhaustive over permutations, so keep k small)."""
    from itertools import permutations

    p = np.asarray(pred).ravel()
    t = np.asarray(truth).ravel()
    if p.shape != t.shape:
        raise ValueError("label maps differ in shape")
    pl = np.unique(p)
    tl = np.unique(t)
    table = np.array([[np.count_nonzero((p == a) & (t == b)) for b in tl] for a in pl])
    if len(pl) <= len(tl):
        best = max(sum(table[i, j] for i, j in enumerate(perm))
                   for perm in permutations(range(len(tl)), len(pl)))
    else:
        best = max(sum(table[i, j] for j, i in enumerate(perm))
                   for perm in permutations(range(len(pl)), len(tl)))
    return best / p.size
