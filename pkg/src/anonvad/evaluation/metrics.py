"""Ranking metrics for the utility and privacy protocols.

ROC AUC uses the rank-statistic (Mann-Whitney) formulation with ties counted
half, computed in integer arithmetic so it agrees exactly with a pairwise
oracle. Average precision is the step-wise, non-interpolated variant; tied
scores rank in input order (stable sort), which is the documented tie rule.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError


@dataclass(frozen=True)
class AnomalyScoreTrace:
    """Per-frame scores aligned with per-frame binary ground truth."""

    scores: np.ndarray
    truth: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64).ravel()
        truth = np.asarray(self.truth).ravel().astype(np.uint8)
        if scores.shape != truth.shape:
            raise ShapeError(f"scores length {scores.shape} != truth length {truth.shape}")
        if not np.isfinite(scores).all():
            raise ValueError("scores must be finite")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "truth", truth)

    def __len__(self) -> int:
        return self.scores.shape[0]


def segments_to_frames(segment_scores, clip_length: int, total_frames: int) -> np.ndarray:
    """Expand per-segment scores to per-frame scores.

    Each segment covers `clip_length` frames; the trailing
    total_frames - S * clip_length frames inherit the last segment's score.
    """
    scores = np.asarray(segment_scores, dtype=np.float64).ravel()
    n_segments = scores.shape[0]
    if n_segments == 0:
        raise ValueError("need at least one segment score")
    if not (n_segments * clip_length <= total_frames < (n_segments + 1) * clip_length):
        raise ValueError(
            f"{n_segments} segments of {clip_length} frames inconsistent with "
            f"T={total_frames}; expected S*len <= T < (S+1)*len"
        )
    frames = np.repeat(scores, clip_length)
    tail = total_frames - n_segments * clip_length
    if tail:
        frames = np.concatenate([frames, np.full(tail, scores[-1])])
    return frames


def _as_binary(labels) -> np.ndarray:
    arr = np.asarray(labels).ravel()
    out = (arr > 0.5).astype(np.int64) if arr.dtype.kind == "f" else arr.astype(np.int64)
    if not np.isin(out, (0, 1)).all():
        raise ValueError("labels must be binary")
    return out


def roc_auc(scores, labels) -> float:
    """Probability that a random positive outranks a random negative,
    ties counted half."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    y = _as_binary(labels)
    if scores.shape != y.shape:
        raise ShapeError(f"scores {scores.shape} vs labels {y.shape}")
    n_pos = int(y.sum())
    n_neg = int(y.shape[0] - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC AUC undefined: both classes must be present")
    order = np.argsort(scores, kind="stable")
    s_sorted = scores[order]
    y_sorted = y[order]
    _, group_start, group_size = np.unique(s_sorted, return_index=True, return_counts=True)
    pos_in_group = np.add.reduceat(y_sorted, group_start)
    neg_in_group = group_size - pos_in_group
    neg_below = np.concatenate([[0], np.cumsum(neg_in_group)[:-1]])
    doubled_wins = int((2 * pos_in_group * neg_below + pos_in_group * neg_in_group).sum())
    return doubled_wins / (2 * n_pos * n_neg)


def average_precision(scores, labels) -> float:
    """Step-wise average precision over the descending-score ranking."""
    scores = np.asarray(scores, dtype=np.float64).ravel()
    y = _as_binary(labels)
    if scores.shape != y.shape:
        raise ShapeError(f"scores {scores.shape} vs labels {y.shape}")
    n_pos = int(y.sum())
    if n_pos == 0:
        raise ValueError("average precision undefined without positives")
    order = np.argsort(-scores, kind="stable")
    y_ranked = y[order]
    precision_at = np.cumsum(y_ranked) / np.arange(1, y.shape[0] + 1)
    return float(precision_at[y_ranked == 1].sum() / n_pos)


def per_class_average_precision(pred_scores, targets) -> tuple[list[float], int]:
    """AP per attribute column; classes without positives are skipped.

    Returns (per-class APs for included classes, number skipped).
    """
    pred = np.asarray(pred_scores, dtype=np.float64)
    tgt = np.asarray(targets)
    if pred.shape != tgt.shape or pred.ndim != 2:
        raise ShapeError(f"expected matching (N, A) matrices, got {pred.shape} and {tgt.shape}")
    aps = []
    skipped = 0
    for a in range(pred.shape[1]):
        if tgt[:, a].sum() == 0:
            skipped += 1
            continue
        aps.append(average_precision(pred[:, a], tgt[:, a]))
    return aps, skipped


def cmap(pred_scores, targets) -> float:
    """Mean over attribute classes of per-class average precision."""
    aps, skipped = per_class_average_precision(pred_scores, targets)
    if skipped:
        warnings.warn(
            f"{skipped} attribute class(es) without positives excluded from cMAP",
            stacklevel=2,
        )
    if not aps:
        raise ValueError("cMAP undefined: no class has positives")
    return float(np.mean(aps))
