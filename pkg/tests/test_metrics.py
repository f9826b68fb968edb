"""Ranking metrics against brute-force oracles and hand-ranked cases."""

import numpy as np
import pytest

from anonvad.errors import ShapeError
from anonvad.evaluation import (
    AnomalyScoreTrace,
    average_precision,
    cmap,
    per_class_average_precision,
    roc_auc,
    segments_to_frames,
)

RNG = np.random.default_rng(77)


def pairwise_auc_oracle(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    total = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                total += 1.0
            elif p == n:
                total += 0.5
    return total / (len(pos) * len(neg))


def test_roc_auc_anchor_cases():
    assert roc_auc([0.9, 0.1], [1, 0]) == 1.0
    assert roc_auc([0.1, 0.9], [1, 0]) == 0.0
    assert roc_auc([0.4, 0.4, 0.4, 0.4], [1, 0, 1, 0]) == 0.5


def test_roc_auc_single_class_error():
    with pytest.raises(ValueError):
        roc_auc([0.1, 0.2], [1, 1])


def test_roc_auc_matches_pairwise_oracle_exactly():
    for _ in range(50):
        n = int(RNG.integers(5, 301))
        # quantized scores force plenty of ties
        scores = np.round(RNG.uniform(size=n), 2)
        labels = RNG.integers(0, 2, size=n)
        if labels.sum() in (0, n):
            labels[0] = 1 - labels[0]
        assert roc_auc(scores, labels) == pairwise_auc_oracle(scores, labels)


def test_roc_auc_monotone_transform_invariance():
    transforms = [
        lambda x, a=a, b=b: a * x + b
        for a, b in zip(RNG.uniform(0.1, 5.0, 10), RNG.normal(size=10))
    ]
    transforms += [lambda x: x**3 + x, lambda x: np.exp(x)] * 5
    scores = np.round(RNG.normal(size=200), 2)
    labels = RNG.integers(0, 2, size=200)
    labels[0], labels[1] = 0, 1
    base = roc_auc(scores, labels)
    for fn in transforms[:20]:
        assert roc_auc(fn(scores), labels) == base


def test_roc_auc_complement_for_tie_free_scores():
    for _ in range(10):
        n = int(RNG.integers(10, 100))
        scores = RNG.permutation(n).astype(float)  # distinct
        labels = RNG.integers(0, 2, size=n)
        labels[0], labels[1] = 0, 1
        assert roc_auc(scores, labels) + roc_auc(-scores, labels) == pytest.approx(1.0, abs=1e-12)


def test_average_precision_hand_cases():
    assert average_precision([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == 1.0
    # single positive ranked last of four
    assert average_precision([0.9, 0.8, 0.7, 0.1], [0, 0, 0, 1]) == pytest.approx(0.25)
    # positives at ranks 1 and 3: (1 + 2/3)/2
    assert average_precision([0.9, 0.8, 0.7], [1, 0, 1]) == pytest.approx((1 + 2 / 3) / 2)


def test_average_precision_tie_break_is_input_order():
    # all scores equal: ranking is input order by the documented rule
    assert average_precision([0.5, 0.5, 0.5], [1, 0, 0]) == 1.0
    assert average_precision([0.5, 0.5, 0.5], [0, 0, 1]) == pytest.approx(1 / 3)


def test_average_precision_random_scores_near_prevalence():
    n = 10_000
    scores = RNG.uniform(size=n)
    labels = np.array([1, 0] * (n // 2))
    assert abs(average_precision(scores, labels) - 0.5) < 0.1


def test_average_precision_no_positive_error():
    with pytest.raises(ValueError):
        average_precision([0.3, 0.2], [0, 0])


def test_cmap_is_mean_of_per_class_ap():
    n, a = 60, 5
    preds = RNG.uniform(size=(n, a))
    targets = RNG.integers(0, 2, size=(n, a))
    targets[0] = 1  # every class has a positive
    aps, skipped = per_class_average_precision(preds, targets)
    assert skipped == 0
    per_class = [average_precision(preds[:, j], targets[:, j]) for j in range(a)]
    assert aps == pytest.approx(per_class)
    assert cmap(preds, targets) == pytest.approx(float(np.mean(per_class)))


def test_cmap_anchor_cases():
    targets = np.array([[1, 0], [0, 1], [1, 1], [0, 0]])
    perfect = targets.astype(float)
    assert cmap(perfect, targets) == 1.0
    # class 0: positives at ranks 1 and 3 -> AP (1 + 2/3)/2
    # class 1: positives at ranks 3 and 4 -> AP (1/3 + 2/4)/2
    preds = np.array([[0.9, 0.9], [0.8, 0.5], [0.7, 0.4], [0.1, 0.6]])
    expected = ((1.0 + 2 / 3) / 2 + (1 / 3 + 0.5) / 2) / 2
    assert cmap(preds, targets) == pytest.approx(expected)


def test_cmap_excludes_empty_classes_with_warning():
    targets = np.array([[1, 0], [0, 0], [1, 0]])
    preds = RNG.uniform(size=(3, 2))
    with pytest.warns(UserWarning, match="excluded"):
        value = cmap(preds, targets)
    assert 0.0 <= value <= 1.0


def test_segments_to_frames_anchor_cases():
    out = segments_to_frames([0.1, 0.9], clip_length=16, total_frames=32)
    assert out.shape == (32,)
    assert (out[:16] == 0.1).all() and (out[16:] == 0.9).all()
    out = segments_to_frames([0.1, 0.9], clip_length=16, total_frames=35)
    assert (out[32:] == 0.9).all() and out.shape == (35,)
    with pytest.raises(ValueError):
        segments_to_frames([], clip_length=16, total_frames=16)
    with pytest.raises(ValueError):
        segments_to_frames([0.5], clip_length=16, total_frames=40)


def test_segments_to_frames_preserves_multiset():
    for _ in range(20):
        s = int(RNG.integers(1, 9))
        scores = RNG.uniform(size=s)
        t = int(16 * s + RNG.integers(0, 16))
        frames = segments_to_frames(scores, 16, t)
        assert set(np.unique(frames)) == set(np.unique(scores))


def test_anomaly_score_trace_validation():
    trace = AnomalyScoreTrace(scores=np.array([0.1, 0.2]), truth=np.array([0, 1]))
    assert len(trace) == 2
    with pytest.raises(ShapeError):
        AnomalyScoreTrace(scores=np.array([0.1]), truth=np.array([0, 1]))
    with pytest.raises(ValueError):
        AnomalyScoreTrace(scores=np.array([np.nan, 0.2]), truth=np.array([0, 1]))
