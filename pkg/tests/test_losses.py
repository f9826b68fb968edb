"""Every loss against a straight-line reimplementation of its formula,
plus the hand-derivable anchor values."""

import math

import numpy as np
import pytest
import torch

from anonvad.errors import ConfigError, NumericError, ShapeError
from anonvad.losses import (
    LossConfig,
    budget_nt_xent,
    cross_entropy,
    invariance_nt_xent,
    l1_reconstruction,
    magnitude_contrastive,
    mgfn_total,
    sigmoid_ce,
    sparsity,
    temporal_smoothness,
    topk_by_magnitude,
    triplet_distinct,
    utility_loss,
)

RNG = np.random.default_rng(2024)
N_RANDOM = 120
TOL = 1e-6


def t64(arr):
    return torch.as_tensor(np.asarray(arr), dtype=torch.float64)


# straight-line oracles, no torch


def oracle_l1(x, xhat):
    total = 0.0
    for c in range(x.shape[0]):
        for h in range(x.shape[1]):
            for w in range(x.shape[2]):
                total += abs(x[c, h, w] - xhat[c, h, w])
    return total


def oracle_triplet(za, zp, zn, margin):
    d_pos = math.sqrt(sum((a - p) ** 2 for a, p in zip(za, zp)))
    d_neg = math.sqrt(sum((a - n) ** 2 for a, n in zip(za, zn)))
    return max(d_pos - d_neg + margin, 0.0)


def oracle_ce(logits, y):
    m = max(logits)
    denom = sum(math.exp(v - m) for v in logits)
    return -math.log(math.exp(logits[y] - m) / denom)


def oracle_nt_xent(anchors, partners, tau):
    def cos(u, v):
        nu = math.sqrt(sum(x * x for x in u))
        nv = math.sqrt(sum(x * x for x in v))
        return sum(a * b for a, b in zip(u, v)) / (nu * nv)

    n = len(anchors)
    losses = []
    for i in range(n):
        pos = math.exp(cos(anchors[i], partners[i]) / tau)
        denom = 0.0
        for j in range(n):
            if j != i:
                denom += math.exp(cos(anchors[i], anchors[j]) / tau)
            denom += math.exp(cos(anchors[i], partners[j]) / tau)
        losses.append(-math.log(pos / denom))
    return sum(losses) / n


def oracle_sigmoid_ce(s, y):
    s = min(max(s, 1e-7), 1 - 1e-7)
    return -y * math.log(s) - (1 - y) * math.log(1 - s)


def oracle_smoothness(scores):
    return sum((scores[i] - scores[i + 1]) ** 2 for i in range(len(scores) - 1))


def oracle_sparsity(scores):
    return sum(scores)


def oracle_mc(normal, anom, margin):
    same, n_same = 0.0, 0
    for group in (normal, anom):
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                same += abs(group[i] - group[j])
                n_same += 1
    cross, n_cross = 0.0, 0
    for mn in normal:
        for ma in anom:
            cross += max(0.0, margin - abs(mn - ma))
            n_cross += 1
    return same / max(n_same, 1) + cross / n_cross


def oracle_topk_video(scores, mags, k):
    order = sorted(range(len(mags)), key=lambda i: (-mags[i], i))[:k]
    return sum(scores[i] for i in order) / len(order), sum(mags[i] for i in order) / len(order)


def oracle_mgfn(scores, mags, labels, cfg):
    per_video = [oracle_topk_video(s, m, cfg.top_k) for s, m in zip(scores, mags)]
    l_cls = sum(oracle_sigmoid_ce(vs, y) for (vs, _), y in zip(per_video, labels)) / len(labels)
    l_ts = sum(oracle_smoothness(s) for s in scores) / len(scores)
    anom_scores = [s for s, y in zip(scores, labels) if y == 1]
    l_sp = sum(oracle_sparsity(s) for s in anom_scores) / len(anom_scores) if anom_scores else 0.0
    m_n = [vm for (_, vm), y in zip(per_video, labels) if y == 0]
    m_a = [vm for (_, vm), y in zip(per_video, labels) if y == 1]
    l_mc = oracle_mc(m_n, m_a, cfg.mc_margin) if (m_n and m_a and cfg.lambda_magnitude > 0) else 0.0
    return (
        l_cls
        + cfg.lambda_smooth * l_ts
        + cfg.lambda_sparse * l_sp
        + cfg.lambda_magnitude * l_mc
    )


# anchors


def test_l1_anchor_values():
    x = torch.ones(3, 2, 2, dtype=torch.float64)
    zero = torch.zeros_like(x)
    assert float(l1_reconstruction(x, zero)) == pytest.approx(12.0, abs=TOL)
    assert float(l1_reconstruction(x, x)) == 0.0
    assert float(l1_reconstruction(x, zero)) == float(l1_reconstruction(zero, x))


def test_triplet_anchor_values():
    za, zp, zn = t64([0.0, 0.0]), t64([3.0, 4.0]), t64([0.0, 0.0])
    assert float(triplet_distinct(za, zp, zn, 1.0)) == pytest.approx(6.0, abs=TOL)
    # anchor equals positive, negative far: hinge inactive
    far = t64([2.0, 0.0])
    assert float(triplet_distinct(za, za, far, 1.0)) == 0.0
    # equal distances leave exactly the margin
    assert float(triplet_distinct(za, zp, t64([4.0, 3.0]), 1.0)) == pytest.approx(1.0, abs=TOL)


def test_triplet_translation_invariance():
    for _ in range(20):
        za, zp, zn = (t64(RNG.normal(size=6)) for _ in range(3))
        shift = t64(RNG.normal(size=6))
        v1 = float(triplet_distinct(za, zp, zn, 1.0))
        v2 = float(triplet_distinct(za + shift, zp + shift, zn + shift, 1.0))
        assert v1 == pytest.approx(v2, abs=1e-9)


def test_cross_entropy_anchors():
    logits = t64([1000.0, 0.0, 0.0, 0.0])
    assert float(cross_entropy(logits, torch.tensor(0))) == pytest.approx(0.0, abs=1e-9)
    uniform = t64([0.3, 0.3, 0.3, 0.3])
    assert float(cross_entropy(uniform, torch.tensor(2))) == pytest.approx(math.log(4), abs=TOL)
    shifted = uniform + 5.0
    assert float(cross_entropy(shifted, torch.tensor(2))) == pytest.approx(
        float(cross_entropy(uniform, torch.tensor(2))), abs=1e-9
    )


def test_cross_entropy_invalid_class():
    with pytest.raises(ValueError):
        cross_entropy(t64([0.0, 1.0]), torch.tensor(2))


def test_utility_loss_arithmetic():
    assert utility_loss(1.0, 2.0, 0.1) == pytest.approx(1.2)
    assert utility_loss(1.0, 2.0, 0.0) == pytest.approx(1.0)
    assert utility_loss(1.0, 4.0, 0.1) - utility_loss(1.0, 2.0, 0.1) == pytest.approx(0.2)


def test_nt_xent_anchor_case():
    # two pairs: positives identical, the other video orthogonal
    e1, e2 = [1.0, 0.0], [0.0, 1.0]
    anchors = t64([e1, e2])
    partners = t64([e1, e2])
    expected = math.log(1.0 + 2.0 * math.exp(-10.0))  # -log(e^10/(e^10+2))
    assert float(budget_nt_xent(anchors, partners, 0.1)) == pytest.approx(expected, rel=1e-9)
    assert expected == pytest.approx(9.08e-5, rel=1e-2)


def test_nt_xent_all_identical():
    for b in (2, 3, 5):
        z = t64(np.tile([0.3, 0.4], (b, 1)))
        expected = math.log(2 * b - 1)
        assert float(budget_nt_xent(z, z.clone(), 0.1)) == pytest.approx(expected, abs=1e-9)


def test_nt_xent_scale_invariance():
    anchors = t64(RNG.normal(size=(4, 8)))
    partners = t64(RNG.normal(size=(4, 8)))
    base = float(budget_nt_xent(anchors, partners, 0.2))
    scaled = anchors.clone()
    scaled[1] *= 37.5
    assert float(budget_nt_xent(scaled, partners, 0.2)) == pytest.approx(base, rel=1e-9)


def test_nt_xent_positive_agreement_monotonicity():
    anchors = t64(RNG.normal(size=(4, 8)))
    partners = t64(RNG.normal(size=(4, 8)))
    base = float(budget_nt_xent(anchors, partners, 0.2))
    closer = partners.clone()
    closer[0] = 0.2 * partners[0] + 0.8 * anchors[0]  # raise one positive cosine
    assert float(budget_nt_xent(anchors, closer, 0.2)) < base


def test_nt_xent_errors():
    one_pair = t64([[1.0, 0.0]])
    with pytest.raises(ValueError):
        budget_nt_xent(one_pair, one_pair, 0.1)
    zeros = t64([[0.0, 0.0], [1.0, 0.0]])
    with pytest.raises(NumericError):
        budget_nt_xent(zeros, zeros, 0.1)


def test_sigmoid_ce_anchors():
    half = torch.tensor(0.5, dtype=torch.float64)
    assert float(sigmoid_ce(half, torch.tensor(1.0))) == pytest.approx(math.log(2), abs=TOL)
    assert float(sigmoid_ce(half, torch.tensor(0.0))) == pytest.approx(math.log(2), abs=TOL)
    assert float(sigmoid_ce(torch.tensor(0.9999999), torch.tensor(1.0))) < 1e-5
    assert float(sigmoid_ce(torch.tensor(0.9), torch.tensor(0.0))) == pytest.approx(
        -math.log(0.1), abs=TOL
    )


def test_smoothness_and_sparsity_anchors():
    assert float(temporal_smoothness(t64([0.0, 1.0, 0.0]))) == pytest.approx(2.0, abs=TOL)
    assert float(temporal_smoothness(t64([0.7, 0.7, 0.7]))) == 0.0
    assert float(temporal_smoothness(t64([0.4]))) == 0.0
    assert float(sparsity(t64([0.0, 0.0]))) == 0.0
    assert float(sparsity(t64([0.2, 0.3]))) == pytest.approx(0.5, abs=TOL)


def test_magnitude_contrastive_anchors():
    margin = 10.0
    equal = t64([3.0, 3.0])
    assert float(magnitude_contrastive(equal, equal.clone(), margin)) == pytest.approx(
        margin, abs=TOL
    )
    normal = t64([5.0, 5.0])
    anom = t64([15.0, 15.0])
    assert float(magnitude_contrastive(normal, anom, margin)) == pytest.approx(0.0, abs=TOL)
    with pytest.raises(ValueError):
        magnitude_contrastive(t64([]), anom, margin)


def test_mgfn_reduces_to_sigmoid_ce():
    cfg = LossConfig(lambda_smooth=0.0, lambda_sparse=0.0, lambda_magnitude=0.0, top_k=1)
    scores = t64([[0.9, 0.1, 0.5], [0.2, 0.3, 0.1]])
    mags = t64([[1.0, 5.0, 2.0], [3.0, 1.0, 2.0]])
    labels = torch.tensor([1, 0])
    total, components = mgfn_total(scores, mags, labels, cfg)
    # top-magnitude segments are 0.1 (anom) and 0.2 (normal)
    expected = (oracle_sigmoid_ce(0.1, 1) + oracle_sigmoid_ce(0.2, 0)) / 2
    assert float(total) == pytest.approx(expected, abs=TOL)
    assert components["magnitude_contrastive"] == 0.0


def test_mgfn_hand_built_batch():
    cfg = LossConfig(top_k=1, mc_margin=2.0)
    scores = [[0.8, 0.1, 0.6], [0.2, 0.4, 0.3]]
    mags = [[1.0, 3.0, 2.0], [2.5, 0.5, 1.0]]
    labels = [1, 0]
    total, _ = mgfn_total(t64(scores), t64(mags), torch.tensor(labels), cfg)
    assert float(total) == pytest.approx(oracle_mgfn(scores, mags, labels, cfg), abs=TOL)


def test_mgfn_single_class_skips_mc_with_warning():
    cfg = LossConfig()
    scores = t64([[0.5, 0.6], [0.4, 0.2]])
    mags = t64([[1.0, 2.0], [0.5, 1.5]])
    with pytest.warns(UserWarning, match="single-class"):
        total, components = mgfn_total(scores, mags, torch.tensor([1, 1]), cfg)
    assert components["mc_skipped"] is True
    assert components["magnitude_contrastive"] == 0.0
    assert math.isfinite(float(total))


def test_topk_tie_break_prefers_lower_index():
    scores = t64([0.1, 0.9, 0.5])
    mags = t64([2.0, 2.0, 2.0])
    video_score, video_mag = topk_by_magnitude(scores, mags, 2)
    assert float(video_score) == pytest.approx(0.5)  # segments 0 and 1
    assert float(video_mag) == pytest.approx(2.0)


def test_loss_config_validation():
    with pytest.raises(ConfigError):
        LossConfig(triplet_margin=0.0)
    with pytest.raises(ConfigError):
        LossConfig(temperature=-1.0)
    with pytest.raises(ConfigError):
        LossConfig(top_k=0)
    with pytest.raises(ConfigError):
        LossConfig(lambda_sparse=-0.1)


def test_shape_errors():
    with pytest.raises(ShapeError):
        l1_reconstruction(torch.ones(3, 2, 2), torch.ones(3, 2, 3))
    with pytest.raises(ShapeError):
        triplet_distinct(t64([1.0, 2.0]), t64([1.0]), t64([1.0, 2.0]), 1.0)


# randomized oracle sweeps


def test_l1_matches_oracle_randomized():
    for _ in range(N_RANDOM):
        x = RNG.normal(size=(3, 4, 4))
        xhat = RNG.normal(size=(3, 4, 4))
        assert float(l1_reconstruction(t64(x), t64(xhat))) == pytest.approx(
            oracle_l1(x, xhat), abs=TOL
        )


def test_triplet_matches_oracle_randomized():
    for _ in range(N_RANDOM):
        za, zp, zn = (RNG.normal(size=5) for _ in range(3))
        margin = float(RNG.uniform(0.1, 3.0))
        got = float(triplet_distinct(t64(za), t64(zp), t64(zn), margin))
        assert got == pytest.approx(oracle_triplet(za, zp, zn, margin), abs=TOL)
        assert got >= 0.0


def test_cross_entropy_matches_oracle_randomized():
    for _ in range(N_RANDOM):
        n_classes = int(RNG.integers(2, 7))
        logits = RNG.normal(size=n_classes) * 3
        y = int(RNG.integers(n_classes))
        got = float(cross_entropy(t64(logits), torch.tensor(y)))
        assert got == pytest.approx(oracle_ce(list(logits), y), abs=TOL)
        assert got >= 0.0


def test_nt_xent_matches_oracle_randomized():
    for _ in range(N_RANDOM):
        b, d = int(RNG.integers(2, 6)), int(RNG.integers(2, 6))
        anchors = RNG.normal(size=(b, d)) + 0.01
        partners = RNG.normal(size=(b, d)) + 0.01
        tau = float(RNG.uniform(0.05, 1.0))
        got = float(budget_nt_xent(t64(anchors), t64(partners), tau))
        want = oracle_nt_xent(anchors.tolist(), partners.tolist(), tau)
        assert got == pytest.approx(want, abs=TOL)
        # the invariance flavor shares the functional form
        assert float(invariance_nt_xent(t64(anchors), t64(partners), tau)) == pytest.approx(
            want, abs=TOL
        )


def test_sigmoid_ce_matches_oracle_randomized():
    for _ in range(N_RANDOM):
        s = float(RNG.uniform(0.0, 1.0))
        y = int(RNG.integers(2))
        got = float(sigmoid_ce(torch.tensor(s, dtype=torch.float64), torch.tensor(float(y))))
        assert got == pytest.approx(oracle_sigmoid_ce(s, y), abs=TOL)
        assert got >= 0.0


def test_smoothness_sparsity_match_oracle_randomized():
    for _ in range(N_RANDOM):
        s = RNG.uniform(size=int(RNG.integers(1, 9))).tolist()
        assert float(temporal_smoothness(t64(s))) == pytest.approx(oracle_smoothness(s), abs=TOL)
        assert float(sparsity(t64(s))) == pytest.approx(oracle_sparsity(s), abs=TOL)
        assert float(temporal_smoothness(t64(s))) >= 0.0
        assert float(sparsity(t64(s))) >= 0.0


def test_magnitude_contrastive_matches_oracle_randomized():
    for _ in range(N_RANDOM):
        n = int(RNG.integers(1, 5))
        m = int(RNG.integers(1, 5))
        normal = (RNG.uniform(0, 20, size=n)).tolist()
        anom = (RNG.uniform(0, 20, size=m)).tolist()
        margin = float(RNG.uniform(1.0, 30.0))
        got = float(magnitude_contrastive(t64(normal), t64(anom), margin))
        assert got == pytest.approx(oracle_mc(normal, anom, margin), abs=TOL)
        assert got >= 0.0


def test_mgfn_matches_oracle_randomized():
    for _ in range(N_RANDOM // 2):
        b = int(RNG.integers(2, 5))
        s = int(RNG.integers(2, 6))
        scores = RNG.uniform(0.01, 0.99, size=(b, s)).tolist()
        mags = RNG.uniform(0.0, 10.0, size=(b, s)).tolist()
        labels = [1] * (b // 2) + [0] * (b - b // 2)
        cfg = LossConfig(
            top_k=int(RNG.integers(1, 4)),
            mc_margin=float(RNG.uniform(1.0, 10.0)),
            lambda_smooth=float(RNG.uniform(0, 2)),
            lambda_sparse=float(RNG.uniform(0, 2)),
            lambda_magnitude=float(RNG.uniform(0.001, 1.0)),
        )
        total, _ = mgfn_total(t64(scores), t64(mags), torch.tensor(labels), cfg)
        assert float(total) == pytest.approx(oracle_mgfn(scores, mags, labels, cfg), abs=TOL)
