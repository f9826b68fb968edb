"""Training objectives, each a standalone differentiable function.

All functions take and return torch tensors, keep the caller's dtype and are
pure (no global state). Batch reduction is the arithmetic mean unless a
formula's own summation says otherwise.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import torch

from .errors import ConfigError, NumericError, ShapeError

PROB_FLOOR = 1e-7
NORM_FLOOR = 1e-12


@dataclass
class LossConfig:
    """Weights and margins for every objective in the framework.

    Defaults: triplet weight 0.1 and margin 1.0 for the temporally-distinct
    utility term, budget weight 1.0 in the adversarial step, contrastive
    temperature 0.1, anomaly-loss weights (1.0, 1.0, 0.001), magnitude
    margin 100 and top-3 segment selection.
    """

    triplet_weight: float = 0.1
    triplet_margin: float = 1.0
    budget_weight: float = 1.0
    temperature: float = 0.1
    lambda_smooth: float = 1.0
    lambda_sparse: float = 1.0
    lambda_magnitude: float = 0.001
    mc_margin: float = 100.0
    top_k: int = 3

    def __post_init__(self):
        if self.triplet_margin <= 0:
            raise ConfigError(f"triplet_margin must be > 0, got {self.triplet_margin}")
        if self.temperature <= 0:
            raise ConfigError(f"temperature must be > 0, got {self.temperature}")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")
        for name in ("lambda_smooth", "lambda_sparse", "lambda_magnitude"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")


def l1_reconstruction(x: torch.Tensor, x_hat: torch.Tensor) -> torch.Tensor:
    """Sum of absolute pixel differences over (C, H, W), mean over any batch dims."""
    if x.shape != x_hat.shape:
        raise ShapeError(f"shape mismatch: {tuple(x.shape)} vs {tuple(x_hat.shape)}")
    if x.dim() < 3:
        raise ShapeError(f"expected at least (C, H, W), got {tuple(x.shape)}")
    per_image = (x - x_hat).abs().flatten(-3).sum(-1)
    return per_image.mean() if per_image.dim() > 0 else per_image


def triplet_distinct(
    z_anchor: torch.Tensor,
    z_positive: torch.Tensor,
    z_negative: torch.Tensor,
    margin: float,
) -> torch.Tensor:
    """Hinge on Euclidean distances: pull the same-timestamp pair together and
    push the different-timestamp clip of the same video away by `margin`."""
    if not (z_anchor.shape == z_positive.shape == z_negative.shape):
        raise ShapeError(
            f"embedding shapes differ: {tuple(z_anchor.shape)}, "
            f"{tuple(z_positive.shape)}, {tuple(z_negative.shape)}"
        )
    if margin <= 0:
        raise ConfigError(f"margin must be > 0, got {margin}")
    d_pos = (z_anchor - z_positive).norm(dim=-1)
    d_neg = (z_anchor - z_negative).norm(dim=-1)
    return torch.clamp(d_pos - d_neg + margin, min=0.0).mean()


def cross_entropy(logits: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Negative log softmax probability of the target class, mean over batch."""
    if logits.dim() == 1:
        logits = logits.unsqueeze(0)
    target = torch.as_tensor(target, device=logits.device).reshape(-1)
    n_classes = logits.shape[-1]
    if target.min() < 0 or target.max() >= n_classes:
        raise ValueError(f"class index out of range [0, {n_classes}): {target.tolist()}")
    log_probs = torch.log_softmax(logits, dim=-1)
    return -log_probs.gather(-1, target.unsqueeze(-1)).mean()


def utility_loss(ce, distinct, triplet_weight: float):
    """Classification term plus weighted temporal-distinctiveness term."""
    return ce + triplet_weight * distinct


def _nt_xent(anchors: torch.Tensor, partners: torch.Tensor, temperature: float) -> torch.Tensor:
    """Normalized-temperature cross entropy over paired embeddings.

    Row i of `anchors` and row i of `partners` form a positive pair. For each
    anchor the denominator contains its positive, every other anchor-view
    embedding, and every other partner-view embedding (2B - 1 terms).
    """
    if anchors.shape != partners.shape or anchors.dim() != 2:
        raise ShapeError(
            f"expected matching (B, D) views, got {tuple(anchors.shape)} and {tuple(partners.shape)}"
        )
    n_pairs = anchors.shape[0]
    if n_pairs < 2:
        raise ValueError(f"need at least 2 pairs for negatives, got {n_pairs}")
    if temperature <= 0:
        raise ConfigError(f"temperature must be > 0, got {temperature}")
    z = torch.cat([anchors, partners], dim=0)
    norms = z.norm(dim=1)
    if not torch.isfinite(z).all():
        raise NumericError("non-finite embedding passed to contrastive loss")
    if (norms < NORM_FLOOR).any():
        raise NumericError("zero-norm embedding cannot be cosine-normalized")
    z = z / norms.clamp_min(NORM_FLOOR).unsqueeze(1)
    sims = (z @ z.T) / temperature

    idx = torch.arange(n_pairs, device=z.device)
    pos = sims[idx, idx + n_pairs]
    # Denominator for anchor i: all columns except itself among the anchor
    # views, plus every partner view (the positive included).
    denom_mask = torch.ones(n_pairs, 2 * n_pairs, dtype=torch.bool, device=z.device)
    denom_mask[idx, idx] = False
    denom = torch.where(
        denom_mask, sims[:n_pairs], torch.tensor(float("-inf"), dtype=sims.dtype, device=z.device)
    )
    return (-pos + torch.logsumexp(denom, dim=1)).mean()


def budget_nt_xent(
    frame_anchor: torch.Tensor, frame_partner: torch.Tensor, temperature: float
) -> torch.Tensor:
    """Agreement loss over frame pairs of the same video.

    Low values mean frames of one video embed close together relative to
    frames of other videos. The privacy-removal branch minimizes this; the
    anonymizer is updated to increase it.
    """
    return _nt_xent(frame_anchor, frame_partner, temperature)


def invariance_nt_xent(
    clip_anchor: torch.Tensor, clip_partner: torch.Tensor, temperature: float
) -> torch.Tensor:
    """Agreement loss over two clips of the same video at different timestamps.

    Ablation-only utility term: the opposite objective of the temporally
    distinct triplet.
    """
    return _nt_xent(clip_anchor, clip_partner, temperature)


def sigmoid_ce(score: torch.Tensor, label: torch.Tensor) -> torch.Tensor:
    """Binary cross entropy on an already-squashed score, clamped away from {0, 1}."""
    score = torch.as_tensor(score)
    label = torch.as_tensor(label, dtype=score.dtype, device=score.device)
    s = score.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
    return (-label * torch.log(s) - (1.0 - label) * torch.log(1.0 - s)).mean()


def temporal_smoothness(segment_scores: torch.Tensor) -> torch.Tensor:
    """Sum of squared differences between consecutive segment scores."""
    scores = torch.as_tensor(segment_scores)
    if scores.dim() == 1:
        scores = scores.unsqueeze(0)
    if scores.shape[-1] < 2:
        return torch.zeros((), dtype=scores.dtype, device=scores.device)
    return (scores[..., :-1] - scores[..., 1:]).pow(2).sum(-1).mean()


def sparsity(segment_scores: torch.Tensor) -> torch.Tensor:
    """Sum of segment scores; applied to anomalous videos to discourage
    blanket-high predictions."""
    scores = torch.as_tensor(segment_scores)
    if scores.dim() == 1:
        scores = scores.unsqueeze(0)
    return scores.sum(-1).mean()


def magnitude_contrastive(
    mags_normal: torch.Tensor, mags_anomalous: torch.Tensor, mc_margin: float
) -> torch.Tensor:
    """Pull same-label video magnitudes together, push cross-label pairs apart.

    Same-label terms average |m_i - m_j| over unordered distinct pairs of both
    groups combined; cross terms average the hinge max(0, margin - |m_n - m_a|)
    over all normal/anomalous pairs.
    """
    m_n = torch.as_tensor(mags_normal).reshape(-1)
    m_a = torch.as_tensor(mags_anomalous).reshape(-1)
    if m_n.numel() == 0 or m_a.numel() == 0:
        raise ValueError("both the normal and the anomalous half must be non-empty")

    def _pair_sum(m):
        if m.numel() < 2:
            return m.new_zeros(()), 0
        diff = (m.unsqueeze(0) - m.unsqueeze(1)).abs()
        iu = torch.triu_indices(m.numel(), m.numel(), offset=1)
        return diff[iu[0], iu[1]].sum(), iu.shape[1]

    same_n, count_n = _pair_sum(m_n)
    same_a, count_a = _pair_sum(m_a)
    same_count = count_n + count_a
    same_term = (same_n + same_a) / max(same_count, 1)

    cross = (m_n.unsqueeze(1) - m_a.unsqueeze(0)).abs()
    cross_term = torch.clamp(mc_margin - cross, min=0.0).mean()
    return same_term + cross_term


def topk_by_magnitude(
    segment_scores: torch.Tensor, magnitudes: torch.Tensor, k: int
) -> tuple[torch.Tensor, torch.Tensor]:
    """Mean score and mean magnitude over the k segments with the largest
    magnitudes; ties resolve to the lower segment index."""
    if segment_scores.shape != magnitudes.shape:
        raise ShapeError(
            f"scores {tuple(segment_scores.shape)} vs magnitudes {tuple(magnitudes.shape)}"
        )
    squeeze = segment_scores.dim() == 1
    if squeeze:
        segment_scores = segment_scores.unsqueeze(0)
        magnitudes = magnitudes.unsqueeze(0)
    n_segments = segment_scores.shape[-1]
    k = min(k, n_segments)
    order = torch.argsort(magnitudes, dim=-1, descending=True, stable=True)[..., :k]
    video_score = segment_scores.gather(-1, order).mean(-1)
    video_magnitude = magnitudes.gather(-1, order).mean(-1)
    if squeeze:
        return video_score.squeeze(0), video_magnitude.squeeze(0)
    return video_score, video_magnitude


def mgfn_total(
    segment_scores: torch.Tensor,
    magnitudes: torch.Tensor,
    labels: torch.Tensor,
    cfg: LossConfig,
) -> tuple[torch.Tensor, dict]:
    """Compound anomaly-detection loss over a batch of videos.

    `segment_scores` and `magnitudes` are (B, S); `labels` holds the
    video-level 0/1 annotation. Video-level scores and magnitudes are the
    top-k-by-magnitude segment means. Returns the weighted total and the raw
    component values for logging; the magnitude term is skipped (and recorded
    as 0) when the batch holds a single class or its weight is 0.
    """
    if segment_scores.dim() == 1:
        segment_scores = segment_scores.unsqueeze(0)
        magnitudes = magnitudes.unsqueeze(0)
    labels = torch.as_tensor(labels, device=segment_scores.device).reshape(-1)
    if labels.shape[0] != segment_scores.shape[0]:
        raise ShapeError(
            f"{segment_scores.shape[0]} videos but {labels.shape[0]} labels"
        )

    video_scores, video_mags = topk_by_magnitude(segment_scores, magnitudes, cfg.top_k)
    l_cls = sigmoid_ce(video_scores, labels)
    l_smooth = temporal_smoothness(segment_scores)

    anomalous = labels == 1
    if anomalous.any():
        l_sparse = sparsity(segment_scores[anomalous])
    else:
        l_sparse = segment_scores.new_zeros(())

    mc_skipped = False
    if cfg.lambda_magnitude > 0 and anomalous.any() and (~anomalous).any():
        l_mc = magnitude_contrastive(video_mags[~anomalous], video_mags[anomalous], cfg.mc_margin)
    else:
        if cfg.lambda_magnitude > 0:
            mc_skipped = True
            warnings.warn(
                "single-class batch: magnitude-contrastive term skipped", stacklevel=2
            )
        l_mc = segment_scores.new_zeros(())

    total = (
        l_cls
        + cfg.lambda_smooth * l_smooth
        + cfg.lambda_sparse * l_sparse
        + cfg.lambda_magnitude * l_mc
    )
    components = {
        "classification": float(l_cls),
        "smoothness": float(l_smooth),
        "sparsity": float(l_sparse),
        "magnitude_contrastive": float(l_mc),
        "mc_skipped": mc_skipped,
        "total": float(total),
    }
    return total, components
