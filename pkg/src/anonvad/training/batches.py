"""Batch assembly from in-memory datasets.

Horizontal flips are disabled wherever a clip feeds the action-class loss:
the synthetic classes encode motion direction, which a flip would relabel.
The positive triplet view keeps flips since it never meets the classifier.
"""

from __future__ import annotations

import numpy as np
import torch

from ..data.augment import AugmentationParams, augment_clip
from ..data.containers import Video, VideoClip
from ..data.sampling import clip_span, sample_clip, sample_triplet, valid_clip_starts
from ..utils import to_tensor


def clips_to_tensor(clips: list[VideoClip]) -> torch.Tensor:
    return to_tensor(np.stack([c.frames for c in clips]))


def random_supervised_clip(
    video: Video,
    rng: np.random.Generator,
    out_size: int,
    length: int,
    skip: int,
) -> VideoClip:
    """Random start plus label-safe augmentation (no flip)."""
    starts = valid_clip_starts(video, length, skip)
    start = int(rng.integers(starts.start, starts.stop))
    clip = sample_clip(video, start, length, skip)
    params = AugmentationParams.sample(
        rng, clip.frames.shape[-2:], out_size, flip_prob=0.0
    )
    return augment_clip(clip, params)


def centered_eval_clip(video: Video, out_size: int, length: int, skip: int) -> VideoClip:
    """Deterministic middle-of-video clip with center-crop preprocessing."""
    span = clip_span(length, skip)
    start = (video.num_frames - span) // 2
    clip = sample_clip(video, start, length, skip)
    params = AugmentationParams.center_crop(clip.frames.shape[-2:], out_size)
    return augment_clip(clip, params)


def triplet_batch(
    videos: list[Video],
    rng: np.random.Generator,
    out_size: int,
    length: int,
    skip: int,
    negative_distance: int | None,
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor, torch.Tensor]:
    """One triplet per video: (anchors, positives, negatives, labels)."""
    anchors, positives, negatives, labels = [], [], [], []
    for video in videos:
        starts = valid_clip_starts(video, length, skip)
        anchor_start = int(rng.integers(starts.start, starts.stop))
        in_hw = video.frames.shape[-2:]
        aug_anchor = AugmentationParams.sample(rng, in_hw, out_size, flip_prob=0.0)
        aug_positive = AugmentationParams.sample(rng, in_hw, out_size)
        triplet = sample_triplet(
            video,
            anchor_start,
            aug_anchor,
            aug_positive,
            rng,
            length=length,
            skip=skip,
            negative_distance=negative_distance,
        )
        anchors.append(triplet.anchor)
        positives.append(triplet.positive)
        negatives.append(triplet.negative)
        labels.append(video.label)
    return (
        clips_to_tensor(anchors),
        clips_to_tensor(positives),
        clips_to_tensor(negatives),
        torch.as_tensor(labels, dtype=torch.long),
    )


def frame_pair_batch(
    anchors: torch.Tensor, positives: torch.Tensor, rng: np.random.Generator
) -> tuple[torch.Tensor, torch.Tensor]:
    """Two same-video frames per batch item, one from each augmented view."""
    batch, length = anchors.shape[0], anchors.shape[1]
    idx_a = rng.integers(0, length, size=batch)
    idx_b = rng.integers(0, length, size=batch)
    rows = torch.arange(batch)
    return (
        anchors[rows, torch.as_tensor(idx_a, dtype=torch.long)],
        positives[rows, torch.as_tensor(idx_b, dtype=torch.long)],
    )


def epoch_batches(n: int, batch_size: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Shuffled index batches covering the dataset once (last may be short)."""
    order = rng.permutation(n)
    return [order[i : i + batch_size] for i in range(0, n, batch_size)]
