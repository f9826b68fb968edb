"""Clip and triplet sampling.

A triplet pairs two differently augmented views of the clip at one timestamp
with a clip of the same video at a different timestamp. The negative may
overlap the anchor window, but the source video must be long enough for two
disjoint windows; shorter videos raise rather than silently relaxing.
"""

from __future__ import annotations

import numpy as np

from ..errors import SamplingError
from .augment import AugmentationParams, augment_clip
from .containers import ClipTriplet, Video, VideoClip

DEFAULT_CLIP_LENGTH = 16
DEFAULT_SKIP_RATE = 2


def clip_span(length: int, skip: int) -> int:
    """Number of source frames covered by a clip window."""
    return (length - 1) * skip + 1


def sample_clip(video: Video, start: int, length: int, skip: int) -> VideoClip:
    """Cut frames start, start+skip, ... start+(length-1)*skip from a video."""
    if length < 1 or skip < 1:
        raise SamplingError(f"length and skip must be >= 1, got length={length}, skip={skip}")
    last = start + (length - 1) * skip
    if start < 0 or last >= video.num_frames:
        raise SamplingError(
            f"clip window [{start}, {last}] out of range for video "
            f"'{video.video_id}' with {video.num_frames} frames"
        )
    frames = video.frames[start : last + 1 : skip].copy()
    return VideoClip(frames=frames, source_id=video.video_id, start_index=start, skip_rate=skip)


def valid_clip_starts(video: Video, length: int, skip: int) -> range:
    return range(0, video.num_frames - clip_span(length, skip) + 1)


def sample_triplet(
    video: Video,
    anchor_start: int,
    aug_anchor: AugmentationParams,
    aug_positive: AugmentationParams,
    rng: np.random.Generator,
    length: int = DEFAULT_CLIP_LENGTH,
    skip: int = DEFAULT_SKIP_RATE,
    negative_distance: int | None = None,
) -> ClipTriplet:
    """Draw (anchor, positive, negative) clips from one video.

    Anchor and positive share `anchor_start` and differ only by their
    augmentation params; the negative starts elsewhere and reuses the anchor
    params. With `negative_distance` set, the negative starts exactly that
    many frames away (either side, chosen by `rng` when both fit); otherwise
    its start is uniform over all valid positions other than the anchor's.
    """
    span = clip_span(length, skip)
    if video.num_frames < 2 * span:
        raise SamplingError(
            f"video '{video.video_id}' has {video.num_frames} frames; "
            f"need {2 * span} for two disjoint {length}x{skip} clip windows"
        )
    starts = valid_clip_starts(video, length, skip)
    if anchor_start not in starts:
        raise SamplingError(
            f"anchor start {anchor_start} invalid for video '{video.video_id}' "
            f"({video.num_frames} frames, window span {span})"
        )
    if negative_distance is not None:
        if negative_distance == 0:
            raise SamplingError("negative_distance must be non-zero")
        candidates = [
            s
            for s in (anchor_start - negative_distance, anchor_start + negative_distance)
            if s in starts
        ]
        if not candidates:
            raise SamplingError(
                f"no valid negative at distance {negative_distance} from anchor "
                f"{anchor_start} in video '{video.video_id}'"
            )
    else:
        candidates = [s for s in starts if s != anchor_start]
    negative_start = int(candidates[rng.integers(0, len(candidates))])

    anchor_raw = sample_clip(video, anchor_start, length, skip)
    negative_raw = sample_clip(video, negative_start, length, skip)
    return ClipTriplet(
        anchor=augment_clip(anchor_raw, aug_anchor),
        positive=augment_clip(anchor_raw, aug_positive),
        negative=augment_clip(negative_raw, aug_anchor),
    )
