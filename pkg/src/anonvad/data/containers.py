"""In-memory containers for videos, clips and privacy-labelled images.

All pixel arrays are float32 in [0, 1], laid out (T, C, H, W) for videos and
(C, H, W) for single images. Containers are frozen and their arrays are made
read-only, so datasets are safe for concurrent readers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ShapeError


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Video:
    """One video with an integer label.

    `label` is an action-class index or a 0/1 anomaly flag depending on the
    dataset role. `frame_mask` (per-frame 0/1 ground truth) is carried for
    evaluation only; training code never reads it. `actor_boxes` holds the
    per-frame (x, y, w, h) box of the moving actor for obfuscation baselines.
    """

    frames: np.ndarray
    video_id: str
    label: int
    frame_mask: np.ndarray | None = None
    actor_boxes: np.ndarray | None = None

    def __post_init__(self):
        if self.frames.ndim != 4:
            raise ShapeError(f"video frames must be (T, C, H, W), got {self.frames.shape}")
        lo, hi = float(self.frames.min()), float(self.frames.max())
        if lo < 0.0 or hi > 1.0:
            raise ValueError(f"pixel values outside [0, 1]: min={lo}, max={hi}")
        object.__setattr__(self, "frames", _freeze(self.frames))
        if self.frame_mask is not None:
            if self.frame_mask.shape != (self.frames.shape[0],):
                raise ShapeError(
                    f"frame_mask length {self.frame_mask.shape} != T {self.frames.shape[0]}"
                )
            object.__setattr__(self, "frame_mask", _freeze(self.frame_mask.astype(np.uint8)))
        if self.actor_boxes is not None:
            object.__setattr__(self, "actor_boxes", _freeze(self.actor_boxes.astype(np.int32)))

    @property
    def num_frames(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class VideoClip:
    """Fixed-length stack of frames cut from a source video."""

    frames: np.ndarray
    source_id: str
    start_index: int
    skip_rate: int

    def __post_init__(self):
        if self.frames.ndim != 4:
            raise ShapeError(f"clip frames must be (L, C, H, W), got {self.frames.shape}")
        object.__setattr__(self, "frames", _freeze(self.frames))

    @property
    def length(self) -> int:
        return self.frames.shape[0]


@dataclass(frozen=True)
class ClipTriplet:
    """Anchor/positive at one timestamp, negative at another, all same video."""

    anchor: VideoClip
    positive: VideoClip
    negative: VideoClip

    def __post_init__(self):
        if self.anchor.source_id != self.positive.source_id:
            raise ValueError("anchor and positive must come from the same video")
        if self.anchor.start_index != self.positive.start_index:
            raise ValueError("positive must share the anchor timestamp")
        if self.negative.source_id != self.anchor.source_id:
            raise ValueError("negative must come from the same video")
        if self.negative.start_index == self.anchor.start_index:
            raise ValueError("negative must come from a different timestamp")


@dataclass(frozen=True)
class PrivacyImage:
    """Single image with a multi-label private-attribute vector.

    `region_boxes` holds the (x, y, w, h) rectangles where present attributes
    are rendered; obfuscation baselines use them as ground-truth detections.
    """

    image: np.ndarray
    labels: np.ndarray
    image_id: str
    region_boxes: np.ndarray | None = None

    def __post_init__(self):
        if self.image.ndim != 3:
            raise ShapeError(f"image must be (C, H, W), got {self.image.shape}")
        object.__setattr__(self, "image", _freeze(self.image))
        object.__setattr__(self, "labels", _freeze(self.labels.astype(np.uint8)))
        if self.region_boxes is not None:
            object.__setattr__(
                self, "region_boxes", _freeze(self.region_boxes.astype(np.int32))
            )


@dataclass(frozen=True)
class VideoDataset:
    """Immutable collection of same-shaped videos plus its generation facts."""

    videos: tuple[Video, ...]
    kind: str
    n_classes: int
    resolution: int
    num_frames: int

    def __post_init__(self):
        object.__setattr__(self, "videos", tuple(self.videos))

    def __len__(self) -> int:
        return len(self.videos)

    def __iter__(self):
        return iter(self.videos)

    def by_id(self, video_id: str) -> Video:
        for v in self.videos:
            if v.video_id == video_id:
                return v
        raise KeyError(video_id)


@dataclass(frozen=True)
class PrivacyDataset:
    """Immutable collection of privacy-labelled images."""

    images: tuple[PrivacyImage, ...]
    n_attributes: int
    resolution: int

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))

    def __len__(self) -> int:
        return len(self.images)

    def __iter__(self):
        return iter(self.images)

    def label_matrix(self) -> np.ndarray:
        return np.stack([img.labels for img in self.images]).astype(np.float64)
