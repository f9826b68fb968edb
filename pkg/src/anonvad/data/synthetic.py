"""Synthetic dataset generators.

Three families share one visual vocabulary so every downstream claim is
testable without external data:

* action videos: a bright square drifts in a class-specific direction over a
  per-video background shade, with a static per-video texture patch acting as
  the private content a budget branch can latch onto;
* anomaly videos: the same scene recipe, where anomalous videos contain a
  temporally localized burst (speeding, jittering actor plus an intruder
  blob) and carry a per-frame mask for evaluation only;
* privacy images: still images where each of the seven attributes is a
  distinct texture rendered at a fixed location, present iff the label is 1.

The texture bank is shared between action videos and privacy images, so an
anonymizer that learns to scrub static textures on the action set transfers
to the privacy set. Generators are pure functions of (config, seed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .containers import PrivacyDataset, PrivacyImage, Video, VideoDataset

N_PATTERNS = 7
PATTERN_FG = 0.92
PATTERN_BG = 0.12


def render_pattern(kind: int, size: int, phase: int = 0) -> np.ndarray:
    """One of seven binary textures as a (size, size) float mask."""
    yy, xx = np.mgrid[0:size, 0:size]
    yy = yy + phase
    xx = xx + phase
    if kind == 0:  # horizontal stripes, period 4
        mask = (yy // 2) % 2 == 0
    elif kind == 1:  # vertical stripes, period 4
        mask = (xx // 2) % 2 == 0
    elif kind == 2:  # 2px checkerboard
        mask = ((yy // 2) + (xx // 2)) % 2 == 0
    elif kind == 3:  # dot grid
        mask = (yy % 4 < 2) & (xx % 4 < 2)
    elif kind == 4:  # diagonal stripes
        mask = ((yy + xx) // 2) % 2 == 0
    elif kind == 5:  # concentric rings
        c = (size - 1) / 2.0
        r = np.sqrt((yy - phase - c) ** 2 + (xx - phase - c) ** 2)
        mask = (r // 2) % 2 == 0
    elif kind == 6:  # solid cross
        third = size // 3
        mask = ((yy - phase >= third) & (yy - phase < 2 * third)) | (
            (xx - phase >= third) & (xx - phase < 2 * third)
        )
    else:
        raise ConfigError(f"pattern kind must be in [0, {N_PATTERNS}), got {kind}")
    return np.where(mask, PATTERN_FG, PATTERN_BG).astype(np.float32)


def _stamp(canvas: np.ndarray, patch: np.ndarray, top: int, left: int, color: np.ndarray):
    """Write a gray patch into (C, H, W) canvas, tinted per channel."""
    size = patch.shape[0]
    canvas[:, top : top + size, left : left + size] = patch[None] * color[:, None, None]


def _roll_shape(base: np.ndarray, y: float, x: float) -> np.ndarray:
    """Translate a (H, W) stencil toroidally to integer position (y, x)."""
    return np.roll(np.roll(base, int(round(y)) % base.shape[0], axis=0),
                   int(round(x)) % base.shape[1], axis=1)


@dataclass(frozen=True)
class ToyActionConfig:
    n_classes: int = 4
    videos_per_class: int = 16
    resolution: int = 32
    num_frames: int = 64
    channels: int = 3
    patch_size: int = 12
    actor_size: int = 8

    def __post_init__(self):
        if not (1 <= self.n_classes <= 8):
            raise ConfigError(f"n_classes must be in [1, 8], got {self.n_classes}")
        if self.patch_size >= self.resolution or self.actor_size >= self.resolution:
            raise ConfigError("patch and actor must be smaller than the frame")


def _class_direction(class_index: int, n_classes: int) -> tuple[float, float]:
    angle = 2.0 * np.pi * class_index / n_classes
    return float(np.sin(angle)), float(np.cos(angle))


def _actor_stencil(resolution: int, actor_size: int) -> np.ndarray:
    base = np.zeros((resolution, resolution), dtype=np.float32)
    base[:actor_size, :actor_size] = 1.0
    return base


def _render_scene_video(
    rng: np.random.Generator,
    cfg_resolution: int,
    channels: int,
    num_frames: int,
    actor_size: int,
    patch_size: int,
    direction: tuple[float, float],
    speed: float,
    pattern_kind: int,
    event_window: tuple[int, int] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Shared scene renderer; returns (frames [T,C,H,W], actor boxes [T,4])."""
    res = cfg_resolution
    background = float(rng.uniform(0.15, 0.35))
    tint = rng.uniform(0.7, 1.0, size=channels).astype(np.float32)
    actor_color = rng.uniform(0.75, 1.0, size=channels).astype(np.float32)
    patch = render_pattern(pattern_kind, patch_size, phase=int(rng.integers(0, 4)))
    corner = int(rng.integers(0, 4))
    ptop = 1 if corner in (0, 1) else res - patch_size - 1
    pleft = 1 if corner in (0, 2) else res - patch_size - 1

    stencil = _actor_stencil(res, actor_size)
    y = float(rng.uniform(0, res))
    x = float(rng.uniform(0, res))
    dy, dx = direction
    intruder = None
    if event_window is not None:
        iy, ix = float(rng.uniform(0, res)), float(rng.uniform(0, res))
        intruder_size = min(res - 1, actor_size + 4)
        intruder_stencil = np.zeros((res, res), dtype=np.float32)
        intruder_stencil[:intruder_size, :intruder_size] = 1.0
        intruder = [iy, ix, intruder_stencil]

    frames = np.empty((num_frames, channels, res, res), dtype=np.float32)
    boxes = np.zeros((num_frames, 4), dtype=np.int32)
    for t in range(num_frames):
        in_event = event_window is not None and event_window[0] <= t < event_window[1]
        frame = np.full((channels, res, res), background, dtype=np.float32)
        frame *= tint[:, None, None]
        _stamp(frame, patch, ptop, pleft, tint)

        mask = _roll_shape(stencil, y, x)
        frame = frame * (1.0 - mask[None]) + mask[None] * actor_color[:, None, None]
        if in_event and intruder is not None:
            imask = _roll_shape(intruder[2], intruder[0], intruder[1])
            frame = frame * (1.0 - imask[None]) + imask[None] * 0.98
            intruder[0] += float(rng.uniform(-6, 6))
            intruder[1] += float(rng.uniform(-6, 6))

        frames[t] = np.clip(frame, 0.0, 1.0)
        by, bx = int(round(y)) % res, int(round(x)) % res
        boxes[t] = (bx, by, min(actor_size, res - bx), min(actor_size, res - by))

        if in_event:
            jitter = rng.uniform(-1.0, 1.0, size=2)
            y += 5.0 * speed * dy + float(jitter[0])
            x += 5.0 * speed * dx + float(jitter[1])
        else:
            y += speed * dy
            x += speed * dx
    return frames, boxes


def generate_toy_action_dataset(config: ToyActionConfig, seed: int) -> VideoDataset:
    """Motion-direction classification videos with private static textures."""
    rng = np.random.default_rng(seed)
    videos = []
    for class_index in range(config.n_classes):
        direction = _class_direction(class_index, config.n_classes)
        for i in range(config.videos_per_class):
            vid = len(videos)
            frames, boxes = _render_scene_video(
                rng,
                config.resolution,
                config.channels,
                config.num_frames,
                config.actor_size,
                config.patch_size,
                direction,
                speed=float(rng.uniform(1.6, 2.4)),
                pattern_kind=vid % N_PATTERNS,
            )
            videos.append(
                Video(
                    frames=frames,
                    video_id=f"action_c{class_index}_{i:03d}",
                    label=class_index,
                    actor_boxes=boxes,
                )
            )
    return VideoDataset(
        videos=tuple(videos),
        kind="action",
        n_classes=config.n_classes,
        resolution=config.resolution,
        num_frames=config.num_frames,
    )


@dataclass(frozen=True)
class ToyAnomalyConfig:
    n_normal: int = 24
    n_anomalous: int = 24
    resolution: int = 32
    num_frames: int = 128
    channels: int = 3
    patch_size: int = 12
    actor_size: int = 8
    event_frames: int = 32

    def __post_init__(self):
        if self.event_frames >= self.num_frames:
            raise ConfigError("event window must be shorter than the video")


def generate_toy_anomaly_dataset(config: ToyAnomalyConfig, seed: int) -> VideoDataset:
    """Weakly labelled videos; anomalous ones contain a localized motion burst.

    The per-frame mask marks the inserted event window exactly. It is stored
    for the evaluation stage only and must never feed a training objective.
    """
    rng = np.random.default_rng(seed)
    videos = []
    for i in range(config.n_normal + config.n_anomalous):
        anomalous = i >= config.n_normal
        angle = float(rng.uniform(0, 2 * np.pi))
        direction = (float(np.sin(angle)), float(np.cos(angle)))
        event = None
        mask = np.zeros(config.num_frames, dtype=np.uint8)
        if anomalous:
            margin = 8
            t0 = int(rng.integers(margin, config.num_frames - config.event_frames - margin + 1))
            event = (t0, t0 + config.event_frames)
            mask[t0 : t0 + config.event_frames] = 1
        frames, boxes = _render_scene_video(
            rng,
            config.resolution,
            config.channels,
            config.num_frames,
            config.actor_size,
            config.patch_size,
            direction,
            speed=float(rng.uniform(0.8, 1.2)),
            pattern_kind=i % N_PATTERNS,
            event_window=event,
        )
        name = "anom" if anomalous else "norm"
        videos.append(
            Video(
                frames=frames,
                video_id=f"anomaly_{name}_{i:03d}",
                label=int(anomalous),
                frame_mask=mask,
                actor_boxes=boxes,
            )
        )
    return VideoDataset(
        videos=tuple(videos),
        kind="anomaly",
        n_classes=2,
        resolution=config.resolution,
        num_frames=config.num_frames,
    )


@dataclass(frozen=True)
class ToyPrivacyConfig:
    n_images: int = 400
    resolution: int = 32
    channels: int = 3
    n_attributes: int = 7
    attribute_prob: float = 0.4
    region_size: int = 10

    def __post_init__(self):
        if not (1 <= self.n_attributes <= N_PATTERNS):
            raise ConfigError(f"n_attributes must be in [1, {N_PATTERNS}]")
        if not (0.0 < self.attribute_prob < 1.0):
            raise ConfigError("attribute_prob must be in (0, 1)")


def attribute_regions(config: ToyPrivacyConfig) -> list[tuple[int, int]]:
    """Fixed (top, left) anchor per attribute on a 3x3 lattice."""
    res, size = config.resolution, config.region_size
    step = max(1, (res - size - 2) // 2)
    anchors = [(1 + r * step, 1 + c * step) for r in range(3) for c in range(3)]
    return anchors[: config.n_attributes]


def generate_toy_privacy_dataset(config: ToyPrivacyConfig, seed: int) -> PrivacyDataset:
    """Multi-label images: attribute k present iff texture k is rendered."""
    rng = np.random.default_rng(seed)
    regions = attribute_regions(config)
    images = []
    for i in range(config.n_images):
        labels = (rng.random(config.n_attributes) < config.attribute_prob).astype(np.uint8)
        background = float(rng.uniform(0.1, 0.4))
        tint = rng.uniform(0.7, 1.0, size=config.channels).astype(np.float32)
        img = np.full(
            (config.channels, config.resolution, config.resolution), background, dtype=np.float32
        )
        img *= tint[:, None, None]
        img += rng.normal(0.0, 0.02, size=img.shape).astype(np.float32)
        boxes = []
        for k, present in enumerate(labels):
            if present:
                patch = render_pattern(k, config.region_size, phase=int(rng.integers(0, 4)))
                top, left = regions[k]
                _stamp(img, patch, top, left, tint)
                boxes.append((left, top, config.region_size, config.region_size))
        images.append(
            PrivacyImage(
                image=np.clip(img, 0.0, 1.0),
                labels=labels,
                image_id=f"privacy_{i:04d}",
                region_boxes=np.array(boxes, dtype=np.int32).reshape(-1, 4),
            )
        )
    return PrivacyDataset(
        images=tuple(images),
        n_attributes=config.n_attributes,
        resolution=config.resolution,
    )
