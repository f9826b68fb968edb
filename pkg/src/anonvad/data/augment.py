"""Temporally consistent clip augmentation.

One parameter set is applied to every frame of a clip, so the spatial
transform seen by frame 0 is identical to the one seen by frame L-1. The
pipeline is crop -> resize -> flip -> color jitter -> erase -> clamp. Stages
with identity parameters are skipped so that identity params reproduce the
input bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch

from .containers import VideoClip

DEFAULT_CROP_SCALE = 0.8


@dataclass(frozen=True)
class AugmentationParams:
    """Concrete per-clip augmentation draw.

    `crop` is (top, left, height, width) in input pixels, `erase` is
    (top, left, height, width) in output pixels or None. `contrast` scales
    around mid-gray, `brightness` shifts additively. `seed` records the draw
    for provenance and has no effect on application.
    """

    crop: tuple[int, int, int, int]
    out_size: int
    flip: bool = False
    brightness: float = 0.0
    contrast: float = 1.0
    erase: tuple[int, int, int, int] | None = None
    seed: int | None = None

    @classmethod
    def identity(cls, in_hw: tuple[int, int], out_size: int) -> "AugmentationParams":
        h, w = in_hw
        return cls(crop=(0, 0, h, w), out_size=out_size)

    @classmethod
    def sample(
        cls,
        rng: np.random.Generator,
        in_hw: tuple[int, int],
        out_size: int,
        crop_scale: float = DEFAULT_CROP_SCALE,
        jitter: float = 0.2,
        flip_prob: float = 0.5,
        erase_prob: float = 0.5,
    ) -> "AugmentationParams":
        h, w = in_hw
        ch = max(1, int(round(h * crop_scale)))
        cw = max(1, int(round(w * crop_scale)))
        top = int(rng.integers(0, h - ch + 1))
        left = int(rng.integers(0, w - cw + 1))
        erase = None
        if rng.random() < erase_prob:
            eh = int(rng.integers(max(1, out_size // 8), max(2, out_size // 4)))
            ew = int(rng.integers(max(1, out_size // 8), max(2, out_size // 4)))
            erase = (
                int(rng.integers(0, out_size - eh + 1)),
                int(rng.integers(0, out_size - ew + 1)),
                eh,
                ew,
            )
        return cls(
            crop=(top, left, ch, cw),
            out_size=out_size,
            flip=bool(rng.random() < flip_prob),
            brightness=float(rng.uniform(-jitter, jitter)),
            contrast=float(rng.uniform(1.0 - jitter, 1.0 + jitter)),
            erase=erase,
        )

    @classmethod
    def center_crop(
        cls, in_hw: tuple[int, int], out_size: int, crop_scale: float = DEFAULT_CROP_SCALE
    ) -> "AugmentationParams":
        """Deterministic inference-time params: centered crop, no jitter."""
        h, w = in_hw
        ch = max(1, int(round(h * crop_scale)))
        cw = max(1, int(round(w * crop_scale)))
        return cls(crop=((h - ch) // 2, (w - cw) // 2, ch, cw), out_size=out_size)


def resize_frames(frames: np.ndarray, out_size: int) -> np.ndarray:
    """Bilinear-resize (N, C, H, W) frames; exact passthrough if already sized."""
    if frames.shape[-2] == out_size and frames.shape[-1] == out_size:
        return frames
    t = torch.from_numpy(np.ascontiguousarray(frames, dtype=np.float32))
    out = torch.nn.functional.interpolate(
        t, size=(out_size, out_size), mode="bilinear", align_corners=False
    )
    return out.numpy()


def apply_augmentation(frames: np.ndarray, params: AugmentationParams) -> np.ndarray:
    """Apply one parameter set to a (N, C, H, W) frame stack."""
    h, w = frames.shape[-2], frames.shape[-1]
    top, left, ch, cw = params.crop
    if top < 0 or left < 0 or top + ch > h or left + cw > w or ch < 1 or cw < 1:
        raise ValueError(f"crop rectangle {params.crop} outside {h}x{w} image")
    out = frames[..., top : top + ch, left : left + cw]
    out = resize_frames(out, params.out_size)
    if params.flip:
        out = out[..., ::-1]
    if params.contrast != 1.0 or params.brightness != 0.0:
        out = (out - 0.5) * params.contrast + 0.5 + params.brightness
    if params.erase is not None:
        et, el, eh, ew = params.erase
        if et < 0 or el < 0 or et + eh > params.out_size or el + ew > params.out_size:
            raise ValueError(f"erase rectangle {params.erase} outside {params.out_size} output")
        out = out.copy()
        out[..., et : et + eh, el : el + ew] = 0.0
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def augment_clip(clip: VideoClip, params: AugmentationParams) -> VideoClip:
    """Augmented copy of a clip; every frame gets the same transform."""
    return VideoClip(
        frames=apply_augmentation(clip.frames, params),
        source_id=clip.source_id,
        start_index=clip.start_index,
        skip_rate=clip.skip_rate,
    )


def center_crop_resize(
    frames: np.ndarray, out_size: int, crop_scale: float = DEFAULT_CROP_SCALE
) -> np.ndarray:
    """Deterministic inference preprocessing for (N, C, H, W) or (C, H, W)."""
    single = frames.ndim == 3
    if single:
        frames = frames[None]
    params = AugmentationParams.center_crop(frames.shape[-2:], out_size, crop_scale)
    out = apply_augmentation(frames, params)
    return out[0] if single else out
