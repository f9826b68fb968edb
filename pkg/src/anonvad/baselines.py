"""Classical privacy-preservation transforms, pluggable wherever the learned
anonymizer is used.

All transforms are framewise, deterministic, keep shape and the [0, 1] range.
Down-up resizing (rather than feeding a low resolution directly) keeps one
model architecture across methods; the information loss is the transform's
effect. Blurring/blackening act only inside person boxes, supplied by a
`BoxProvider` (ground-truth boxes for synthetic data; a real detector would
implement the same interface).
"""

from __future__ import annotations

from typing import Protocol, Sequence

import numpy as np
import torch

from .data.containers import Video

BLUR_KERNEL_SIZE = 13
BLUR_SIGMA = 10.0

Box = tuple[int, int, int, int]  # x, y, w, h in pixels


class BoxProvider(Protocol):
    """Source of person bounding boxes for obfuscation baselines."""

    def boxes_for(self, video_id: str, frame_index: int) -> list[Box]: ...


class GroundTruthBoxProvider:
    """Serves the synthetic generators' actor boxes."""

    def __init__(self, videos: Sequence[Video]):
        self._boxes = {
            v.video_id: v.actor_boxes for v in videos if v.actor_boxes is not None
        }

    def boxes_for(self, video_id: str, frame_index: int) -> list[Box]:
        boxes = self._boxes.get(video_id)
        if boxes is None or frame_index >= len(boxes):
            return []
        x, y, w, h = (int(v) for v in boxes[frame_index])
        return [(x, y, w, h)]


class FullFrameBoxProvider:
    """One box covering everything; used by the blacken-everything control."""

    def boxes_for(self, video_id: str, frame_index: int) -> list[Box]:
        return [(0, 0, 1 << 30, 1 << 30)]


def _clip_box(box: Box, height: int, width: int) -> Box | None:
    x, y, w, h = box
    x0, y0 = max(0, x), max(0, y)
    x1, y1 = min(width, x + w), min(height, y + h)
    if x1 <= x0 or y1 <= y0:
        return None
    return (x0, y0, x1 - x0, y1 - y0)


def downsample(frames: np.ndarray, factor: int) -> np.ndarray:
    """Bilinear down-resize by `factor` then up-resize back to the input size."""
    if factor not in (2, 4):
        raise ValueError(f"downsample factor must be 2 or 4, got {factor}")
    h, w = frames.shape[-2], frames.shape[-1]
    if h % factor or w % factor:
        raise ValueError(f"resolution {h}x{w} not divisible by factor {factor}")
    single = frames.ndim == 3
    x = torch.from_numpy(np.ascontiguousarray(frames, dtype=np.float32))
    if single:
        x = x.unsqueeze(0)
    down = torch.nn.functional.interpolate(
        x, size=(h // factor, w // factor), mode="bilinear", align_corners=False
    )
    up = torch.nn.functional.interpolate(down, size=(h, w), mode="bilinear", align_corners=False)
    out = up.clamp(0.0, 1.0).numpy()
    return out[0] if single else out


def _boxes_per_frame(frames: np.ndarray, boxes) -> list[list[Box]]:
    n = frames.shape[0]
    if not boxes:
        return [[] for _ in range(n)]
    if isinstance(boxes[0], (tuple, list, np.ndarray)) and np.ndim(boxes[0]) == 1:
        return [list(boxes) for _ in range(n)]
    if len(boxes) != n:
        raise ValueError(f"{len(boxes)} per-frame box lists for {n} frames")
    return [list(b) for b in boxes]


def obfuscate_blacken(frames: np.ndarray, boxes) -> np.ndarray:
    """Zero the pixels inside each box; everything else is untouched.

    `boxes` is either one box list applied to every frame or a per-frame list
    of box lists.
    """
    single = frames.ndim == 3
    stack = frames[None] if single else frames
    out = stack.copy()
    h, w = stack.shape[-2], stack.shape[-1]
    for t, frame_boxes in enumerate(_boxes_per_frame(stack, boxes)):
        for box in frame_boxes:
            clipped = _clip_box(box, h, w)
            if clipped is not None:
                x, y, bw, bh = clipped
                out[t, :, y : y + bh, x : x + bw] = 0.0
    return out[0] if single else out


def gaussian_kernel(size: int = BLUR_KERNEL_SIZE, sigma: float = BLUR_SIGMA) -> np.ndarray:
    """Normalized 1D Gaussian taps."""
    offsets = np.arange(size, dtype=np.float64) - (size - 1) / 2.0
    kernel = np.exp(-(offsets**2) / (2.0 * sigma**2))
    return kernel / kernel.sum()


def _gaussian_blur_frame(frame: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Separable blur of one (C, H, W) frame with reflective padding."""
    pad = kernel.shape[0] // 2
    out = np.empty_like(frame)
    for c in range(frame.shape[0]):
        padded = np.pad(frame[c], pad, mode="reflect")
        rows = np.apply_along_axis(np.convolve, 1, padded, kernel, mode="valid")
        out[c] = np.apply_along_axis(np.convolve, 0, rows, kernel, mode="valid")
    return out


def obfuscate_blur(
    frames: np.ndarray, boxes, size: int = BLUR_KERNEL_SIZE, sigma: float = BLUR_SIGMA
) -> np.ndarray:
    """Replace pixels inside each box with their Gaussian-blurred values."""
    single = frames.ndim == 3
    stack = frames[None] if single else frames
    out = stack.copy()
    h, w = stack.shape[-2], stack.shape[-1]
    kernel = gaussian_kernel(size, sigma)
    per_frame = _boxes_per_frame(stack, boxes)
    for t, frame_boxes in enumerate(per_frame):
        clipped = [b for b in (_clip_box(box, h, w) for box in frame_boxes) if b is not None]
        if not clipped:
            continue
        blurred = _gaussian_blur_frame(stack[t].astype(np.float64), kernel)
        for x, y, bw, bh in clipped:
            out[t, :, y : y + bh, x : x + bw] = blurred[:, y : y + bh, x : x + bw].astype(
                stack.dtype
            )
    return np.clip(out[0] if single else out, 0.0, 1.0)


def apply_video_transform(video: Video, name: str, provider: BoxProvider | None) -> np.ndarray:
    """Apply a named baseline to every frame of a video, in raw coordinates."""
    if name == "downsample2":
        return downsample(video.frames, 2)
    if name == "downsample4":
        return downsample(video.frames, 4)
    if name == "blacken_all":
        return obfuscate_blacken(video.frames, [(0, 0, 1 << 30, 1 << 30)])
    if name in ("blacken", "blur"):
        if provider is None:
            raise ValueError(f"baseline '{name}' needs a box provider")
        boxes = [provider.boxes_for(video.video_id, t) for t in range(video.num_frames)]
        fn = obfuscate_blacken if name == "blacken" else obfuscate_blur
        return fn(video.frames, boxes)
    raise ValueError(
        f"unknown baseline '{name}'; expected downsample2, downsample4, "
        "blacken, blacken_all or blur"
    )


BASELINE_NAMES = ("downsample2", "downsample4", "blacken", "blacken_all", "blur")
