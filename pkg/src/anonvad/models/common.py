"""Shared building blocks for the small reference networks."""

from __future__ import annotations

import torch
from torch import nn

from ..errors import NumericError, ShapeError


def group_norm(channels: int) -> nn.GroupNorm:
    """GroupNorm keeps train/eval behavior identical, unlike BatchNorm."""
    groups = 4 if channels % 4 == 0 else 1
    return nn.GroupNorm(groups, channels)


def check_finite(x: torch.Tensor, what: str) -> None:
    if not torch.isfinite(x).all():
        raise NumericError(f"non-finite values in {what}")


def check_image_shape(x: torch.Tensor, channels: int, resolution: int, what: str) -> None:
    if x.dim() < 3 or tuple(x.shape[-3:]) != (channels, resolution, resolution):
        raise ShapeError(
            f"{what}: expected trailing dims ({channels}, {resolution}, {resolution}), "
            f"got {tuple(x.shape)}"
        )
