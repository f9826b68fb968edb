"""Image encoders: the self-supervised privacy-removal branch and the
supervised attribute classifier used as the attack model at evaluation time.
"""

from __future__ import annotations

import torch
from torch import nn

from .common import check_finite, check_image_shape, group_norm


def _trunk(channels: int, widths: tuple[int, int, int]) -> nn.Sequential:
    w0, w1, w2 = widths
    return nn.Sequential(
        nn.Conv2d(channels, w0, 3, stride=2, padding=1),
        group_norm(w0),
        nn.ReLU(inplace=True),
        nn.Conv2d(w0, w1, 3, stride=2, padding=1),
        group_norm(w1),
        nn.ReLU(inplace=True),
        nn.Conv2d(w1, w2, 3, stride=2, padding=1),
        group_norm(w2),
        nn.ReLU(inplace=True),
        nn.AdaptiveAvgPool2d(1),
    )


class BudgetEncoder(nn.Module):
    """Conv trunk plus a two-layer projection head for contrastive training."""

    def __init__(
        self,
        channels: int = 3,
        resolution: int = 32,
        widths: tuple[int, int, int] = (16, 32, 64),
        projection_dim: int = 32,
    ):
        super().__init__()
        self.channels = channels
        self.resolution = resolution
        self.widths = tuple(widths)
        self.projection_dim = projection_dim
        self.trunk = _trunk(channels, self.widths)
        self.project = nn.Sequential(
            nn.Linear(self.widths[-1], self.widths[-1]),
            nn.ReLU(inplace=True),
            nn.Linear(self.widths[-1], projection_dim),
        )

    def config(self) -> dict:
        return {
            "arch": "budget_encoder",
            "channels": self.channels,
            "resolution": self.resolution,
            "widths": list(self.widths),
            "projection_dim": self.projection_dim,
        }

    def encode_image(self, image: torch.Tensor) -> torch.Tensor:
        """Project a (C, H, W) image or (B, C, H, W) batch to embedding space."""
        single = image.dim() == 3
        if single:
            image = image.unsqueeze(0)
        check_image_shape(image, self.channels, self.resolution, "budget encoder input")
        check_finite(image, "budget encoder input")
        out = self.project(self.trunk(image).flatten(1))
        return out.squeeze(0) if single else out

    def forward(self, image: torch.Tensor) -> torch.Tensor:
        return self.encode_image(image)


class AttributeClassifier(nn.Module):
    """Supervised multi-label head over the same conv trunk; stands in for
    the full-scale attack network in the privacy-leakage protocol."""

    def __init__(
        self,
        channels: int = 3,
        resolution: int = 32,
        n_attributes: int = 7,
        widths: tuple[int, int, int] = (16, 32, 64),
    ):
        super().__init__()
        self.channels = channels
        self.resolution = resolution
        self.n_attributes = n_attributes
        self.widths = tuple(widths)
        self.trunk = _trunk(channels, self.widths)
        self.head = nn.Linear(self.widths[-1], n_attributes)

    def config(self) -> dict:
        return {
            "arch": "attribute_classifier",
            "channels": self.channels,
            "resolution": self.resolution,
            "n_attributes": self.n_attributes,
            "widths": list(self.widths),
        }

    def forward(self, image: torch.Tensor) -> torch.Tensor:
        single = image.dim() == 3
        if single:
            image = image.unsqueeze(0)
        check_image_shape(image, self.channels, self.resolution, "attribute classifier input")
        logits = self.head(self.trunk(image).flatten(1))
        return logits.squeeze(0) if single else logits
