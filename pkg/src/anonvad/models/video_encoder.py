"""Spatiotemporal clip encoder with an embedding head and a class head."""

from __future__ import annotations

import torch
from torch import nn

from ..errors import ShapeError
from .common import check_finite, group_norm


class UtilityEncoder(nn.Module):
    """3D-conv stack -> global pool -> clip embedding -> class logits."""

    def __init__(
        self,
        channels: int = 3,
        resolution: int = 32,
        clip_length: int = 16,
        n_classes: int = 4,
        embed_dim: int = 128,
        widths: tuple[int, int, int] = (16, 32, 64),
    ):
        super().__init__()
        self.channels = channels
        self.resolution = resolution
        self.clip_length = clip_length
        self.n_classes = n_classes
        self.embed_dim = embed_dim
        self.widths = tuple(widths)
        w0, w1, w2 = widths
        self.trunk = nn.Sequential(
            nn.Conv3d(channels, w0, 3, stride=(1, 2, 2), padding=1),
            group_norm(w0),
            nn.ReLU(inplace=True),
            nn.Conv3d(w0, w1, 3, stride=2, padding=1),
            group_norm(w1),
            nn.ReLU(inplace=True),
            nn.Conv3d(w1, w2, 3, stride=2, padding=1),
            group_norm(w2),
            nn.ReLU(inplace=True),
            nn.AdaptiveAvgPool3d(1),
        )
        self.embed = nn.Linear(w2, embed_dim)
        self.classify = nn.Linear(embed_dim, n_classes)

    def config(self) -> dict:
        return {
            "arch": "utility_encoder",
            "channels": self.channels,
            "resolution": self.resolution,
            "clip_length": self.clip_length,
            "n_classes": self.n_classes,
            "embed_dim": self.embed_dim,
            "widths": list(self.widths),
        }

    def encode_clip(self, clip: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Embed a (L, C, H, W) clip or a (B, L, C, H, W) batch.

        Returns (embedding, class logits); the embedding feeds both the
        triplet objective and downstream feature extraction.
        """
        single = clip.dim() == 4
        if single:
            clip = clip.unsqueeze(0)
        expected = (self.clip_length, self.channels, self.resolution, self.resolution)
        if clip.dim() != 5 or tuple(clip.shape[1:]) != expected:
            raise ShapeError(f"expected clips shaped {expected}, got {tuple(clip.shape)}")
        check_finite(clip, "utility encoder input")
        x = clip.permute(0, 2, 1, 3, 4)  # conv3d wants (B, C, T, H, W)
        pooled = self.trunk(x).flatten(1)
        embedding = self.embed(pooled)
        logits = self.classify(embedding)
        if single:
            return embedding.squeeze(0), logits.squeeze(0)
        return embedding, logits

    def forward(self, clip: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        return self.encode_clip(clip)
