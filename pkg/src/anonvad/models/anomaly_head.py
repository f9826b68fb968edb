"""Segment scorer over extracted feature sequences.

Follows the glance-and-focus recipe: the per-segment feature norm (scaled by
0.1) is appended to the features, then a shortcut convolution, a single-head
self-attention convolution and a feed-forward stack produce per-segment
representations. Each segment yields a sigmoid score and the L2 norm of its
representation as the magnitude output.
"""

from __future__ import annotations

import math

import torch
from torch import nn

from ..errors import ShapeError

MAGNITUDE_APPEND_WEIGHT = 0.1


class AnomalyHead(nn.Module):
    def __init__(self, feature_dim: int = 128, hidden_dim: int = 64, feature_dropout: float = 0.7):
        super().__init__()
        self.feature_dim = feature_dim
        self.hidden_dim = hidden_dim
        self.feature_dropout = feature_dropout
        self.shortcut = nn.Conv1d(feature_dim + 1, hidden_dim, 3, padding=1)
        self.to_query = nn.Conv1d(hidden_dim, hidden_dim, 1)
        self.to_key = nn.Conv1d(hidden_dim, hidden_dim, 1)
        self.to_value = nn.Conv1d(hidden_dim, hidden_dim, 1)
        self.ffn = nn.Sequential(
            nn.Linear(hidden_dim, hidden_dim * 2),
            nn.ReLU(inplace=True),
            nn.Linear(hidden_dim * 2, hidden_dim),
        )
        self.score_head = nn.Linear(hidden_dim, 1)

    def config(self) -> dict:
        return {
            "arch": "anomaly_head",
            "feature_dim": self.feature_dim,
            "hidden_dim": self.hidden_dim,
            "feature_dropout": self.feature_dropout,
        }

    def amplify(self, features: torch.Tensor) -> torch.Tensor:
        """Append the scaled per-segment feature norm as an extra channel."""
        norm = features.norm(dim=-1, keepdim=True)
        return torch.cat([features, MAGNITUDE_APPEND_WEIGHT * norm], dim=-1)

    def score_segments(self, features: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        """Score a (S, C) sequence or (B, S, C) batch.

        Returns (scores in [0, 1], magnitudes >= 0), both shaped like the
        input without the channel axis.
        """
        single = features.dim() == 2
        if single:
            features = features.unsqueeze(0)
        if features.dim() != 3 or features.shape[-1] != self.feature_dim:
            raise ShapeError(
                f"expected (B, S, {self.feature_dim}) features, got {tuple(features.shape)}"
            )
        if features.shape[1] == 0:
            raise ValueError("empty feature sequence: need at least one segment")
        if self.training and self.feature_dropout > 0:
            features = nn.functional.dropout(features, p=self.feature_dropout)

        x = self.amplify(features).transpose(1, 2)  # (B, C+1, S)
        h = torch.relu(self.shortcut(x))  # (B, D, S)
        q, k, v = self.to_query(h), self.to_key(h), self.to_value(h)
        attn = torch.softmax(
            q.transpose(1, 2) @ k / math.sqrt(self.hidden_dim), dim=-1
        )  # (B, S, S)
        h = h.transpose(1, 2) + attn @ v.transpose(1, 2)  # (B, S, D)
        h = h + self.ffn(h)
        scores = torch.sigmoid(self.score_head(h)).squeeze(-1)
        magnitudes = h.norm(dim=-1)
        if single:
            return scores.squeeze(0), magnitudes.squeeze(0)
        return scores, magnitudes

    def forward(self, features: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        return self.score_segments(features)
