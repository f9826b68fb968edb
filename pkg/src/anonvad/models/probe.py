"""Fully connected probe that predicts private attributes from clip features,
used to measure how much private signal the feature extractor leaks."""

from __future__ import annotations

import torch
from torch import nn

from ..errors import ShapeError

PROBE_HIDDEN_DIMS = (2048, 1028, 1028, 512)


class PrivacyProbe(nn.Module):
    def __init__(self, feature_dim: int, n_attributes: int = 7):
        super().__init__()
        self.feature_dim = feature_dim
        self.n_attributes = n_attributes
        dims = (feature_dim, *PROBE_HIDDEN_DIMS)
        layers: list[nn.Module] = []
        for d_in, d_out in zip(dims[:-1], dims[1:]):
            layers.append(nn.Linear(d_in, d_out))
            layers.append(nn.ReLU(inplace=True))
        layers.append(nn.Linear(dims[-1], n_attributes))
        self.stack = nn.Sequential(*layers)

    @property
    def layer_dims(self) -> list[int]:
        """Widths traversed by a feature: input, hidden stack, logits."""
        return [self.feature_dim, *PROBE_HIDDEN_DIMS, self.n_attributes]

    def config(self) -> dict:
        return {
            "arch": "privacy_probe",
            "feature_dim": self.feature_dim,
            "n_attributes": self.n_attributes,
        }

    def forward(self, feature: torch.Tensor) -> torch.Tensor:
        single = feature.dim() == 1
        if single:
            feature = feature.unsqueeze(0)
        if feature.shape[-1] != self.feature_dim:
            raise ShapeError(
                f"expected {self.feature_dim}-dim features, got {tuple(feature.shape)}"
            )
        logits = self.stack(feature)
        return logits.squeeze(0) if single else logits
