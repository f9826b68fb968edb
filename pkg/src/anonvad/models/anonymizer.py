"""Frame anonymizer: a small U-shaped encoder-decoder.

Operates strictly framewise (clips are flattened into a frame batch), keeps
the input shape and squashes every output pixel into (0, 1) with a sigmoid.
"""

from __future__ import annotations

import torch
from torch import nn

from .common import check_image_shape, group_norm


def _conv_block(in_ch: int, out_ch: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_ch, out_ch, 3, padding=1),
        group_norm(out_ch),
        nn.ReLU(inplace=True),
    )


class Anonymizer(nn.Module):
    def __init__(self, channels: int = 3, resolution: int = 32, base_width: int = 8):
        super().__init__()
        if resolution % 4 != 0:
            raise ValueError(f"resolution must be divisible by 4, got {resolution}")
        self.channels = channels
        self.resolution = resolution
        self.base_width = base_width
        w = base_width
        self.enc1 = _conv_block(channels, w)
        self.enc2 = _conv_block(w, 2 * w)
        self.bottleneck = _conv_block(2 * w, 4 * w)
        self.pool = nn.MaxPool2d(2)
        self.up2 = nn.ConvTranspose2d(4 * w, 2 * w, 2, stride=2)
        self.dec2 = _conv_block(4 * w, 2 * w)
        self.up1 = nn.ConvTranspose2d(2 * w, w, 2, stride=2)
        self.dec1 = _conv_block(2 * w, w)
        self.head = nn.Conv2d(w, channels, 1)

    def config(self) -> dict:
        return {
            "arch": "anonymizer",
            "channels": self.channels,
            "resolution": self.resolution,
            "base_width": self.base_width,
        }

    def _run(self, flat: torch.Tensor) -> torch.Tensor:
        e1 = self.enc1(flat)
        e2 = self.enc2(self.pool(e1))
        b = self.bottleneck(self.pool(e2))
        d2 = self.dec2(torch.cat([self.up2(b), e2], dim=1))
        d1 = self.dec1(torch.cat([self.up1(d2), e1], dim=1))
        return torch.sigmoid(self.head(d1))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Anonymize frames; any leading dims are treated as batch.

        In eval mode frames run one at a time so the output is bit-identical
        to stacking single-frame calls (and independent of batch chunking);
        training batches them for speed, where ULP-level differences between
        BLAS paths are irrelevant.
        """
        check_image_shape(x, self.channels, self.resolution, "anonymizer input")
        lead = x.shape[:-3]
        flat = x.reshape(-1, *x.shape[-3:])
        if self.training or flat.shape[0] == 1:
            out = self._run(flat)
        else:
            out = torch.cat([self._run(flat[i : i + 1]) for i in range(flat.shape[0])])
        return out.reshape(*lead, *x.shape[-3:])
