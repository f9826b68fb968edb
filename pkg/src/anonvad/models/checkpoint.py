"""Checkpoint format: named float32 parameter arrays plus a text manifest.

Layout of a checkpoint directory:

* ``manifest.txt``  key=value lines (version, config_hash, step, config JSON)
                    followed by one ``tensor=<name>;<shape>;<offset>`` line
                    per parameter, offsets into params.bin
* ``params.bin``    concatenated row-major little-endian float32 arrays

Loading verifies that the stored architecture config hash matches the target
model, so stale checkpoints fail loudly instead of silently misloading.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch

from ..errors import ConfigError, MissingArtifactError
from ..utils import stable_hash


def save_checkpoint(model: torch.nn.Module, directory: Path | str, step: int = 0) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    config = model.config()
    lines = [
        "version=1",
        f"config_hash={stable_hash(config)}",
        f"step={step}",
        f"config={json.dumps(config, sort_keys=True)}",
    ]
    offset = 0
    with open(directory / "params.bin", "wb") as f:
        for name, tensor in model.state_dict().items():
            array = np.ascontiguousarray(tensor.detach().cpu().numpy(), dtype="<f4")
            shape = ",".join(str(d) for d in array.shape) or "scalar"
            lines.append(f"tensor={name};{shape};{offset}")
            f.write(array.tobytes())
            offset += array.nbytes
    (directory / "manifest.txt").write_text("\n".join(lines) + "\n")


def read_manifest(directory: Path | str) -> dict:
    path = Path(directory) / "manifest.txt"
    if not path.exists():
        raise MissingArtifactError(f"checkpoint manifest not found: {path}")
    fields: dict = {"tensors": []}
    for line in path.read_text().splitlines():
        key, _, value = line.partition("=")
        if key == "tensor":
            name, shape, offset = value.split(";")
            dims = () if shape == "scalar" else tuple(int(d) for d in shape.split(","))
            fields["tensors"].append((name, dims, int(offset)))
        elif key:
            fields[key] = value
    return fields


def load_checkpoint(model: torch.nn.Module, directory: Path | str) -> int:
    """Load parameters in place; returns the stored step count."""
    directory = Path(directory)
    manifest = read_manifest(directory)
    expected = stable_hash(model.config())
    if manifest.get("config_hash") != expected:
        raise ConfigError(
            f"checkpoint at {directory} was written for config "
            f"{manifest.get('config')}, which does not match the target model "
            f"{json.dumps(model.config(), sort_keys=True)}"
        )
    blob = (directory / "params.bin").read_bytes()
    state = {}
    for name, dims, offset in manifest["tensors"]:
        count = int(np.prod(dims)) if dims else 1
        array = np.frombuffer(blob, dtype="<f4", count=count, offset=offset).reshape(dims)
        state[name] = torch.from_numpy(array.copy())
    model.load_state_dict(state)
    return int(manifest.get("step", 0))
