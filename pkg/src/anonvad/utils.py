"""Seeding, hashing and small shared helpers."""

from __future__ import annotations

import hashlib
import json
import random

import numpy as np
import torch


def seed_everything(seed: int) -> np.random.Generator:
    """Seed torch and the stdlib RNG, return a fresh numpy Generator.

    Model parameter init and dropout draw from torch's global RNG; data
    sampling must draw from the returned Generator so parallel readers never
    share mutable state.
    """
    random.seed(seed)
    torch.manual_seed(seed)
    return np.random.default_rng(seed)


def enable_reference_mode() -> None:
    """Force single-threaded deterministic execution for bit-exact reruns."""
    torch.set_num_threads(1)
    torch.use_deterministic_algorithms(True)


def stable_hash(obj) -> str:
    """sha256 hex digest of a JSON-serializable object, key-order independent."""
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def derive_seed(seed: int, label: str) -> int:
    """Stage-specific seed so pipeline stages do not share RNG streams."""
    digest = hashlib.sha256(f"{seed}:{label}".encode("utf-8")).hexdigest()
    return int(digest[:8], 16)


def file_hash(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def to_tensor(array, dtype=torch.float32) -> torch.Tensor:
    if isinstance(array, torch.Tensor):
        return array.to(dtype)
    arr = np.ascontiguousarray(array)
    if not arr.flags.writeable:
        arr = arr.copy()  # frozen dataset arrays; torch refuses read-only views
    return torch.as_tensor(arr, dtype=dtype)
