import numpy as np
import pytest
import torch

from anonvad.data import synthetic


def rel_err(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-6)


def check_model_gradients(model, scalar_fn, rng, n_coords=20, h=1e-5, rtol=1e-4):
    """Compare autograd parameter gradients against central differences.

    `scalar_fn` recomputes the scalar objective from the model's current
    parameters. The model must already be in float64.
    """
    model.zero_grad()
    scalar_fn().backward()
    params = [p for p in model.parameters() if p.requires_grad]
    for _ in range(n_coords):
        p = params[int(rng.integers(len(params)))]
        idx = tuple(int(rng.integers(s)) for s in p.shape)
        g_auto = float(p.grad[idx])
        with torch.no_grad():
            orig = float(p[idx])
            p[idx] = orig + h
            f_plus = float(scalar_fn())
            p[idx] = orig - h
            f_minus = float(scalar_fn())
            p[idx] = orig
        g_fd = (f_plus - f_minus) / (2 * h)
        assert rel_err(g_auto, g_fd) < rtol or abs(g_auto - g_fd) < 1e-7, (
            f"param grad mismatch at {idx}: autograd {g_auto} vs fd {g_fd}"
        )


def check_input_gradients(scalar_fn, tensors, rng, n_coords=20, h=1e-5, rtol=1e-4):
    """Same check for gradients w.r.t. a list of float64 leaf tensors."""
    for t in tensors:
        t.requires_grad_(True)
        if t.grad is not None:
            t.grad = None
    scalar_fn().backward()
    for _ in range(n_coords):
        t = tensors[int(rng.integers(len(tensors)))]
        idx = tuple(int(rng.integers(s)) for s in t.shape)
        g_auto = float(t.grad[idx])
        with torch.no_grad():
            orig = float(t[idx])
            t[idx] = orig + h
            f_plus = float(scalar_fn())
            t[idx] = orig - h
            f_minus = float(scalar_fn())
            t[idx] = orig
        g_fd = (f_plus - f_minus) / (2 * h)
        assert rel_err(g_auto, g_fd) < rtol or abs(g_auto - g_fd) < 1e-7, (
            f"input grad mismatch at {idx}: autograd {g_auto} vs fd {g_fd}"
        )


@pytest.fixture(scope="session")
def tiny_action_dataset():
    cfg = synthetic.ToyActionConfig(n_classes=4, videos_per_class=4, num_frames=64)
    return synthetic.generate_toy_action_dataset(cfg, seed=11)


@pytest.fixture(scope="session")
def tiny_anomaly_dataset():
    cfg = synthetic.ToyAnomalyConfig(n_normal=4, n_anomalous=4, num_frames=128)
    return synthetic.generate_toy_anomaly_dataset(cfg, seed=12)


@pytest.fixture(scope="session")
def tiny_privacy_dataset():
    cfg = synthetic.ToyPrivacyConfig(n_images=60)
    return synthetic.generate_toy_privacy_dataset(cfg, seed=13)
