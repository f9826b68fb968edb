"""Privacy evaluation trainings: the image-space attack model and the
feature-space leakage probe."""

from __future__ import annotations

import logging

import numpy as np
import torch

from ..baselines import downsample, obfuscate_blacken, obfuscate_blur
from ..data.augment import center_crop_resize
from ..data.containers import PrivacyDataset
from ..errors import ConfigError, NumericError
from ..evaluation.metrics import cmap
from ..models import Anonymizer, UtilityEncoder
from ..utils import derive_seed, seed_everything, to_tensor
from .batches import epoch_batches
from .config import TrainConfig
from .log import TrainLog

logger = logging.getLogger(__name__)

PRIVACY_TRANSFORMS = (
    "raw",
    "anon",
    "downsample2",
    "downsample4",
    "blacken",
    "blacken_all",
    "blur",
)


def transform_privacy_images(
    dataset: PrivacyDataset,
    transform: str,
    out_size: int,
    anonymizer: Anonymizer | None = None,
) -> np.ndarray:
    """Apply a privacy-preservation method to every image and preprocess.

    Classical baselines act in raw image coordinates (where the ground-truth
    region boxes live); the learned anonymizer acts after the center-crop
    preprocessing, exactly as it does during adversarial training.
    """
    images = np.stack([img.image for img in dataset])
    if transform == "raw":
        pass
    elif transform == "anon":
        if anonymizer is None:
            raise ConfigError("transform 'anon' needs a trained anonymizer")
    elif transform == "downsample2":
        images = downsample(images, 2)
    elif transform == "downsample4":
        images = downsample(images, 4)
    elif transform == "blacken_all":
        images = np.zeros_like(images)
    elif transform in ("blacken", "blur"):
        fn = obfuscate_blacken if transform == "blacken" else obfuscate_blur
        out = []
        for img in dataset:
            boxes = [] if img.region_boxes is None else [tuple(b) for b in img.region_boxes]
            out.append(fn(img.image, boxes))
        images = np.stack(out)
    else:
        raise ConfigError(
            f"unknown privacy transform '{transform}'; expected one of {PRIVACY_TRANSFORMS}"
        )
    images = center_crop_resize(images, out_size)
    if transform == "anon":
        anonymizer.eval()
        with torch.no_grad():
            images = anonymizer(to_tensor(images)).numpy()
    return images.astype(np.float32)


def train_privacy_attack(
    attack: torch.nn.Module,
    images: np.ndarray,
    labels: np.ndarray,
    cfg: TrainConfig,
) -> TrainLog:
    """Supervised multi-label training of a fresh attack model.

    The learning rate starts at cfg.attack_lr and drops to 1/5 of its value
    on every epoch whose training loss does not improve; training ends after
    cfg.attack_epochs epochs or once the rate falls to the floor.
    """
    rng = seed_everything(derive_seed(cfg.seed, "privacy_attack"))
    log = TrainLog("train_privacy_attack", track_time=not cfg.reference_mode)
    optimizer = torch.optim.Adam(attack.parameters(), lr=cfg.attack_lr)
    criterion = torch.nn.BCEWithLogitsLoss()
    x_all = to_tensor(images)
    y_all = to_tensor(labels.astype(np.float32))
    lr = cfg.attack_lr
    best_loss = float("inf")
    attack.train()
    for epoch in range(cfg.attack_epochs):
        epoch_loss = 0.0
        n_seen = 0
        for batch_idx in epoch_batches(len(x_all), cfg.batch_attack, rng):
            idx = torch.as_tensor(batch_idx, dtype=torch.long)
            optimizer.zero_grad()
            loss = criterion(attack(x_all[idx]), y_all[idx])
            if not torch.isfinite(loss):
                raise NumericError(f"attack training diverged at epoch {epoch}")
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss) * len(batch_idx)
            n_seen += len(batch_idx)
        epoch_loss /= n_seen
        improved = epoch_loss < best_loss
        if improved:
            best_loss = epoch_loss
        else:
            lr *= cfg.attack_lr_decay
            for group in optimizer.param_groups:
                group["lr"] = lr
        log.append(epoch=epoch, loss=epoch_loss, lr=lr, improved=improved)
        if lr <= cfg.attack_lr_floor:
            log.append(epoch=epoch, event="lr_floor_stop")
            break
    return log


def evaluate_attribute_model(
    model: torch.nn.Module, images: np.ndarray, labels: np.ndarray, batch: int = 64
) -> float:
    """cMAP of sigmoid scores against the multi-label ground truth."""
    model.eval()
    scores = []
    with torch.no_grad():
        x_all = to_tensor(images)
        for i in range(0, len(x_all), batch):
            scores.append(torch.sigmoid(model(x_all[i : i + batch])).numpy())
    return cmap(np.concatenate(scores), labels)


def stack_image_to_clip(image: np.ndarray, clip_length: int = 16) -> np.ndarray:
    """Repeat one (C, H, W) image into a static (L, C, H, W) pseudo-clip."""
    return np.repeat(image[None], clip_length, axis=0)


def extract_probe_features(
    utility: UtilityEncoder,
    images: np.ndarray,
    anonymizer: Anonymizer | None = None,
    clip_length: int = 16,
    batch: int = 32,
) -> np.ndarray:
    """Embed images as static pseudo-clips through (anonymizer then) encoder.

    `images` must already be preprocessed to the encoder resolution; raw mode
    is anonymizer=None.
    """
    utility.eval()
    if anonymizer is not None:
        anonymizer.eval()
    feats = []
    with torch.no_grad():
        for i in range(0, len(images), batch):
            clips = np.stack([stack_image_to_clip(img, clip_length) for img in images[i : i + batch]])
            x = to_tensor(clips)
            if anonymizer is not None:
                x = anonymizer(x)
            embeddings, _ = utility.encode_clip(x)
            feats.append(embeddings.numpy())
    return np.concatenate(feats).astype(np.float32)


def train_feature_probe(
    probe: torch.nn.Module,
    features: np.ndarray,
    labels: np.ndarray,
    cfg: TrainConfig,
) -> TrainLog:
    """Train the leakage probe on extracted features with per-attribute
    sigmoid cross entropy."""
    rng = seed_everything(derive_seed(cfg.seed, "feature_probe"))
    log = TrainLog("train_feature_probe", track_time=not cfg.reference_mode)
    optimizer = torch.optim.Adam(probe.parameters(), lr=cfg.probe_lr)
    criterion = torch.nn.BCEWithLogitsLoss()
    x_all = to_tensor(features)
    y_all = to_tensor(labels.astype(np.float32))
    probe.train()
    for epoch in range(cfg.probe_epochs):
        epoch_loss = 0.0
        n_seen = 0
        for batch_idx in epoch_batches(len(x_all), cfg.batch_attack, rng):
            idx = torch.as_tensor(batch_idx, dtype=torch.long)
            optimizer.zero_grad()
            loss = criterion(probe(x_all[idx]), y_all[idx])
            if not torch.isfinite(loss):
                raise NumericError(f"probe training diverged at epoch {epoch}")
            loss.backward()
            optimizer.step()
            epoch_loss += float(loss) * len(batch_idx)
            n_seen += len(batch_idx)
        log.append(epoch=epoch, loss=epoch_loss / n_seen)
    return log
