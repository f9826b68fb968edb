"""Network initialization: identity pretraining of the anonymizer and the
desk-scale substitutes for large-scale encoder pretraining."""

from __future__ import annotations

import logging

import numpy as np
import torch

from ..data.augment import AugmentationParams, apply_augmentation, center_crop_resize
from ..data.containers import Video, VideoDataset
from ..errors import ConfigError, NumericError
from ..losses import budget_nt_xent, cross_entropy, l1_reconstruction
from ..models import Anonymizer, BudgetEncoder, UtilityEncoder
from ..utils import derive_seed, seed_everything, to_tensor
from .batches import centered_eval_clip, clips_to_tensor, epoch_batches, random_supervised_clip
from .config import TrainConfig
from .log import TrainLog

logger = logging.getLogger(__name__)

CLIP_LENGTH = 16
SKIP_RATE = 2


def _frame_pool(videos: tuple[Video, ...]) -> list[tuple[int, int]]:
    """(video index, frame index) pairs covering every frame."""
    return [(vi, t) for vi, video in enumerate(videos) for t in range(video.num_frames)]


def _gather_frames(
    videos, pool, indices, rng: np.random.Generator | None, out_size: int
) -> torch.Tensor:
    """Stack frames; random crop+flip when an rng is given, center crop otherwise."""
    frames = []
    for i in indices:
        vi, t = pool[i]
        frame = videos[vi].frames[t][None]
        if rng is None:
            frames.append(center_crop_resize(frame, out_size))
        else:
            params = AugmentationParams.sample(
                rng, frame.shape[-2:], out_size, jitter=0.0, erase_prob=0.0
            )
            frames.append(apply_augmentation(frame, params))
    return to_tensor(np.concatenate(frames, axis=0))


def pretrain_identity(
    anonymizer: Anonymizer, dataset: VideoDataset, cfg: TrainConfig
) -> tuple[TrainLog, dict]:
    """Train the anonymizer to reconstruct frames until it acts as identity.

    Stops once the held-out mean per-pixel absolute error falls below
    cfg.identity_threshold, or when the epoch budget runs out (reported in
    the result dict, not raised).
    """
    if len(dataset) < 2:
        raise ConfigError("identity pretraining needs at least 2 videos for a held-out split")
    rng = seed_everything(derive_seed(cfg.seed, "identity"))
    log = TrainLog("pretrain_identity", track_time=not cfg.reference_mode)
    train_videos = [v for i, v in enumerate(dataset) if i % 8 != 0]
    held_videos = [v for i, v in enumerate(dataset) if i % 8 == 0]
    pool = _frame_pool(tuple(train_videos))
    held_pool = _frame_pool(tuple(held_videos))
    out_size = anonymizer.resolution
    pixels = anonymizer.channels * out_size * out_size
    optimizer = torch.optim.Adam(anonymizer.parameters(), lr=cfg.lr_anonymizer)

    # evaluation uses a fixed, deterministic slice of the held-out frames
    held_eval = held_pool[:: max(1, len(held_pool) // 512)]

    result = {"reached": False, "holdout_l1": float("inf"), "epochs_run": 0}
    step = 0
    for epoch in range(cfg.identity_epochs):
        anonymizer.train()
        epoch_losses = []
        n_frames = min(cfg.identity_frames_per_epoch, len(pool))
        chosen = rng.choice(len(pool), size=n_frames, replace=False)
        for batch_idx in [chosen[i : i + cfg.identity_batch] for i in range(0, n_frames, cfg.identity_batch)]:
            frames = _gather_frames(train_videos, pool, batch_idx, rng, out_size)
            optimizer.zero_grad()
            loss = l1_reconstruction(frames, anonymizer(frames))
            if not torch.isfinite(loss):
                raise NumericError(
                    f"identity pretraining diverged at epoch {epoch}, step {step}"
                )
            loss.backward()
            optimizer.step()
            step += 1
            epoch_losses.append(float(loss))
            log.append(epoch=epoch, step=step, l1_sum=float(loss))

        anonymizer.eval()
        with torch.no_grad():
            errors = 0.0
            for i in range(0, len(held_eval), cfg.identity_batch):
                batch = range(i, min(i + cfg.identity_batch, len(held_eval)))
                frames = _gather_frames(held_videos, held_eval, batch, None, out_size)
                errors += float(l1_reconstruction(frames, anonymizer(frames))) * len(batch)
            holdout_l1 = errors / len(held_eval) / pixels
        log.append(epoch=epoch, holdout_per_pixel_l1=holdout_l1, train_l1_sum=float(np.mean(epoch_losses)))
        result.update(holdout_l1=holdout_l1, epochs_run=epoch + 1)
        if holdout_l1 < cfg.identity_threshold:
            result["reached"] = True
            break
    if not result["reached"]:
        logger.warning(
            "identity pretraining exhausted %d epochs at held-out L1 %.4f (threshold %.4f)",
            result["epochs_run"],
            result["holdout_l1"],
            cfg.identity_threshold,
        )
    return log, result


def init_encoders(
    utility: UtilityEncoder,
    budget: BudgetEncoder,
    dataset: VideoDataset,
    cfg: TrainConfig,
    skip_init: bool = False,
) -> TrainLog:
    """Initialize the video and image encoders on the proxy task data.

    The utility encoder gets supervised motion-class training; the budget
    encoder gets self-supervised same-video frame agreement. With
    `skip_init` both keep their random weights (the pipeline still runs).
    """
    log = TrainLog("init_encoders", track_time=not cfg.reference_mode)
    if skip_init:
        log.append(event="skipped")
        return log
    if dataset.n_classes < 2:
        raise ConfigError("encoder initialization needs labelled classes")
    rng = seed_everything(derive_seed(cfg.seed, "init_encoders"))
    out_size = utility.resolution

    opt_t = torch.optim.Adam(utility.parameters(), lr=cfg.lr_utility)
    videos = list(dataset)
    utility.train()
    for epoch in range(cfg.encoder_init_epochs):
        for batch_idx in epoch_batches(len(videos), cfg.batch_anon, rng):
            clips = [
                random_supervised_clip(videos[i], rng, out_size, CLIP_LENGTH, SKIP_RATE)
                for i in batch_idx
            ]
            labels = torch.as_tensor([videos[i].label for i in batch_idx], dtype=torch.long)
            opt_t.zero_grad()
            _, logits = utility.encode_clip(clips_to_tensor(clips))
            loss = cross_entropy(logits, labels)
            loss.backward()
            opt_t.step()
            log.append(branch="utility", epoch=epoch, ce=float(loss))

    opt_b = torch.optim.Adam(budget.parameters(), lr=cfg.lr_budget)
    budget.train()
    for epoch in range(cfg.budget_init_epochs):
        for batch_idx in epoch_batches(len(videos), cfg.batch_attack, rng):
            if len(batch_idx) < 2:
                continue
            view_a, view_b = [], []
            for i in batch_idx:
                video = videos[i]
                t1, t2 = rng.integers(0, video.num_frames, size=2)
                params = AugmentationParams.sample(
                    rng, video.frames.shape[-2:], out_size, jitter=0.1, erase_prob=0.0
                )
                view_a.append(apply_augmentation(video.frames[int(t1)][None], params)[0])
                view_b.append(apply_augmentation(video.frames[int(t2)][None], params)[0])
            opt_b.zero_grad()
            z_a = budget.encode_image(to_tensor(np.stack(view_a)))
            z_b = budget.encode_image(to_tensor(np.stack(view_b)))
            loss = budget_nt_xent(z_a, z_b, cfg.loss.temperature)
            loss.backward()
            opt_b.step()
            log.append(branch="budget", epoch=epoch, nt_xent=float(loss))
    return log


def action_accuracy(
    utility: UtilityEncoder,
    dataset: VideoDataset,
    anonymizer: Anonymizer | None = None,
) -> float:
    """Deterministic center-clip classification accuracy, optionally through
    the anonymizer."""
    utility.eval()
    if anonymizer is not None:
        anonymizer.eval()
    correct = 0
    with torch.no_grad():
        for video in dataset:
            clip = centered_eval_clip(video, utility.resolution, CLIP_LENGTH, SKIP_RATE)
            x = to_tensor(clip.frames)
            if anonymizer is not None:
                x = anonymizer(x)
            _, logits = utility.encode_clip(x)
            correct += int(int(logits.argmax()) == video.label)
    return correct / len(dataset)
