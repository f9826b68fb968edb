"""Weakly supervised anomaly-detector training over extracted features."""

from __future__ import annotations

import copy
import logging

import numpy as np
import torch

from ..errors import ConfigError, NumericError
from ..evaluation.metrics import average_precision, roc_auc, segments_to_frames
from ..losses import mgfn_total
from ..models import AnomalyHead
from ..utils import derive_seed, seed_everything, to_tensor
from .config import TrainConfig
from .features import EXTRACT_CLIP_LENGTH, FeatureSet
from .log import TrainLog

logger = logging.getLogger(__name__)


def _split_ids(feature_set: FeatureSet) -> tuple[list[str], list[str]]:
    normal = [vid for vid in feature_set.video_ids() if feature_set.labels[vid] == 0]
    anomalous = [vid for vid in feature_set.video_ids() if feature_set.labels[vid] == 1]
    return normal, anomalous


def _stack(feature_set: FeatureSet, ids: list[str]) -> torch.Tensor:
    shapes = {feature_set.features[v].shape for v in ids}
    if len(shapes) > 1:
        raise ConfigError(f"batched training needs equal segment counts, got {shapes}")
    return to_tensor(np.stack([feature_set.features[v] for v in ids]))


def score_videos(head: AnomalyHead, feature_set: FeatureSet) -> dict[str, np.ndarray]:
    """Per-frame anomaly scores for every video in the set (eval mode)."""
    head.eval()
    out = {}
    with torch.no_grad():
        for video_id in feature_set.video_ids():
            scores, _ = head.score_segments(to_tensor(feature_set.features[video_id]))
            out[video_id] = segments_to_frames(
                scores.numpy(), EXTRACT_CLIP_LENGTH, feature_set.total_frames[video_id]
            )
    return out


def evaluate_anomaly_detector(
    head: AnomalyHead, feature_set: FeatureSet, masks: dict[str, np.ndarray]
) -> dict:
    """Pooled frame-level ROC AUC and AP against per-frame ground truth."""
    traces = score_videos(head, feature_set)
    scores, truth = [], []
    for video_id, frame_scores in traces.items():
        mask = masks.get(video_id)
        if mask is None:
            mask = np.zeros(feature_set.total_frames[video_id], dtype=np.uint8)
        scores.append(frame_scores)
        truth.append(np.asarray(mask[: len(frame_scores)]))
    pooled_scores = np.concatenate(scores)
    pooled_truth = np.concatenate(truth)
    return {
        "frame_auc": roc_auc(pooled_scores, pooled_truth),
        "frame_ap": average_precision(pooled_scores, pooled_truth),
        "n_frames": int(pooled_truth.shape[0]),
    }


def train_anomaly_detector(
    head: AnomalyHead,
    feature_set: FeatureSet,
    cfg: TrainConfig,
    val_feature_set: FeatureSet | None = None,
    val_masks: dict[str, np.ndarray] | None = None,
) -> tuple[TrainLog, dict]:
    """Optimize the compound anomaly loss on balanced normal/anomalous batches.

    Batches take half of each class (cycling the smaller side), features get
    the configured dropout inside the head. With validation data the run early
    stops on frame AUC with cfg.ad_patience and restores the best weights.
    """
    normal_ids, anomalous_ids = _split_ids(feature_set)
    if not normal_ids or not anomalous_ids:
        raise ConfigError(
            "anomaly training needs both classes at the video level; got "
            f"{len(normal_ids)} normal / {len(anomalous_ids)} anomalous"
        )
    rng = seed_everything(derive_seed(cfg.seed, "anomaly_detector"))
    log = TrainLog("train_anomaly_detector", track_time=not cfg.reference_mode)
    optimizer = torch.optim.Adam(
        head.parameters(), lr=cfg.lr_anomaly, weight_decay=cfg.weight_decay_anomaly
    )
    half = max(1, cfg.batch_anomaly // 2)
    best = {"epoch": -1, "frame_auc": -1.0, "state": None}
    result = {"epochs_run": 0, "stopped_early": False}

    for epoch in range(cfg.ad_epochs):
        head.train()
        norm_order = rng.permutation(len(normal_ids))
        anom_order = rng.permutation(len(anomalous_ids))
        n_steps = max(1, min(len(normal_ids), len(anomalous_ids)) // half)
        for step in range(n_steps):
            pick_n = [normal_ids[norm_order[(step * half + i) % len(normal_ids)]] for i in range(half)]
            pick_a = [
                anomalous_ids[anom_order[(step * half + i) % len(anomalous_ids)]]
                for i in range(half)
            ]
            batch_ids = pick_n + pick_a
            features = _stack(feature_set, batch_ids)
            labels = torch.as_tensor([feature_set.labels[v] for v in batch_ids])
            optimizer.zero_grad()
            scores, magnitudes = head.score_segments(features)
            loss, components = mgfn_total(scores, magnitudes, labels, cfg.loss)
            if not torch.isfinite(loss):
                raise NumericError(f"anomaly loss diverged at epoch {epoch}")
            loss.backward()
            optimizer.step()
            log.append(epoch=epoch, step=step, **components)
        result["epochs_run"] = epoch + 1

        if val_feature_set is not None:
            metrics = evaluate_anomaly_detector(head, val_feature_set, val_masks or {})
            log.append(epoch=epoch, val_frame_auc=metrics["frame_auc"])
            if metrics["frame_auc"] > best["frame_auc"]:
                best = {
                    "epoch": epoch,
                    "frame_auc": metrics["frame_auc"],
                    "state": copy.deepcopy(head.state_dict()),
                }
            elif epoch - best["epoch"] >= cfg.ad_patience:
                result["stopped_early"] = True
                break

    if best["state"] is not None:
        head.load_state_dict(best["state"])
        result["best_epoch"] = best["epoch"]
        result["best_val_frame_auc"] = best["frame_auc"]
    return log, result
