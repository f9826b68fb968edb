"""Feature extraction and the on-disk feature-file format.

Every video is cut into S = floor(T / clip_length) consecutive non-overlapping
clips (no frame skip here), each center-crop preprocessed, optionally passed
through the anonymizer, then embedded by the utility encoder into an S x C
matrix. Files are a pure function of (checkpoint, dataset): no RNG is
involved anywhere on this path.

Feature file layout: uint32 id length, utf-8 video id, uint32 S, uint32 C,
then S*C row-major little-endian float32 values. A directory of files gets an
``index.csv`` with video_id, label, segment and frame counts.
"""

from __future__ import annotations

import csv
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..data.augment import center_crop_resize
from ..data.containers import Video, VideoDataset
from ..errors import ConfigError, MissingArtifactError
from ..models import Anonymizer, UtilityEncoder
from ..utils import to_tensor

logger = logging.getLogger(__name__)

EXTRACT_CLIP_LENGTH = 16


@dataclass
class FeatureSet:
    """Per-video feature matrices plus the labels and sizes evaluation needs."""

    features: dict[str, np.ndarray] = field(default_factory=dict)
    labels: dict[str, int] = field(default_factory=dict)
    total_frames: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.features)

    @property
    def feature_dim(self) -> int:
        first = next(iter(self.features.values()))
        return first.shape[1]

    def video_ids(self) -> list[str]:
        return sorted(self.features)


def video_feature_sequence(
    video: Video,
    utility: UtilityEncoder,
    anonymizer: Anonymizer | None,
    clip_length: int = EXTRACT_CLIP_LENGTH,
) -> np.ndarray | None:
    """S x C embedding matrix for one video, or None when T < clip_length."""
    n_segments = video.num_frames // clip_length
    if n_segments == 0:
        logger.warning(
            "skipping video '%s': %d frames < clip length %d",
            video.video_id,
            video.num_frames,
            clip_length,
        )
        return None
    utility.eval()
    if anonymizer is not None:
        anonymizer.eval()
    out_size = utility.resolution
    clips = np.stack(
        [
            center_crop_resize(video.frames[j * clip_length : (j + 1) * clip_length], out_size)
            for j in range(n_segments)
        ]
    )
    with torch.no_grad():
        x = to_tensor(clips)
        if anonymizer is not None:
            x = anonymizer(x)
        embeddings, _ = utility.encode_clip(x)
    return embeddings.numpy().astype(np.float32)


def extract_features(
    utility: UtilityEncoder,
    dataset: VideoDataset,
    anonymizer: Anonymizer | None = None,
    clip_length: int = EXTRACT_CLIP_LENGTH,
) -> FeatureSet:
    """Embed every video of the dataset; `anonymizer=None` is the raw mode."""
    out = FeatureSet()
    for video in dataset:
        seq = video_feature_sequence(video, utility, anonymizer, clip_length)
        if seq is None:
            continue
        out.features[video.video_id] = seq
        out.labels[video.video_id] = video.label
        out.total_frames[video.video_id] = video.num_frames
    return out


def save_feature_file(path: Path | str, video_id: str, features: np.ndarray) -> None:
    encoded = video_id.encode("utf-8")
    data = np.ascontiguousarray(features, dtype="<f4")
    with open(path, "wb") as f:
        f.write(struct.pack("<I", len(encoded)))
        f.write(encoded)
        f.write(struct.pack("<II", *data.shape))
        f.write(data.tobytes())


def load_feature_file(path: Path | str) -> tuple[str, np.ndarray]:
    with open(path, "rb") as f:
        (id_len,) = struct.unpack("<I", f.read(4))
        video_id = f.read(id_len).decode("utf-8")
        n_segments, dim = struct.unpack("<II", f.read(8))
        data = np.frombuffer(f.read(), dtype="<f4")
    if data.size != n_segments * dim:
        raise ConfigError(f"{path}: payload {data.size} != header {n_segments}x{dim}")
    return video_id, data.reshape(n_segments, dim).astype(np.float32)


def save_features_dir(feature_set: FeatureSet, root: Path | str) -> None:
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    with open(root / "index.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["video_id", "label", "segments", "total_frames"])
        for video_id in feature_set.video_ids():
            features = feature_set.features[video_id]
            save_feature_file(root / f"{video_id}.feat", video_id, features)
            writer.writerow(
                [
                    video_id,
                    feature_set.labels[video_id],
                    features.shape[0],
                    feature_set.total_frames[video_id],
                ]
            )


def load_features_dir(root: Path | str) -> FeatureSet:
    root = Path(root)
    index = root / "index.csv"
    if not index.exists():
        raise MissingArtifactError(f"feature index not found: {index}")
    out = FeatureSet()
    with open(index, newline="") as f:
        for row in csv.DictReader(f):
            video_id, features = load_feature_file(root / f"{row['video_id']}.feat")
            out.features[video_id] = features
            out.labels[video_id] = int(row["label"])
            out.total_frames[video_id] = int(row["total_frames"])
    return out


def mean_intra_video_distance(feature_set: FeatureSet) -> float:
    """Mean pairwise L2 distance between a video's segment embeddings,
    averaged over videos. Higher means more temporally distinct features."""
    per_video = []
    for features in feature_set.features.values():
        n = features.shape[0]
        if n < 2:
            continue
        diffs = features[:, None, :] - features[None, :, :]
        dists = np.sqrt((diffs**2).sum(-1))
        iu = np.triu_indices(n, k=1)
        per_video.append(float(dists[iu].mean()))
    if not per_video:
        raise ValueError("need at least one video with 2+ segments")
    return float(np.mean(per_video))
