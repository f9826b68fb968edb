"""On-disk dataset format.

A dataset directory holds:

* ``manifest.txt``     key=value header (version, kind, resolution, ...)
* ``labels.csv``       video_id, label[, mask file]
* ``arrays/<id>.bin``  uint32 header (T, C, H, W) then row-major
                       little-endian float32 pixels
* ``masks/<id>.mask``  uint32 T then T bytes of 0/1 (only when present)
* ``boxes/<id>.csv``   frame_index, x, y, w, h (only when present)

Privacy images reuse the container with T=1 and a bitstring label column.
Round-tripping is bit-exact. Any directory in this layout loads, which is
also the entry point for externally converted datasets.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from ..errors import ConfigError, MissingArtifactError
from .containers import PrivacyDataset, PrivacyImage, Video, VideoDataset

FORMAT_VERSION = 1
_HEADER = struct.Struct("<4I")


def write_array(path: Path, array: np.ndarray) -> None:
    if array.ndim != 4:
        raise ConfigError(f"expected (T, C, H, W), got {array.shape}")
    data = np.ascontiguousarray(array, dtype="<f4")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(*array.shape))
        f.write(data.tobytes())


def read_array(path: Path) -> np.ndarray:
    with open(path, "rb") as f:
        t, c, h, w = _HEADER.unpack(f.read(_HEADER.size))
        data = np.frombuffer(f.read(), dtype="<f4")
    if data.size != t * c * h * w:
        raise ConfigError(f"{path}: payload size {data.size} != header {t}x{c}x{h}x{w}")
    return data.reshape(t, c, h, w).astype(np.float32)


def _write_mask(path: Path, mask: np.ndarray) -> None:
    with open(path, "wb") as f:
        f.write(struct.pack("<I", mask.shape[0]))
        f.write(mask.astype(np.uint8).tobytes())


def _read_mask(path: Path) -> np.ndarray:
    with open(path, "rb") as f:
        (t,) = struct.unpack("<I", f.read(4))
        return np.frombuffer(f.read(t), dtype=np.uint8).copy()


def write_boxes_csv(path: Path, boxes: np.ndarray) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["frame_index", "x", "y", "w", "h"])
        for t, (x, y, w, h) in enumerate(boxes):
            writer.writerow([t, int(x), int(y), int(w), int(h)])


def read_boxes_csv(path: Path) -> np.ndarray:
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    boxes = np.zeros((len(rows), 4), dtype=np.int32)
    for row in rows:
        boxes[int(row["frame_index"])] = (
            int(row["x"]),
            int(row["y"]),
            int(row["w"]),
            int(row["h"]),
        )
    return boxes


def _write_manifest(path: Path, fields: dict) -> None:
    lines = [f"{k}={v}" for k, v in fields.items()]
    path.write_text("\n".join(lines) + "\n")


def _read_manifest(path: Path) -> dict:
    if not path.exists():
        raise MissingArtifactError(f"dataset manifest not found: {path}")
    fields = {}
    for line in path.read_text().splitlines():
        if line.strip():
            key, _, value = line.partition("=")
            fields[key] = value
    return fields


def save_video_dataset(dataset: VideoDataset, root: Path | str) -> None:
    root = Path(root)
    (root / "arrays").mkdir(parents=True, exist_ok=True)
    _write_manifest(
        root / "manifest.txt",
        {
            "version": FORMAT_VERSION,
            "kind": dataset.kind,
            "resolution": dataset.resolution,
            "num_frames": dataset.num_frames,
            "class_count": dataset.n_classes,
            "video_count": len(dataset),
        },
    )
    with open(root / "labels.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["video_id", "label", "mask_file"])
        for video in dataset:
            write_array(root / "arrays" / f"{video.video_id}.bin", video.frames)
            mask_file = ""
            if video.frame_mask is not None:
                (root / "masks").mkdir(exist_ok=True)
                mask_file = f"masks/{video.video_id}.mask"
                _write_mask(root / mask_file, video.frame_mask)
            if video.actor_boxes is not None:
                (root / "boxes").mkdir(exist_ok=True)
                write_boxes_csv(root / "boxes" / f"{video.video_id}.csv", video.actor_boxes)
            writer.writerow([video.video_id, video.label, mask_file])


def load_video_dataset(root: Path | str) -> VideoDataset:
    root = Path(root)
    manifest = _read_manifest(root / "manifest.txt")
    if manifest.get("kind") == "privacy":
        raise ConfigError(f"{root} holds a privacy dataset; use load_privacy_dataset")
    videos = []
    with open(root / "labels.csv", newline="") as f:
        for row in csv.DictReader(f):
            frames = read_array(root / "arrays" / f"{row['video_id']}.bin")
            mask = _read_mask(root / row["mask_file"]) if row["mask_file"] else None
            boxes_path = root / "boxes" / f"{row['video_id']}.csv"
            boxes = read_boxes_csv(boxes_path) if boxes_path.exists() else None
            videos.append(
                Video(
                    frames=frames,
                    video_id=row["video_id"],
                    label=int(row["label"]),
                    frame_mask=mask,
                    actor_boxes=boxes,
                )
            )
    return VideoDataset(
        videos=tuple(videos),
        kind=manifest["kind"],
        n_classes=int(manifest["class_count"]),
        resolution=int(manifest["resolution"]),
        num_frames=int(manifest["num_frames"]),
    )


def save_privacy_dataset(dataset: PrivacyDataset, root: Path | str) -> None:
    root = Path(root)
    (root / "arrays").mkdir(parents=True, exist_ok=True)
    _write_manifest(
        root / "manifest.txt",
        {
            "version": FORMAT_VERSION,
            "kind": "privacy",
            "resolution": dataset.resolution,
            "num_frames": 1,
            "class_count": dataset.n_attributes,
            "video_count": len(dataset),
        },
    )
    with open(root / "labels.csv", "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["video_id", "label", "mask_file"])
        for img in dataset:
            write_array(root / "arrays" / f"{img.image_id}.bin", img.image[None])
            if img.region_boxes is not None:
                (root / "boxes").mkdir(exist_ok=True)
                boxes = np.concatenate(
                    [np.zeros((len(img.region_boxes), 1), dtype=np.int32), img.region_boxes],
                    axis=1,
                )
                with open(root / "boxes" / f"{img.image_id}.csv", "w", newline="") as bf:
                    bwriter = csv.writer(bf)
                    bwriter.writerow(["frame_index", "x", "y", "w", "h"])
                    for row in boxes:
                        bwriter.writerow([int(v) for v in row])
            writer.writerow([img.image_id, "".join(str(int(b)) for b in img.labels), ""])


def load_privacy_dataset(root: Path | str) -> PrivacyDataset:
    root = Path(root)
    manifest = _read_manifest(root / "manifest.txt")
    if manifest.get("kind") != "privacy":
        raise ConfigError(f"{root} is not a privacy dataset (kind={manifest.get('kind')})")
    images = []
    with open(root / "labels.csv", newline="") as f:
        for row in csv.DictReader(f):
            frames = read_array(root / "arrays" / f"{row['video_id']}.bin")
            labels = np.array([int(ch) for ch in row["label"]], dtype=np.uint8)
            boxes_path = root / "boxes" / f"{row['video_id']}.csv"
            boxes = None
            if boxes_path.exists():
                with open(boxes_path, newline="") as bf:
                    boxes = np.array(
                        [
                            (int(r["x"]), int(r["y"]), int(r["w"]), int(r["h"]))
                            for r in csv.DictReader(bf)
                        ],
                        dtype=np.int32,
                    ).reshape(-1, 4)
            images.append(
                PrivacyImage(
                    image=frames[0],
                    labels=labels,
                    image_id=row["video_id"],
                    region_boxes=boxes,
                )
            )
    return PrivacyDataset(
        images=tuple(images),
        n_attributes=int(manifest["class_count"]),
        resolution=int(manifest["resolution"]),
    )
