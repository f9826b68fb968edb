"""Append-only training log, one record per optimizer step or epoch event.

Wall-clock is recorded only outside reference mode so that reference-mode
logs are bit-identical across reruns of the same seed.
"""

from __future__ import annotations

import json
import time
from pathlib import Path


class TrainLog:
    def __init__(self, stage: str, track_time: bool = True):
        self.stage = stage
        self.track_time = track_time
        self._start = time.monotonic()
        self._records: list[dict] = []

    @property
    def records(self) -> list[dict]:
        return list(self._records)

    def append(self, **fields) -> None:
        record = {"stage": self.stage}
        record.update(fields)
        if self.track_time:
            record["wall_time_s"] = round(time.monotonic() - self._start, 3)
        self._records.append(record)

    def last(self) -> dict:
        return self._records[-1]

    def save_jsonl(self, path: Path | str) -> None:
        with open(path, "w") as f:
            for record in self._records:
                f.write(json.dumps(record, sort_keys=True) + "\n")
