"""Trade-off reporting: per-method privacy/utility table and score traces."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..errors import ShapeError
from .metrics import AnomalyScoreTrace

RAW_METHOD = "raw"


@dataclass(frozen=True)
class TradeoffRow:
    method: str
    privacy_cmap: float
    anomaly_score: float
    privacy_change_pct: float
    anomaly_change_pct: float


@dataclass(frozen=True)
class TradeoffReport:
    utility_metric: str
    rows: tuple[TradeoffRow, ...]

    def row(self, method: str) -> TradeoffRow:
        for r in self.rows:
            if r.method == method:
                return r
        raise KeyError(method)


def relative_change_pct(value: float, raw: float) -> float:
    return 100.0 * (value - raw) / raw


def build_tradeoff_report(
    results: dict[str, dict[str, float]], utility_metric: str = "auc"
) -> TradeoffReport:
    """Assemble per-method rows with percent change against the raw baseline.

    `results` maps method name to {"privacy_cmap": ..., "anomaly_score": ...};
    a "raw" entry is mandatory since every change is relative to it.
    """
    if RAW_METHOD not in results:
        raise ValueError("results must contain a 'raw' baseline row")
    raw = results[RAW_METHOD]
    rows = []
    ordering = [RAW_METHOD] + sorted(m for m in results if m != RAW_METHOD)
    for method in ordering:
        cells = results[method]
        rows.append(
            TradeoffRow(
                method=method,
                privacy_cmap=float(cells["privacy_cmap"]),
                anomaly_score=float(cells["anomaly_score"]),
                privacy_change_pct=relative_change_pct(
                    cells["privacy_cmap"], raw["privacy_cmap"]
                ),
                anomaly_change_pct=relative_change_pct(
                    cells["anomaly_score"], raw["anomaly_score"]
                ),
            )
        )
    return TradeoffReport(utility_metric=utility_metric, rows=tuple(rows))


def write_tradeoff_report(report: TradeoffReport, json_path: Path | str, csv_path: Path | str):
    """Emit the machine-readable table and the plot-data file
    (privacy on x, utility on y)."""
    payload = {
        "utility_metric": report.utility_metric,
        "rows": [asdict(r) for r in report.rows],
    }
    Path(json_path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    with open(csv_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["method", "privacy_cmap", f"anomaly_{report.utility_metric}"])
        for r in report.rows:
            writer.writerow([r.method, repr(r.privacy_cmap), repr(r.anomaly_score)])


def plot_score_trace(
    trace: AnomalyScoreTrace,
    csv_path: Path | str,
    raw_trace: AnomalyScoreTrace | None = None,
    render_path: Path | str | None = None,
) -> None:
    """Write per-frame scores and truth as CSV, optionally rendering a figure.

    Floats are written with repr so a CSV round trip reproduces them exactly.
    """
    if raw_trace is not None and len(raw_trace) != len(trace):
        raise ShapeError(f"raw trace length {len(raw_trace)} != trace length {len(trace)}")
    with open(csv_path, "w", newline="") as f:
        writer = csv.writer(f)
        header = ["frame_index", "score"] + (["raw_score"] if raw_trace is not None else [])
        writer.writerow(header + ["truth"])
        for t in range(len(trace)):
            row = [t, repr(float(trace.scores[t]))]
            if raw_trace is not None:
                row.append(repr(float(raw_trace.scores[t])))
            writer.writerow(row + [int(trace.truth[t])])
    if render_path is not None:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(10, 3))
        frames = np.arange(len(trace))
        ax.fill_between(frames, trace.truth, color="tab:blue", alpha=0.25, label="ground truth")
        ax.plot(frames, trace.scores, color="tab:green", label="anonymized")
        if raw_trace is not None:
            ax.plot(frames, raw_trace.scores, color="tab:red", label="raw")
        ax.set_xlabel("frame")
        ax.set_ylabel("anomaly score")
        ax.set_ylim(-0.02, 1.02)
        ax.legend(loc="upper right")
        fig.tight_layout()
        fig.savefig(render_path, dpi=120)
        plt.close(fig)
