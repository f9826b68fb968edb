from .metrics import (
    AnomalyScoreTrace,
    average_precision,
    cmap,
    per_class_average_precision,
    roc_auc,
    segments_to_frames,
)
from .report import TradeoffReport, TradeoffRow, build_tradeoff_report, plot_score_trace

__all__ = [
    "AnomalyScoreTrace",
    "TradeoffReport",
    "TradeoffRow",
    "average_precision",
    "build_tradeoff_report",
    "cmap",
    "per_class_average_precision",
    "plot_score_trace",
    "roc_auc",
    "segments_to_frames",
]
