"""Boundary quality: interval overlap of merged groups, swept over thresholds.

A merged group counts as a hit at threshold t when the tIoU of its two
interval hulls reaches t.  Unaligned units stay in the denominators, so
missing or inventing events costs recall or precision here too.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fields import LevelResult
from .similarity import interval_tiou


@dataclass(frozen=True)
class TemporalMetrics:
    threshold: float
    hits: int
    total_gt: int
    total_pred: int

    @property
    def p_time(self) -> float:
        return self.hits / self.total_pred if self.total_pred else 0.0

    @property
    def r_time(self) -> float:
        return self.hits / self.total_gt if self.total_gt else 0.0

    @property
    def f1(self) -> float:
        p, r = self.p_time, self.r_time
        return 2.0 * p * r / (p + r) if p + r > 0.0 else 0.0


def group_tious(level: LevelResult) -> list[float]:
    return [interval_tiou(g.gt_interval, g.pred_interval) for g in level.groups]


def temporal_metrics(level: LevelResult,
                     thresholds: tuple[float, ...] = (0.1, 0.3, 0.5),
                     ) -> list[TemporalMetrics]:
    tious = group_tious(level)
    total_gt = len(level.groups) + len(level.alignment.unaligned_gt)
    total_pred = len(level.groups) + len(level.alignment.unaligned_pred)
    return [
        TemporalMetrics(t, sum(1 for v in tious if v >= t), total_gt, total_pred)
        for t in thresholds
    ]
