# -*- coding: utf-8 -*-
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from wsclab.consolidation import TaskTrainReport


@dataclass(frozen=True)
class CostRecord:
    optimizer_steps: int = 0
    wall_clock_seconds: float = 0.0
    scored_coordinates: int = 0
    extra_forward_backward_passes: int = 0

    def __add__(self, other: "CostRecord") -> "CostRecord":
        return CostRecord(
            optimizer_steps=self.optimizer_steps + other.optimizer_steps,
            wall_clock_seconds=self.wall_clock_seconds + other.wall_clock_seconds,
            scored_coordinates=self.scored_coordinates + other.scored_coordinates,
            extra_forward_backward_passes=self.extra_forward_backward_passes + other.extra_forward_backward_passes,
        )

    @property
    def overhead_ratio(self) -> float:
        """Scoring passes as a share of all forward/backward passes (one per optimizer step)."""
        total = self.optimizer_steps + self.extra_forward_backward_passes
        return self.extra_forward_backward_passes / total if total else 0.0

    @classmethod
    def from_report(cls, report: TaskTrainReport) -> "CostRecord":
        return cls(
            optimizer_steps=report.optimizer_steps,
            wall_clock_seconds=report.wall_clock_seconds,
            scored_coordinates=report.scored_coordinates,
            extra_forward_backward_passes=report.extra_passes,
        )


def total_cost(reports: Iterable[TaskTrainReport]) -> CostRecord:
    total = CostRecord()
    for report in reports:
        total = total + CostRecord.from_report(report)
    return total
