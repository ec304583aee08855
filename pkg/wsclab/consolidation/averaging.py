# -*- coding: utf-8 -*-
from __future__ import annotations

from typing import Tuple

from wsclab.datastructures import ConsolidationSchedule
from wsclab.enum import AvgCountMode
from wsclab.exceptions import ContractViolationError
from wsclab.nn import ParameterSet


def is_average_epoch(epoch: int, schedule: ConsolidationSchedule) -> bool:
    return epoch > schedule.n_warm and epoch % schedule.avg_interval == 0


def update_running_average(
    average: ParameterSet,
    theta: ParameterSet,
    epoch: int,
    schedule: ConsolidationSchedule,
    prior_updates: int = 0,
) -> Tuple[ParameterSet, int]:
    """Θ <- (n_avg·Θ + θ) / (n_avg + 1); returns the new Θ and the n_avg weight used.

    snapshots mode counts earlier calls of this task (so the first call installs θ);
    paper mode takes n_avg = floor(epoch / j) literally.
    """
    if not is_average_epoch(epoch, schedule):
        raise ContractViolationError(f"running average updated at epoch {epoch}; requires epoch > {schedule.n_warm} and epoch % {schedule.avg_interval} == 0")
    average.check_layout(theta, "running average and parameters")
    if schedule.avg_count_mode is AvgCountMode.PAPER:
        n_avg = epoch // schedule.avg_interval
    else:
        n_avg = prior_updates
    flat = (n_avg * average.flat + theta.flat) / (n_avg + 1)
    return average.with_flat(flat), n_avg
