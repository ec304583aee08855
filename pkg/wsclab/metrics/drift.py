# -*- coding: utf-8 -*-
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from wsclab.nn import ParameterSet, Tensor
from wsclab.nn.params import check_flat


@dataclass(frozen=True)
class DriftRecord:
    task: int
    inter_task_l2: float
    intra_task_l2_per_epoch: List[float] = field(default_factory=list)
    steps: int = 0
    per_step_l2: Optional[float] = None


def drift_record(
    task: int,
    theta_before: ParameterSet,
    theta_after: ParameterSet,
    per_epoch_snapshots: Sequence[Tensor] = (),
    steps: int = 0,
) -> DriftRecord:
    """‖θ_after − θ_before‖₂ plus the L2 length of each epoch's move, starting from θ_before.

    With `steps` optimizer steps behind the move, `per_step_l2` is the distance per step.
    """
    theta_before.check_layout(theta_after, "parameters before and after the task")
    inter = float(np.linalg.norm(theta_after.flat - theta_before.flat))
    intra = []
    previous = theta_before.flat
    for snapshot in per_epoch_snapshots:
        check_flat(np.asarray(snapshot), theta_before, "epoch snapshot")
        intra.append(float(np.linalg.norm(snapshot - previous)))
        previous = snapshot
    per_step = inter / steps if steps > 0 else None
    return DriftRecord(task=task, inter_task_l2=inter, intra_task_l2_per_epoch=intra, steps=steps, per_step_l2=per_step)
