# -*- coding: utf-8 -*-
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from wsclab.datastructures import NetworkSpec
from wsclab.exceptions import DomainError, ShapeError
from wsclab.nn import ParameterSet, class_mask_for, predict
from wsclab.tasks import TaskStream


@dataclass
class AccuracyMatrix:
    """a[k, i] = test accuracy on task k right after training task i; NaN where k > i or not yet measured."""

    values: np.ndarray

    @classmethod
    def empty(cls, num_tasks: int) -> "AccuracyMatrix":
        if num_tasks < 1:
            raise DomainError("an accuracy matrix needs at least one task")
        return cls(np.full((num_tasks, num_tasks), np.nan))

    @classmethod
    def from_rows(cls, rows: List[List[float]]) -> "AccuracyMatrix":
        """Build from rows[i] = [a[0,i], ..., a[i,i]], the output of successive eval_accuracy_row calls."""
        matrix = cls.empty(len(rows))
        for after_task, row in enumerate(rows):
            matrix.set_row(after_task, row)
        return matrix

    @property
    def num_tasks(self) -> int:
        return self.values.shape[0]

    def set_row(self, after_task: int, row) -> None:
        row = np.asarray(row, dtype=np.float64)
        if row.shape != (after_task + 1,):
            raise ShapeError(f"accuracy row after task {after_task} needs {after_task + 1} entries, got {row.shape}")
        if np.any((row < 0.0) | (row > 1.0)):
            raise DomainError("accuracies must lie in [0, 1]")
        self.values[: after_task + 1, after_task] = row

    def column(self, after_task: int) -> np.ndarray:
        return self.values[: after_task + 1, after_task]

    def to_list(self) -> List[List[float | None]]:
        return [[None if np.isnan(value) else float(value) for value in row] for row in self.values]


def eval_accuracy_row(theta: ParameterSet, spec: NetworkSpec, stream: TaskStream, after_task: int) -> List[float]:
    """Accuracy on the test split of every task k <= after_task, predicting over all classes seen so far."""
    if not 0 <= after_task < len(stream):
        raise DomainError(f"task index {after_task} outside a stream of {len(stream)} tasks")
    mask = class_mask_for(spec, stream.classes_through(after_task))
    row = []
    for task in stream.tasks[: after_task + 1]:
        if len(task.test) == 0:
            raise DomainError(f"task {task.task_id} has an empty test split")
        predicted = predict(theta, spec, task.test.features, mask)
        row.append(float(np.mean(predicted == task.test.labels)))
    return row


def _final_column(matrix: AccuracyMatrix) -> np.ndarray:
    final = matrix.column(matrix.num_tasks - 1)
    if np.any(np.isnan(final)):
        raise DomainError("final accuracy column is incomplete")
    return final


def average_final_accuracy(matrix: AccuracyMatrix) -> float:
    return float(np.mean(_final_column(matrix)))


def forgetting(matrix: AccuracyMatrix) -> float:
    """Mean drop from each earlier task's best accuracy to its final accuracy."""
    T = matrix.num_tasks
    if T < 2:
        raise DomainError("forgetting needs at least two tasks")
    final = _final_column(matrix)
    drops = []
    for k in range(T - 1):
        history = matrix.values[k, k:]
        if np.any(np.isnan(history)):
            raise DomainError(f"accuracy history of task {k} is incomplete")
        drops.append(np.max(history) - final[k])
    return float(np.mean(drops))


def plasticity(matrix: AccuracyMatrix) -> float:
    """Mean accuracy on each task immediately after learning it."""
    diagonal = np.diag(matrix.values)
    if np.any(np.isnan(diagonal)):
        raise DomainError("accuracy diagonal is incomplete")
    return float(np.mean(diagonal))


def average_incremental_accuracy(matrix: AccuracyMatrix) -> float:
    """Mean over steps i of the mean of column i, over the columns measured so far."""
    steps = []
    for i in range(matrix.num_tasks):
        column = matrix.column(i)
        if np.any(np.isnan(column)):
            break
        steps.append(np.mean(column))
    if not steps:
        raise DomainError("no complete accuracy column")
    return float(np.mean(steps))
