# -*- coding: utf-8 -*-
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from wsclab.exceptions import ConfigurationError, ShapeError
from wsclab.nn import Batch, Tensor


@dataclass(frozen=True)
class LabeledExample:
    features: Tensor
    label: int
    source_task: int


@dataclass(frozen=True)
class ExampleSet:
    """Column-wise store of labelled examples; iterating yields LabeledExample values."""

    features: Tensor
    labels: npt.NDArray[np.int64]
    source_task: npt.NDArray[np.int64]

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        source_task = np.asarray(self.source_task, dtype=np.int64).reshape(-1)
        if features.ndim != 2 or not features.shape[0] == labels.shape[0] == source_task.shape[0]:
            raise ShapeError(f"inconsistent example columns {features.shape}, {labels.shape}, {source_task.shape}")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "source_task", source_task)

    @classmethod
    def empty(cls, input_dim: int) -> "ExampleSet":
        return cls(np.zeros((0, input_dim)), np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))

    @classmethod
    def concat(cls, parts: Sequence["ExampleSet"], input_dim: int) -> "ExampleSet":
        parts = [part for part in parts if len(part)]
        if not parts:
            return cls.empty(input_dim)
        return cls(
            np.concatenate([p.features for p in parts]),
            np.concatenate([p.labels for p in parts]),
            np.concatenate([p.source_task for p in parts]),
        )

    def __len__(self) -> int:
        return self.labels.shape[0]

    def __iter__(self) -> Iterator[LabeledExample]:
        for i in range(len(self)):
            yield LabeledExample(self.features[i], int(self.labels[i]), int(self.source_task[i]))

    @property
    def input_dim(self) -> int:
        return self.features.shape[1]

    def take(self, index) -> "ExampleSet":
        return ExampleSet(self.features[index], self.labels[index], self.source_task[index])

    def of_class(self, class_id: int) -> "ExampleSet":
        return self.take(np.flatnonzero(self.labels == class_id))

    def as_batch(self) -> Batch:
        return Batch(self.features, self.labels, self.source_task)


@dataclass(frozen=True)
class TaskSpec:
    task_id: int
    class_ids: Tuple[int, ...]
    train: ExampleSet
    test: ExampleSet

    def __post_init__(self) -> None:
        allowed = set(self.class_ids)
        for split in (self.train, self.test):
            if len(split) and not set(np.unique(split.labels).tolist()) <= allowed:
                raise ConfigurationError(f"task {self.task_id} holds labels outside its classes {sorted(allowed)}")


@dataclass(frozen=True)
class TaskStream:
    tasks: Tuple[TaskSpec, ...]
    num_classes: int
    input_dim: int
    _class_task: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for task in self.tasks:
            if seen & set(task.class_ids):
                raise ConfigurationError(f"task {task.task_id} reuses classes of an earlier task")
            seen |= set(task.class_ids)
            for class_id in task.class_ids:
                self._class_task[class_id] = task.task_id
        if seen != set(range(self.num_classes)):
            raise ConfigurationError(f"tasks cover classes {sorted(seen)}, expected 0..{self.num_classes - 1}")

    def __len__(self) -> int:
        return len(self.tasks)

    def __getitem__(self, task_id: int) -> TaskSpec:
        return self.tasks[task_id]

    def task_of_class(self, class_id: int) -> int:
        return self._class_task[class_id]

    def classes_through(self, task_id: int) -> List[int]:
        """Classes introduced by tasks 0..task_id inclusive."""
        return sorted(c for task in self.tasks[: task_id + 1] for c in task.class_ids)

    def classes_before(self, task_id: int) -> List[int]:
        return self.classes_through(task_id - 1) if task_id > 0 else []
