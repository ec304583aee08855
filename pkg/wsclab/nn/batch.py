from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from wsclab.exceptions import ShapeError


@dataclass(frozen=True)
class Batch:
    inputs: npt.NDArray[np.float64]
    labels: npt.NDArray[np.int64]
    task_ids: npt.NDArray[np.int64]

    def __post_init__(self) -> None:
        inputs = np.asarray(self.inputs, dtype=np.float64)
        if inputs.ndim != 2:
            raise ShapeError(f"batch inputs must be 2-D, got shape {inputs.shape}")
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        task_ids = np.asarray(self.task_ids, dtype=np.int64).reshape(-1)
        if labels.shape[0] != inputs.shape[0] or task_ids.shape[0] != inputs.shape[0]:
            raise ShapeError(f"batch has {inputs.shape[0]} rows but {labels.shape[0]} labels and {task_ids.shape[0]} task ids")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "task_ids", task_ids)

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @classmethod
    def of(cls, inputs, labels, task_ids=None) -> "Batch":
        labels = np.asarray(labels, dtype=np.int64)
        if task_ids is None:
            task_ids = np.zeros_like(labels)
        return cls(np.asarray(inputs, dtype=np.float64), labels, np.asarray(task_ids, dtype=np.int64))

    def take(self, index) -> "Batch":
        return Batch(self.inputs[index], self.labels[index], self.task_ids[index])
