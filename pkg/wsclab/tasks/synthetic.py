from __future__ import annotations

import numpy as np

from wsclab.exceptions import ConfigurationError

from .stream import ExampleSet, TaskSpec, TaskStream


def gen_synthetic_stream(
    seed: int,
    T: int,
    classes_per_task: int,
    input_dim: int,
    n_train_per_class: int,
    n_test_per_class: int,
    cluster_separation: float,
) -> TaskStream:
    """Isotropic unit-variance Gaussian clusters with means on a sphere of radius `cluster_separation`.

    Task t owns classes [t*classes_per_task, (t+1)*classes_per_task).
    """
    counts = {
        "T": T,
        "classes_per_task": classes_per_task,
        "input_dim": input_dim,
        "n_train_per_class": n_train_per_class,
        "n_test_per_class": n_test_per_class,
    }
    for name, value in counts.items():
        if value < 1:
            raise ConfigurationError("must be >= 1", field=name)
    if cluster_separation < 0:
        raise ConfigurationError("must be non-negative", field="cluster_separation")

    rng = np.random.default_rng(seed)
    num_classes = T * classes_per_task
    directions = rng.standard_normal((num_classes, input_dim))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    means = cluster_separation * directions / np.where(norms > 0, norms, 1.0)

    tasks = []
    for t in range(T):
        class_ids = tuple(range(t * classes_per_task, (t + 1) * classes_per_task))
        splits = {"train": [], "test": []}
        for class_id in class_ids:
            for split, n in (("train", n_train_per_class), ("test", n_test_per_class)):
                features = means[class_id] + rng.standard_normal((n, input_dim))
                splits[split].append(ExampleSet(features, np.full(n, class_id), np.full(n, t)))
        tasks.append(
            TaskSpec(
                task_id=t,
                class_ids=class_ids,
                train=ExampleSet.concat(splits["train"], input_dim),
                test=ExampleSet.concat(splits["test"], input_dim),
            )
        )
    return TaskStream(tasks=tuple(tasks), num_classes=num_classes, input_dim=input_dim)
