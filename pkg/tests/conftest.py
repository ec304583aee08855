import pathlib
from typing import Callable

import numpy as np
import pytest

from wsclab.datastructures import NetworkSpec
from wsclab.nn import ParameterSet, init_params
from wsclab.tasks import TaskStream, gen_synthetic_stream

MINIMAL_CONFIG = """
# tiny synthetic stream, short schedule
run.method = replay
run.seeds = 0
run.batch_size = 16
run.alignment_probe = 16
stream.tasks = 3
stream.classes_per_task = 2
stream.input_dim = 4
stream.train_per_class = 20
stream.test_per_class = 10
stream.separation = 5.0
memory.budget_per_class = 5
network.hidden_dims = 8
schedule.epochs = 4
schedule.warmup = 1
schedule.avg_interval = 1
"""


@pytest.fixture
def tiny_spec() -> NetworkSpec:
    return NetworkSpec(input_dim=4, hidden_dims=(5,), num_classes=6, init_seed=3)


@pytest.fixture
def tiny_params(tiny_spec: NetworkSpec) -> ParameterSet:
    return init_params(tiny_spec)


@pytest.fixture(scope="session")
def tiny_stream() -> TaskStream:
    return gen_synthetic_stream(
        seed=0,
        T=3,
        classes_per_task=2,
        input_dim=4,
        n_train_per_class=20,
        n_test_per_class=10,
        cluster_separation=5.0,
    )


@pytest.fixture
def stream_spec(tiny_stream: TaskStream) -> NetworkSpec:
    return NetworkSpec(input_dim=tiny_stream.input_dim, hidden_dims=(8,), num_classes=tiny_stream.num_classes, init_seed=0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def write_config(tmp_path: pathlib.Path) -> Callable[..., pathlib.Path]:
    """Write MINIMAL_CONFIG plus extra `key = value` lines to a file under tmp_path."""

    def _write(extra: str = "", name: str = "experiment.cfg") -> pathlib.Path:
        path = tmp_path / name
        path.write_text(MINIMAL_CONFIG + "\n" + extra + "\n", encoding="utf-8")
        return path

    return _write
