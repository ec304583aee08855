from .consolidation import replay_train_task, scratch_train, wsc_train_task
from .datastructures import ConsolidationSchedule, NetworkSpec, OptimizerConfig, ResetConfig, RunConfig, load_run_config

__version__ = "0.1.0"

__all__ = [
    "ConsolidationSchedule",
    "NetworkSpec",
    "OptimizerConfig",
    "ResetConfig",
    "RunConfig",
    "load_run_config",
    "replay_train_task",
    "scratch_train",
    "wsc_train_task",
]
