from .ablate import Variant, build_variants, cli_ablate
from .records import SUMMARY_COLUMNS, RunRecord, run_id
from .report import cli_report
from .runner import ExperimentRun, build_stream, cli_run, run_experiment
from .seeding import derive_rng, derive_seed
from .sweep import aggregate_rows, cli_sweep, mean_and_se

__all__ = [
    "SUMMARY_COLUMNS",
    "ExperimentRun",
    "RunRecord",
    "Variant",
    "aggregate_rows",
    "build_stream",
    "build_variants",
    "cli_ablate",
    "cli_report",
    "cli_run",
    "cli_sweep",
    "derive_rng",
    "derive_seed",
    "mean_and_se",
    "run_experiment",
    "run_id",
]
