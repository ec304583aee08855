import argparse
from typing import Any, Dict, Optional, Sequence

COMMANDS = ("gen-data", "run", "sweep", "ablate", "report")


class ArgsConfig:
    def __init__(self, argv: Optional[Sequence[str]] = None) -> None:
        parser = argparse.ArgumentParser(prog="wsclab", description="wsclab: weight space consolidation experiments for class-incremental learning")
        self.parser = parser
        subparsers = parser.add_subparsers(dest="command", required=True)

        gen_data = subparsers.add_parser("gen-data", help="Write the configured task stream to a WSC-STREAM v1 file.")
        gen_data.add_argument("--config", type=str, default=None, required=False, help="Run configuration file. [Defaults to built-in values]")
        gen_data.add_argument("--out", type=str, required=True, help="Path of the stream file to write.")

        for name, help_text in (
            ("run", "Train and evaluate one method at the first configured budget for every seed."),
            ("sweep", "Run every method, budget and seed and aggregate the results."),
            ("ablate", "Run the configured ablation suites."),
        ):
            sub = subparsers.add_parser(name, help=help_text)
            sub.add_argument("--config", type=str, required=True, help="Run configuration file.")
            sub.add_argument("--out", type=str, default=None, required=False, help="Output directory. [Defaults to `run.output_dir`]")
            sub.add_argument("--seeds", type=str, default=None, required=False, help="Comma-separated seeds, overriding `run.seeds`.")
            sub.add_argument("--budget", type=str, default=None, required=False, help="Comma-separated per-class budgets, overriding `memory.budget_per_class`.")
            sub.add_argument(
                "--avg-count-mode",
                type=str,
                choices=("paper", "snapshots"),
                default=None,
                required=False,
                help="Running-average weighting, overriding `schedule.avg_count_mode`.",
            )
            if name != "run":
                sub.add_argument("--parallel", type=int, default=1, required=False, help="Worker processes; 0 uses one per logical CPU. [Default: 1]")

        report = subparsers.add_parser("report", help="Render aggregate CSVs into a markdown report.")
        report.add_argument("results_dir", type=str, nargs="?", default=None, help="Directory holding aggregate CSVs.")
        report.add_argument("--out", type=str, default=None, required=False, help="Same as the positional results directory.")

        args = parser.parse_args(argv)

        self.command: str = args.command
        self.config: Optional[str] = getattr(args, "config", None)
        self.out: Optional[str] = getattr(args, "out", None)
        self.parallel: int = getattr(args, "parallel", 1)
        self.results_dir: Optional[str] = getattr(args, "results_dir", None) or self.out
        self.seeds: Optional[str] = getattr(args, "seeds", None)
        self.budget: Optional[str] = getattr(args, "budget", None)
        self.avg_count_mode: Optional[str] = getattr(args, "avg_count_mode", None)

    def overrides(self) -> Dict[str, Any]:
        """Dotted configuration keys set on the command line."""
        changes: Dict[str, Any] = {}
        if self.seeds is not None:
            changes["run.seeds"] = self.seeds
        if self.budget is not None:
            changes["memory.budget_per_class"] = self.budget
        if self.avg_count_mode is not None:
            changes["schedule.avg_count_mode"] = self.avg_count_mode
        return changes
