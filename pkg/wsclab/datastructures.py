# -*- coding: utf-8 -*-
from __future__ import annotations

import math
import os
from pathlib import Path
from typing import Annotated, Any, Mapping, Optional, Tuple

import pydash
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, model_validator

from wsclab.config import Config, ConfigFileError
from wsclab.enum import (
    Activation,
    AvgCountMode,
    ImportanceMetric,
    InitScheme,
    Method,
    OptimizerKind,
    RankingScope,
    ResetFrequency,
    ResetStrategy,
    StreamSource,
)
from wsclab.exceptions import ConfigurationError


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return tuple(item.strip() for item in value.split(",") if item.strip())
    if isinstance(value, (int, float)):
        return (value,)
    return value


IntList = Annotated[Tuple[int, ...], BeforeValidator(_split_list)]
FloatList = Annotated[Tuple[float, ...], BeforeValidator(_split_list)]
StrList = Annotated[Tuple[str, ...], BeforeValidator(_split_list)]


class BaseModelWithConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)


class NetworkSpec(BaseModelWithConfig):
    input_dim: int
    hidden_dims: IntList = ()
    num_classes: int
    activation: Activation = Activation.RELU
    init_scheme: InitScheme = InitScheme.KAIMING_UNIFORM
    init_seed: int = 0

    @model_validator(mode="after")
    def _check_dims(self) -> "NetworkSpec":
        if self.input_dim < 1:
            raise ConfigurationError("must be >= 1", field="input_dim")
        if self.num_classes < 2:
            raise ConfigurationError("must be >= 2", field="num_classes")
        if any(width < 1 for width in self.hidden_dims):
            raise ConfigurationError("every hidden width must be >= 1", field="hidden_dims")
        return self

    @property
    def layer_dims(self) -> Tuple[int, ...]:
        return (self.input_dim, *self.hidden_dims, self.num_classes)


class OptimizerConfig(BaseModelWithConfig):
    kind: OptimizerKind = OptimizerKind.SGD
    learning_rate: float = Field(0.05, alias="lr")
    sgd_momentum: float = Field(0.9, alias="momentum")
    adam_beta1: float = Field(0.9, alias="beta1")
    adam_beta2: float = Field(0.999, alias="beta2")
    adam_eps: float = Field(1e-8, alias="eps")

    @model_validator(mode="after")
    def _check_ranges(self) -> "OptimizerConfig":
        if not self.learning_rate > 0:
            raise ConfigurationError("step size must be positive", field="lr")
        if not 0 <= self.sgd_momentum < 1:
            raise ConfigurationError("must lie in [0, 1)", field="momentum")
        for name, beta in (("beta1", self.adam_beta1), ("beta2", self.adam_beta2)):
            if not 0 <= beta < 1:
                raise ConfigurationError("must lie in [0, 1)", field=name)
        if not self.adam_eps > 0:
            raise ConfigurationError("must be positive", field="eps")
        return self


class ConsolidationSchedule(BaseModelWithConfig):
    """Epoch budget of one task and the cadence of reset and averaging.

    `n_warm` defaults to a quarter of `n_iter`; `avg_interval` is the `j` of the
    averaging guard `i % j == 0`.
    """

    n_iter: int = Field(20, alias="epochs")
    n_warm: Optional[int] = Field(None, alias="warmup")
    avg_interval: int = Field(5, alias="avg_interval")
    avg_count_mode: AvgCountMode = AvgCountMode.SNAPSHOTS
    reset_frequency: ResetFrequency = ResetFrequency.ONCE
    averaging: bool = True

    @model_validator(mode="after")
    def _check_schedule(self) -> "ConsolidationSchedule":
        if self.n_iter < 1:
            raise ConfigurationError("must be >= 1", field="epochs")
        if self.n_warm is None:
            object.__setattr__(self, "n_warm", int(math.floor(0.25 * self.n_iter)))
        if not 0 <= self.n_warm < self.n_iter:
            raise ConfigurationError("warm-up must satisfy 0 <= warmup < epochs", field="warmup")
        if self.avg_interval < 1:
            raise ConfigurationError("must be >= 1", field="avg_interval")
        return self


class ResetConfig(BaseModelWithConfig):
    metric: ImportanceMetric = ImportanceMetric.MOMENT
    retain_fraction: float = Field(0.2, alias="retain")
    alpha_mix: float = Field(0.5, alias="alpha")
    strategy: ResetStrategy = ResetStrategy.SOFT_BLEND
    ranking_scope: RankingScope = Field(RankingScope.GLOBAL, alias="scope")
    exclude_unseen_head: bool = True
    sp_shrink: float = 0.5
    sp_noise_scale: Optional[float] = Field(None, alias="sp_noise")
    cbp_reset_fraction: float = Field(0.1, alias="cbp_fraction")
    hutchinson_probes: int = Field(8, alias="probes")
    fisher_samples: int = 64
    bias_corrected: bool = True
    probe_seed: int = 0

    @model_validator(mode="after")
    def _check_fractions(self) -> "ResetConfig":
        for name, value in (("retain", self.retain_fraction), ("alpha", self.alpha_mix), ("cbp_fraction", self.cbp_reset_fraction)):
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError("must lie in [0, 1]", field=name)
        if self.sp_noise_scale is not None and self.sp_noise_scale < 0:
            raise ConfigurationError("must be non-negative", field="sp_noise")
        if self.hutchinson_probes < 1:
            raise ConfigurationError("must be >= 1", field="probes")
        if self.fisher_samples < 1:
            raise ConfigurationError("must be >= 1", field="fisher_samples")
        return self


class StreamConfig(BaseModelWithConfig):
    source: StreamSource = StreamSource.SYNTHETIC
    tasks: int = 10
    classes_per_task: int = 10
    input_dim: int = 16
    train_per_class: int = 500
    test_per_class: int = 100
    separation: float = 6.0
    seed: int = 0
    images_path: Optional[str] = None
    labels_path: Optional[str] = None
    path: Optional[str] = None
    test_fraction: float = 0.2

    @model_validator(mode="after")
    def _check_source(self) -> "StreamConfig":
        if self.tasks < 1:
            raise ConfigurationError("must be >= 1", field="tasks")
        if self.source is StreamSource.IDX and not (self.images_path and self.labels_path):
            raise ConfigurationError("idx streams need images_path and labels_path", field="source")
        if self.source is StreamSource.FILE and not self.path:
            raise ConfigurationError("file streams need path", field="source")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigurationError("must lie in (0, 1)", field="test_fraction")
        return self


class MemoryConfig(BaseModelWithConfig):
    budget_per_class: IntList = (20,)
    selection_seed: int = 0

    @model_validator(mode="after")
    def _check_budgets(self) -> "MemoryConfig":
        if not self.budget_per_class:
            raise ConfigurationError("at least one budget is required", field="budget_per_class")
        if any(budget < 0 for budget in self.budget_per_class):
            raise ConfigurationError("budgets must be non-negative", field="budget_per_class")
        return self


class NetworkConfig(BaseModelWithConfig):
    hidden_dims: IntList = (64,)


class RunSection(BaseModelWithConfig):
    method: Method = Method.WSC
    methods: Annotated[Tuple[Method, ...], BeforeValidator(_split_list)] = ()
    seeds: IntList = (0,)
    batch_size: int = 32
    output_dir: str = "results"
    alignment_probe: int = 128
    timing: bool = False

    @model_validator(mode="after")
    def _check_run(self) -> "RunSection":
        if not self.seeds:
            raise ConfigurationError("at least one seed is required", field="seeds")
        if self.batch_size < 1:
            raise ConfigurationError("must be >= 1", field="batch_size")
        if self.alignment_probe < 1:
            raise ConfigurationError("must be >= 1", field="alignment_probe")
        return self

    @property
    def sweep_methods(self) -> Tuple[Method, ...]:
        return self.methods or (self.method,)


class AblateConfig(BaseModelWithConfig):
    suites: StrList = ("component", "metric", "strategy", "frequency", "retain")
    retain_grid: FloatList = (0.1, 0.2, 0.5, 0.8)


class RunConfig(BaseModelWithConfig):
    run: RunSection = RunSection()
    stream: StreamConfig = StreamConfig()
    memory: MemoryConfig = MemoryConfig()
    network: NetworkConfig = NetworkConfig()
    optim: OptimizerConfig = OptimizerConfig()
    schedule: ConsolidationSchedule = ConsolidationSchedule()
    reset: ResetConfig = ResetConfig()
    ablate: AblateConfig = AblateConfig()

    def network_spec(self, input_dim: int, num_classes: int, init_seed: int) -> NetworkSpec:
        return NetworkSpec(input_dim=input_dim, hidden_dims=self.network.hidden_dims, num_classes=num_classes, init_seed=init_seed)

    def echo(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)

    def replace(self, changes: Mapping[str, Any]) -> "RunConfig":
        """Return a copy with dotted keys (`reset.retain`, `schedule.averaging`, ...) overridden.

        A warm-up that was never set explicitly is recomputed from the new epoch count.
        """
        data = self.echo()
        if "n_warm" not in self.schedule.model_fields_set:
            data["schedule"].pop("warmup", None)
        for key, value in changes.items():
            pydash.set_(data, key, value)
        return parse_run_config(data)


def _validation_field(exc: ValidationError, section: str) -> Tuple[str, str]:
    error = exc.errors()[0]
    return ".".join([section, *(str(part) for part in error["loc"])]), error["msg"]


def parse_run_config(data: Mapping[str, Any]) -> RunConfig:
    """Validate a nested mapping section by section so every error names its dotted key."""
    unknown = sorted(set(data) - set(RunConfig.model_fields))
    if unknown:
        raise ConfigurationError("unknown configuration section", field=unknown[0])
    sections = {}
    for name, info in RunConfig.model_fields.items():
        model = info.annotation
        try:
            sections[name] = model.model_validate(data.get(name, {}))
        except ConfigurationError as exc:
            raise ConfigurationError(exc.reason, field=f"{name}.{exc.field}") from None
        except ValidationError as exc:
            field, msg = _validation_field(exc, name)
            raise ConfigurationError(msg, field=field) from None
    return RunConfig(**sections)


def load_run_config(
    config_path: str | Path,
    environ: Mapping[str, str] = os.environ,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    try:
        config = Config(config_path, environ=environ)
    except ConfigFileError as exc:
        raise ConfigurationError(str(exc), field=str(config_path)) from None
    except FileNotFoundError as exc:
        raise ConfigurationError(str(exc), field="config") from None

    nested: dict = {}
    for key, value in sorted(config.values().items()):
        if key.count(".") != 1:
            raise ConfigurationError("keys take the form 'section.name'", field=key)
        pydash.set_(nested, key, value)
    for key, value in (overrides or {}).items():
        pydash.set_(nested, key, value)
    return parse_run_config(nested)
