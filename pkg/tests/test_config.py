import pytest

from wsclab.config import Config, ConfigFileError
from wsclab.datastructures import ConsolidationSchedule, RunConfig, load_run_config, parse_run_config
from wsclab.enum import AvgCountMode, ImportanceMetric, Method, RankingScope
from wsclab.exceptions import ConfigurationError


def test_config_file_values(tmp_path):
    path = tmp_path / "app.cfg"
    path.write_text('# comment\n\nrun.method = "wsc"\nrun.batch_size=64\nrun.timing = true\n', encoding="utf-8")
    config = Config(path, environ={})
    assert config("run.method") == "wsc"
    assert config("run.batch_size", cast=int) == 64
    assert config("run.timing", cast=bool) is True
    assert config("run.seeds", default="0") == "0"
    with pytest.raises(KeyError):
        config("reset.metric")
    with pytest.raises(ValueError):
        config("run.method", cast=int)


def test_environment_overrides_file(tmp_path):
    path = tmp_path / "app.cfg"
    path.write_text("reset.metric = moment\n", encoding="utf-8")
    config = Config(path, environ={"WSC_RESET__METRIC": "fisher", "WSC_RUN__SEEDS": "1,2", "HOME": "/root"})
    assert config("reset.metric") == "fisher"
    assert config.values() == {"reset.metric": "fisher", "run.seeds": "1,2"}


@pytest.mark.parametrize(
    "text, line",
    [("run.method = wsc\nrun.method = replay\n", 2), ("# ok\nnot a pair\n", 2), ("= value\n", 1)],
)
def test_malformed_config_file(tmp_path, text: str, line: int):
    path = tmp_path / "bad.cfg"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigFileError) as excinfo:
        Config(path)
    assert excinfo.value.line == line


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        Config(tmp_path / "absent.cfg")
    with pytest.raises(ConfigurationError) as excinfo:
        load_run_config(tmp_path / "absent.cfg", environ={})
    assert excinfo.value.field == "config"
    assert excinfo.value.exit_code == 2


def test_load_run_config(write_config):
    cfg = load_run_config(write_config("memory.budget_per_class = 5, 10\nreset.scope = per_layer"), environ={})
    assert cfg.run.method is Method.REPLAY
    assert cfg.run.seeds == (0,)
    assert cfg.stream.tasks == 3
    assert cfg.memory.budget_per_class == (5, 10)
    assert cfg.network.hidden_dims == (8,)
    assert (cfg.schedule.n_iter, cfg.schedule.n_warm, cfg.schedule.avg_interval) == (4, 1, 1)
    assert cfg.reset.ranking_scope is RankingScope.PER_LAYER
    assert cfg.reset.metric is ImportanceMetric.MOMENT


def test_environment_and_overrides_reach_the_run_config(write_config):
    path = write_config()
    cfg = load_run_config(path, environ={"WSC_RESET__METRIC": "fisher"}, overrides={"run.seeds": "3,4", "schedule.avg_count_mode": "paper"})
    assert cfg.reset.metric is ImportanceMetric.FISHER
    assert cfg.run.seeds == (3, 4)
    assert cfg.schedule.avg_count_mode is AvgCountMode.PAPER


@pytest.mark.parametrize(
    "extra, field",
    [
        ("reset.metric = curvature", "reset.metric"),
        ("reset.retain = 1.5", "reset.retain"),
        ("reset.alpha = -0.1", "reset.alpha"),
        ("reset.bogus = 1", "reset.bogus"),
        ("schedule.warmup = 4", "schedule.warmup"),
        ("schedule.epochs = many", "schedule.epochs"),
        ("optim.lr = 0", "optim.lr"),
        ("memory.budget_per_class = -1", "memory.budget_per_class"),
        ("plugins.enabled = true", "plugins"),
        ("stream.source = idx", "stream.source"),
    ],
)
def test_configuration_errors_name_the_field(write_config, extra: str, field: str):
    with pytest.raises(ConfigurationError) as excinfo:
        load_run_config(write_config(extra), environ={})
    assert excinfo.value.field == field
    assert excinfo.value.exit_code == 2


def test_keys_need_a_section(write_config):
    with pytest.raises(ConfigurationError) as excinfo:
        load_run_config(write_config("method = wsc"), environ={})
    assert excinfo.value.field == "method"


def test_defaults():
    cfg = RunConfig()
    assert cfg.reset.retain_fraction == 0.2
    assert cfg.reset.alpha_mix == 0.5
    assert cfg.schedule.avg_interval == 5
    assert cfg.schedule.avg_count_mode is AvgCountMode.SNAPSHOTS
    assert ConsolidationSchedule(epochs=20).n_warm == 5
    assert ConsolidationSchedule(epochs=3).n_warm == 0


def test_replace_uses_dotted_aliases():
    cfg = RunConfig().replace({"reset.retain": 1.0, "schedule.averaging": False, "reset.strategy": "revert"})
    assert cfg.reset.retain_fraction == 1.0
    assert cfg.schedule.averaging is False
    assert cfg.reset.strategy.value == "revert"
    assert RunConfig().reset.retain_fraction == 0.2
    with pytest.raises(ConfigurationError):
        RunConfig().replace({"reset.retain": 2.0})


def test_replace_recomputes_a_derived_warmup(write_config):
    assert RunConfig().replace({"schedule.epochs": 8}).schedule.n_warm == 2
    assert RunConfig().replace({"reset.retain": 1.0}).replace({"schedule.epochs": 12}).schedule.n_warm == 3
    assert RunConfig().replace({"schedule.epochs": 8, "schedule.warmup": 0}).schedule.n_warm == 0
    pinned = RunConfig().replace({"schedule.warmup": 1})
    assert pinned.replace({"schedule.epochs": 40}).schedule.n_warm == 1
    from_file = load_run_config(write_config())
    assert from_file.replace({"schedule.epochs": 12}).schedule.n_warm == 1


def test_echo_roundtrips():
    cfg = RunConfig().replace({"memory.budget_per_class": "20,80"})
    assert parse_run_config(cfg.echo()) == cfg
