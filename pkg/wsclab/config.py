from __future__ import annotations

import os
import typing
from pathlib import Path

"""
Flat dotted-key configuration, after starlette's config module.

# experiment.cfg
run.method = wsc
memory.budget_per_class = 20, 80, 200, 400
reset.metric = moment

config = Config("experiment.cfg")
config("reset.metric")                   # -> "moment"
config("run.batch_size", cast=int, default=32)

Environment variables override file values: `WSC_RESET__METRIC=fisher`
replaces `reset.metric` (prefix stripped, double underscores become dots).
"""


class undefined:
    pass


class ConfigFileError(Exception):
    def __init__(self, msg: str, line: int) -> None:
        super().__init__(f"line {line}: {msg}")
        self.line = line


class Config:
    def __init__(
        self,
        config_file: str | Path | None = None,
        environ: typing.Mapping[str, str] = os.environ,
        env_prefix: str = "WSC_",
    ) -> None:
        self.environ = environ
        self.env_prefix = env_prefix
        self.file_values: dict[str, str] = {}
        if config_file is not None:
            if not os.path.isfile(config_file):
                raise FileNotFoundError(f"Config file '{config_file}' not found.")
            self.file_values = self._read_file(config_file)

    def __call__(
        self,
        key: str,
        cast: typing.Callable[[typing.Any], typing.Any] | None = None,
        default: typing.Any = undefined,
    ) -> typing.Any:
        return self.get(key, cast, default)

    def env_key(self, key: str) -> str:
        return self.env_prefix + key.replace(".", "__").upper()

    def get(
        self,
        key: str,
        cast: typing.Callable[[typing.Any], typing.Any] | None = None,
        default: typing.Any = undefined,
    ) -> typing.Any:
        env_key = self.env_key(key) if "." in key else key
        if env_key in self.environ:
            return self._perform_cast(key, self.environ[env_key], cast)
        if key in self.file_values:
            return self._perform_cast(key, self.file_values[key], cast)
        if default is not undefined:
            return self._perform_cast(key, default, cast)
        raise KeyError(f"Config '{key}' is missing, and has no default.")

    def values(self) -> dict[str, str]:
        """File values with environment overrides applied, including keys only the environment sets."""
        merged = dict(self.file_values)
        for env_key, value in self.environ.items():
            if not env_key.startswith(self.env_prefix) or "__" not in env_key:
                continue
            key = env_key[len(self.env_prefix) :].replace("__", ".").lower()
            merged[key] = value
        return merged

    def _read_file(self, file_name: str | Path) -> dict[str, str]:
        file_values: dict[str, str] = {}
        with open(file_name, encoding="utf-8") as input_file:
            for lineno, raw in enumerate(input_file.readlines(), start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ConfigFileError(f"expected 'key = value', got {line!r}", lineno)
                key, value = line.split("=", 1)
                key = key.strip()
                if not key:
                    raise ConfigFileError("empty key", lineno)
                if key in file_values:
                    raise ConfigFileError(f"duplicate key '{key}'", lineno)
                file_values[key] = value.strip().strip("\"'")
        return file_values

    def _perform_cast(
        self,
        key: str,
        value: typing.Any,
        cast: typing.Callable[[typing.Any], typing.Any] | None = None,
    ) -> typing.Any:
        if cast is None or value is None:
            return value
        elif cast is bool and isinstance(value, str):
            mapping = {"true": True, "1": True, "false": False, "0": False}
            value = value.lower()
            if value not in mapping:
                raise ValueError(f"Config '{key}' has value '{value}'. Not a valid bool.")
            return mapping[value]
        try:
            return cast(value)
        except (TypeError, ValueError):
            raise ValueError(f"Config '{key}' has value '{value}'. Not a valid {cast.__name__}.")
