"""Run-configuration ingestion and validation for the CLI.

Each subcommand declares an option schema; values resolve in order
defaults < config file < explicit flags.  Unknown config-file keys are
rejected, and the fully resolved mapping (defaults included) is what lands
in every output file's provenance header.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError

__all__ = ["Opt", "RunConfig", "resolve_config", "load_config_file"]


@dataclass(frozen=True)
class Opt:
    """One configurable option: type, default and help text."""

    type: type
    default: object
    help: str = ""
    choices: tuple = ()


def load_config_file(path) -> dict:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError("config file must hold a JSON object")
    return data


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration of one CLI run."""

    experiment: str
    values: dict
    outdir: str
    svg: bool

    @property
    def seed(self):
        return self.values.get("seed")

    def provenance(self) -> dict:
        return {"experiment": self.experiment, **self.values}


def _coerce(name: str, opt: Opt, value):
    try:
        if opt.type is bool and isinstance(value, bool):
            coerced = value
        else:
            coerced = opt.type(value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"option {name!r}: cannot coerce {value!r} "
                              f"to {opt.type.__name__}") from exc
    if opt.choices and coerced not in opt.choices:
        raise ValidationError(f"option {name!r} must be one of {opt.choices}")
    return coerced


def resolve_config(experiment: str, schema: dict, cli_values: dict,
                   config_path=None, outdir: str = ".", svg: bool = False) -> RunConfig:
    """Merge defaults, config file and explicit CLI values under ``schema``."""
    values = {name: opt.default for name, opt in schema.items()}
    if config_path is not None:
        file_values = load_config_file(config_path)
        unknown = sorted(set(file_values) - set(schema))
        if unknown:
            raise ValidationError(
                f"unknown config keys for {experiment!r}: {', '.join(unknown)}")
        for name, value in file_values.items():
            values[name] = _coerce(name, schema[name], value)
    for name, value in cli_values.items():
        if name in schema and value is not None:
            values[name] = _coerce(name, schema[name], value)
    return RunConfig(experiment, values, str(outdir), bool(svg))
