"""Bit-stable dataset and report serialization, plus strict config parsing.

CSV files carry the full run context as ``# key = value`` comment lines
(sorted keys) ahead of the header row; numbers are rendered with Python's
shortest round-trip ``repr``, so ``parse(write(table))`` reproduces every
finite cell exactly.  JSON reports use sorted keys for diff-stability.
Config parsing is strict: unknown keys are rejected with their dotted path.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .doppler import DopplerConfig
from .errors import ConfigError
from .params import ModelParams
from .sensitivity import PhysicalConstants
from .sweep import SweepSpec, SweepTable

__all__ = [
    "RunConfig",
    "parse_config",
    "config_from_dict",
    "config_to_dict",
    "dumps_config",
    "dumps_report",
    "write_csv",
    "read_csv",
    "write_json",
]

_FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    """Complete run description: model, constants, optional doppler and sweep."""

    model: ModelParams
    constants: PhysicalConstants
    doppler: DopplerConfig | None = None
    sweep: SweepSpec | None = None
    output_path: str | None = None
    output_format: str = "csv"

    def __post_init__(self) -> None:
        if self.output_format not in _FORMATS:
            raise ConfigError(
                f"output.format must be one of {_FORMATS}, got {self.output_format!r}"
            )
        if self.output_path is not None:
            parent = Path(self.output_path).resolve().parent
            if not os.access(parent, os.W_OK):
                raise ConfigError(f"output path {self.output_path!r} is not writable")


def _build_dataclass(cls, data: dict, path: str):
    field_names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in field_names:
            raise ConfigError(f"unknown key {path}.{key}")
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value under {path}: {exc}") from exc


def config_from_dict(data: dict) -> RunConfig:
    """Build a RunConfig from a plain dict, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    known = {"model", "constants", "doppler", "sweep", "output"}
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown key {key}")
    model = _build_dataclass(ModelParams, data.get("model", {}), "model")
    constants = _build_dataclass(
        PhysicalConstants, data.get("constants", {}), "constants"
    )
    doppler = (
        _build_dataclass(DopplerConfig, data["doppler"], "doppler")
        if "doppler" in data and data["doppler"] is not None
        else None
    )
    sweep = None
    if "sweep" in data and data["sweep"] is not None:
        sweep_data = dict(data["sweep"])
        if "observables" in sweep_data and isinstance(sweep_data["observables"], list):
            sweep_data["observables"] = tuple(sweep_data["observables"])
        if "doppler" in sweep_data and sweep_data["doppler"] is not None:
            sweep_data["doppler"] = _build_dataclass(
                DopplerConfig, sweep_data["doppler"], "sweep.doppler"
            )
        sweep = _build_dataclass(SweepSpec, sweep_data, "sweep")
    output = data.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("output must be an object")
    for key in output:
        if key not in ("path", "format"):
            raise ConfigError(f"unknown key output.{key}")
    return RunConfig(
        model=model,
        constants=constants,
        doppler=doppler,
        sweep=sweep,
        output_path=output.get("path"),
        output_format=output.get("format", "csv"),
    )


def parse_config(path: str | Path) -> RunConfig:
    """Parse a JSON run configuration with line-level diagnostics."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"malformed JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return config_from_dict(data)


def config_to_dict(config: RunConfig) -> dict:
    """Dict form of a RunConfig (inverse of :func:`config_from_dict`)."""
    out: dict[str, Any] = {
        "model": dataclasses.asdict(config.model),
        "constants": dataclasses.asdict(config.constants),
    }
    if config.doppler is not None:
        out["doppler"] = dataclasses.asdict(config.doppler)
    if config.sweep is not None:
        sweep = dataclasses.asdict(config.sweep)
        sweep["observables"] = list(sweep["observables"])
        out["sweep"] = sweep
    output: dict[str, Any] = {"format": config.output_format}
    if config.output_path is not None:
        output["path"] = config.output_path
    out["output"] = output
    return out


def dumps_config(config: RunConfig) -> str:
    """Canonical JSON rendering of a RunConfig (sorted keys)."""
    return json.dumps(config_to_dict(config), sort_keys=True, indent=2) + "\n"


def _render(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(table: SweepTable, path: str | Path) -> None:
    """Write a sweep table with metadata comments and a header row."""
    if not table.columns:
        raise ValueError("refusing to write a table with no observable columns")
    lines = []
    for key in sorted(table.metadata):
        lines.append(f"# {key} = {_render(table.metadata[key])}")
    for row, col, message in table.flags:
        lines.append(f"# flagged: row {row} column {col}: {message}")
    lines.append(",".join([table.axis] + list(table.columns)))
    cols = list(table.columns.values())
    for i, x in enumerate(table.axis_values):
        lines.append(",".join([repr(float(x))] + [repr(float(c[i])) for c in cols]))
    try:
        Path(path).write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


def read_csv(path: str | Path) -> tuple[dict[str, str], list[str], list[list[float]]]:
    """Parse a CSV written by :func:`write_csv`: (metadata, header, rows)."""
    metadata: dict[str, str] = {}
    header: list[str] = []
    rows: list[list[float]] = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    for line in text.splitlines():
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                metadata[key.strip()] = value.strip()
            continue
        if not header:
            header = line.split(",")
            continue
        rows.append([float(tok) for tok in line.split(",")])
    return metadata, header, rows


def _sanitize(obj: Any) -> Any:
    """Make a structure strictly JSON-clean (non-finite floats -> strings)."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _sanitize(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {key: _sanitize(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(value) for value in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def dumps_report(report: Any) -> str:
    """Stable, sorted-key JSON rendering of a report (dataclass or dict)."""
    return json.dumps(_sanitize(report), sort_keys=True, indent=2) + "\n"


def write_json(report: Any, path: str | Path) -> None:
    """Write a report (dataclass or dict) as stable, sorted-key JSON."""
    try:
        Path(path).write_text(dumps_report(report))
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc
