"""Command-line front end.

Subcommands: ``response`` (single-point response and outcome statistics),
``sweep`` (grid evaluation to CSV), ``fisher`` (Fisher information with and
without thermal averaging), ``sensitivity`` (sensitivity report to JSON),
``reproduce fig2|fig3|fig4`` (canonical datasets), and ``constants`` (the SI
bridge and conventions).  Exit codes: 0 success, 2 configuration error,
3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from . import __version__
from .doppler import AVERAGE_OF_FISHER, FISHER_OF_AVERAGED, DopplerConfig, averaged_fisher
from .doppler import doppler_width, doppler_width_in_gamma
from .errors import ConfigError, EitmagError
from .params import COPROPAGATING, PROBE_ONLY, AS_WRITTEN, SWAPPED, ModelParams
from .presets import FIGURES, build_figure, default_doppler, model_preset
from .response import response, transparency_width_analytic
from .sensitivity import (
    FISHER_AT_OPERATING,
    FISHER_AT_PLATEAU,
    PhysicalConstants,
    b_field_for_shift,
    multiphoton_sensitivity,
)
from .serialize import (
    RunConfig,
    config_from_dict,
    config_to_dict,
    dumps_report,
    parse_config,
    write_csv,
    write_json,
)
from .statistics import fisher_information, outcome_probabilities
from .sweep import run_sweep

__all__ = ["main"]


def _parse_set_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _apply_overrides(data: dict, overrides: list[str]) -> dict:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        dotted, _, raw = item.partition("=")
        keys = dotted.strip().split(".")
        target = data
        for key in keys[:-1]:
            target = target.setdefault(key, {})
            if not isinstance(target, dict):
                raise ConfigError(f"--set path {dotted!r} collides with a scalar")
        target[keys[-1]] = _parse_set_value(raw)
    return data


def _load_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if getattr(args, "config", None):
        cfg = parse_config(args.config)
        data = config_to_dict(cfg)
    if getattr(args, "preset", None):
        try:
            preset = model_preset(args.preset)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        data["model"] = dataclasses.asdict(preset)
    data = _apply_overrides(data, getattr(args, "set", None) or [])
    if getattr(args, "quadrature_order", None):
        data.setdefault("doppler", {})["quadrature_order"] = args.quadrature_order
    if getattr(args, "shift_mode", None):
        data.setdefault("doppler", {})["shift_mode"] = args.shift_mode
    if getattr(args, "sigma_mapping", None):
        data.setdefault("model", {})["sigma_mapping"] = args.sigma_mapping
    if getattr(args, "output", None):
        data.setdefault("output", {})["path"] = args.output
    if getattr(args, "format", None):
        data.setdefault("output", {})["format"] = args.format
    return config_from_dict(data)


def _doppler_or_default(config: RunConfig) -> DopplerConfig:
    return config.doppler if config.doppler is not None else default_doppler()


def _emit(report, config: RunConfig, default_name: str) -> None:
    text = dumps_report(report)
    if config.output_path:
        path = Path(config.output_path)
        if path.is_dir():
            path = path / default_name
        write_json(report, path)
        print(str(path))
    else:
        sys.stdout.write(text)


def _conventions(config: RunConfig) -> dict:
    dop = _doppler_or_default(config)
    return {
        "sigma_mapping": config.model.sigma_mapping,
        "shift_mode": dop.shift_mode,
        "fisher_average": AVERAGE_OF_FISHER,
        "phase_convention": "principal value; sweeps unwrap along the axis",
        "unit_system": "rates and detunings in units of the half-linewidth gamma",
    }


def _cmd_response(args: argparse.Namespace) -> int:
    config = _load_config(args)
    r = response(config.model)
    dist = outcome_probabilities(config.model)
    report = {
        "field_response": dataclasses.asdict(r),
        "outcomes": dataclasses.asdict(dist),
        "conventions": _conventions(config),
        "model": dataclasses.asdict(config.model),
        "version": __version__,
    }
    _emit(report, config, "response.json")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _load_config(args)
    if config.sweep is None:
        raise ConfigError("sweep subcommand requires a sweep section (or --set sweep.*)")
    table = run_sweep(config.sweep, config.model, config.constants, workers=args.workers)
    out = config.output_path or "sweep.csv"
    path = Path(out)
    if path.is_dir():
        path = path / "sweep.csv"
    write_csv(table, path)
    print(str(path))
    return 0


def _cmd_fisher(args: argparse.Namespace) -> int:
    config = _load_config(args)
    free = fisher_information(config.model)
    report = {
        "doppler_free": dataclasses.asdict(free),
        "conventions": _conventions(config),
        "model": dataclasses.asdict(config.model),
        "version": __version__,
    }
    if not args.no_doppler:
        dop = _doppler_or_default(config)
        mode = (
            FISHER_OF_AVERAGED
            if args.fisher_average == "probabilities"
            else AVERAGE_OF_FISHER
        )
        avg = averaged_fisher(config.model, dop, mode)
        report["doppler_averaged"] = dataclasses.asdict(avg)
        report["doppler"] = dataclasses.asdict(dop)
        report["doppler"]["width_rad_per_s"] = doppler_width(dop)
        report["doppler"]["width_gamma"] = doppler_width_in_gamma(dop)
    _emit(report, config, "fisher.json")
    return 0


def _cmd_sensitivity(args: argparse.Namespace) -> int:
    config = _load_config(args)
    dop = _doppler_or_default(config)
    operating = args.delta if args.delta is not None else config.model.delta
    rep = multiphoton_sensitivity(
        config.model,
        dop,
        config.constants,
        temperature=args.temperature,
        power_in=args.power,
        operating_delta=None if args.scan_delta else operating,
        fisher_at=args.fisher_at,
        repetitions_per_second=args.repetitions,
    )
    report = dataclasses.asdict(rep)
    report["operating_b_tesla"] = b_field_for_shift(rep.operating_delta, config.constants)
    report["conventions"] = _conventions(config)
    report["model"] = dataclasses.asdict(config.model)
    report["version"] = __version__
    _emit(report, config, "sensitivity.json")
    return 0


def _cmd_reproduce(args: argparse.Namespace) -> int:
    config = _load_config(args)
    outdir = Path(config.output_path) if config.output_path else Path.cwd()
    outdir.mkdir(parents=True, exist_ok=True)
    tables = build_figure(args.figure, config.constants, workers=args.workers)
    for stem, table in tables.items():
        path = outdir / f"{stem}.csv"
        write_csv(table, path)
        print(str(path))
    return 0


def _cmd_constants(args: argparse.Namespace) -> int:
    config = _load_config(args)
    c = config.constants
    dop = _doppler_or_default(config)
    report = {
        "constants": dataclasses.asdict(c),
        "derived": {
            "gl_mub_over_gamma_per_tesla": c.gl_mub / c.gamma_si,
            "b_tesla_per_gamma_of_shift": b_field_for_shift(1.0, c),
            "doppler_width_rad_per_s": doppler_width(dop),
            "doppler_width_ordinary_hz": doppler_width(dop) / (2.0 * 3.141592653589793),
            "doppler_width_gamma": doppler_width_in_gamma(dop),
            "transparency_width_gamma": transparency_width_analytic(config.model),
        },
        "conventions": _conventions(config),
        "version": __version__,
    }
    _emit(report, config, "constants.json")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eitmag",
        description="Cavity-EIT Faraday magnetometer model: response, statistics, "
        "Fisher information, and sensitivity bounds.",
    )
    parser.add_argument("--version", action="version", version=f"eitmag {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument(
            "--set",
            action="append",
            metavar="KEY=VALUE",
            help="dot-path override, e.g. model.delta=0.02",
        )
        p.add_argument("--preset", help="model preset: base, fig2, fig3, improved")
        p.add_argument("--output", help="output file or directory")
        p.add_argument("--format", choices=["csv", "json"], help="output format")
        p.add_argument("--quadrature-order", type=int, dest="quadrature_order")
        p.add_argument(
            "--shift-mode",
            choices=[COPROPAGATING, PROBE_ONLY, "probe-only"],
            dest="shift_mode",
        )
        p.add_argument(
            "--sigma-mapping", choices=[AS_WRITTEN, SWAPPED], dest="sigma_mapping"
        )
        p.add_argument("--workers", type=int, default=1)

    p_resp = sub.add_parser("response", help="single-point response and outcomes")
    common(p_resp)
    p_resp.set_defaults(func=_cmd_response)

    p_sweep = sub.add_parser("sweep", help="run a configured sweep to CSV")
    common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_fish = sub.add_parser("fisher", help="Fisher information at the working point")
    common(p_fish)
    p_fish.add_argument("--no-doppler", action="store_true")
    p_fish.add_argument(
        "--fisher-average",
        choices=["fisher", "probabilities"],
        default="fisher",
        dest="fisher_average",
    )
    p_fish.set_defaults(func=_cmd_fisher)

    p_sens = sub.add_parser("sensitivity", help="sensitivity report to JSON")
    common(p_sens)
    p_sens.add_argument("--power", type=float, default=1e-3, help="probe power, W")
    p_sens.add_argument(
        "--temperature", type=float, default=1e-3, help="ensemble temperature, K"
    )
    p_sens.add_argument(
        "--delta", type=float, help="operating Zeeman shift (gamma units)"
    )
    p_sens.add_argument(
        "--scan-delta",
        action="store_true",
        help="scan (0, w_t] for the S-minimizing shift",
    )
    p_sens.add_argument(
        "--fisher-at",
        choices=[FISHER_AT_PLATEAU, FISHER_AT_OPERATING],
        default=FISHER_AT_PLATEAU,
        dest="fisher_at",
    )
    p_sens.add_argument("--repetitions", type=float, help="probe repetitions per second")
    p_sens.set_defaults(func=_cmd_sensitivity)

    p_rep = sub.add_parser("reproduce", help="emit a canonical dataset")
    p_rep.add_argument("figure", choices=list(FIGURES))
    common(p_rep)
    p_rep.set_defaults(func=_cmd_reproduce)

    p_const = sub.add_parser("constants", help="print the SI bridge and conventions")
    common(p_const)
    p_const.set_defaults(func=_cmd_constants)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "shift_mode", None) == "probe-only":
        args.shift_mode = PROBE_ONLY
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except EitmagError as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
