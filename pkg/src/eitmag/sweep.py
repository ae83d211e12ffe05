"""Deterministic parameter sweeps, peak refinement, and operating-point search.

Sweep evaluation is embarrassingly parallel over grid points; points are
always assembled in axis order, so the output is byte-identical regardless
of worker count.  Individual point failures are recorded as flagged cells
(NaN plus a note) and never abort a sweep.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .doppler import DopplerConfig, averaged_fisher, averaged_outcome_probabilities
from .errors import EitmagError, NoBracketError
from .params import ModelParams
from .response import response
from .sensitivity import PhysicalConstants, zeeman_shift
from .statistics import fisher_information, outcome_probabilities

__all__ = [
    "OBSERVABLES",
    "SweepSpec",
    "SweepTable",
    "run_sweep",
    "find_extremum",
    "golden_section",
    "optimize_operating_point",
]

OBSERVABLES = (
    "t2_plus",
    "t2_minus",
    "phi_plus",
    "phi_minus",
    "faraday",
    "p_h",
    "p_v",
    "p_0",
    "fisher",
    "fisher_h",
)
_PHASE_OBSERVABLES = {"phi_plus", "phi_minus", "faraday"}
_AXES = ("g2n", "omega", "kappa", "gamma_prime", "delta_p", "delta_d", "delta_c", "delta", "b_field")


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional grid over a model parameter (or the field itself)."""

    axis: str
    start: float
    stop: float
    points: int
    scale: str = "linear"
    observables: tuple[str, ...] = ("t2_plus", "t2_minus")
    doppler: DopplerConfig | None = None

    def __post_init__(self) -> None:
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {_AXES}, got {self.axis!r}")
        if not self.start < self.stop:
            raise ValueError(f"start must be < stop, got [{self.start}, {self.stop}]")
        if self.points < 2:
            raise ValueError(f"points must be >= 2, got {self.points}")
        if self.scale not in ("linear", "log"):
            raise ValueError(f"scale must be 'linear' or 'log', got {self.scale!r}")
        if self.scale == "log" and not self.start > 0.0:
            raise ValueError("log scale requires start > 0")
        if not self.observables:
            raise ValueError("observables must be non-empty")
        unknown = [o for o in self.observables if o not in OBSERVABLES]
        if unknown:
            raise ValueError(f"unknown observables {unknown}; valid: {OBSERVABLES}")

    def grid(self) -> list[float]:
        if self.scale == "linear":
            return [float(x) for x in np.linspace(self.start, self.stop, self.points)]
        return [float(x) for x in np.geomspace(self.start, self.stop, self.points)]


@dataclass
class SweepTable:
    """Rectangular sweep result: axis values, observable columns, metadata."""

    axis: str
    axis_values: list[float]
    columns: dict[str, list[float]]
    metadata: dict[str, object]
    flags: list[tuple[int, str, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        n = len(self.axis_values)
        for name, col in self.columns.items():
            if len(col) != n:
                raise ValueError(f"column {name!r} has {len(col)} rows, expected {n}")

    @property
    def n_rows(self) -> int:
        return len(self.axis_values)

    def column(self, name: str) -> list[float]:
        return self.columns[name]


def _evaluate_point(
    params: ModelParams,
    observables: Sequence[str],
    doppler: DopplerConfig | None,
) -> dict[str, float]:
    out: dict[str, float] = {}
    wanted = set(observables)
    if wanted & {"t2_plus", "t2_minus", "phi_plus", "phi_minus", "faraday"}:
        r = response(params)
        out.update(
            t2_plus=r.t_plus**2,
            t2_minus=r.t_minus**2,
            phi_plus=r.phi_plus,
            phi_minus=r.phi_minus,
            faraday=r.faraday,
        )
    if wanted & {"p_h", "p_v", "p_0"}:
        dist = (
            averaged_outcome_probabilities(params, doppler)
            if doppler is not None
            else outcome_probabilities(params)
        )
        out.update(p_h=dist.p_h, p_v=dist.p_v, p_0=dist.p_0)
    if wanted & {"fisher", "fisher_h"}:
        fr = (
            averaged_fisher(params, doppler)
            if doppler is not None
            else fisher_information(params)
        )
        out.update(fisher=fr.f_total, fisher_h=fr.f_h)
    return {name: out[name] for name in observables}


def _unwrap_with_gaps(values: list[float]) -> list[float]:
    """np.unwrap over finite runs, leaving NaN cells in place."""
    arr = np.asarray(values, dtype=float)
    finite = np.isfinite(arr)
    out = arr.copy()
    i = 0
    n = len(arr)
    while i < n:
        if finite[i]:
            j = i
            while j < n and finite[j]:
                j += 1
            out[i:j] = np.unwrap(arr[i:j])
            i = j
        else:
            i += 1
    return [float(x) for x in out]


def run_sweep(
    spec: SweepSpec,
    base: ModelParams,
    constants: PhysicalConstants | None = None,
    workers: int = 1,
) -> SweepTable:
    """Evaluate the requested observables over the grid, in axis order.

    The ``b_field`` axis is given in tesla and mapped to the Zeeman shift
    through ``constants``.  Failed points are flagged, not fatal.
    """
    grid = spec.grid()
    consts = constants if constants is not None else PhysicalConstants()
    flags: list[tuple[int, str, str]] = []

    def params_at(value: float) -> ModelParams:
        if spec.axis == "b_field":
            return replace(base, delta=zeeman_shift(value, consts))
        return replace(base, **{spec.axis: value})

    def eval_row(item: tuple[int, float]) -> tuple[int, dict[str, float] | str]:
        i, value = item
        try:
            return i, _evaluate_point(params_at(value), spec.observables, spec.doppler)
        except (EitmagError, ValueError, ZeroDivisionError) as exc:
            return i, f"{type(exc).__name__}: {exc}"

    items = list(enumerate(grid))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(eval_row, items))
    else:
        results = [eval_row(item) for item in items]
    results.sort(key=lambda r: r[0])

    columns: dict[str, list[float]] = {name: [] for name in spec.observables}
    for i, row in results:
        if isinstance(row, str):
            for name in spec.observables:
                columns[name].append(math.nan)
                flags.append((i, name, row))
        else:
            for name in spec.observables:
                columns[name].append(row[name])

    unwrapped = False
    if _PHASE_OBSERVABLES & set(spec.observables):
        unwrapped = True
        for name in spec.observables:
            if name in _PHASE_OBSERVABLES:
                columns[name] = _unwrap_with_gaps(columns[name])

    metadata: dict[str, object] = {
        "axis": spec.axis,
        "scale": spec.scale,
        "points": spec.points,
        "observables": ",".join(spec.observables),
        "phases_unwrapped": unwrapped,
        "version": __version__,
        "sigma_mapping": base.sigma_mapping,
    }
    for name in ("g2n", "omega", "kappa", "gamma_prime", "delta_p", "delta_d", "delta_c", "delta"):
        metadata[f"model.{name}"] = getattr(base, name)
    if spec.doppler is not None:
        d = spec.doppler
        metadata.update(
            {
                "doppler.temperature": d.temperature,
                "doppler.atomic_mass": d.atomic_mass,
                "doppler.angular_frequency": d.angular_frequency,
                "doppler.width_override": d.width_override,
                "doppler.quadrature_order": d.quadrature_order,
                "doppler.shift_mode": d.shift_mode,
                "doppler.gamma_si": d.gamma_si,
                "fisher_average": "average_of_fisher",
            }
        )
    if spec.axis == "b_field":
        metadata["constants.gl_mub"] = consts.gl_mub
        metadata["constants.gamma_si"] = consts.gamma_si
    return SweepTable(spec.axis, grid, columns, metadata, flags)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-6,
    maximize: bool = False,
    trace: list[tuple[float, float]] | None = None,
) -> tuple[float, float]:
    """Golden-section search for the extremum of a unimodal f on [a, b]."""
    sign = -1.0 if maximize else 1.0

    def g(x: float) -> float:
        fx = f(x)
        if trace is not None:
            trace.append((x, fx))
        return sign * fx

    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = g(c), g(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = g(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = g(d)
    x = 0.5 * (a + b)
    return x, f(x)


def find_extremum(
    f: Callable[[float], float],
    a: float,
    b: float,
    mode: str = "max",
    coarse_points: int = 201,
    tol: float = 1e-6,
) -> tuple[float, float]:
    """Locate an interior extremum: coarse bracket, then golden refinement.

    Raises :class:`NoBracketError` when the coarse grid is monotone (or flat)
    and therefore brackets nothing.  The returned value is never worse than
    the best coarse-grid sample.
    """
    if mode not in ("max", "min"):
        raise ValueError(f"mode must be 'max' or 'min', got {mode!r}")
    if coarse_points < 201:
        coarse_points = 201
    xs = [a + (b - a) * i / (coarse_points - 1) for i in range(coarse_points)]
    vals = [f(x) for x in xs]
    better = (lambda u, v: u > v) if mode == "max" else (lambda u, v: u < v)
    i_best = 0
    for i in range(1, coarse_points):
        if better(vals[i], vals[i_best]):
            i_best = i
    interior = 0 < i_best < coarse_points - 1
    strict = interior and better(vals[i_best], vals[i_best - 1]) and better(
        vals[i_best], vals[i_best + 1]
    )
    if not strict:
        raise NoBracketError(
            f"coarse grid found no interior {mode} to bracket on [{a}, {b}]"
        )
    x_ref, v_ref = golden_section(
        f, xs[i_best - 1], xs[i_best + 1], tol=tol, maximize=(mode == "max")
    )
    if better(vals[i_best], v_ref):
        return xs[i_best], vals[i_best]
    return x_ref, v_ref


@dataclass
class OptimizationReport:
    """Result of an operating-point search, with its evaluation trace."""

    argopt: dict[str, float]
    value: float
    objective: str
    converged: bool
    evaluations: int
    trace: list[tuple[dict[str, float], float]]


def optimize_operating_point(
    objective: Callable[..., float],
    free: Sequence[str],
    bounds: dict[str, tuple[float, float]],
    objective_name: str = "objective",
    maximize: bool = False,
    max_evaluations: int = 1000,
    tol: float = 1e-6,
) -> OptimizationReport:
    """Search over one or two free variables within finite bounds.

    One free variable uses golden-section; two use coordinate descent with
    three restarts.  Exhausting the evaluation budget returns the best point
    seen with ``converged = False``.
    """
    if not 1 <= len(free) <= 2:
        raise ValueError("free must name one or two variables")
    for name in free:
        lo, hi = bounds[name]
        if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
            raise ValueError(f"bounds for {name!r} must be finite with lo <= hi")

    evaluations = 0
    budget_exhausted = False
    trace: list[tuple[dict[str, float], float]] = []
    best: tuple[dict[str, float], float] | None = None
    better = (lambda u, v: u > v) if maximize else (lambda u, v: u < v)

    def evaluate(point: dict[str, float]) -> float:
        nonlocal evaluations, best, budget_exhausted
        if evaluations >= max_evaluations:
            budget_exhausted = True
            raise _BudgetExhausted
        evaluations += 1
        value = objective(**point)
        trace.append((dict(point), value))
        if best is None or better(value, best[1]):
            best = (dict(point), value)
        return value

    class _BudgetExhausted(Exception):
        pass

    def golden_1d(name: str, fixed: dict[str, float]) -> float:
        lo, hi = bounds[name]
        if lo == hi:
            evaluate({**fixed, name: lo})
            return lo
        x, _ = golden_section(
            lambda v: evaluate({**fixed, name: v}), lo, hi, tol=tol, maximize=maximize
        )
        evaluate({**fixed, name: x})
        return x

    try:
        if len(free) == 1:
            golden_1d(free[0], {})
        else:
            n0, n1 = free
            starts = [0.25, 0.5, 0.75]
            for frac in starts:
                point = {
                    n0: bounds[n0][0] + frac * (bounds[n0][1] - bounds[n0][0]),
                    n1: bounds[n1][0] + frac * (bounds[n1][1] - bounds[n1][0]),
                }
                for _ in range(4):  # coordinate sweeps per restart
                    point[n0] = golden_1d(n0, {n1: point[n1]})
                    point[n1] = golden_1d(n1, {n0: point[n0]})
    except _BudgetExhausted:
        pass

    if best is None:
        raise NoBracketError("objective was never evaluated within the budget")
    return OptimizationReport(
        argopt=best[0],
        value=best[1],
        objective=objective_name,
        converged=not budget_exhausted,
        evaluations=evaluations,
        trace=trace,
    )
