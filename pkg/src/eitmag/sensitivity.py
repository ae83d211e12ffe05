"""SI bridge and magnetic-field sensitivity bounds.

Everything upstream works in gamma units; this module converts between field
and Zeeman shift (delta = g_L mu_B B), rescales dimensionless Fisher
information to physical units via (g_L mu_B / gamma)^2, and evaluates the
single-probe and multiphoton sensitivity limits

    S_single >= 1 / sqrt(repetition_rate * F),
    S_multi  >= (t / sqrt(F_H)) * sqrt((hbar omega_p sin^2 phi + 2 k_B T) / P_in).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .doppler import (
    AVERAGE_OF_FISHER,
    BOLTZMANN,
    D1_WAVELENGTH,
    GAMMA_SI_DEFAULT,
    RB87_MASS,
    DopplerConfig,
    averaged_fisher,
)
from .params import ModelParams
from .response import response, transparency_width_analytic

__all__ = [
    "PhysicalConstants",
    "SensitivityReport",
    "zeeman_shift",
    "b_field_for_shift",
    "fisher_physical",
    "single_photon_sensitivity",
    "calibrate_repetition_rate",
    "multiphoton_sensitivity",
]

_EV = 1.602176634e-19  # J

# Default g_L mu_B: Lande factor |g_F| = 1/2 for the F = 1 ground manifold,
# Bohr magneton 14.0 GHz/T in ordinary frequency, converted to angular units
# with an explicit 2 pi.
_GL_DEFAULT = 0.5
_MU_B_ORDINARY = 14.0e9  # Hz/T


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants bridging gamma units to fields, photons, and temperature."""

    gamma_si: float = GAMMA_SI_DEFAULT  # rad/s, excited-state half-linewidth
    gl_mub: float = _GL_DEFAULT * 2.0 * math.pi * _MU_B_ORDINARY  # rad s^-1 T^-1
    photon_energy: float = 1.559 * _EV  # J
    boltzmann: float = BOLTZMANN  # J/K
    atomic_mass: float = RB87_MASS  # kg
    wavelength: float = D1_WAVELENGTH  # m

    def __post_init__(self) -> None:
        for name in (
            "gamma_si",
            "gl_mub",
            "photon_energy",
            "boltzmann",
            "atomic_mass",
            "wavelength",
        ):
            value = getattr(self, name)
            if not value > 0.0:
                raise ValueError(f"{name} must be > 0, got {value}")


@dataclass(frozen=True)
class SensitivityReport:
    """Field-sensitivity summary at one operating point.

    Sensitivities are in T/sqrt(Hz); ``per_probe_uncertainty`` is the single
    Cramer-Rao shot in T.  ``assumptions`` lists the conventions that went
    into the numbers so every report is self-describing.
    """

    per_probe_uncertainty: float
    single_photon_s: float | None
    multiphoton_s: float
    operating_delta: float
    transmissions: tuple[float, float]
    faraday: float
    fisher_physical: float
    plateau_s: float | None = None
    assumptions: tuple[str, ...] = ()


def zeeman_shift(b: float, c: PhysicalConstants) -> float:
    """Zeeman shift delta (gamma units) produced by field b (tesla)."""
    return c.gl_mub * b / c.gamma_si


def b_field_for_shift(delta: float, c: PhysicalConstants) -> float:
    """Field (tesla) that produces the given Zeeman shift (gamma units)."""
    return delta * c.gamma_si / c.gl_mub


def fisher_physical(f_dimensionless: float, c: PhysicalConstants) -> float:
    """Rescale dimensionless Fisher information to physical units (T^-2)."""
    ratio = c.gl_mub / c.gamma_si
    return ratio * ratio * f_dimensionless


def single_photon_sensitivity(
    f_physical: float, repetitions_per_second: float
) -> float:
    """Shot-noise-limited sensitivity 1/sqrt(rate * F) in T/sqrt(Hz).

    Returns inf when the Fisher information carries no field information.
    """
    if not repetitions_per_second > 0.0:
        raise ValueError(
            f"repetitions_per_second must be > 0, got {repetitions_per_second}"
        )
    if f_physical <= 0.0:
        return math.inf
    return 1.0 / math.sqrt(repetitions_per_second * f_physical)


def calibrate_repetition_rate(target_s: float, f_physical: float) -> float:
    """Repetition rate (1/s) required to reach ``target_s`` given F (T^-2)."""
    if not target_s > 0.0:
        raise ValueError(f"target_s must be > 0, got {target_s}")
    if not f_physical > 0.0:
        raise ValueError(f"f_physical must be > 0, got {f_physical}")
    return 1.0 / (target_s * target_s * f_physical)


FISHER_AT_PLATEAU = "plateau"
FISHER_AT_OPERATING = "operating"

# The small-field Fisher plateau is sampled at this fraction of the
# transparency half-width, well inside the linear regime.
PLATEAU_FRACTION = 1.0 / 40.0


def _resonant(params: ModelParams, delta: float) -> ModelParams:
    return replace(params, delta_p=0.0, delta_d=0.0, delta_c=0.0, delta=delta)


def _multiphoton_s_at(
    params: ModelParams,
    cfg: DopplerConfig,
    c: PhysicalConstants,
    temperature: float,
    power_in: float,
    delta: float,
    f_h_dimensionless: float,
) -> tuple[float, float, float, float]:
    """Returns (S, t, phi, F_H^phys) at the given operating shift."""
    resp = response(_resonant(params, delta))
    t = 0.5 * (resp.t_plus + resp.t_minus)
    phi = resp.faraday
    f_phys = fisher_physical(f_h_dimensionless, c)
    noise = c.photon_energy * math.sin(phi) ** 2 + 2.0 * c.boltzmann * temperature
    if f_phys <= 0.0:
        return math.inf, t, phi, f_phys
    s = (t / math.sqrt(f_phys)) * math.sqrt(noise / power_in)
    return s, t, phi, f_phys


def multiphoton_sensitivity(
    params: ModelParams,
    cfg: DopplerConfig,
    c: PhysicalConstants,
    temperature: float,
    power_in: float,
    operating_delta: float | None = None,
    fisher_at: str = FISHER_AT_PLATEAU,
    average_mode: str = AVERAGE_OF_FISHER,
    repetitions_per_second: float | None = None,
) -> SensitivityReport:
    """Multiphoton sensitivity bound with photon shot noise and thermal noise.

    The bound uses the common amplitude transmission t and Faraday angle phi
    at the operating Zeeman shift (probe on resonance, where t_plus = t_minus
    by symmetry) and the Doppler-averaged H-channel Fisher information, taken
    either at the small-field plateau (single-number reading, default) or at
    the operating shift itself.  When ``operating_delta`` is None the shift
    is scanned over (0, w_t] and the S-minimizing point is reported, with the
    plateau-shift value alongside.
    """
    if not power_in > 0.0:
        raise ValueError(f"power_in must be > 0, got {power_in}")
    if not temperature >= 0.0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    if fisher_at not in (FISHER_AT_PLATEAU, FISHER_AT_OPERATING):
        raise ValueError(f"fisher_at must be 'plateau' or 'operating', got {fisher_at!r}")

    w_t = transparency_width_analytic(params)
    plateau_delta = PLATEAU_FRACTION * w_t
    assumptions = [
        "g_L mu_B = (1/2) * 2pi * 14.0 GHz/T (|g_F| = 1/2, explicit 2pi)",
        "dimensionless Fisher information is per Zeeman shift in gamma units; "
        "SI scaling by (g_L mu_B / gamma)^2",
        f"H-channel Fisher evaluated at the {fisher_at} shift "
        f"(plateau sampled at delta = w_t/40 = {plateau_delta:.4e} gamma)",
        f"velocity averaging: {average_mode}, shift mode {cfg.shift_mode}, "
        f"order {cfg.quadrature_order}",
        "thermal noise term 2 k_B T with the ensemble temperature",
    ]
    warnings: list[str] = []

    def f_h_at(delta: float) -> float:
        return averaged_fisher(_resonant(params, delta), cfg, average_mode).f_h

    f_h_plateau = f_h_at(plateau_delta)

    def s_of_delta(delta: float) -> float:
        f_h = f_h_plateau if fisher_at == FISHER_AT_PLATEAU else f_h_at(delta)
        return _multiphoton_s_at(
            params, cfg, c, temperature, power_in, delta, f_h
        )[0]

    plateau_s = s_of_delta(plateau_delta)

    if operating_delta is None:
        # Log-spaced scan of (0, w_t] (the bound typically bottoms out on the
        # thermal-noise floor as delta -> 0) plus golden refinement.
        n = 201
        lo_edge = 1e-4 * w_t
        ratio = (w_t / lo_edge) ** (1.0 / (n - 1))
        grid = [lo_edge * ratio**i for i in range(n)]
        values = [s_of_delta(d) for d in grid]
        i_best = min(range(n), key=values.__getitem__)
        lo = grid[max(i_best - 1, 0)]
        hi = grid[min(i_best + 1, n - 1)]
        invphi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        cpt = b - invphi * (b - a)
        dpt = a + invphi * (b - a)
        fc, fd = s_of_delta(cpt), s_of_delta(dpt)
        while abs(b - a) > 1e-6 * w_t:
            if fc < fd:
                b, dpt, fd = dpt, cpt, fc
                cpt = b - invphi * (b - a)
                fc = s_of_delta(cpt)
            else:
                a, cpt, fc = cpt, dpt, fd
                dpt = a + invphi * (b - a)
                fd = s_of_delta(dpt)
        operating_delta = 0.5 * (a + b)
        assumptions.append(
            "operating shift chosen by scanning (0, w_t] for the S minimum"
        )
    elif abs(operating_delta) > w_t:
        warnings.append(
            f"operating delta {operating_delta} exceeds the transparency width {w_t}"
        )

    f_h_used = (
        f_h_plateau if fisher_at == FISHER_AT_PLATEAU else f_h_at(operating_delta)
    )
    s, t, phi, f_phys = _multiphoton_s_at(
        params, cfg, c, temperature, power_in, operating_delta, f_h_used
    )

    f_total_avg = averaged_fisher(
        _resonant(params, operating_delta), cfg, average_mode
    ).f_total
    f_total_phys = fisher_physical(f_total_avg, c)
    per_probe = math.inf if f_total_phys <= 0 else 1.0 / math.sqrt(f_total_phys)
    single = (
        None
        if repetitions_per_second is None
        else single_photon_sensitivity(f_total_phys, repetitions_per_second)
    )
    resp = response(_resonant(params, operating_delta))
    return SensitivityReport(
        per_probe_uncertainty=per_probe,
        single_photon_s=single,
        multiphoton_s=s,
        operating_delta=operating_delta,
        transmissions=(resp.t_plus**2, resp.t_minus**2),
        faraday=phi,
        fisher_physical=f_phys,
        plateau_s=plateau_s,
        assumptions=tuple(assumptions + warnings),
    )
