"""Thermal-velocity averaging over the 1D Maxwell-Boltzmann distribution.

Observables of the per-atom velocity shift kv are averaged against the
normalized Gaussian weight exp(-(kv)^2 / width^2) / sqrt(pi width^2) by
Gauss-Hermite quadrature, where the 1/e half-width is

    width = sqrt(2 k_B T omega^2 / (m c^2))   [rad/s],

converted to gamma units before the model is evaluated.  Averages are
deterministic: fixed node order, fixed-order compensated summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateParametersError, QuadratureDivergenceError
from .params import COPROPAGATING, SHIFT_MODES, ModelParams, Polarization
from .statistics import (
    FISHER_CAP,
    FisherResult,
    OutcomeDistribution,
    _fisher_terms,
    derivative_step,
)

__all__ = [
    "DopplerConfig",
    "doppler_width",
    "doppler_width_in_gamma",
    "doppler_average",
    "averaged_outcome_probabilities",
    "averaged_fisher",
    "probability_kv_profile",
    "fisher_kv_profile",
    "AVERAGE_OF_FISHER",
    "FISHER_OF_AVERAGED",
]

BOLTZMANN = 1.380649e-23  # J/K
SPEED_OF_LIGHT = 299792458.0  # m/s
RB87_MASS = 1.443e-25  # kg
D1_WAVELENGTH = 794.98e-9  # m
GAMMA_SI_DEFAULT = math.pi * 6.06e6  # rad/s, excited-state half-linewidth

# Averaging modes for Fisher information: average the per-velocity-class
# Fisher integrand (default), or take Fisher of the velocity-averaged
# outcome distribution (the operative quantity for velocity-blind detectors).
AVERAGE_OF_FISHER = "average_of_fisher"
FISHER_OF_AVERAGED = "fisher_of_averaged_probabilities"

_INTEGRAND_GUARD = 1e12


@dataclass(frozen=True)
class DopplerConfig:
    """Thermal ensemble and quadrature settings for velocity averaging."""

    temperature: float = 1e-3  # K
    atomic_mass: float = RB87_MASS  # kg
    angular_frequency: float = 2.0 * math.pi * SPEED_OF_LIGHT / D1_WAVELENGTH  # rad/s
    width_override: float | None = None  # rad/s
    quadrature_order: int = 64
    shift_mode: str = COPROPAGATING
    gamma_si: float = GAMMA_SI_DEFAULT  # rad/s, for conversion to gamma units

    def __post_init__(self) -> None:
        if not self.temperature > 0.0:
            raise ValueError(f"temperature must be > 0, got {self.temperature}")
        if not self.atomic_mass > 0.0:
            raise ValueError(f"atomic_mass must be > 0, got {self.atomic_mass}")
        if not self.angular_frequency > 0.0:
            raise ValueError(
                f"angular_frequency must be > 0, got {self.angular_frequency}"
            )
        if self.quadrature_order < 2:
            raise ValueError(
                f"quadrature_order must be >= 2, got {self.quadrature_order}"
            )
        if self.shift_mode not in SHIFT_MODES:
            raise ValueError(
                f"shift_mode must be one of {SHIFT_MODES}, got {self.shift_mode!r}"
            )
        if not self.gamma_si > 0.0:
            raise ValueError(f"gamma_si must be > 0, got {self.gamma_si}")
        if doppler_width(self) <= 0.0:
            raise ValueError("Doppler width must be > 0")


def doppler_width(cfg: DopplerConfig) -> float:
    """1/e half-width of the thermal detuning distribution, in rad/s.

    Honors ``width_override`` verbatim when set.  The ordinary-frequency
    value is this divided by 2 pi.
    """
    if cfg.width_override is not None:
        return cfg.width_override
    return cfg.angular_frequency * math.sqrt(
        2.0 * BOLTZMANN * cfg.temperature / (cfg.atomic_mass * SPEED_OF_LIGHT**2)
    )


def doppler_width_in_gamma(cfg: DopplerConfig) -> float:
    """Doppler width converted to units of the half-linewidth gamma."""
    return doppler_width(cfg) / cfg.gamma_si


def _nodes(cfg: DopplerConfig) -> tuple[np.ndarray, np.ndarray, float]:
    u, w = np.polynomial.hermite.hermgauss(cfg.quadrature_order)
    return u, w, doppler_width_in_gamma(cfg)


def doppler_average(f: Callable[[float], float], cfg: DopplerConfig) -> float:
    """Average f(kv) over the thermal velocity distribution (kv in gamma units)."""
    u, w, width = _nodes(cfg)
    values = [f(width * ui) for ui in u]
    if abs(values[0]) > _INTEGRAND_GUARD or abs(values[-1]) > _INTEGRAND_GUARD:
        raise QuadratureDivergenceError(
            "integrand exceeds 1e12 at the outermost quadrature node"
        )
    return math.fsum(wi * vi for wi, vi in zip(w, values)) / math.sqrt(math.pi)


def probability_kv_profile(
    p: ModelParams,
    kv: np.ndarray,
    shift_mode: str = COPROPAGATING,
    delta: float | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Outcome probabilities (p_H, p_V, p_0) on an array of velocity shifts."""
    if shift_mode not in SHIFT_MODES:
        raise ValueError(f"shift_mode must be one of {SHIFT_MODES}, got {shift_mode!r}")
    kv = np.asarray(kv, dtype=float)
    d = p.delta if delta is None else delta
    dp_eff = p.delta_p - kv
    dd_eff = p.delta_d - kv if shift_mode == COPROPAGATING else p.delta_d
    s_plus = p.zeeman_sign(Polarization.SIGMA_PLUS)
    omega_sq = p.omega * p.omega
    cavity = complex(p.kappa, -p.delta_c)
    transfers = []
    for sdelta in (s_plus * d, -s_plus * d):
        d0 = -1.0 + 1j * (dp_eff + sdelta)
        d1 = -p.gamma_prime + 1j * (dp_eff - dd_eff + sdelta)
        den = d0 * d1 + omega_sq
        if np.any(den == 0):
            raise DegenerateParametersError(
                "susceptibility denominator vanished exactly at a velocity node"
            )
        chi = 0.5j * p.g2n * d1 / den
        transfers.append(p.kappa / (cavity + 1j * chi))
    t_p, t_m = transfers
    p_h = 0.25 * np.abs(t_p - t_m) ** 2
    p_v = 0.25 * np.abs(t_p + t_m) ** 2
    return p_h, p_v, 1.0 - (p_h + p_v)


def fisher_kv_profile(
    p: ModelParams, kv: np.ndarray, shift_mode: str = COPROPAGATING
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Per-velocity-class Fisher information (totals, H channel, singular flag)."""
    kv = np.asarray(kv, dtype=float)
    x = p.delta
    h = derivative_step(x)
    probs = probability_kv_profile(p, kv, shift_mode)
    hi = probability_kv_profile(p, kv, shift_mode, delta=x + h)
    lo = probability_kv_profile(p, kv, shift_mode, delta=x - h)
    dph = (hi[0] - lo[0]) / (2.0 * h)
    dpv = (hi[1] - lo[1]) / (2.0 * h)
    derivs = (dph, dpv, -(dph + dpv))
    terms = []
    singular = False
    for prob, dprob in zip(probs, derivs):
        small = prob < 1e-15
        flat = np.abs(dprob) < 1e-12
        capped = small & ~flat
        singular = singular or bool(np.any(capped))
        safe = np.where(small, 1.0, prob)
        term = np.where(small, np.where(flat, 0.0, FISHER_CAP), dprob * dprob / safe)
        terms.append(term)
    f_total = np.minimum(terms[0] + terms[1] + terms[2], FISHER_CAP)
    return f_total, terms[0], singular


def averaged_outcome_probabilities(
    p: ModelParams, cfg: DopplerConfig
) -> OutcomeDistribution:
    """Velocity-averaged detection-outcome distribution."""
    p_h, p_v, _ = _averaged_probabilities_at(p, p.delta, cfg)
    return OutcomeDistribution(p_h, p_v, 1.0 - (p_h + p_v))


def _averaged_probabilities_at(
    p: ModelParams, delta: float, cfg: DopplerConfig
) -> tuple[float, float, float]:
    u, w, width = _nodes(cfg)
    ph, pv, _ = probability_kv_profile(p, width * u, cfg.shift_mode, delta=delta)
    root_pi = math.sqrt(math.pi)
    p_h = float(w @ ph) / root_pi
    p_v = float(w @ pv) / root_pi
    return p_h, p_v, 1.0 - (p_h + p_v)


def averaged_fisher(
    p: ModelParams, cfg: DopplerConfig, average_mode: str = AVERAGE_OF_FISHER
) -> FisherResult:
    """Doppler-averaged Fisher information.

    ``average_mode`` selects between averaging the per-velocity-class Fisher
    integrand and computing Fisher information of the velocity-averaged
    outcome distribution; the result records which was used.
    """
    x = p.delta
    h = derivative_step(x)
    if average_mode == AVERAGE_OF_FISHER:
        u, w, width = _nodes(cfg)
        totals, h_terms, singular = fisher_kv_profile(p, width * u, cfg.shift_mode)
        root_pi = math.sqrt(math.pi)
        f_total = float(w @ totals) / root_pi
        f_h = float(w @ h_terms) / root_pi
    elif average_mode == FISHER_OF_AVERAGED:
        probs = _averaged_probabilities_at(p, x, cfg)
        ph_hi, pv_hi, _ = _averaged_probabilities_at(p, x + h, cfg)
        ph_lo, pv_lo, _ = _averaged_probabilities_at(p, x - h, cfg)
        dph = (ph_hi - ph_lo) / (2.0 * h)
        dpv = (pv_hi - pv_lo) / (2.0 * h)
        terms, singular = _fisher_terms(probs, (dph, dpv, -(dph + dpv)))
        f_total = terms[0] + terms[1] + terms[2]
        f_h = terms[0]
    else:
        raise ValueError(
            f"average_mode must be {AVERAGE_OF_FISHER!r} or {FISHER_OF_AVERAGED!r},"
            f" got {average_mode!r}"
        )
    return FisherResult(
        f_total=min(f_total, FISHER_CAP),
        f_h=min(f_h, FISHER_CAP),
        derivative_step=h,
        doppler_applied=True,
        singular=singular,
        average_mode=average_mode,
    )
