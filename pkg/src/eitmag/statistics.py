"""Single-photon detection statistics and Fisher information.

A vertically polarized probe photon leaves the cavity in one of three
channels: horizontal (H), vertical (V), or lost (0).  With T_plus / T_minus
the complex transfers of the circular components,

    p_H = |T_plus - T_minus|^2 / 4,
    p_V = |T_plus + T_minus|^2 / 4,
    p_0 = 1 - p_H - p_V.

Fisher information with respect to x = delta/gamma is computed from central
finite differences of these probabilities; the (g_L mu_B)^2 prefactor that
converts it to physical field units lives in :mod:`eitmag.sensitivity`.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import StepUnderflowError
from .params import COPROPAGATING, ModelParams
from .response import _pair_transfers

__all__ = [
    "OutcomeDistribution",
    "FisherResult",
    "outcome_probabilities",
    "d_prob_d_delta",
    "fisher_information",
    "fisher_h",
    "fisher_small_field_expansion",
    "FISHER_CAP",
]

# Flagged-and-capped stand-in for a diverging Fisher term (vanishing
# probability with non-vanishing slope); sweeps must survive such points.
FISHER_CAP = 1e18

_PROB_FLOOR = 1e-15
_SLOPE_FLOOR = 1e-12


@dataclass(frozen=True)
class OutcomeDistribution:
    """Probabilities of the three detection outcomes at fixed delta."""

    p_h: float
    p_v: float
    p_0: float

    def __post_init__(self) -> None:
        tol = 1e-12
        for name in ("p_h", "p_v", "p_0"):
            value = getattr(self, name)
            if not -tol <= value <= 1.0 + tol:
                raise ValueError(f"{name} = {value} outside [0, 1]")
        if self.p_h + self.p_v > 1.0 + tol:
            raise ValueError(f"p_h + p_v = {self.p_h + self.p_v} exceeds 1")


@dataclass(frozen=True)
class FisherResult:
    """Dimensionless Fisher information (delta in gamma units).

    ``f_total`` sums the H, V, and 0 channels; ``f_h`` keeps the H channel
    alone.  ``singular`` marks capped divergences, ``doppler_applied`` and
    ``average_mode`` record whether and how thermal averaging entered.
    """

    f_total: float
    f_h: float
    derivative_step: float
    doppler_applied: bool = False
    singular: bool = False
    average_mode: str | None = None


def _probabilities(
    p: ModelParams, delta: float, kv: float, shift_mode: str
) -> tuple[float, float, float]:
    t_p, t_m = _pair_transfers(p, kv, shift_mode, delta=delta)
    p_h = 0.25 * abs(t_p - t_m) ** 2
    p_v = 0.25 * abs(t_p + t_m) ** 2
    # Grouped so that (p_h + p_v) + p_0 == 1.0 exactly in floating point.
    return p_h, p_v, 1.0 - (p_h + p_v)


def outcome_probabilities(
    p: ModelParams, kv: float = 0.0, shift_mode: str = COPROPAGATING
) -> OutcomeDistribution:
    """Detection-outcome distribution for a single vertically polarized probe."""
    p_h, p_v, p_0 = _probabilities(p, p.delta, kv, shift_mode)
    return OutcomeDistribution(p_h, p_v, p_0)


def derivative_step(x: float) -> float:
    """Central-difference step in x = delta/gamma: max(1e-6, 1e-4 |x|)."""
    return max(1e-6, 1e-4 * abs(x))


def d_prob_d_delta(
    p: ModelParams,
    kv: float = 0.0,
    shift_mode: str = COPROPAGATING,
    step: float | None = None,
) -> tuple[float, float, float]:
    """Central-difference derivatives (dp_H, dp_V, dp_0)/dx at x = p.delta.

    dp_0 is returned as -(dp_H + dp_V), the exact derivative of the
    complement, so the sum rule holds identically.
    """
    x = p.delta
    h = derivative_step(x) if step is None else step
    if x + h == x or x - h == x:
        raise StepUnderflowError(f"step {h} does not perturb delta = {x} representably")
    ph_hi, pv_hi, _ = _probabilities(p, x + h, kv, shift_mode)
    ph_lo, pv_lo, _ = _probabilities(p, x - h, kv, shift_mode)
    dph = (ph_hi - ph_lo) / (2.0 * h)
    dpv = (pv_hi - pv_lo) / (2.0 * h)
    return dph, dpv, -(dph + dpv)


def _fisher_terms(
    probs: tuple[float, float, float], derivs: tuple[float, float, float]
) -> tuple[list[float], bool]:
    """Per-channel contributions (dp)^2/p with degenerate-point handling."""
    terms: list[float] = []
    singular = False
    for prob, dprob in zip(probs, derivs):
        if prob < _PROB_FLOOR:
            if abs(dprob) < _SLOPE_FLOOR:
                terms.append(0.0)  # 0^2/0 limit
            else:
                terms.append(FISHER_CAP)
                singular = True
        else:
            terms.append(dprob * dprob / prob)
    return terms, singular


def fisher_information(
    p: ModelParams, kv: float = 0.0, shift_mode: str = COPROPAGATING
) -> FisherResult:
    """Dimensionless Fisher information of the three-outcome measurement."""
    x = p.delta
    h = derivative_step(x)
    probs = _probabilities(p, x, kv, shift_mode)
    derivs = d_prob_d_delta(p, kv, shift_mode, step=h)
    terms, singular = _fisher_terms(probs, derivs)
    total = terms[0] + terms[1] + terms[2]
    return FisherResult(
        f_total=min(total, FISHER_CAP),
        f_h=terms[0],
        derivative_step=h,
        singular=singular,
    )


def fisher_h(p: ModelParams, kv: float = 0.0, shift_mode: str = COPROPAGATING) -> float:
    """Fisher information carried by the H-polarized channel alone."""
    return fisher_information(p, kv, shift_mode).f_h


def fisher_small_field_expansion(p: ModelParams) -> float:
    """Leading small-field term of the total Fisher information, (2/kappa^2)(g2n/omega^2)^2."""
    if not p.omega > 0.0:
        raise ValueError("small-field expansion requires omega > 0")
    ratio = p.g2n / (p.kappa * p.omega * p.omega)
    return 2.0 * ratio * ratio
