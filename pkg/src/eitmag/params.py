"""Parameter and response containers for the cavity-EIT magnetometer model.

Unit system: the excited-state half-linewidth gamma is the frequency unit
(gamma = 1), so every rate and detuning below is dimensionless.  SI
conversions are confined to :mod:`eitmag.sensitivity`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

# Zeeman-branch assignment of the circular components.  "swapped" puts the
# sigma+ transparency peak at delta_p = +delta, "as_written" at -delta.  All
# probabilities and Fisher quantities are invariant under the switch; only
# the sign of the Faraday angle flips.
AS_WRITTEN = "as_written"
SWAPPED = "swapped"
SIGMA_MAPPINGS = (AS_WRITTEN, SWAPPED)

# How the per-atom velocity shift kv enters the detunings: "copropagating"
# shifts probe and drive together (two-photon Doppler-free), "probe_only"
# shifts the probe alone.
COPROPAGATING = "copropagating"
PROBE_ONLY = "probe_only"
SHIFT_MODES = (COPROPAGATING, PROBE_ONLY)


class Polarization(Enum):
    """Circular polarization component of the probe field."""

    SIGMA_PLUS = "sigma_plus"
    SIGMA_MINUS = "sigma_minus"


@dataclass(frozen=True)
class ModelParams:
    """Spectroscopic parameters of the driven atom-cavity system, in units of gamma.

    Attributes
    ----------
    g2n : float
        Collective coupling squared g^2 N (gamma^2), >= 0.
    omega : float
        Drive half-Rabi frequency (gamma), >= 0.
    kappa : float
        Total cavity decay rate (gamma), > 0.
    gamma_prime : float
        Ground-state dephasing rate (gamma), >= 0.
    delta_p, delta_d : float
        Probe / drive one-photon detunings (gamma).
    delta_c : float
        Probe-cavity detuning (gamma).
    delta : float
        Zeeman shift (gamma); its sign encodes the field direction.
    sigma_mapping : str
        Which circular component carries the +delta Zeeman branch.
    """

    g2n: float = 100.0
    omega: float = 1.0
    kappa: float = 2.0
    gamma_prime: float = 1e-3
    delta_p: float = 0.0
    delta_d: float = 0.0
    delta_c: float = 0.0
    delta: float = 0.0
    sigma_mapping: str = SWAPPED

    def __post_init__(self) -> None:
        if not self.g2n >= 0.0:
            raise ValueError(f"g2n must be >= 0, got {self.g2n}")
        if not self.omega >= 0.0:
            raise ValueError(f"omega must be >= 0, got {self.omega}")
        if not self.kappa > 0.0:
            raise ValueError(f"kappa must be > 0, got {self.kappa}")
        if not self.gamma_prime >= 0.0:
            raise ValueError(f"gamma_prime must be >= 0, got {self.gamma_prime}")
        for name in ("delta_p", "delta_d", "delta_c", "delta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.sigma_mapping not in SIGMA_MAPPINGS:
            raise ValueError(
                f"sigma_mapping must be one of {SIGMA_MAPPINGS}, got {self.sigma_mapping!r}"
            )

    def zeeman_sign(self, pol: Polarization) -> float:
        """Sign s with which delta enters the detunings of this component."""
        plus = 1.0 if self.sigma_mapping == AS_WRITTEN else -1.0
        return plus if pol is Polarization.SIGMA_PLUS else -plus


@dataclass(frozen=True)
class FieldResponse:
    """Per-polarization amplitude transmission and phase, plus the Faraday angle.

    ``faraday`` is (phi_minus - phi_plus) / 2 by construction; phases are
    principal values unless produced by a sweep with unwrapping enabled.
    """

    t_plus: float
    t_minus: float
    phi_plus: float
    phi_minus: float
    faraday: float

    def __post_init__(self) -> None:
        tol = 1e-12
        for name in ("t_plus", "t_minus"):
            t = getattr(self, name)
            if not -tol <= t <= 1.0 + tol:
                raise ValueError(f"{name} = {t} outside [0, 1] (passivity violated)")

    @classmethod
    def from_transfers(cls, t_plus: complex, t_minus: complex) -> "FieldResponse":
        phi_p = math.atan2(t_plus.imag, t_plus.real)
        phi_m = math.atan2(t_minus.imag, t_minus.real)
        return cls(
            t_plus=abs(t_plus),
            t_minus=abs(t_minus),
            phi_plus=phi_p,
            phi_minus=phi_m,
            faraday=0.5 * (phi_m - phi_p),
        )
