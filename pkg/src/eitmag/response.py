"""Steady-state optical response of the driven atom-cavity system.

For the circular component whose Zeeman branch carries sign s, the atomic
susceptibility is evaluated in the pole-free cleared form

    chi = i g2n d1 / (2 (d0 d1 + omega^2)),
    d0 = i (delta_p_eff + s delta) - 1,
    d1 = i (delta_p_eff - delta_d_eff + s delta) - gamma_prime,

with all rates in units of the excited-state half-linewidth (gamma = 1) and
the per-atom velocity shift kv folded into the effective detunings according
to the chosen shift mode.  The sign convention is fixed so that absorption
appears as Im chi <= 0; the cavity amplitude transfer is then

    T = kappa / (kappa - i delta_c + i chi),

which gives T = 1 for an empty resonant cavity and |T| <= 1 always
(passivity).  The Faraday rotation of the transmitted linear polarization is
half the phase difference of the two circular components.
"""

from __future__ import annotations

import math

from .errors import DegenerateParametersError, NoPeakFoundError, RegimeViolationError
from .params import (
    COPROPAGATING,
    SHIFT_MODES,
    FieldResponse,
    ModelParams,
    Polarization,
)

__all__ = [
    "susceptibility",
    "cavity_transfer",
    "response",
    "resonant_closed_form",
    "small_field_faraday",
    "transparency_width_analytic",
    "transparency_width_measured",
]


def _effective_detunings(p: ModelParams, kv: float, shift_mode: str) -> tuple[float, float]:
    if shift_mode not in SHIFT_MODES:
        raise ValueError(f"shift_mode must be one of {SHIFT_MODES}, got {shift_mode!r}")
    dp = p.delta_p - kv
    dd = p.delta_d - kv if shift_mode == COPROPAGATING else p.delta_d
    return dp, dd


def _susceptibility_raw(
    g2n: float, omega: float, gamma_prime: float, dp: float, dd: float, sdelta: float
) -> complex:
    d0 = complex(-1.0, dp + sdelta)
    d1 = complex(-gamma_prime, dp - dd + sdelta)
    den = d0 * d1 + omega * omega
    if den == 0:
        raise DegenerateParametersError(
            "susceptibility denominator vanished exactly "
            "(omega = 0 with gamma_prime = 0 at two-photon resonance)"
        )
    return 0.5j * g2n * d1 / den


def _transfer_raw(p: ModelParams, sdelta: float, dp: float, dd: float) -> complex:
    chi = _susceptibility_raw(p.g2n, p.omega, p.gamma_prime, dp, dd, sdelta)
    return p.kappa / (complex(p.kappa, -p.delta_c) + 1j * chi)


def _pair_transfers(
    p: ModelParams,
    kv: float = 0.0,
    shift_mode: str = COPROPAGATING,
    delta: float | None = None,
) -> tuple[complex, complex]:
    """Cavity transfers (T_plus, T_minus), optionally at an overridden delta."""
    dp, dd = _effective_detunings(p, kv, shift_mode)
    d = p.delta if delta is None else delta
    s_plus = p.zeeman_sign(Polarization.SIGMA_PLUS)
    t_p = _transfer_raw(p, s_plus * d, dp, dd)
    t_m = _transfer_raw(p, -s_plus * d, dp, dd)
    return t_p, t_m


def susceptibility(
    p: ModelParams,
    pol: Polarization,
    kv: float = 0.0,
    shift_mode: str = COPROPAGATING,
) -> complex:
    """Atomic susceptibility of one circular component, in units of gamma.

    ``kv`` is the per-atom Doppler shift (gamma units), inserted into the
    detunings according to ``shift_mode``.  Im chi <= 0 for every valid
    parameter set (absorptive medium in this sign convention).
    """
    dp, dd = _effective_detunings(p, kv, shift_mode)
    return _susceptibility_raw(
        p.g2n, p.omega, p.gamma_prime, dp, dd, p.zeeman_sign(pol) * p.delta
    )


def cavity_transfer(
    p: ModelParams,
    pol: Polarization,
    kv: float = 0.0,
    shift_mode: str = COPROPAGATING,
) -> complex:
    """Complex amplitude transfer T of the cavity for one circular component.

    t = |T| is the amplitude transmission and arg T the phase shift.
    """
    dp, dd = _effective_detunings(p, kv, shift_mode)
    return _transfer_raw(p, p.zeeman_sign(pol) * p.delta, dp, dd)


def response(
    p: ModelParams, kv: float = 0.0, shift_mode: str = COPROPAGATING
) -> FieldResponse:
    """Polarization-resolved transmission, phases, and Faraday angle."""
    t_p, t_m = _pair_transfers(p, kv, shift_mode)
    return FieldResponse.from_transfers(t_p, t_m)


def resonant_closed_form(p: ModelParams) -> FieldResponse:
    """Closed-form response at resonant detunings with no ground-state dephasing.

    Valid only for delta_p = delta_d = delta_c = 0 and gamma_prime = 0.  In
    terms of dprime = delta - omega^2/delta the transfer of the branch with
    Zeeman sign s reduces exactly to

        T_s = 2 kappa (1 - i s dprime) / ((2 kappa + g2n) - 2 i kappa s dprime),

    evaluated here directly; the delta -> 0 limit (dprime -> -inf) is t = 1,
    phi = 0 and is returned explicitly instead of evaluating 1/delta.
    """
    if not (p.delta_p == 0.0 and p.delta_d == 0.0 and p.delta_c == 0.0):
        raise RegimeViolationError(
            "closed form requires delta_p = delta_d = delta_c = 0"
        )
    if p.gamma_prime != 0.0:
        raise RegimeViolationError("closed form requires gamma_prime = 0")
    if p.delta == 0.0:
        return FieldResponse(1.0, 1.0, 0.0, 0.0, 0.0)

    dprime = p.delta - p.omega * p.omega / p.delta
    two_k = 2.0 * p.kappa
    denom_re = two_k + p.g2n

    def branch(s: float) -> tuple[float, float]:
        t = two_k * math.hypot(1.0, dprime) / math.hypot(denom_re, two_k * dprime)
        phi = math.atan2(-s * dprime, 1.0) - math.atan2(-two_k * s * dprime, denom_re)
        return t, phi

    s_plus = p.zeeman_sign(Polarization.SIGMA_PLUS)
    t_p, phi_p = branch(s_plus)
    t_m, phi_m = branch(-s_plus)
    return FieldResponse(t_p, t_m, phi_p, phi_m, 0.5 * (phi_m - phi_p))


def small_field_faraday(p: ModelParams) -> float:
    """Leading small-field Faraday angle (delta / 2 kappa) (g2n / omega^2)."""
    if not p.omega > 0.0:
        raise ValueError("small-field Faraday approximation requires omega > 0")
    return (p.delta / (2.0 * p.kappa)) * (p.g2n / (p.omega * p.omega))


def transparency_width_analytic(p: ModelParams) -> float:
    """Analytic transparency half-width gamma_prime + 2 kappa omega^2 / g2n."""
    if p.g2n == 0.0:
        raise ZeroDivisionError("transparency width undefined for g2n = 0")
    return p.gamma_prime + 2.0 * p.kappa * p.omega * p.omega / p.g2n


def _golden_max(f, a: float, b: float, tol: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while abs(b - a) > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def transparency_width_measured(p: ModelParams, pol: Polarization) -> float:
    """Half width at half maximum of the transparency peak, measured on t^2(delta_p).

    The peak near the two-photon resonance is located by golden-section
    refinement of a coarse scan; the half-maximum level sits midway between
    the peak value and the baseline (the t^2 minimum within ten analytic
    widths), and each side is resolved by bisection.  Returns the mean of the
    two half-widths.
    """
    try:
        w_ref = transparency_width_analytic(p)
    except ZeroDivisionError:
        w_ref = p.kappa  # no EIT window; scan on the cavity scale instead
    s = p.zeeman_sign(pol)
    center = p.delta_d - s * p.delta

    def t2(delta_p: float) -> float:
        return abs(_transfer_raw(p, s * p.delta, delta_p, p.delta_d)) ** 2

    # Peak location from a coarse grid, then golden refinement.
    n_coarse = 401
    lo, hi = center - 3.0 * w_ref, center + 3.0 * w_ref
    xs = [lo + (hi - lo) * i / (n_coarse - 1) for i in range(n_coarse)]
    vals = [t2(x) for x in xs]
    i_max = max(range(n_coarse), key=vals.__getitem__)
    a = xs[max(i_max - 1, 0)]
    b = xs[min(i_max + 1, n_coarse - 1)]
    x_peak, peak = _golden_max(t2, a, b, tol=1e-10)
    if vals[i_max] > peak:
        x_peak, peak = xs[i_max], vals[i_max]

    # Baseline: minimum within +-10 analytic widths of the peak.
    n_base = 2001
    base_lo, base_hi = x_peak - 10.0 * w_ref, x_peak + 10.0 * w_ref
    baseline = min(
        t2(base_lo + (base_hi - base_lo) * i / (n_base - 1)) for i in range(n_base)
    )
    contrast = peak - baseline
    if contrast < 1e-6:
        raise NoPeakFoundError(
            f"transparency peak contrast {contrast:.3e} below 1e-6"
        )
    level = baseline + 0.5 * contrast

    def crossing(side: float) -> float:
        # First scan outward for a point below the half-maximum level.
        step = w_ref / 4.0
        x_out = x_peak
        for _ in range(2000):
            x_out += side * step
            if t2(x_out) < level:
                break
        else:
            raise NoPeakFoundError("half-maximum level never crossed")
        a, b = x_peak, x_out
        for _ in range(200):
            mid = 0.5 * (a + b)
            if t2(mid) >= level:
                a = mid
            else:
                b = mid
            if abs(b - a) < 1e-14 * max(1.0, abs(x_peak)) + 1e-15:
                break
        return abs(0.5 * (a + b) - x_peak)

    return 0.5 * (crossing(+1.0) + crossing(-1.0))
