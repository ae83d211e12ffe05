import math
from dataclasses import replace

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from eitmag import (
    DegenerateParametersError,
    ModelParams,
    StepUnderflowError,
    d_prob_d_delta,
    fisher_h,
    fisher_information,
    fisher_small_field_expansion,
    outcome_probabilities,
    response,
)
from eitmag.statistics import FISHER_CAP, _fisher_terms, derivative_step

from test_response import params_strategy


# --- outcome probabilities --------------------------------------------------


def test_empty_resonant_cavity_transmits_input_polarization():
    dist = outcome_probabilities(ModelParams(g2n=0.0, delta=0.0))
    assert dist.p_v == 1.0
    assert dist.p_h == 0.0
    assert dist.p_0 == 0.0


def test_no_rotation_without_field(base):
    dist = outcome_probabilities(replace(base, delta=0.0))
    assert dist.p_h == 0.0


@given(params_strategy())
def test_distribution_is_normalized_and_bounded(p):
    try:
        dist = outcome_probabilities(p)
    except DegenerateParametersError:
        assume(False)
    assert 0.0 <= dist.p_h <= 1.0
    assert 0.0 <= dist.p_v <= 1.0
    assert 0.0 <= dist.p_0 <= 1.0
    assert dist.p_h + dist.p_v <= 1.0 + 1e-12
    assert (dist.p_h + dist.p_v) + dist.p_0 == 1.0


def test_probabilities_relate_to_field_response(base):
    # p_H = t^2 sin^2(phi) and p_V = t^2 cos^2(phi) at the symmetric point.
    r = response(base)
    dist = outcome_probabilities(base)
    assert dist.p_h == pytest.approx(r.t_plus**2 * math.sin(r.faraday) ** 2, rel=1e-9)
    assert dist.p_v == pytest.approx(r.t_plus**2 * math.cos(r.faraday) ** 2, rel=1e-9)


# --- derivatives ------------------------------------------------------------


def test_derivative_vanishes_at_zero_field_by_parity(base):
    dph, _, _ = d_prob_d_delta(replace(base, delta=0.0))
    assert dph == pytest.approx(0.0, abs=1e-10)


def test_derivative_sum_rule(base):
    dph, dpv, dp0 = d_prob_d_delta(base)
    assert dph + dpv + dp0 == pytest.approx(0.0, abs=1e-12)


def test_small_field_slope_against_analytic_model(base):
    # p_H ~ t^2 (g2n/(2 kappa omega^2))^2 x^2, so dp_H/dx ~ 2 t^2 * 625 * x
    # at this working point (the bare slope ignores the finite-dephasing
    # correction, so agreement is at the ten-percent level).
    x = 2e-3
    p = replace(base, delta=x)
    t2 = response(p).t_plus ** 2
    slope = 2.0 * t2 * 625.0 * x
    dph, _, _ = d_prob_d_delta(p)
    assert dph == pytest.approx(slope, rel=0.1)


@pytest.mark.parametrize("x", [0.005 + 0.115 * i / 19 for i in range(20)])
def test_central_difference_agrees_with_richardson(base, x):
    p = replace(base, delta=x)
    h = derivative_step(x)
    coarse = d_prob_d_delta(p, step=h)
    fine = d_prob_d_delta(p, step=h / 2.0)
    for d_coarse, d_fine in zip(coarse, fine):
        richardson = (4.0 * d_fine - d_coarse) / 3.0
        assert d_coarse == pytest.approx(richardson, rel=1e-6, abs=1e-12)


def test_step_underflow_detected(base):
    # The default step rule always perturbs representably; an explicit step
    # below the local ulp must be refused rather than silently returning 0/0.
    with pytest.raises(StepUnderflowError):
        d_prob_d_delta(replace(base, delta=1.0), step=1e-17)


# --- Fisher information -----------------------------------------------------


def test_fisher_zero_without_atoms():
    fr = fisher_information(ModelParams(g2n=0.0, delta=0.05))
    assert fr.f_total == 0.0
    assert fr.f_h == 0.0
    assert not fr.doppler_applied


def test_fisher_small_field_exact_limit():
    # Exact delta -> 0 limit of the three-outcome Fisher information at
    # resonant detunings with gamma' = 0: with a = g2n/(2 kappa), the H and
    # loss channels contribute 4a^2 and 4a(2 + a) per omega^4, i.e.
    # 8 a (a + 1) / omega^4 in total (independent derivation, frozen).
    for g2n, omega, expected in ((100.0, 1.0, 5200.0), (200.0, 0.5, 326400.0)):
        p = ModelParams(g2n=g2n, omega=omega, kappa=2.0, gamma_prime=0.0, delta=1e-4)
        fr = fisher_information(p)
        assert fr.f_total == pytest.approx(expected, rel=2e-3)


def test_fisher_h_plateau_against_small_field_oracle(base):
    # Oracle: p_H ~ t^2 sin^2(25 x) gives F_H ~ 2500 t^2; the dephasing
    # correction keeps the true plateau within ten percent of it.
    p = replace(base, delta=1e-3)
    t2 = response(p).t_plus ** 2
    oracle = 2500.0 * t2
    assert abs(fisher_h(p) - oracle) / oracle <= 0.10


def test_channel_bound_and_nonnegativity(base):
    for d in (1e-4, 1e-3, 1e-2, 0.03, 0.08):
        fr = fisher_information(replace(base, delta=d))
        assert fr.f_total >= -1e-12
        assert fr.f_h >= -1e-12
        assert fr.f_h <= fr.f_total + 1e-9


@given(params_strategy())
def test_channel_bound_random(p):
    try:
        fr = fisher_information(p)
    except (DegenerateParametersError, StepUnderflowError):
        assume(False)
    assert fr.f_h <= fr.f_total + 1e-9


def test_even_parity_in_delta(base):
    for d in (1e-3, 0.0123, 0.07):
        plus = fisher_information(replace(base, delta=d))
        minus = fisher_information(replace(base, delta=-d))
        assert plus.f_total == pytest.approx(minus.f_total, abs=1e-10)
        assert plus.f_h == pytest.approx(minus.f_h, abs=1e-10)


def test_degenerate_term_handling():
    # 0^2/0 terms drop; vanishing probability with live slope is capped.
    terms, singular = _fisher_terms((0.0, 0.5, 0.5), (0.0, 1.0, -1.0))
    assert terms[0] == 0.0 and not singular
    terms, singular = _fisher_terms((0.0, 0.5, 0.5), (1e-3, -1e-3, 0.0))
    assert terms[0] == FISHER_CAP and singular


# --- small-field expansion --------------------------------------------------


def test_expansion_values(base, improved):
    assert fisher_small_field_expansion(base) == pytest.approx(5000.0, abs=1e-9)
    assert fisher_small_field_expansion(improved) == pytest.approx(320000.0, abs=1e-6)


def test_expansion_scales_quartically_with_collective_coupling(base):
    assert fisher_small_field_expansion(
        replace(base, g2n=4 * base.g2n)
    ) == pytest.approx(16 * fisher_small_field_expansion(base), rel=1e-12)
