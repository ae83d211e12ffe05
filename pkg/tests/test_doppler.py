import math
from dataclasses import replace

import numpy as np
import pytest

from eitmag import (
    AVERAGE_OF_FISHER,
    FISHER_OF_AVERAGED,
    PROBE_ONLY,
    DopplerConfig,
    ModelParams,
    QuadratureDivergenceError,
    averaged_fisher,
    averaged_outcome_probabilities,
    doppler_average,
    doppler_width,
    doppler_width_in_gamma,
    fisher_information,
)
from eitmag.doppler import fisher_kv_profile


# --- width formula ----------------------------------------------------------


def test_width_for_cold_rubidium(doppler_1mk):
    w = doppler_width(doppler_1mk)
    assert w == pytest.approx(3.4574e6, rel=2e-3)  # rad/s
    assert w / (2 * math.pi) == pytest.approx(0.5503e6, rel=2e-3)  # ordinary Hz
    assert doppler_width_in_gamma(doppler_1mk) == pytest.approx(0.1816, rel=2e-3)


def test_width_scales_as_sqrt_temperature(doppler_1mk):
    hot = replace(doppler_1mk, temperature=4.0 * doppler_1mk.temperature)
    assert doppler_width(hot) == pytest.approx(2.0 * doppler_width(doppler_1mk), rel=1e-12)


def test_width_override_is_verbatim(doppler_1mk):
    cfg = replace(doppler_1mk, width_override=1.234e6)
    assert doppler_width(cfg) == 1.234e6


def test_config_validation():
    with pytest.raises(ValueError):
        DopplerConfig(temperature=0.0)
    with pytest.raises(ValueError):
        DopplerConfig(quadrature_order=1)
    with pytest.raises(ValueError):
        DopplerConfig(width_override=-1.0)


# --- quadrature -------------------------------------------------------------


def test_average_of_constant(doppler_1mk):
    assert doppler_average(lambda kv: 3.7, doppler_1mk) == pytest.approx(3.7, rel=1e-12)


def test_gaussian_second_moment(doppler_1mk):
    w = doppler_width_in_gamma(doppler_1mk)
    got = doppler_average(lambda kv: kv * kv, doppler_1mk)
    assert got == pytest.approx(w * w / 2.0, rel=1e-10)


def test_integrand_guard(doppler_1mk):
    with pytest.raises(QuadratureDivergenceError):
        doppler_average(lambda kv: 1e13, doppler_1mk)


@pytest.mark.parametrize("delta", [1e-3, 1e-2, 4.25e-2])
def test_order_64_vs_128(base, delta, doppler_1mk):
    p = replace(base, delta=delta)
    f64 = averaged_fisher(p, doppler_1mk).f_total
    f128 = averaged_fisher(p, replace(doppler_1mk, quadrature_order=128)).f_total
    assert abs(f64 - f128) / f64 < 1e-8


def test_gauss_hermite_vs_trapezoid_oracle(base, doppler_1mk):
    # Independent integration rule over the same integrand: 1e5-point
    # trapezoid on kv in +-6 widths of the Gaussian weight.
    p = replace(base, delta=1e-2)
    width = doppler_width_in_gamma(doppler_1mk)
    kv = np.linspace(-6.0 * width, 6.0 * width, 100_000)
    totals, _, _ = fisher_kv_profile(p, kv, doppler_1mk.shift_mode)
    weight = np.exp(-((kv / width) ** 2)) / (math.sqrt(math.pi) * width)
    oracle = float(np.trapezoid(totals * weight, kv))
    got = averaged_fisher(p, doppler_1mk).f_total
    assert abs(got - oracle) / oracle < 1e-6


# --- averaged observables ---------------------------------------------------


def test_cold_limit_reproduces_free_values(base):
    cold = DopplerConfig(temperature=1e-15)
    p = replace(base, delta=1e-2)
    free = fisher_information(p)
    avg = averaged_fisher(p, cold)
    assert avg.f_total == pytest.approx(free.f_total, rel=1e-8)
    assert avg.f_h == pytest.approx(free.f_h, rel=1e-8)


def test_averaged_probabilities_stay_in_bounds(base, doppler_1mk):
    for d in (0.0, 1e-3, 0.02, 0.1):
        dist = averaged_outcome_probabilities(replace(base, delta=d), doppler_1mk)
        assert 0.0 <= dist.p_h <= 1.0
        assert 0.0 <= dist.p_v <= 1.0
        assert 0.0 <= dist.p_0 <= 1.0


def test_average_of_nonnegative_observable_is_nonnegative(base, doppler_1mk):
    got = doppler_average(lambda kv: abs(kv), doppler_1mk)
    assert got >= 0.0


def test_result_records_averaging_context(base, doppler_1mk):
    fr = averaged_fisher(base, doppler_1mk)
    assert fr.doppler_applied
    assert fr.average_mode == AVERAGE_OF_FISHER
    fr2 = averaged_fisher(base, doppler_1mk, FISHER_OF_AVERAGED)
    assert fr2.average_mode == FISHER_OF_AVERAGED
    assert fr2.f_total >= 0.0


def test_two_photon_free_insertion_is_nearly_doppler_immune(base, doppler_1mk):
    # Shifting probe and drive together preserves the two-photon resonance;
    # at the Fisher peak the thermal average moves the value by < 1e-3
    # relative (it is not strictly a degradation at this level).
    p = replace(base, delta=1.03e-2)
    free = fisher_information(p).f_total
    avg = averaged_fisher(p, doppler_1mk).f_total
    assert abs(avg - free) / free < 1e-3


def test_probe_only_insertion_degrades_strongly(base, doppler_1mk):
    cfg_po = replace(doppler_1mk, shift_mode=PROBE_ONLY)
    for d in (1e-3, 1.03e-2):
        p = replace(base, delta=d)
        po = averaged_fisher(p, cfg_po)
        co = averaged_fisher(p, doppler_1mk)
        free = fisher_information(p)
        assert po.f_h < co.f_h
        assert po.f_total < free.f_total
