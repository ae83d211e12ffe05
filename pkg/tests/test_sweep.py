import math
from dataclasses import replace

import pytest

from eitmag import (
    DopplerConfig,
    ModelParams,
    NoBracketError,
    SweepSpec,
    find_extremum,
    golden_section,
    optimize_operating_point,
    outcome_probabilities,
    run_sweep,
)
from eitmag.sweep import OBSERVABLES, _unwrap_with_gaps


# --- spec validation and grids ----------------------------------------------


def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(axis="nonsense", start=0, stop=1, points=5)
    with pytest.raises(ValueError):
        SweepSpec(axis="delta", start=1.0, stop=0.0, points=5)
    with pytest.raises(ValueError):
        SweepSpec(axis="delta", start=-1.0, stop=1.0, points=5, scale="log")
    with pytest.raises(ValueError):
        SweepSpec(axis="delta", start=0.0, stop=1.0, points=5, observables=())
    with pytest.raises(ValueError):
        SweepSpec(axis="delta", start=0.0, stop=1.0, points=5, observables=("bogus",))


def test_log_grid():
    spec = SweepSpec(axis="delta", start=1e-4, stop=1e-1, points=4, scale="log")
    grid = spec.grid()
    assert grid[0] == pytest.approx(1e-4) and grid[-1] == pytest.approx(1e-1)
    ratios = [grid[i + 1] / grid[i] for i in range(3)]
    assert all(r == pytest.approx(10.0, rel=1e-9) for r in ratios)


# --- run_sweep --------------------------------------------------------------


def test_sweep_values_match_pointwise_evaluation(base):
    spec = SweepSpec(
        axis="delta", start=-0.05, stop=0.05, points=21, observables=("p_h", "p_v", "p_0")
    )
    table = run_sweep(spec, base)
    for i, d in enumerate(table.axis_values):
        dist = outcome_probabilities(replace(base, delta=d))
        assert table.column("p_h")[i] == dist.p_h
        assert table.column("p_v")[i] == dist.p_v


def test_sweep_is_deterministic_and_worker_independent(base):
    spec = SweepSpec(
        axis="delta_p", start=-0.1, stop=0.1, points=101,
        observables=("t2_plus", "faraday", "fisher"),
    )
    t1 = run_sweep(spec, base)
    t2 = run_sweep(spec, base)
    t3 = run_sweep(spec, base, workers=4)
    assert t1.axis_values == t2.axis_values == t3.axis_values
    for name in spec.observables:
        assert t1.column(name) == t2.column(name) == t3.column(name)


def test_point_failures_are_flagged_not_fatal(base):
    spec = SweepSpec(axis="kappa", start=-0.5, stop=0.5, points=11, observables=("t2_plus",))
    table = run_sweep(spec, base)
    assert table.n_rows == 11
    bad_rows = {row for row, _, _ in table.flags}
    assert bad_rows  # kappa <= 0 rows must be flagged
    for row in bad_rows:
        assert math.isnan(table.column("t2_plus")[row])
    good = [v for i, v in enumerate(table.column("t2_plus")) if i not in bad_rows]
    assert all(math.isfinite(v) for v in good)


def test_constant_observable_column(base):
    spec = SweepSpec(axis="delta", start=-0.1, stop=0.1, points=9, observables=("fisher",))
    table = run_sweep(spec, replace(base, g2n=0.0))
    assert table.column("fisher") == [0.0] * 9


def test_metadata_carries_conventions_and_unwrap_flag(base, doppler_1mk):
    spec = SweepSpec(
        axis="delta", start=-0.1, stop=0.1, points=9,
        observables=("phi_plus", "fisher"), doppler=doppler_1mk,
    )
    table = run_sweep(spec, base)
    md = table.metadata
    assert md["sigma_mapping"] == "swapped"
    assert md["doppler.shift_mode"] == "copropagating"
    assert md["fisher_average"] == "average_of_fisher"
    assert md["phases_unwrapped"] is True
    assert md["model.g2n"] == base.g2n


def test_b_field_axis_maps_through_zeeman_shift(base, constants):
    spec = SweepSpec(axis="b_field", start=1e-7, stop=1e-5, points=5, observables=("faraday",))
    table = run_sweep(spec, base, constants)
    from eitmag import response, zeeman_shift

    for b, phi in zip(table.axis_values, table.column("faraday")):
        assert phi == response(replace(base, delta=zeeman_shift(b, constants))).faraday


def test_unwrap_helper_handles_gaps():
    wrapped = [0.0, 3.0, -3.0, math.nan, 0.1, 0.2]
    out = _unwrap_with_gaps(wrapped)
    assert out[0] == 0.0 and out[1] == 3.0
    assert out[2] == pytest.approx(3.0 + (2 * math.pi - 6.0), rel=1e-12)
    assert math.isnan(out[3])
    assert out[4:] == [0.1, 0.2]


def test_all_observables_evaluate(base, doppler_1mk):
    spec = SweepSpec(
        axis="delta", start=1e-3, stop=0.05, points=5, observables=OBSERVABLES,
        doppler=doppler_1mk,
    )
    table = run_sweep(spec, base)
    assert not table.flags
    for name in OBSERVABLES:
        assert all(math.isfinite(v) for v in table.column(name))


# --- golden section and extremum refinement ---------------------------------


def test_golden_section_quadratic():
    x, fx = golden_section(lambda x: (x - 2.0) ** 2, 0.0, 5.0, tol=1e-9)
    assert x == pytest.approx(2.0, abs=1e-8)
    assert fx == pytest.approx(0.0, abs=1e-15)


def test_golden_section_maximize_with_trace():
    trace = []
    x, fx = golden_section(
        lambda x: -((x - 1.5) ** 2), 0.0, 4.0, tol=1e-9, maximize=True, trace=trace
    )
    assert x == pytest.approx(1.5, abs=1e-8)
    assert len(trace) > 10


def test_find_extremum_locates_detection_probability_peak(base):
    f = lambda d: outcome_probabilities(replace(base, delta=d)).p_h
    x, value = find_extremum(f, 1e-4, 0.2, mode="max", tol=1e-6)
    # Dense-grid oracle, deliberately brute force.
    grid = [1e-4 + (0.2 - 1e-4) * i / 99_999 for i in range(100_000)]
    vals = [f(d) for d in grid]
    i = max(range(len(grid)), key=vals.__getitem__)
    assert value >= vals[i] - 1e-12
    assert x == pytest.approx(grid[i], abs=1e-4)
    # Location and height of the peak (model regression pins).
    assert x == pytest.approx(0.039397, abs=1e-5)
    assert value == pytest.approx(0.2195382, abs=1e-6)


def test_find_extremum_refinement_beats_coarse_grid(base):
    f = lambda d: outcome_probabilities(replace(base, delta=d)).p_h
    coarse = [f(1e-4 + (0.2 - 1e-4) * i / 200) for i in range(201)]
    _, value = find_extremum(f, 1e-4, 0.2, mode="max")
    assert value >= max(coarse)


def test_find_extremum_monotone_raises():
    with pytest.raises(NoBracketError):
        find_extremum(lambda x: x, 0.0, 1.0, mode="max")


def test_find_extremum_flat_probability_raises(base):
    bare = replace(base, g2n=0.0)
    f = lambda d: outcome_probabilities(replace(bare, delta=d)).p_h
    with pytest.raises(NoBracketError):
        find_extremum(f, 1e-4, 0.2, mode="max")


# --- operating-point optimizer ----------------------------------------------


def test_single_point_bounds_return_that_point(base):
    from eitmag import fisher_information

    obj = lambda delta: fisher_information(replace(base, delta=delta)).f_total
    report = optimize_operating_point(
        obj, free=["delta"], bounds={"delta": (0.01, 0.01)}, maximize=True
    )
    assert report.argopt == {"delta": 0.01}
    assert report.converged


def test_optimizer_matches_dense_grid_for_fisher_peak(base):
    from eitmag import fisher_information

    obj = lambda delta: fisher_information(replace(base, delta=delta)).f_total
    report = optimize_operating_point(
        obj, free=["delta"], bounds={"delta": (1e-3, 0.05)}, maximize=True,
        objective_name="max_fisher",
    )
    dense = max(obj(1e-3 + (0.05 - 1e-3) * i / 9_999) for i in range(10_000))
    assert report.value >= dense - 1e-6 * dense
    assert report.objective == "max_fisher"
    assert report.evaluations <= 1000
    assert report.trace


def test_optimizer_min_sensitivity_matches_dense_grid(base, doppler_1mk, constants):
    from eitmag import multiphoton_sensitivity

    def s_of(delta):
        return multiphoton_sensitivity(
            base, doppler_1mk, constants, 1e-3, 1e-3, operating_delta=delta
        ).multiphoton_s

    report = optimize_operating_point(
        s_of, free=["delta"], bounds={"delta": (4.1e-6, 0.041)},
        objective_name="min_multiphoton_s",
    )
    dense = min(s_of(4.1e-6 + (0.041 - 4.1e-6) * i / 999) for i in range(1000))
    assert report.value <= dense * (1 + 1e-3)


def test_optimizer_two_variables_and_budget_flag(base):
    from eitmag import fisher_information

    def obj(delta, omega):
        return fisher_information(replace(base, delta=delta, omega=omega)).f_total

    report = optimize_operating_point(
        obj, free=["delta", "omega"],
        bounds={"delta": (1e-3, 0.05), "omega": (0.5, 2.0)},
        maximize=True, max_evaluations=40,
    )
    assert not report.converged  # tiny budget: best-so-far with flag
    assert report.evaluations <= 40
    assert report.value > 0
