"""Tests for rate residuals, bounded least squares, and the two fitting
routes.

The self-consistent tables here are built directly from the rate law, so
the residual truth values need no oracle beyond the formula itself. The
recovery fixtures come from conftest and pin both routes against the
generator parameters they should reproduce.
"""

import jsonschema
import numpy as np
import pytest

from adresponse import (DEFAULT_BOUNDS, EstimationError, EstimationProblem,
                        FIT_REPORT_SCHEMA, GvwParams, MlpSpec, PulseTrain,
                        SyntheticSpec, Trajectory, fit_gvw, fit_gvw_fd,
                        generate_synthetic, nls_solve, rate_residuals)

from conftest import TRUE_PARAMS, recovery_dataset

PARAMS = ("rho", "alpha", "beta", "delta")


def relative_errors(fitted, true):
    return {k: abs(getattr(fitted, k) - getattr(true, k)) / abs(getattr(true, k))
            for k in PARAMS}


def self_consistent_table(params, y, b, t):
    dydt = params.rho * b ** params.alpha * (1.0 - y) ** params.beta \
        - params.delta * y
    return np.column_stack([t, dydt, y, b])


def affine_fixture(time_scale=1.0):
    # share grows exactly linearly when the budget is solved out of the
    # rate law, so finite differences of x are exact interior estimates
    true = GvwParams(0.1, 0.7, 0.8, 0.01)
    t = np.linspace(0.0, 50.0, 100)
    x = 0.01 * t
    b = ((0.01 + true.delta * x)
         / (true.rho * (1.0 - x) ** true.beta)) ** (1.0 / true.alpha)
    return true, Trajectory(time_scale * t, b, x, meta={})


# ---------------------------------------------------------------------------
# residuals


def test_residuals_vanish_on_self_consistent_table():
    rng = np.random.default_rng(2)
    for _ in range(20):
        params = GvwParams(rng.uniform(0.01, 1.0), rng.uniform(0.2, 1.8),
                           rng.uniform(0.0, 1.5), rng.uniform(-0.2, 0.4))
        y = rng.uniform(0.0, 0.95, 30)
        b = rng.uniform(0.0, 4.0, 30)
        table = self_consistent_table(params, y, b, np.arange(30.0))
        assert np.all(rate_residuals(params, table) == 0.0)


def test_zero_budget_residuals_ignore_push_parameters():
    y = np.linspace(0.0, 0.8, 25)
    table = np.column_stack([np.arange(25.0), np.full(25, -0.002), y,
                             np.zeros(25)])
    delta = 0.04
    r_ref = rate_residuals(GvwParams(0.3, 1.0, 1.0, delta), table)
    # rho * 0**alpha is exactly zero, so only the decay term survives
    assert np.array_equal(r_ref, -0.002 + delta * y)
    for rho, alpha, beta in ((0.01, 0.4, 0.0), (2.0, 1.7, 1.9), (0.5, 2.0, 1.0)):
        assert np.array_equal(rate_residuals(GvwParams(rho, alpha, beta, delta),
                                             table), r_ref)


def test_rho_perturbation_shifts_residuals_linearly():
    rng = np.random.default_rng(5)
    params = GvwParams(0.2, 0.9, 1.1, 0.02)
    y = rng.uniform(0.05, 0.9, 40)
    b = rng.uniform(0.1, 3.0, 40)
    table = self_consistent_table(params, y, b, np.arange(40.0))
    d = 0.01 * params.rho
    bumped = GvwParams(params.rho + d, params.alpha, params.beta, params.delta)
    shift = rate_residuals(bumped, table) - rate_residuals(params, table)
    expected = -d * b ** params.alpha * (1.0 - y) ** params.beta
    assert np.allclose(shift, expected, rtol=1e-12, atol=0.0)


def test_rate_table_validation():
    good = np.column_stack([np.arange(5.0), np.zeros(5),
                            np.full(5, 0.3), np.ones(5)])
    with pytest.raises(ValueError, match=r"\(n, 4\)"):
        rate_residuals(TRUE_PARAMS, good[:, :3])
    with pytest.raises(ValueError, match=r"\(n, 4\)"):
        rate_residuals(TRUE_PARAMS, good[0])
    bad = good.copy()
    bad[2, 1] = np.nan
    with pytest.raises(ValueError, match="finite"):
        rate_residuals(TRUE_PARAMS, bad)
    bad = good.copy()
    bad[1, 2] = 1.5
    with pytest.raises(ValueError, match="shares"):
        rate_residuals(TRUE_PARAMS, bad)
    bad = good.copy()
    bad[3, 3] = -0.1
    with pytest.raises(ValueError, match="budgets"):
        rate_residuals(TRUE_PARAMS, bad)


# ---------------------------------------------------------------------------
# problem validation


def test_estimation_problem_validation():
    data = Trajectory(np.arange(12.0), np.ones(12), np.linspace(0, 0.5, 12),
                      meta={})
    EstimationProblem(data)
    missing = {k: v for k, v in DEFAULT_BOUNDS.items() if k != "beta"}
    with pytest.raises(ValueError, match="exactly"):
        EstimationProblem(data, bounds=missing)
    extra = dict(DEFAULT_BOUNDS, gamma=(0.0, 1.0))
    with pytest.raises(ValueError, match="exactly"):
        EstimationProblem(data, bounds=extra)
    unordered = dict(DEFAULT_BOUNDS, alpha=(1.0, 0.5))
    with pytest.raises(ValueError, match="ordered"):
        EstimationProblem(data, bounds=unordered)
    too_wide = dict(DEFAULT_BOUNDS, beta=(0.0, 2.5))
    with pytest.raises(ValueError, match="inside"):
        EstimationProblem(data, bounds=too_wide)
    zero_rho = dict(DEFAULT_BOUNDS, rho=(0.0, 1.0))
    with pytest.raises(ValueError, match="> 0"):
        EstimationProblem(data, bounds=zero_rho)
    zero_alpha = dict(DEFAULT_BOUNDS, alpha=(0.0, 2.0))
    with pytest.raises(ValueError, match="> 0"):
        EstimationProblem(data, bounds=zero_alpha)
    with pytest.raises(ValueError, match="one start"):
        EstimationProblem(data, multistart_count=0)
    with pytest.raises(ValueError, match="restart"):
        EstimationProblem(data, surrogate_restarts=0)


# ---------------------------------------------------------------------------
# single-start solver


def test_nls_solve_recovers_from_perturbed_start():
    rng = np.random.default_rng(7)
    true = GvwParams(0.1, 0.7, 0.8, 0.01)
    y = rng.uniform(0.05, 0.8, 40)
    b = rng.uniform(0.2, 3.0, 40)
    table = self_consistent_table(true, y, b, np.linspace(0.0, 10.0, 40))
    start = GvwParams(0.05, 1.0, 1.0, 0.03)
    fitted, sse = nls_solve(lambda p: rate_residuals(p, table), start,
                            DEFAULT_BOUNDS)
    errs = relative_errors(fitted, true)
    assert max(errs.values()) < 1e-8
    assert 0.0 <= sse < 1e-20


def test_nls_solve_accepts_analytic_jacobian():
    rng = np.random.default_rng(7)
    true = GvwParams(0.1, 0.7, 0.8, 0.01)
    y = rng.uniform(0.05, 0.8, 40)
    b = rng.uniform(0.2, 3.0, 40)
    table = self_consistent_table(true, y, b, np.linspace(0.0, 10.0, 40))

    def jacobian(p):
        bpow = b ** p.alpha
        upow = (1.0 - y) ** p.beta
        J = np.empty((y.size, 4))
        J[:, 0] = -bpow * upow
        J[:, 1] = -p.rho * bpow * np.log(b) * upow
        J[:, 2] = -p.rho * bpow * upow * np.log(1.0 - y)
        J[:, 3] = y
        return J

    start = GvwParams(0.05, 1.0, 1.0, 0.03)
    fd_fit, _ = nls_solve(lambda p: rate_residuals(p, table), start,
                          DEFAULT_BOUNDS)
    an_fit, sse = nls_solve(lambda p: rate_residuals(p, table), start,
                            DEFAULT_BOUNDS, jacobian_fn=jacobian)
    assert sse < 1e-20
    gap = max(abs(getattr(an_fit, k) - getattr(fd_fit, k)) for k in PARAMS)
    assert gap < 1e-10


def test_nls_solve_falls_back_to_one_sided_differences():
    # the residual refuses part of the domain, so the central probe on
    # that side must be replaced by a forward one
    raises = [0]

    def residual(p):
        if p.delta < 0.05:
            raises[0] += 1
            raise ValueError("outside the supported region")
        return np.array([p.delta - 0.5, p.rho - 0.1])

    fitted, sse = nls_solve(residual, GvwParams(0.3, 1.0, 1.0, 0.05),
                            DEFAULT_BOUNDS)
    assert raises[0] > 0
    assert sse < 1e-12
    assert abs(fitted.delta - 0.5) < 1e-7
    assert abs(fitted.rho - 0.1) < 1e-7


# ---------------------------------------------------------------------------
# finite-difference route


def test_fd_route_exact_on_affine_share():
    true, data = affine_fixture()
    report = fit_gvw_fd(EstimationProblem(data))
    assert report.method == "fd"
    assert report.flags == ()
    assert max(relative_errors(report.params, true).values()) < 1e-6
    assert report.residual_mse < 1e-20


def test_fd_route_time_scaling_covariance():
    # doubling every timestamp halves rates, so rho and delta halve
    # while the two exponents stay put
    _, base = affine_fixture()
    _, slowed = affine_fixture(time_scale=2.0)
    fit1 = fit_gvw_fd(EstimationProblem(base)).params
    fit2 = fit_gvw_fd(EstimationProblem(slowed)).params
    assert abs(fit2.alpha - fit1.alpha) < 1e-6
    assert abs(fit2.beta - fit1.beta) < 1e-6
    assert abs(2.0 * fit2.rho - fit1.rho) / fit1.rho < 1e-5
    assert abs(2.0 * fit2.delta - fit1.delta) / abs(fit1.delta) < 1e-5


def test_fd_route_needs_three_clean_stencils():
    t = np.arange(4.0)
    b = np.array([1.0, 1.0, 2.0, 2.0])
    x = np.array([0.0, 0.01, 0.03, 0.05])
    with pytest.raises(ValueError, match="fewer than 3 stencils"):
        fit_gvw_fd(EstimationProblem(Trajectory(t, b, x, meta={})))


def test_sample_count_guards():
    tiny = Trajectory(np.arange(2.0), np.ones(2), np.array([0.0, 0.01]),
                      meta={})
    with pytest.raises(ValueError, match="at least 3"):
        fit_gvw_fd(EstimationProblem(tiny))
    small = Trajectory(np.arange(9.0), np.ones(9), np.linspace(0, 0.2, 9),
                       meta={})
    with pytest.raises(ValueError, match="at least 10"):
        fit_gvw(EstimationProblem(small))


# ---------------------------------------------------------------------------
# recovery on the canonical campaign


@pytest.fixture(scope="module")
def clean_fits():
    problem = EstimationProblem(recovery_dataset())
    return fit_gvw_fd(problem), fit_gvw(problem)


def test_fd_recovery_on_pulse_train(clean_fits):
    fd_fit, _ = clean_fits
    assert fd_fit.method == "fd"
    assert fd_fit.flags == ()
    assert fd_fit.surrogate_report is None
    assert max(relative_errors(fd_fit.params, TRUE_PARAMS).values()) < 0.02


def test_dnn_recovery_on_pulse_train(clean_fits):
    _, dnn_fit = clean_fits
    assert dnn_fit.method == "dnn"
    assert dnn_fit.flags == ()
    assert dnn_fit.surrogate_report is not None
    assert max(relative_errors(dnn_fit.params, TRUE_PARAMS).values()) < 0.10


def test_routes_agree(clean_fits):
    fd_fit, dnn_fit = clean_fits
    for name in PARAMS:
        a, b = getattr(fd_fit.params, name), getattr(dnn_fit.params, name)
        assert abs(a - b) / abs(a) < 0.15


def test_fit_reports_satisfy_schema(clean_fits):
    fd_fit, dnn_fit = clean_fits
    fd_doc = fd_fit.to_json_dict()
    jsonschema.validate(fd_doc, FIT_REPORT_SCHEMA)
    assert fd_doc["surrogate"] is None
    dnn_doc = dnn_fit.to_json_dict()
    jsonschema.validate(dnn_doc, FIT_REPORT_SCHEMA)
    assert dnn_doc["surrogate"]["spec"]["hidden_widths"] == [16, 32]
    assert dnn_doc["surrogate"]["val_mse"] >= 0.0


def test_multistart_audit_trail(clean_fits):
    fd_fit, dnn_fit = clean_fits
    for report in (fd_fit, dnn_fit):
        assert report.starts == 16
        assert len(report.outcomes) == 16
        finals = []
        for outcome in report.outcomes:
            ok = outcome.status in ("ok", "at-bound") \
                or outcome.status.startswith("error:")
            assert ok
            if outcome.status == "ok":
                assert outcome.final_sse <= outcome.initial_sse
                assert outcome.params is not None
                finals.append(outcome.final_sse)
        assert finals
    # the winning sse divided by the retained row count gives the mse;
    # the dnn table keeps every sample
    n = len(recovery_dataset())
    assert dnn_fit.residual_mse == pytest.approx(
        min(o.final_sse for o in dnn_fit.outcomes if o.status == "ok") / n,
        rel=1e-12)


def test_noise_inflates_residual_mse(clean_fits):
    fd_clean, _ = clean_fits
    noisy = fit_gvw_fd(EstimationProblem(recovery_dataset(sigma=0.005)))
    assert noisy.residual_mse > 100 * fd_clean.residual_mse
    assert max(relative_errors(noisy.params, TRUE_PARAMS).values()) < 0.20


# ---------------------------------------------------------------------------
# flags and failure modes


def test_constant_budget_flags_alpha():
    spec = SyntheticSpec(true_params=TRUE_PARAMS,
                         budget_pattern=PulseTrain((1.5,), on=5.0, off=0.0),
                         n_samples=80, noise_sigma=0.0, seed=1,
                         x0=0.02, t_end=40.0)
    report = fit_gvw_fd(EstimationProblem(generate_synthetic(spec)))
    assert "alpha_unidentifiable" in report.flags
    doc = report.to_json_dict()
    assert doc["alpha"] is None
    jsonschema.validate(doc, FIT_REPORT_SCHEMA)


def test_every_start_at_bound_raises():
    # a dead share with live spend forces rho onto its lower bound from
    # every start
    flat = Trajectory(np.linspace(0.0, 10.0, 20), np.ones(20), np.zeros(20),
                      meta={})
    with pytest.raises(EstimationError, match="every start hit a bound"):
        fit_gvw_fd(EstimationProblem(flat))


def short_campaign():
    spec = SyntheticSpec(true_params=TRUE_PARAMS,
                         budget_pattern=PulseTrain((0.6, 3.0), on=15.0,
                                                   off=10.0),
                         n_samples=60, noise_sigma=0.0, seed=0,
                         x0=0.02, t_end=50.0)
    return generate_synthetic(spec)


def test_custom_surrogate_spec_is_honored():
    problem = EstimationProblem(short_campaign(),
                                surrogate_spec=MlpSpec(1, (5, 7), 1),
                                surrogate_restarts=2, multistart_count=8)
    report = fit_gvw(problem)
    assert report.method == "dnn"
    assert report.surrogate_report.model.spec.hidden_widths == (5, 7)
    assert 0.0 <= report.residual_mse < 1e-2
    doc = report.to_json_dict()
    assert doc["surrogate"]["spec"]["hidden_widths"] == [5, 7]


def test_underpowered_surrogate_propagates_failure():
    # two units per layer cannot trace the pulse response; the rate
    # table it yields pushes every start onto a bound and with a single
    # restart that failure must surface
    problem = EstimationProblem(short_campaign(),
                                surrogate_spec=MlpSpec(1, (2, 2), 1),
                                surrogate_restarts=1, multistart_count=8)
    with pytest.raises(EstimationError):
        fit_gvw(problem)
