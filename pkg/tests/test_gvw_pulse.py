"""Quadratic reduction and the closed-form pulse solution."""

import numpy as np
import pytest

from adresponse import (GvwParams, NoRootInUnitInterval, PulseSpec,
                        QuadraticReduction, pulse_response,
                        quadratic_coefficients, taylor_reduce)
from conftest import rk4_quadratic


def test_coefficients_hand_values():
    p = GvwParams(0.1, 1.0, 0.5, 0.01)
    k1, k2, k3 = quadratic_coefficients(p, b0=1.0)
    assert k1 == pytest.approx(-0.0125, abs=1e-16)
    assert k2 == pytest.approx(-0.06, abs=1e-16)
    assert k3 == pytest.approx(0.1, abs=1e-16)


def test_coefficients_signs():
    rng = np.random.default_rng(3)
    for _ in range(50):
        p = GvwParams(rho=float(rng.uniform(0.01, 1.0)),
                      alpha=float(rng.uniform(0.1, 2.0)),
                      beta=float(rng.uniform(0.0, 1.0)),
                      delta=float(rng.uniform(-0.2, 0.5)))
        k1, k2, k3 = quadratic_coefficients(p, b0=float(rng.uniform(0.1, 5.0)))
        assert k1 <= 0.0  # concave correction for beta <= 1
        assert k3 > 0.0
    with pytest.raises(ValueError):
        quadratic_coefficients(p, b0=0.0)
    with pytest.raises(ValueError):
        quadratic_coefficients(p, b0=-1.0)


def test_reduce_no_interior_root_raises():
    # strong push relative to decay: both roots leave the unit interval
    p = GvwParams(0.1, 1.0, 0.5, 0.01)
    k1, k2, k3 = quadratic_coefficients(p, b0=1.0)
    roots = sorted(np.roots([k1, k2, k3]).real)
    assert roots[0] == pytest.approx(-6.109447398198282, rel=1e-12)
    assert roots[1] == pytest.approx(1.3094473981982815, rel=1e-12)
    with pytest.raises(NoRootInUnitInterval):
        taylor_reduce(p, b0=1.0)


def test_reduce_linear_cases():
    # beta = 1 zeroes k1; the root is the familiar rho*b/(rho*b+delta)
    p = GvwParams(0.1, 1.0, 1.0, 0.01)
    red = taylor_reduce(p, b0=1.0)
    assert red.k1 == 0.0
    assert red.x_hat == pytest.approx(0.1 / 0.11, rel=1e-14)
    # beta = 0 also zeroes k1; root rho*b**alpha/delta needs weak push
    q = GvwParams(0.01, 1.0, 0.0, 0.05)
    red0 = taylor_reduce(q, b0=1.0)
    assert red0.x_hat == pytest.approx(0.2, rel=1e-14)
    with pytest.raises(NoRootInUnitInterval):
        taylor_reduce(GvwParams(0.2, 1.0, 0.0, 0.05), b0=1.0)


def test_reduce_root_satisfies_quadratic():
    rng = np.random.default_rng(9)
    found = 0
    while found < 30:
        p = GvwParams(rho=float(rng.uniform(0.005, 0.05)),
                      alpha=float(rng.uniform(0.3, 1.5)),
                      beta=float(rng.uniform(0.0, 1.0)),
                      delta=float(rng.uniform(0.02, 0.2)))
        b0 = float(rng.uniform(0.2, 2.0))
        try:
            red = taylor_reduce(p, b0)
        except NoRootInUnitInterval:
            continue
        found += 1
        assert 0.0 <= red.x_hat <= 1.0
        resid = red.k1 * red.x_hat ** 2 + red.k2 * red.x_hat + red.k3
        assert abs(resid) < 1e-12


def test_reduction_container_checks_root():
    with pytest.raises(ValueError):
        QuadraticReduction(k1=0.0, k2=-1.0, k3=0.5, x_hat=0.9)


def test_pulse_starts_at_x0_and_is_continuous():
    p = GvwParams(0.05, 1.0, 0.8, 0.03)
    pulse = PulseSpec(b0=1.0, t_end=25.0, x0=0.1)
    assert pulse_response(p, pulse, 0.0) == pytest.approx(0.1, abs=1e-15)
    eps = 1e-9
    lo = pulse_response(p, pulse, 25.0 - eps)
    hi = pulse_response(p, pulse, 25.0 + eps)
    assert abs(hi - lo) < 1e-8


def test_pulse_linear_case_exact():
    # beta = 1 turns the reduction into the exact linear dynamics
    p = GvwParams(0.1, 1.0, 1.0, 0.01)
    pulse = PulseSpec(b0=2.0, t_end=30.0, x0=0.05)
    rate = p.rho * 2.0 + p.delta
    xh = p.rho * 2.0 / rate
    tt = np.linspace(0.0, 30.0, 121)
    want = xh + (0.05 - xh) * np.exp(-rate * tt)
    got = pulse_response(p, pulse, tt)
    assert np.max(np.abs(got - want)) < 1e-10


def test_pulse_matches_independent_rk4():
    cases = [
        GvwParams(0.02, 1.0, 0.8, 0.03),
        GvwParams(0.01, 0.5, 0.5, 0.05),
        GvwParams(0.005, 1.5, 0.0, 0.04),
        GvwParams(0.03, 1.0, 1.0, 0.0),
    ]
    tt = np.linspace(0.0, 40.0, 81)
    for p in cases:
        k1, k2, k3 = quadratic_coefficients(p, b0=1.2)
        x0 = 0.02
        want = rk4_quadratic(k1, k2, k3, x0, tt, h=1e-3)[:, 0]
        got = pulse_response(p, PulseSpec(b0=1.2, t_end=40.0, x0=x0), tt)
        assert np.max(np.abs(got - want)) < 1e-6


def test_pulse_constant_at_equilibrium_start():
    p = GvwParams(0.05, 1.0, 0.8, 0.03)
    red = taylor_reduce(p, b0=1.0)
    pulse = PulseSpec(b0=1.0, t_end=20.0, x0=red.x_hat)
    tt = np.linspace(0.0, 20.0, 41)
    assert np.max(np.abs(pulse_response(p, pulse, tt) - red.x_hat)) < 1e-14


def test_pulse_double_root_falls_back_to_integration():
    # beta = 2, delta = 0 gives rate (x-1)^2: a perfect square with
    # x(t) = 1 - (1-x0)/(1 + (1-x0) t)
    p = GvwParams(1.0, 1.0, 2.0, 0.0)
    red = taylor_reduce(p, b0=1.0)
    assert red.x_hat == pytest.approx(1.0)
    tt = np.linspace(0.0, 10.0, 21)
    want = 1.0 - 0.7 / (1.0 + 0.7 * tt)
    got = pulse_response(p, PulseSpec(b0=1.0, t_end=10.0, x0=0.3), tt)
    assert np.max(np.abs(got - want)) < 1e-8


def test_reduce_no_real_roots_raises():
    # beta > 1 with strongly negative delta pushes the discriminant
    # below zero
    with pytest.raises(NoRootInUnitInterval):
        taylor_reduce(GvwParams(1.0, 1.0, 2.0, -1.0), b0=1.0)


def test_pulse_decay_tail():
    p = GvwParams(0.05, 1.0, 0.8, 0.03)
    pulse = PulseSpec(b0=1.0, t_end=25.0, x0=0.1)
    x_end = pulse_response(p, pulse, 25.0)
    for tau in (1.0, 7.5, 40.0):
        want = x_end * np.exp(-p.delta * tau)
        assert pulse_response(p, pulse, 25.0 + tau) == pytest.approx(want, rel=1e-13)
    # with positive decay the share eventually vanishes
    assert pulse_response(p, pulse, 1e4) < 1e-10


def test_pulse_negative_delta_tail_grows():
    # an interior root with delta < 0 needs beta > 1 (for beta <= 1 the
    # reduced rate is then positive on all of [0, 1])
    p = GvwParams(0.01, 1.0, 1.5, -0.001)
    pulse = PulseSpec(b0=1.0, t_end=10.0, x0=0.01)
    x_end = pulse_response(p, pulse, 10.0)
    assert pulse_response(p, pulse, 30.0) == pytest.approx(
        x_end * np.exp(0.001 * 20.0), rel=1e-12)
    with pytest.raises(NoRootInUnitInterval):
        taylor_reduce(GvwParams(0.005, 0.5, 0.9, -0.001), b0=1.0)


def test_pulse_shapes_and_domain():
    p = GvwParams(0.05, 1.0, 0.8, 0.03)
    pulse = PulseSpec(b0=1.0, t_end=25.0, x0=0.1)
    assert isinstance(pulse_response(p, pulse, 3.0), float)
    out = pulse_response(p, pulse, np.linspace(0, 50, 7).reshape(7, 1))
    assert out.shape == (7, 1)
    with pytest.raises(ValueError):
        pulse_response(p, pulse, -1.0)
    with pytest.raises(ValueError):
        pulse_response(p, pulse, np.array([1.0, np.nan]))


def test_pulse_spec_validation():
    with pytest.raises(ValueError):
        PulseSpec(b0=0.0, t_end=10.0)
    with pytest.raises(ValueError):
        PulseSpec(b0=1.0, t_end=0.0)
    with pytest.raises(ValueError):
        PulseSpec(b0=1.0, t_end=10.0, x0=1.0)  # x0 strictly below 1
    with pytest.raises(ValueError):
        PulseSpec(b0=1.0, t_end=10.0, x0=-0.1)
