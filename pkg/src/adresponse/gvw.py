"""Generalized Vidale-Wolfe advertising-response model.

The model couples an advertising push with word-of-mouth saturation and
customer decay:

    dx/dt = rho * b(t)**alpha * (1 - x)**beta - delta * x,    x(0) = x0

with x the market share, b the spend level, rho the ad effectiveness,
alpha the spend elasticity, beta the word-of-mouth index, and delta the
decay rate. This module provides rate evaluation, trajectory simulation,
the quadratic (second-order) reduction of the untapped-market term with
its closed-form rectangular-pulse response, steady-state analysis, and
sensitivity sweeps with shape classification.

All functions are pure; parameter objects are frozen and safe to share.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .ode import IntegrationError, integrate
from .trajectory import Trajectory

__all__ = [
    "GvwParams", "PulseSpec", "QuadraticReduction", "SteadyState", "SweepCurve",
    "NoRootInUnitInterval", "NoSteadyState",
    "response_rate", "wom_approximation", "simulate",
    "quadratic_coefficients", "taylor_reduce", "pulse_response",
    "steady_budget", "steady_share", "steady_state", "elasticity_threshold",
    "sensitivity_sweep", "classify_shape",
]


class NoRootInUnitInterval(ValueError):
    """The reduced quadratic has no equilibrium inside [0, 1]."""


class NoSteadyState(ValueError):
    """No steady state exists for the requested configuration."""


@dataclass(frozen=True)
class GvwParams:
    """Model parameters.

    rho > 0 (ad effectiveness), 0 < alpha <= 2 (spend elasticity),
    0 <= beta <= 2 (word-of-mouth index). delta (decay) may take either
    sign: fitted values on real campaigns come out slightly negative,
    which the dynamics accept; steady-state analysis requires delta > 0.
    """

    rho: float
    alpha: float
    beta: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho > 0):
            raise ValueError("rho must be finite and > 0")
        if not (math.isfinite(self.alpha) and 0 < self.alpha <= 2):
            raise ValueError("alpha must lie in (0, 2]")
        if not (math.isfinite(self.beta) and 0 <= self.beta <= 2):
            raise ValueError("beta must lie in [0, 2]")
        if not math.isfinite(self.delta):
            raise ValueError("delta must be finite")


@dataclass(frozen=True)
class PulseSpec:
    """Rectangular spend pulse: constant level b0 on [0, t_end], then zero."""

    b0: float
    t_end: float
    x0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.b0) and self.b0 > 0):
            raise ValueError("pulse level b0 must be > 0")
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError("pulse duration t_end must be > 0")
        if not (0 <= self.x0 < 1):
            raise ValueError("initial share x0 must lie in [0, 1)")


@dataclass(frozen=True)
class QuadraticReduction:
    """Coefficients of the reduced rate k1*x**2 + k2*x + k3 and the
    selected equilibrium root x_hat in [0, 1]."""

    k1: float
    k2: float
    k3: float
    x_hat: float

    def __post_init__(self):
        resid = self.k1 * self.x_hat ** 2 + self.k2 * self.x_hat + self.k3
        if not abs(resid) <= 1e-10:
            raise ValueError(f"x_hat does not satisfy the quadratic (residual {resid:g})")


@dataclass(frozen=True)
class SteadyState:
    """A mutually consistent (share, budget) equilibrium pair."""

    x_bar: float
    b_bar: float

    def __post_init__(self):
        if not (0 < self.x_bar < 1):
            raise ValueError("steady share must lie in (0, 1)")
        if not (self.b_bar > 0):
            raise ValueError("steady budget must be > 0")


def response_rate(params: GvwParams, b, x):
    """Instantaneous share growth rate dx/dt at spend b and share x.

    Parameters
    ----------
    params : GvwParams
    b : float or ndarray
        Spend level(s), >= 0. Zero spend contributes nothing
        (0**alpha = 0 for alpha > 0).
    x : float or ndarray
        Market share(s) in [0, 1]. At x = 1 with beta = 0 the
        untapped-market factor is 1 (0**0 = 1 convention).

    Returns
    -------
    float or ndarray
        rho * b**alpha * (1-x)**beta - delta * x, broadcast over inputs.
    """
    b_arr = np.asarray(b, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(b_arr)) or np.any(b_arr < 0):
        raise ValueError("spend must be finite and nonnegative")
    if np.any(~np.isfinite(x_arr)) or np.any(x_arr < 0) or np.any(x_arr > 1):
        raise ValueError("share must lie in [0, 1]")
    out = params.rho * b_arr ** params.alpha * (1.0 - x_arr) ** params.beta \
        - params.delta * x_arr
    if np.isscalar(b) and np.isscalar(x):
        return float(out)
    return out


def wom_approximation(beta: float, x) -> float | np.ndarray:
    """Word-of-mouth style approximation of the untapped-market factor:
    (1-x)**beta ~ 1 - x + 2*(1-beta)*x*(1-x).

    Documentation and comparison only; response_rate always uses the
    exact power term. Note this differs from the second-order expansion
    used by the quadratic reduction.
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0) or np.any(x_arr > 1):
        raise ValueError("share must lie in [0, 1]")
    out = 1.0 - x_arr + 2.0 * (1.0 - beta) * x_arr * (1.0 - x_arr)
    return float(out) if np.isscalar(x) else out


# ---------------------------------------------------------------------------
# simulation


def _clip01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def simulate(params: GvwParams, budget_fn: Callable[[float], float],
             x0: float, t_grid) -> Trajectory:
    """Integrate the response ODE over a sample grid.

    Classical RK4 with base step min(grid spacing)/20, verified by step
    halving to 1e-8 agreement at every sample. If `budget_fn` exposes
    breakpoints(t0, t1), integration legs split there and the (constant)
    level inside each leg is read at the leg midpoint, so spend
    discontinuities never straddle an RK4 step.

    Returned shares are clamped to [0, 1]; any clamping beyond roundoff
    is recorded in Trajectory.meta["clamp_events"] as [time, raw] pairs.
    The rate is evaluated with the state clipped into [0, 1], which
    leaves trajectories of the true dynamics untouched (the field points
    inward at both boundaries for delta >= 0) and keeps fractional
    powers defined when negative decay pushes the state to saturation.
    """
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("need at least two sample times")
    if not np.all(np.diff(grid) > 0):
        raise ValueError("sample times must be strictly increasing")
    if not (0 <= x0 <= 1):
        raise ValueError("x0 must lie in [0, 1]")

    rho, alpha, beta, delta = params.rho, params.alpha, params.beta, params.delta
    h0 = float(np.min(np.diff(grid))) / 20.0

    if hasattr(budget_fn, "breakpoints"):
        # integrate leg by leg between spend switches, each leg under its
        # own constant level; a switch instant then belongs to both legs
        # without any stage ever reading the wrong side
        switches = sorted(set(budget_fn.breakpoints(grid[0], grid[-1])))
        edges = np.array([grid[0], *switches, grid[-1]])
        raw = np.empty_like(grid)
        raw[0] = x_cur = float(x0)
        for a, c in zip(edges[:-1], edges[1:]):
            lvl = float(budget_fn(0.5 * (a + c)))
            if not (math.isfinite(lvl) and lvl >= 0):
                raise ValueError("budget must be finite and nonnegative "
                                 f"(t={0.5 * (a + c)!r})")
            gain = rho * lvl ** alpha

            def f(t, x, gain=gain):
                xc = _clip01(x)
                return gain * (1.0 - xc) ** beta - delta * xc

            inside = np.nonzero((grid > a) & (grid <= c))[0]
            leg_nodes = np.concatenate([[a], grid[inside], [] if grid[inside].size and
                                        grid[inside][-1] == c else [c]])
            vals = integrate(f, x_cur, leg_nodes, h0, tol=1e-8)
            raw[inside] = vals[1:inside.size + 1]
            x_cur = float(vals[-1])
    else:
        def f(t, x):
            lvl = float(budget_fn(t))
            if lvl < 0 or not math.isfinite(lvl):
                raise IntegrationError(f"budget must be finite and nonnegative (t={t!r})", time=t)
            xc = _clip01(x)
            return rho * lvl ** alpha * (1.0 - xc) ** beta - delta * xc

        raw = integrate(f, float(x0), grid, h0, tol=1e-8)
    clipped = np.clip(raw, 0.0, 1.0)
    events = [[float(grid[i]), float(raw[i])]
              for i in np.nonzero(np.abs(raw - clipped) > 0)[0]]
    b_samples = np.array([float(budget_fn(t)) for t in grid])
    meta = {"source": "simulate"}
    if events:
        meta["clamp_events"] = events
    return Trajectory(grid, b_samples, clipped, meta)


# ---------------------------------------------------------------------------
# quadratic reduction and the rectangular-pulse closed form


def quadratic_coefficients(params: GvwParams, b0: float) -> tuple[float, float, float]:
    """Coefficients (k1, k2, k3) of the reduced rate at constant spend b0.

    Expanding (1-x)**beta to second order around x = 0 turns the rate
    into k1*x**2 + k2*x + k3 with

        k1 = rho * beta * (beta - 1) * b0**alpha / 2   (<= 0 for beta <= 1)
        k2 = -rho * beta * b0**alpha - delta
        k3 = rho * b0**alpha                           (> 0)
    """
    if not (math.isfinite(b0) and b0 > 0):
        raise ValueError("b0 must be finite and > 0")
    base = params.rho * b0 ** params.alpha
    k1 = 0.5 * base * params.beta * (params.beta - 1.0)
    k2 = -base * params.beta - params.delta
    k3 = base
    return k1, k2, k3


def taylor_reduce(params: GvwParams, b0: float) -> QuadraticReduction:
    """Quadratic reduction plus its equilibrium root inside [0, 1].

    For k1 < 0 both roots are real (k1*k3 < 0); the root in [0, 1] is
    selected, preferring the smaller if both qualify (the attracting
    equilibrium approached from below). k1 = 0 degenerates to the linear
    rate k2*x + k3 with root -k3/k2. Raises NoRootInUnitInterval when no
    equilibrium lies in the unit interval, which happens whenever the
    push is strong relative to decay (the reduction is a small-share
    expansion and loses its interior root once
    rho * b0**alpha * (1-beta) * (1-beta/2) > delta).
    """
    k1, k2, k3 = quadratic_coefficients(params, b0)
    if k1 == 0.0:
        if k2 == 0.0:
            raise NoRootInUnitInterval(
                "reduced rate is constant; no equilibrium exists")
        root = -k3 / k2
        if not (0.0 <= root <= 1.0):
            raise NoRootInUnitInterval(
                f"linear reduction root {root:.6g} lies outside [0, 1]")
        return QuadraticReduction(k1, k2, k3, root)

    disc = k2 * k2 - 4.0 * k1 * k3
    if disc < 0:
        raise NoRootInUnitInterval("reduced quadratic has no real roots")
    # numerically stable pair: q = -(k2 + sign(k2)*sqrt(disc)) / 2
    sq = math.sqrt(disc)
    q = -0.5 * (k2 + math.copysign(sq, k2)) if k2 != 0 else 0.5 * sq
    roots = sorted({q / k1, k3 / q} if q != 0 else {0.0})
    inside = [r for r in roots if -1e-12 <= r <= 1.0 + 1e-12]
    if not inside:
        raise NoRootInUnitInterval(
            f"no equilibrium of the reduced quadratic lies in [0, 1] (roots {roots})")
    root = min(inside)
    root = min(max(root, 0.0), 1.0)
    # one Newton polish pass keeps the residual at roundoff level
    g = k1 * root * root + k2 * root + k3
    dg = 2.0 * k1 * root + k2
    if dg != 0.0:
        root = root - g / dg
    return QuadraticReduction(k1, k2, k3, root)


def _pulse_on_values(red: QuadraticReduction, x0: float, tt: np.ndarray) -> np.ndarray:
    """Closed-form solution of dx/dt = k1 x^2 + k2 x + k3, x(0)=x0, on tt >= 0."""
    k1, k2, xh = red.k1, red.k2, red.x_hat
    if x0 == xh:
        return np.full(tt.shape, xh)
    if k1 == 0.0:
        return xh + (x0 - xh) * np.exp(k2 * tt)
    s = 2.0 * k1 * xh + k2
    if s == 0.0:
        # double root: fall back to verified integration of the quadratic
        nodes = np.concatenate(([0.0], tt)) if tt[0] > 0 else tt
        h0 = max(float(np.min(np.diff(nodes))) / 20.0, 1e-6) if nodes.size > 1 else 1e-3
        vals = integrate(lambda t, x: k1 * x * x + k2 * x + red.k3,
                         x0, nodes, h0, tol=1e-10)
        return vals[-tt.size:]
    # Bernoulli substitution z = x - xh, written so exp(s*t) decays for
    # the attracting root (s < 0) and never overflows
    A = 1.0 / (x0 - xh) + k1 / s
    E = np.exp(s * tt)
    z = E / (A - (k1 / s) * E)
    return xh + z


def pulse_response(params: GvwParams, pulse: PulseSpec, t):
    """Share response to a rectangular spend pulse, in closed form.

    During the pulse (0 <= t <= t_end) the quadratic reduction at level
    b0 is solved exactly; after cessation the share decays as
    x(t_end) * exp(-delta * (t - t_end)). Continuous at the switch.

    Parameters
    ----------
    params : GvwParams
    pulse : PulseSpec
    t : float or ndarray
        Evaluation time(s), >= 0.

    Returns
    -------
    float or ndarray matching the shape of `t`.
    """
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0) or np.any(~np.isfinite(t_arr)):
        raise ValueError("evaluation times must be finite and >= 0")
    red = taylor_reduce(params, pulse.b0)
    out = np.empty(t_arr.shape)
    on = t_arr <= pulse.t_end
    if np.any(on):
        out[on] = _pulse_on_values(red, pulse.x0, t_arr[on])
    if np.any(~on):
        x_end = float(_pulse_on_values(red, pulse.x0, np.array([pulse.t_end]))[0])
        out[~on] = x_end * np.exp(-params.delta * (t_arr[~on] - pulse.t_end))
    return float(out[0]) if np.isscalar(t) else out.reshape(np.shape(t))


# ---------------------------------------------------------------------------
# steady-state analysis


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError("bisection endpoints do not bracket a sign change")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def steady_budget(params: GvwParams, x_bar: float) -> float:
    """Constant spend level sustaining share x_bar indefinitely:
    [delta * x_bar / (rho * (1 - x_bar)**beta)] ** (1/alpha).

    Requires delta > 0; with delta <= 0 any share persists for free and
    no positive steady budget exists.
    """
    if params.delta <= 0:
        raise NoSteadyState(
            "no positive steady budget exists: delta <= 0 means shares never decay")
    if not (0 < x_bar < 1):
        raise ValueError("steady share must lie in (0, 1)")
    ratio = params.delta * x_bar / (params.rho * (1.0 - x_bar) ** params.beta)
    return ratio ** (1.0 / params.alpha)


def steady_share(params: GvwParams, b_bar: float, tol: float = 1e-10) -> float:
    """Equilibrium share at constant spend b_bar, by bisection on
    rho * b**alpha * (1-x)**beta - delta * x over [0, 1].

    The left term decreases in x and the right increases (delta > 0,
    beta > 0), so the root is unique. Requires delta > 0; for beta = 0
    with rho * b**alpha >= delta the push never yields and the share
    saturates with no interior equilibrium (NoSteadyState).
    """
    if params.delta <= 0:
        raise NoSteadyState("steady-state analysis requires delta > 0")
    if not (math.isfinite(b_bar) and b_bar > 0):
        raise ValueError("steady budget must be finite and > 0")
    push = params.rho * b_bar ** params.alpha

    def g(x):
        return push * (1.0 - x) ** params.beta - params.delta * x

    if g(1.0) >= 0:
        raise NoSteadyState(
            "no steady state in (0, 1): the push never yields to decay "
            "(beta = 0 with rho * b**alpha >= delta)")
    return _bisect(g, 0.0, 1.0, tol)


def steady_state(params: GvwParams, b_bar: float) -> SteadyState:
    """Bundle (x_bar, b_bar) with the equilibrium residual verified."""
    x_bar = steady_share(params, b_bar)
    resid = response_rate(params, b_bar, x_bar)
    if abs(resid) > 1e-8:
        raise ArithmeticError(f"steady-state residual {resid:g} exceeds 1e-8")
    return SteadyState(x_bar, b_bar)


def elasticity_threshold(params: GvwParams, tol: float = 1e-10) -> float:
    """Share level where the steady response to elasticity changes sign.

    Solves delta * x = rho * (1 - x)**beta on (0, 1) — the steady share
    at unit spend. Below it the sustaining budget is below one and more
    elasticity lowers the steady share; above it the relation flips.
    Requires delta > 0.
    """
    if params.delta <= 0:
        raise NoSteadyState("elasticity threshold requires delta > 0")

    def g(x):
        return params.rho * (1.0 - x) ** params.beta - params.delta * x

    if g(1.0) >= 0:
        raise NoSteadyState(
            "threshold undefined: rho * (1-x)**beta never falls below delta * x on (0, 1)")
    return _bisect(g, 0.0, 1.0, tol)


# ---------------------------------------------------------------------------
# sensitivity sweeps and response-curve shape


@dataclass(frozen=True)
class SweepCurve:
    """One steady-state response curve from a sweep; `error` is set and
    `shares` is None when the curve could not be evaluated."""

    value: float
    budgets: np.ndarray
    shares: np.ndarray | None
    error: str | None = None


def _steady_by_relaxation(params: GvwParams, b: float) -> float:
    """Long-horizon fallback when delta <= 0 admits no algebraic equilibrium."""
    grid = np.linspace(0.0, 2000.0, 201)
    traj = simulate(params, lambda t: b, 0.0, grid)
    return float(traj.x[-1])


def sensitivity_sweep(base: GvwParams, vary: str, values, budget_grid) -> list[SweepCurve]:
    """Steady-state response curves as one parameter sweeps a value list.

    Parameters
    ----------
    base : GvwParams
        Parameters held fixed except for the swept one.
    vary : {"alpha", "beta"}
    values : sequence of float
        Values for the swept parameter; each must satisfy the parameter
        bounds (checked up front).
    budget_grid : sequence of float
        Spend levels, strictly increasing, > 0. Conventionally
        log-spaced, which is also the coordinate in which
        classify_shape reads curvature.

    Returns
    -------
    list of SweepCurve, ordered like `values`. Evaluation errors are
    recorded per curve without aborting the sweep.
    """
    if vary not in ("alpha", "beta"):
        raise ValueError("vary must be 'alpha' or 'beta'")
    grid = np.asarray(budget_grid, dtype=float)
    if grid.size < 1 or np.any(grid <= 0) or not np.all(np.diff(grid) > 0):
        raise ValueError("budget grid must be positive and strictly increasing")
    varied = [replace(base, **{vary: float(v)}) for v in values]  # bounds re-checked here

    out = []
    for v, p in zip(values, varied):
        try:
            if p.delta > 0:
                shares = np.array([steady_share(p, b) for b in grid])
            else:
                shares = np.array([_steady_by_relaxation(p, b) for b in grid])
            out.append(SweepCurve(float(v), grid, shares))
        except (NoSteadyState, IntegrationError) as exc:
            out.append(SweepCurve(float(v), grid, None, error=str(exc)))
    return out


def classify_shape(curve, tol: float = 1e-4) -> str:
    """Label a response curve "concave", "s-shaped", or "undetermined".

    Parameters
    ----------
    curve : (n, 2) array_like
        (budget, share) points, n >= 5, budgets strictly increasing.
    tol : float
        Noise band: second differences within [-tol, tol] count as flat.

    Second differences are taken index-wise, so the grid's spacing sets
    the coordinate system: on the conventional log-spaced grid this
    reads curvature against log spend. "concave" means no second
    difference is significantly positive; "s-shaped" means the
    significant ones switch sign positive-to-negative exactly once.
    """
    pts = np.asarray(curve, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("curve must be an (n, 2) array of (budget, share) points")
    if pts.shape[0] < 5:
        raise ValueError("need at least 5 points to classify a shape")
    b, x = pts[:, 0], pts[:, 1]
    if not np.all(np.diff(b) > 0):
        raise ValueError("budgets must be strictly increasing")
    d2 = x[2:] - 2.0 * x[1:-1] + x[:-2]
    if np.all(d2 <= tol):
        return "concave"
    signs = np.sign(d2[np.abs(d2) > tol])
    runs = [s for i, s in enumerate(signs) if i == 0 or s != signs[i - 1]]
    if runs == [1.0, -1.0]:
        return "s-shaped"
    return "undetermined"
