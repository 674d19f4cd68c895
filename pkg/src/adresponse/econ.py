"""Log-log econometric baseline and its comparison with the response model.

The baseline is the classic multiplicative carryover regression

    log s_t = log c0 + c1 * log s_{t-1} + c2 * log b_t + noise

fit by ordinary least squares on the lagged series. Its closed-form
steady state and power-law budget exponent make it a sharp foil for the
saturating differential-equation model: one saturates at full market
coverage, the other grows without bound whenever c2 > 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gvw import GvwParams, NoSteadyState, PulseSpec, simulate, steady_share
from .budgets import PulseTrain
from .trajectory import Trajectory

__all__ = ["EconParams", "ComparisonScenario", "RankDeficientError",
           "fit_ols", "predict_econ", "steady_state_econ", "compare_models"]


class RankDeficientError(ValueError):
    """The regressor matrix is collinear; the OLS system has no unique
    solution."""


@dataclass(frozen=True)
class EconParams:
    """Multiplicative-model coefficients: level c0 > 0, carryover c1,
    budget exponent c2."""

    c0: float
    c1: float
    c2: float

    def __post_init__(self):
        if not (math.isfinite(self.c0) and self.c0 > 0):
            raise ValueError("c0 must be finite and > 0")
        if not (math.isfinite(self.c1) and math.isfinite(self.c2)):
            raise ValueError("c1 and c2 must be finite")


def fit_ols(data: Trajectory) -> tuple[EconParams, np.ndarray]:
    """Fit the lagged log-log regression by ordinary least squares.

    Parameters
    ----------
    data : Trajectory
        Sales (share) and spend series; every share and every spend
        entering the regression must be strictly positive, and at least
        four lagged rows are needed.

    Returns
    -------
    (EconParams, residuals)
        Coefficients (c0 exponentiated back from the intercept) and the
        log-space residuals, one per lagged row.

    Normal equations are used directly; if their condition number
    exceeds 1e12 the pseudo-inverse takes over. Exactly collinear
    regressors raise RankDeficientError.
    """
    s, b = data.x, data.b
    bad = [i for i in range(len(s)) if s[i] <= 0 or (i > 0 and b[i] <= 0)]
    if bad:
        raise ValueError(f"log-log fit needs positive shares and spends; "
                         f"offending sample indices {bad}")
    if len(s) < 5:
        raise ValueError("need at least 5 samples (4 lagged rows)")
    ly = np.log(s[1:])
    X = np.column_stack([np.ones(ly.size), np.log(s[:-1]), np.log(b[1:])])
    if np.linalg.matrix_rank(X) < 3:
        raise RankDeficientError("collinear regressors: lagged share and spend "
                                 "columns do not span three directions")
    XtX = X.T @ X
    Xty = X.T @ ly
    if np.linalg.cond(XtX) > 1e12:
        coef = np.linalg.pinv(XtX) @ Xty
    else:
        coef = np.linalg.solve(XtX, Xty)
    resid = ly - X @ coef
    return EconParams(float(np.exp(coef[0])), float(coef[1]), float(coef[2])), resid


def predict_econ(params: EconParams, s_prev: float, b: float) -> float:
    """One-step-ahead level: c0 * s_prev**c1 * b**c2 (both inputs > 0)."""
    if not (s_prev > 0):
        raise ValueError("previous level must be > 0")
    if not (b > 0):
        raise ValueError("spend must be > 0")
    return params.c0 * s_prev ** params.c1 * b ** params.c2


def steady_state_econ(params: EconParams, b_bar: float) -> float:
    """Fixed point of the recursion at constant spend:
    (c0 * b_bar**c2) ** (1 / (1 - c1)). Requires carryover c1 < 1."""
    if not (b_bar > 0):
        raise ValueError("steady spend must be > 0")
    if params.c1 >= 1:
        raise NoSteadyState("carryover c1 >= 1: the recursion has no stable "
                            "fixed point")
    return (params.c0 * b_bar ** params.c2) ** (1.0 / (1.0 - params.c1))


def _econ_pulse_path(params: EconParams, s0: float, spends: np.ndarray) -> np.ndarray:
    """Iterate the recursion over per-period spends; zero-spend periods
    drop the advertising term (the log of zero spend is undefined), so
    the level decays geometrically in log space with ratio c1."""
    out = np.empty(spends.size + 1)
    out[0] = s0
    s = s0
    for i, b in enumerate(spends):
        s = params.c0 * s ** params.c1 * (b ** params.c2 if b > 0 else 1.0)
        out[i + 1] = s
    return out


@dataclass(frozen=True)
class ComparisonScenario:
    """Common footing for the two models: one rectangular pulse watched
    over `n_periods` unit periods, plus a budget grid for steady-state
    curves. Shares enter the log-log model directly (sales = share times
    a market potential of 1 unless the caller rescales)."""

    pulse: PulseSpec
    n_periods: int = 40
    budget_grid: tuple[float, ...] = tuple(np.linspace(0.2, 4.0, 20))

    def __post_init__(self):
        if self.pulse.x0 <= 0:
            raise ValueError("comparison needs a positive starting share "
                             "(the log-log recursion starts from log s0)")
        if int(self.n_periods) < 2:
            raise ValueError("need at least 2 periods")
        grid = tuple(float(v) for v in self.budget_grid)
        if len(grid) < 5 or any(v <= 0 for v in grid) or \
                any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("budget grid must be positive, strictly increasing, "
                             "with at least 5 points")
        object.__setattr__(self, "budget_grid", grid)


def compare_models(gvw: GvwParams, econ: EconParams,
                   scenario: ComparisonScenario) -> dict:
    """Side-by-side behavioral report for the two models.

    Returns a JSON-ready dict with four sections:

    - "pulse": both share paths over the scenario's periods, with the
      post-cessation decay descriptors (continuous rate delta for the
      ODE model, per-period log-space ratio c1 for the baseline).
    - "steady": steady-state curves over the budget grid.
    - "diminishing_returns": whether each steady curve shows no
      significantly convex stretch on the (linear) grid, plus the
      baseline's closed-form budget exponent c2 / (1 - c1) whose being
      below 1 is exactly its diminishing-returns condition.
    - "saturation": the ODE model is bounded by full coverage; the
      baseline is unbounded in spend whenever c2 > 0.

    Underlying model errors (no steady state, unstable carryover)
    propagate.
    """
    pulse = scenario.pulse
    periods = np.arange(scenario.n_periods + 1, dtype=float)
    # a single pulse: the off phase outlasts any horizon
    schedule = PulseTrain((pulse.b0,), on=pulse.t_end, off=1e12)
    traj = simulate(gvw, schedule, pulse.x0, periods)
    spends = np.array([schedule(t) for t in periods[1:]])
    econ_path = _econ_pulse_path(econ, pulse.x0, spends)

    grid = np.asarray(scenario.budget_grid)
    gvw_steady = np.array([steady_share(gvw, b) for b in grid])
    econ_steady = np.array([steady_state_econ(econ, b) for b in grid])

    tol = 1e-4
    exponent = econ.c2 / (1.0 - econ.c1)

    def concave(values):
        d2 = values[2:] - 2.0 * values[1:-1] + values[:-2]
        return bool(np.all(d2 <= tol))

    return {
        "pulse": {
            "time": periods.tolist(),
            "gvw": traj.x.tolist(),
            "econ": econ_path.tolist(),
            "gvw_decay_rate": gvw.delta,
            "econ_decay_ratio": econ.c1,
        },
        "steady": {
            "budget": grid.tolist(),
            "gvw": gvw_steady.tolist(),
            "econ": econ_steady.tolist(),
        },
        "diminishing_returns": {
            "gvw": concave(gvw_steady),
            "econ": bool(exponent < 1.0),
            "econ_steady_exponent": exponent,
        },
        "saturation": {
            "gvw_bounded": True,
            "gvw_bound": 1.0,
            "econ_bounded": bool(econ.c2 <= 0),
            "verdict": ("share model saturates at full coverage; log-log model "
                        "grows without bound in spend" if econ.c2 > 0 else
                        "both models are bounded in spend"),
        },
    }
