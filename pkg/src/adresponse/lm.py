"""Damped least-squares machinery shared by the network trainer and the
parameter estimator.

One accepted-or-rejected update: solve (J^T J + mu*I) step = -J^T r and
keep the step only on a strict decrease of the sum of squares,
multiplying mu by a decrease factor on success and an increase factor on
rejection (initial 0.001, increase 10, decrease 0.1 by default).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["marquardt_step", "lm_minimize", "LmResult"]


def marquardt_step(J: np.ndarray, r: np.ndarray, mu: float) -> np.ndarray:
    """Solve the damped normal equations for one descent step."""
    H = J.T @ J
    H = H + mu * np.eye(H.shape[0])
    return np.linalg.solve(H, -(J.T @ r))


@dataclass
class LmResult:
    theta: np.ndarray
    sse: float
    iterations: int
    converged: bool
    reason: str


def lm_minimize(residual_fn: Callable[[np.ndarray], np.ndarray],
                theta0: np.ndarray,
                jacobian_fn: Callable[[np.ndarray], np.ndarray],
                lower: np.ndarray, upper: np.ndarray,
                mu0: float = 1e-3, mu_increase: float = 10.0,
                mu_decrease: float = 0.1, mu_max: float = 1e10,
                step_tol: float = 1e-10, grad_tol: float = 1e-10,
                max_iter: int = 500) -> LmResult:
    """Bound-projected Levenberg-Marquardt on 0.5*||r(theta)||^2.

    Candidate parameters are clipped to [lower, upper] after each step;
    acceptance requires a strict decrease of the sum of squares.
    Terminates on accepted-step norm < step_tol, gradient infinity norm
    < grad_tol, iteration budget, or the damping ceiling (reported as
    not converged, reason "mu-overflow").
    """
    theta = np.clip(np.asarray(theta0, dtype=float), lower, upper)
    r = np.asarray(residual_fn(theta), dtype=float)
    if not np.all(np.isfinite(r)):
        raise ValueError("non-finite residuals at the starting point")
    sse = float(r @ r)
    mu = mu0
    for it in range(1, max_iter + 1):
        J = np.asarray(jacobian_fn(theta), dtype=float)
        g = J.T @ r
        if np.max(np.abs(g)) < grad_tol:
            return LmResult(theta, sse, it - 1, True, "gradient")
        try:
            step = marquardt_step(J, r, mu)
        except np.linalg.LinAlgError:
            step = None
        if step is not None:
            cand = np.clip(theta + step, lower, upper)
            rc = np.asarray(residual_fn(cand), dtype=float)
            cand_sse = float(rc @ rc) if np.all(np.isfinite(rc)) else math.inf
        else:
            cand_sse = math.inf
        if cand_sse < sse:
            moved = float(np.linalg.norm(cand - theta))
            theta, r, sse = cand, rc, cand_sse
            mu = max(mu * mu_decrease, 1e-300)
            if moved < step_tol:
                return LmResult(theta, sse, it, True, "step")
        else:
            mu *= mu_increase
            if mu > mu_max:
                return LmResult(theta, sse, it, False, "mu-overflow")
    return LmResult(theta, sse, max_iter, False, "max-iterations")
