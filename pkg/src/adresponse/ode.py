"""Fixed-step RK4 integration with step-halving verification.

Small scalar ODEs only. The integrator walks a node list (sample times
plus any interior breakpoints of the forcing), takes classical RK4 steps
of at most a base size inside each leg, and re-runs at half the step
until two successive resolutions agree at every node.
"""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


class IntegrationError(RuntimeError):
    """Integration failed; `time` holds the offending location."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


def _rk4_pass(f: Callable[[float, float], float], x0: float,
              nodes: np.ndarray, h: float) -> np.ndarray:
    """One fixed-resolution sweep over the node list; values at nodes."""
    out = np.empty(nodes.size)
    out[0] = x0
    x = float(x0)
    for i in range(nodes.size - 1):
        a, c = nodes[i], nodes[i + 1]
        n_sub = max(1, math.ceil((c - a) / h - 1e-12))
        dt = (c - a) / n_sub
        t = a
        for _ in range(n_sub):
            k1 = f(t, x)
            k2 = f(t + 0.5 * dt, x + 0.5 * dt * k1)
            k3 = f(t + 0.5 * dt, x + 0.5 * dt * k2)
            k4 = f(t + dt, x + dt * k3)
            if not (math.isfinite(k1) and math.isfinite(k2)
                    and math.isfinite(k3) and math.isfinite(k4)):
                raise IntegrationError(
                    f"non-finite derivative encountered near t={t!r}", time=t)
            x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += dt
            if not math.isfinite(x):
                raise IntegrationError(
                    f"state became non-finite near t={t!r}", time=t)
        out[i + 1] = x
    return out


def integrate(f: Callable[[float, float], float], x0: float,
              nodes: Sequence[float], h0: float,
              tol: float = 1e-8, max_halvings: int = 10) -> np.ndarray:
    """Integrate dx/dt = f(t, x) through `nodes`, verified by step halving.

    Runs RK4 at base step `h0`, then at h0/2, and keeps halving until two
    successive resolutions agree within `tol` at every node (the finer
    result is returned). Raises IntegrationError if agreement is never
    reached or a derivative turns non-finite.
    """
    nodes = np.asarray(nodes, dtype=float)
    if nodes.size < 1:
        raise ValueError("need at least one node")
    if nodes.size == 1:
        return np.array([float(x0)])
    if not np.all(np.diff(nodes) > 0):
        raise ValueError("nodes must be strictly increasing")
    h = float(h0)
    if not (h > 0):
        raise ValueError("base step must be positive")
    coarse = _rk4_pass(f, x0, nodes, h)
    for _ in range(max_halvings):
        h *= 0.5
        fine = _rk4_pass(f, x0, nodes, h)
        if np.max(np.abs(fine - coarse)) <= tol:
            return fine
        coarse = fine
    raise IntegrationError(
        f"step halving did not converge to {tol:g} within {max_halvings} refinements")
