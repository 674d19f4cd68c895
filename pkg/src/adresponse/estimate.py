"""Parameter recovery from sampled share trajectories.

Two routes to the same rate-matching objective: differentiate a trained
surrogate network analytically (fit_gvw), or difference the observed
shares directly (fit_gvw_fd). Either way the residual at each sample
time is

    r_l = dy/dt(t_l) - [rho * b_l**alpha * (1 - y_l)**beta - delta * y_l]

and the summed square is minimized over bounded parameters by damped
least squares from a seeded Latin-hypercube multistart.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .gvw import GvwParams
from .lm import LmResult, lm_minimize
from .mlp import MlpSpec, widen_weights
from .train import TrainConfig, TrainingError, TrainReport, lm_train
from .trajectory import Trajectory

__all__ = ["EstimationProblem", "FitReport", "StartOutcome", "EstimationError",
           "DEFAULT_BOUNDS", "FIT_REPORT_SCHEMA",
           "rate_residuals", "nls_solve", "fit_gvw", "fit_gvw_fd"]

PARAM_ORDER = ("rho", "alpha", "beta", "delta")

DEFAULT_BOUNDS = {
    "rho": (1e-8, 10.0),
    "alpha": (0.05, 2.0),
    "beta": (0.0, 2.0),
    "delta": (-1.0, 1.0),
}

# hard limits the parameter type itself enforces
_TYPE_LIMITS = {"rho": (0.0, math.inf), "alpha": (0.0, 2.0),
                "beta": (0.0, 2.0), "delta": (-math.inf, math.inf)}


class EstimationError(RuntimeError):
    """Every multistart attempt failed; see the message for outcomes."""


@dataclass(frozen=True)
class EstimationProblem:
    """Data plus the knobs of the estimation pipeline.

    bounds maps each parameter name to (low, high); they must sit inside
    the limits GvwParams itself enforces. The surrogate settings only
    matter for the network route.
    """

    data: Trajectory
    bounds: dict = field(default_factory=lambda: dict(DEFAULT_BOUNDS))
    surrogate_spec: MlpSpec = field(default_factory=lambda: MlpSpec(1, (16, 32), 1))
    train_config: TrainConfig = field(
        default_factory=lambda: TrainConfig(validation_fraction=0.0))
    surrogate_restarts: int = 4
    multistart_count: int = 16
    max_iterations: int = 500
    step_tol: float = 1e-10
    grad_tol: float = 1e-10

    def __post_init__(self):
        if set(self.bounds) != set(PARAM_ORDER):
            raise ValueError(f"bounds must cover exactly {PARAM_ORDER}")
        for name, (lo, hi) in self.bounds.items():
            tlo, thi = _TYPE_LIMITS[name]
            if not (lo < hi) or lo < tlo or hi > thi:
                raise ValueError(f"bounds for {name} must be ordered and inside "
                                 f"({tlo:g}, {thi:g}]")
        if self.bounds["rho"][0] <= 0 or self.bounds["alpha"][0] <= 0:
            raise ValueError("rho and alpha lower bounds must be > 0")
        if int(self.multistart_count) < 1:
            raise ValueError("need at least one start")
        if int(self.surrogate_restarts) < 1:
            raise ValueError("need at least one surrogate restart")


@dataclass(frozen=True)
class StartOutcome:
    """What one multistart attempt did."""

    start: GvwParams
    initial_sse: float
    final_sse: float
    iterations: int
    status: str          # "ok", "at-bound", or "error: ..."
    params: GvwParams | None


@dataclass(frozen=True)
class FitReport:
    """Recovered parameters and the full multistart audit trail.

    residual_mse is the mean squared rate residual at the optimum.
    flags may contain "alpha_unidentifiable" (budget nearly constant; in
    the JSON form alpha is then null). surrogate_report is None on the
    finite-difference route.
    """

    params: GvwParams
    residual_mse: float
    method: str
    starts: int
    outcomes: tuple[StartOutcome, ...]
    flags: tuple[str, ...] = ()
    surrogate_report: TrainReport | None = None

    def to_json_dict(self) -> dict:
        alpha_out = None if "alpha_unidentifiable" in self.flags else self.params.alpha
        doc = {
            "rho": self.params.rho,
            "alpha": alpha_out,
            "beta": self.params.beta,
            "delta": self.params.delta,
            "mse": self.residual_mse,
            "method": self.method,
            "starts": self.starts,
            "flags": list(self.flags),
            "surrogate": None,
        }
        if self.surrogate_report is not None:
            rep = self.surrogate_report
            doc["surrogate"] = {
                "spec": {"input_width": rep.model.spec.input_width,
                         "hidden_widths": list(rep.model.spec.hidden_widths),
                         "output_width": rep.model.spec.output_width},
                "best_epoch": int(rep.best_epoch),
                "val_mse": float(rep.best_val_mse),
            }
        return doc


FIT_REPORT_SCHEMA = {
    "type": "object",
    "required": ["rho", "alpha", "beta", "delta", "mse", "method", "starts", "surrogate"],
    "properties": {
        "rho": {"type": "number", "exclusiveMinimum": 0},
        "alpha": {"type": ["number", "null"]},
        "beta": {"type": "number"},
        "delta": {"type": "number"},
        "mse": {"type": "number", "minimum": 0},
        "method": {"enum": ["dnn", "fd"]},
        "starts": {"type": "integer", "minimum": 1},
        "flags": {"type": "array", "items": {"type": "string"}},
        "surrogate": {
            "type": ["object", "null"],
            "required": ["spec", "best_epoch", "val_mse"],
            "properties": {
                "spec": {"type": "object"},
                "best_epoch": {"type": "integer", "minimum": 0},
                "val_mse": {"type": "number", "minimum": 0},
            },
        },
    },
}


# ---------------------------------------------------------------------------
# residuals


def _as_rate_table(rates) -> np.ndarray:
    table = np.asarray(rates, dtype=float)
    if table.ndim != 2 or table.shape[1] != 4:
        raise ValueError("rates must be an (n, 4) array of (t, dy/dt, y, b) rows")
    if not np.all(np.isfinite(table)):
        raise ValueError("rate table must be finite")
    y, b = table[:, 2], table[:, 3]
    if np.any(y < 0) or np.any(y > 1):
        raise ValueError("shares in the rate table must lie in [0, 1]")
    if np.any(b < 0):
        raise ValueError("budgets in the rate table must be nonnegative")
    return table


def rate_residuals(params: GvwParams, rates) -> np.ndarray:
    """Pointwise mismatch between observed and modeled share velocity.

    Parameters
    ----------
    params : GvwParams
    rates : (n, 4) array_like
        Rows (t, dy/dt, y, b): sample time, estimated share velocity,
        share, and spend.

    Returns
    -------
    ndarray of dy/dt - [rho * b**alpha * (1-y)**beta - delta * y].
    """
    table = _as_rate_table(rates)
    dydt, y, b = table[:, 1], table[:, 2], table[:, 3]
    model = params.rho * b ** params.alpha * (1.0 - y) ** params.beta \
        - params.delta * y
    return dydt - model


def _rate_jacobian(params: GvwParams, table: np.ndarray) -> np.ndarray:
    """Analytic d(residual)/d(rho, alpha, beta, delta)."""
    y, b = table[:, 2], table[:, 3]
    bpow = b ** params.alpha
    upow = (1.0 - y) ** params.beta
    # b**alpha * log(b) -> 0 as b -> 0; same for the untapped-market term
    logb = np.where(b > 0, np.log(np.where(b > 0, b, 1.0)), 0.0)
    logu = np.where(1.0 - y > 0, np.log(np.where(1.0 - y > 0, 1.0 - y, 1.0)), 0.0)
    J = np.empty((table.shape[0], 4))
    J[:, 0] = -bpow * upow
    J[:, 1] = -params.rho * bpow * logb * upow
    J[:, 2] = -params.rho * bpow * upow * logu
    J[:, 3] = y
    return J


# ---------------------------------------------------------------------------
# bounded nonlinear least squares


def _theta_of(params: GvwParams) -> np.ndarray:
    return np.array([params.rho, params.alpha, params.beta, params.delta])


def _params_of(theta: np.ndarray) -> GvwParams:
    return GvwParams(*map(float, theta))


def _fd_jacobian(residual_fn, theta: np.ndarray) -> np.ndarray:
    r0 = np.asarray(residual_fn(_params_of(theta)), dtype=float)
    J = np.empty((r0.size, theta.size))
    for j in range(theta.size):
        h = 1e-7 * max(1.0, abs(theta[j]))
        tp, tm = theta.copy(), theta.copy()
        tp[j] += h
        tm[j] -= h
        try:
            rp = np.asarray(residual_fn(_params_of(tp)), dtype=float)
            rm = np.asarray(residual_fn(_params_of(tm)), dtype=float)
            J[:, j] = (rp - rm) / (2.0 * h)
        except ValueError:
            # one side left the parameter domain; fall back to one-sided
            rp = np.asarray(residual_fn(_params_of(tp)), dtype=float)
            J[:, j] = (rp - r0) / h
    return J


def _nls_core(residual_fn, start: GvwParams, bounds: dict,
              jacobian_fn=None, max_iterations: int = 500,
              step_tol: float = 1e-10, grad_tol: float = 1e-10) -> tuple[GvwParams, LmResult]:
    lower = np.array([bounds[k][0] for k in PARAM_ORDER])
    upper = np.array([bounds[k][1] for k in PARAM_ORDER])

    def rf(theta):
        return residual_fn(_params_of(theta))

    if jacobian_fn is None:
        def jf(theta):
            return _fd_jacobian(residual_fn, theta)
    else:
        def jf(theta):
            return jacobian_fn(_params_of(theta))

    res = lm_minimize(rf, _theta_of(start), jf, lower, upper,
                      step_tol=step_tol, grad_tol=grad_tol,
                      max_iter=max_iterations)
    return _params_of(res.theta), res


def nls_solve(residual_fn, start: GvwParams, bounds: dict,
              jacobian_fn=None, max_iterations: int = 500,
              step_tol: float = 1e-10, grad_tol: float = 1e-10) -> tuple[GvwParams, float]:
    """Bounded damped least squares from a single start.

    residual_fn maps GvwParams to a residual vector; jacobian_fn (same
    argument) defaults to central differences. Candidate parameters are
    projected to `bounds` after every step; acceptance needs a strict
    decrease, so the returned sum of squares never exceeds the start's.
    Terminates on step norm < step_tol, gradient norm < grad_tol, or
    the iteration budget. Returns (parameters, sum of squared residuals).
    """
    params, res = _nls_core(residual_fn, start, bounds, jacobian_fn,
                            max_iterations, step_tol, grad_tol)
    return params, res.sse


# ---------------------------------------------------------------------------
# multistart machinery


def _latin_hypercube_starts(bounds: dict, n: int, seed: int) -> list[GvwParams]:
    """Seeded Latin hypercube over the bounds; rho drawn on a log scale
    because its bounds span many decades."""
    rng = np.random.default_rng(seed)
    samples = {}
    for name in PARAM_ORDER:
        lo, hi = bounds[name]
        if name == "rho":
            lo, hi = math.log10(lo), math.log10(hi)
        strata = (rng.permutation(n) + rng.uniform(0.0, 1.0, size=n)) / n
        vals = lo + strata * (hi - lo)
        if name == "rho":
            vals = 10.0 ** vals
        samples[name] = vals
    return [GvwParams(samples["rho"][i], samples["alpha"][i],
                      samples["beta"][i], samples["delta"][i])
            for i in range(n)]


def _budget_flags(b: np.ndarray) -> tuple[str, ...]:
    mean = float(np.mean(b))
    if mean == 0.0:
        return ("alpha_unidentifiable",)
    cv = float(np.std(b)) / abs(mean)
    return ("alpha_unidentifiable",) if cv < 1e-3 else ()


def _at_bound(params: GvwParams, bounds: dict) -> bool:
    theta = _theta_of(params)
    lower = np.array([bounds[k][0] for k in PARAM_ORDER])
    upper = np.array([bounds[k][1] for k in PARAM_ORDER])
    span = upper - lower
    return bool(np.any(theta - lower <= 1e-12 * span) or
                np.any(upper - theta <= 1e-12 * span))


def _multistart_fit(table: np.ndarray, problem: EstimationProblem, method: str,
                    surrogate_report: TrainReport | None) -> FitReport:
    def residual_fn(p):
        return rate_residuals(p, table)

    def jacobian_fn(p):
        return _rate_jacobian(p, table)

    starts = _latin_hypercube_starts(problem.bounds, int(problem.multistart_count),
                                     problem.train_config.seed)
    outcomes = []
    for start in starts:
        r0 = residual_fn(start)
        init_sse = float(r0 @ r0)
        try:
            fitted, res = _nls_core(residual_fn, start, problem.bounds,
                                    jacobian_fn=jacobian_fn,
                                    max_iterations=problem.max_iterations,
                                    step_tol=problem.step_tol,
                                    grad_tol=problem.grad_tol)
            status = "at-bound" if _at_bound(fitted, problem.bounds) else "ok"
            outcomes.append(StartOutcome(start, init_sse, res.sse, res.iterations,
                                         status, fitted))
        except (ValueError, np.linalg.LinAlgError) as exc:
            outcomes.append(StartOutcome(start, init_sse, math.inf, 0,
                                         f"error: {exc}", None))

    usable = [o for o in outcomes if o.status == "ok" and math.isfinite(o.final_sse)]
    if not usable:
        lines = "; ".join(f"start {i}: {o.status}" for i, o in enumerate(outcomes))
        raise EstimationError(f"every start hit a bound or diverged ({lines})")
    best = min(usable, key=lambda o: o.final_sse)
    flags = _budget_flags(table[:, 3])
    return FitReport(params=best.params,
                     residual_mse=best.final_sse / table.shape[0],
                     method=method,
                     starts=len(starts),
                     outcomes=tuple(outcomes),
                     flags=flags,
                     surrogate_report=surrogate_report)


# ---------------------------------------------------------------------------
# the two fitting routes


def _widening_ladder(spec: MlpSpec) -> list[MlpSpec]:
    """Cascade stages: two units per hidden layer, then halvings of the
    target widths, ending at the target itself."""
    widths = spec.hidden_widths
    stages = [tuple(min(w, 2) for w in widths)]
    for k in (2, 1, 0):
        stage = tuple(min(w, max(2, w >> k)) for w in widths)
        if stage != stages[-1]:
            stages.append(stage)
    return [MlpSpec(spec.input_width, s, spec.output_width) for s in stages]


def _cascade_train(problem: EstimationProblem, seed: int) -> TrainReport:
    """Train the surrogate small-to-large along the widening ladder.

    The stage-0 network is tiny enough that full-batch LM reliably
    places its few kinks; each later stage embeds the trained net in a
    wider one (same function, fresh capacity, new first-layer kinks
    spread over the time range) and continues training. A damping
    ceiling at stage 0 propagates; at a later stage the last completed
    stage's report stands, since widening never changed the function.
    """
    ladder = _widening_ladder(problem.surrogate_spec)
    cfg = replace(problem.train_config, seed=seed)
    report = lm_train(ladder[0], problem.data, cfg)
    spec = ladder[0]
    for j, wider in enumerate(ladder[1:]):
        # distinct draw stream per restart and stage
        _, warm = widen_weights(spec, report.final_weights(),
                                wider.hidden_widths, seed=1000 * (seed + 1) + j)
        try:
            report = lm_train(wider, problem.data, cfg, initial_weights=warm)
        except TrainingError:
            return report
        spec = wider
    return report


def fit_gvw(problem: EstimationProblem) -> FitReport:
    """Surrogate route: train the network on the trajectory, read shares
    and analytic share velocities off it at the sample times only, then
    run the bounded multistart on the rate residuals.

    Full-batch LM training of a ReLU net started at full width is
    basin-sensitive (flat-mean and few-kink minima attract most seeds),
    so each restart trains along a widening cascade instead: a tiny net
    first, then function-preserving embeddings into wider ones. The
    whole pipeline runs once per restart seed and the restart whose
    rates the bounded multistart explains best (lowest rate-residual
    MSE) supplies the parameters; restarts that fail entirely are
    discarded, and if all do the last failure propagates.

    Requires at least 10 samples. A nearly constant budget cannot pin
    the spend elasticity; the fit still runs but the report carries the
    alpha_unidentifiable flag and its JSON form nulls alpha.
    """
    data = problem.data
    if len(data) < 10:
        raise ValueError("need at least 10 samples for a surrogate fit")
    best = None
    failure = None
    for k in range(int(problem.surrogate_restarts)):
        try:
            report = _cascade_train(problem, problem.train_config.seed + k)
        except TrainingError as exc:
            failure = exc
            continue
        model = report.model
        y_hat = np.clip(model.predict(data.t), 0.0, 1.0)
        dy_hat = model.predict_rate(data.t)
        table = np.column_stack([data.t, dy_hat, y_hat, data.b])
        try:
            fit = _multistart_fit(table, problem, "dnn", report)
        except EstimationError as exc:
            failure = exc
            continue
        if best is None or fit.residual_mse < best.residual_mse:
            best = fit
    if best is None:
        raise failure
    return best


def fit_gvw_fd(problem: EstimationProblem) -> FitReport:
    """Finite-difference route: central differences of the observed
    shares stand in for the share velocity (one-sided at the ends), then
    the identical multistart stage runs.

    On a step-like schedule a stencil that spans a spend switch (the
    sampled budget differs across its points) differentiates a kinked
    path and its estimate is biased by the jump, so those rows are
    dropped; at least 3 clean rows must remain. A budget that moves at
    more than half the sample gaps is treated as smoothly varying (the
    share path then has no kinks) and every row is kept."""
    data = problem.data
    if len(data) < 3:
        raise ValueError("need at least 3 samples for finite differences")
    t, x, b = data.t, data.x, data.b
    dy = np.empty_like(x)
    dy[1:-1] = (x[2:] - x[:-2]) / (t[2:] - t[:-2])
    dy[0] = (x[1] - x[0]) / (t[1] - t[0])
    dy[-1] = (x[-1] - x[-2]) / (t[-1] - t[-2])
    clean = np.ones(x.size, dtype=bool)
    step_like = np.count_nonzero(b[1:] != b[:-1]) * 2 <= b.size - 1
    if step_like:
        clean[1:-1] = (b[2:] == b[1:-1]) & (b[:-2] == b[1:-1])
        clean[0] = b[1] == b[0]
        clean[-1] = b[-1] == b[-2]
        if int(np.count_nonzero(clean)) < 3:
            raise ValueError("fewer than 3 stencils free of spend switches")
    table = np.column_stack([t, dy, x, b])[clean]
    return _multistart_fit(table, problem, "fd", None)
