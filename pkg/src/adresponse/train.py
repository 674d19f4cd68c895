"""Full-batch Levenberg-Marquardt training of the share surrogate.

Sample times are standardized to [0, 1] before training; the packaged
model destandardizes predictions and applies the chain rule to time
derivatives, so callers always work on the raw time axis. Training is
deterministic for a fixed seed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .lm import marquardt_step
from .mlp import (MlpSpec, MlpWeights, _check, forward, init_weights,
                  jacobian, time_derivative)
from .trajectory import Trajectory

__all__ = ["TrainConfig", "TrainReport", "SurrogateModel", "TrainingError", "lm_train"]


class TrainingError(RuntimeError):
    """Training failed (damping ceiling exceeded)."""


@dataclass(frozen=True)
class TrainConfig:
    """Damping schedule and bookkeeping for lm_train.

    lm_initial / lm_increase / lm_decrease follow the usual Marquardt
    recipe (0.001, 10, 0.1). validation_fraction holds out a
    chronological tail; 0 validates on the training set itself, which
    the estimator uses so no stretch of the time axis is extrapolated.
    """

    lm_initial: float = 1e-3
    lm_increase: float = 10.0
    lm_decrease: float = 0.1
    max_epochs: int = 1000
    validation_fraction: float = 0.2
    seed: int = 0
    mu_max: float = 1e10
    grad_tol: float = 1e-8

    def __post_init__(self):
        if not (self.lm_initial > 0):
            raise ValueError("lm_initial must be > 0")
        if not (self.lm_increase > 1):
            raise ValueError("lm_increase must be > 1")
        if not (0 < self.lm_decrease < 1):
            raise ValueError("lm_decrease must lie in (0, 1)")
        if int(self.max_epochs) < 1:
            raise ValueError("max_epochs must be >= 1")
        if not (0 <= self.validation_fraction <= 0.5):
            raise ValueError("validation_fraction must lie in [0, 0.5]")
        if not (self.mu_max > self.lm_initial):
            raise ValueError("mu_max must exceed lm_initial")
        if not (self.grad_tol >= 0):
            raise ValueError("grad_tol must be >= 0")


@dataclass(frozen=True)
class SurrogateModel:
    """A trained network plus the time standardization it was fit under."""

    spec: MlpSpec
    weights: MlpWeights
    t_offset: float
    t_scale: float

    def _std(self, t):
        return (np.asarray(t, dtype=float) - self.t_offset) / self.t_scale

    def predict(self, t):
        """Predicted share at raw time(s) t."""
        out = forward(self.spec, self.weights, self._std(t))
        return out

    def predict_rate(self, t):
        """Analytic d(share)/dt at raw time(s) t (chain rule through the
        standardization)."""
        return time_derivative(self.spec, self.weights, self._std(t)) / self.t_scale

    def to_json_dict(self) -> dict:
        return {
            "spec": {"input_width": self.spec.input_width,
                     "hidden_widths": list(self.spec.hidden_widths),
                     "output_width": self.spec.output_width},
            "layers": [{"weights": w.tolist(), "bias": b.tolist()}
                       for w, b in zip(self.weights.weights, self.weights.biases)],
            "standardization": {"t_offset": self.t_offset, "t_scale": self.t_scale},
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SurrogateModel":
        spec = MlpSpec(doc["spec"]["input_width"],
                       tuple(doc["spec"]["hidden_widths"]),
                       doc["spec"]["output_width"])
        ws = tuple(np.asarray(layer["weights"], dtype=float) for layer in doc["layers"])
        bs = tuple(np.asarray(layer["bias"], dtype=float) for layer in doc["layers"])
        std = doc["standardization"]
        return cls(spec, MlpWeights(ws, bs), float(std["t_offset"]), float(std["t_scale"]))

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, sort_keys=True)

    @classmethod
    def load(cls, path) -> "SurrogateModel":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass
class TrainReport:
    """Epoch-by-epoch record of one training run.

    train_mse / val_mse hold the mean squared error of the weights held
    *after* each epoch's accept-or-reject decision, so the training
    series never increases. `model` packages the weights from the epoch
    with the lowest validation MSE (earliest on ties).
    """

    model: SurrogateModel
    train_mse: np.ndarray
    val_mse: np.ndarray
    accepted: np.ndarray
    mu: np.ndarray
    best_epoch: int
    best_val_mse: float
    epochs_run: int = 0
    stop_reason: str = ""

    def final_weights(self) -> MlpWeights:
        return self.model.weights


def lm_train(spec: MlpSpec, data: Trajectory, config: TrainConfig,
             initial_weights: MlpWeights | None = None) -> TrainReport:
    """Fit the surrogate to a trajectory by full-batch LM.

    One epoch = one proposed step: solve the damped normal equations,
    accept only on strict loss decrease (multiplying the damping by
    lm_decrease), otherwise reject and multiply by lm_increase. Raises
    TrainingError if the damping exceeds mu_max with no acceptable step
    while a meaningful step remains available. Stops early once the
    training MSE reaches roundoff (< 1e-15), the loss gradient drops
    below grad_tol (converged, possibly to a local minimum), or the
    proposed step shrinks under 1e-12 (further progress is unresolvable
    in double precision).

    initial_weights warm-starts the loop (continuation from a smaller
    widened network, resuming an earlier run); by default weights come
    from init_weights(spec, config.seed).
    """
    n = len(data)
    t_offset = float(data.t[0])
    t_scale = float(data.t[-1] - data.t[0]) if n > 1 else 1.0
    if t_scale == 0.0:
        t_scale = 1.0
    ts = (data.t - t_offset) / t_scale
    y = data.x

    n_val = int(round(config.validation_fraction * n))
    if n_val > 0:
        t_train, y_train = ts[:n - n_val], y[:n - n_val]
        t_val, y_val = ts[n - n_val:], y[n - n_val:]
    else:
        t_train, y_train = ts, y
        t_val, y_val = ts, y
    if t_train.size == 0:
        raise ValueError("validation split leaves no training samples")

    if initial_weights is None:
        theta = init_weights(spec, config.seed).flatten()
    else:
        _check(spec, initial_weights)
        theta = initial_weights.flatten()

    def predict(th, tt):
        return forward(spec, MlpWeights.unflatten(spec, th), tt)

    def sse(th, tt, yy):
        d = predict(th, tt) - yy
        return float(d @ d)

    loss = sse(theta, t_train, y_train)
    mu = config.lm_initial
    best_theta = theta.copy()
    best_val = math.inf
    best_epoch = 0

    train_hist, val_hist, acc_hist, mu_hist = [], [], [], []
    stop_reason = "max-epochs"
    epochs_run = 0
    for epoch in range(int(config.max_epochs)):
        epochs_run = epoch + 1
        w = MlpWeights.unflatten(spec, theta)
        r = forward(spec, w, t_train) - y_train
        J = jacobian(spec, w, t_train)
        if float(np.max(np.abs(J.T @ r))) < config.grad_tol:
            stop_reason = "gradient"
            epochs_run = epoch
            break
        accepted = False
        moved = math.inf
        try:
            step = marquardt_step(J, r, mu)
        except np.linalg.LinAlgError:
            step = None
        if step is not None:
            cand = theta + step
            cand_loss = sse(cand, t_train, y_train)
            if math.isfinite(cand_loss) and cand_loss < loss:
                moved = float(np.linalg.norm(step))
                theta, loss = cand, cand_loss
                mu = max(mu * config.lm_decrease, 1e-300)
                accepted = True
        if not accepted:
            mu *= config.lm_increase

        train_hist.append(loss / t_train.size)
        val_hist.append(sse(theta, t_val, y_val) / t_val.size)
        acc_hist.append(accepted)
        mu_hist.append(mu)
        if val_hist[-1] < best_val:
            best_val = val_hist[-1]
            best_theta = theta.copy()
            best_epoch = epoch

        # a proposal below the step floor cannot be resolved against the
        # loss in double precision: converged, whether it was accepted or
        # not (rejects only shrink it further)
        proposed = float(np.linalg.norm(step)) if step is not None else math.inf
        if min(moved, proposed) < 1e-12:
            stop_reason = "step-floor"
            break
        if not accepted and mu > config.mu_max:
            raise TrainingError(
                f"damping exceeded {config.mu_max:g} at epoch {epoch} "
                f"with training MSE {train_hist[-1]:.6g}")
        if train_hist[-1] < 1e-15:
            stop_reason = "mse-floor"
            break

    model = SurrogateModel(spec, MlpWeights.unflatten(spec, best_theta),
                           t_offset, t_scale)
    return TrainReport(model=model,
                       train_mse=np.asarray(train_hist),
                       val_mse=np.asarray(val_hist),
                       accepted=np.asarray(acc_hist, dtype=bool),
                       mu=np.asarray(mu_hist),
                       best_epoch=best_epoch,
                       best_val_mse=best_val,
                       epochs_run=epochs_run,
                       stop_reason=stop_reason)
