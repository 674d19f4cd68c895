"""Scalar-input ReLU networks with analytic time derivatives.

A network maps a single time input through at least two ReLU hidden
layers to one linear output. Besides the usual forward pass, the layer
recursion is differentiated with respect to the input (forward mode) and
with respect to every weight and bias (reverse mode), which is what lets
a trained surrogate supply dy/dt analytically to the estimator.

ReLU'(z) is taken as 1 for z > 0 and 0 otherwise, including exactly at
z = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["MlpSpec", "MlpWeights", "init_weights", "widen_weights", "forward",
           "time_derivative", "jacobian"]


@dataclass(frozen=True)
class MlpSpec:
    """Layer widths: one input (time), m >= 2 ReLU hidden layers, one
    linear output."""

    input_width: int = 1
    hidden_widths: tuple[int, ...] = (4, 8)
    output_width: int = 1

    def __post_init__(self):
        hidden = tuple(int(w) for w in self.hidden_widths)
        if self.input_width != 1 or self.output_width != 1:
            raise ValueError("network maps one time input to one output")
        if len(hidden) < 2:
            raise ValueError("need at least two hidden layers")
        if any(w < 1 for w in hidden):
            raise ValueError("hidden widths must be >= 1")
        object.__setattr__(self, "hidden_widths", hidden)

    @property
    def layer_widths(self) -> tuple[int, ...]:
        return (self.input_width,) + self.hidden_widths + (self.output_width,)

    @property
    def n_params(self) -> int:
        ws = self.layer_widths
        return sum(ws[i + 1] * ws[i] + ws[i + 1] for i in range(len(ws) - 1))


@dataclass(frozen=True)
class MlpWeights:
    """Per-layer weight matrices (fan_out x fan_in) and bias vectors."""

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def __post_init__(self):
        ws = tuple(np.asarray(w, dtype=float) for w in self.weights)
        bs = tuple(np.asarray(b, dtype=float) for b in self.biases)
        if len(ws) != len(bs) or not ws:
            raise ValueError("weights and biases must pair up, one per layer")
        for i, (w, b) in enumerate(zip(ws, bs)):
            if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
                raise ValueError(f"layer {i}: weight {w.shape} and bias {b.shape} mismatch")
            if i and ws[i - 1].shape[0] != w.shape[1]:
                raise ValueError(f"layer {i}: fan-in {w.shape[1]} != previous fan-out")
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ValueError(f"layer {i}: weights must be finite")
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "biases", bs)

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def flatten(self) -> np.ndarray:
        """Layer order, each layer's matrix row-major then its bias."""
        return np.concatenate([np.concatenate([w.ravel(), b])
                               for w, b in zip(self.weights, self.biases)])

    @classmethod
    def unflatten(cls, spec: MlpSpec, theta: np.ndarray) -> "MlpWeights":
        theta = np.asarray(theta, dtype=float)
        if theta.size != spec.n_params:
            raise ValueError(f"expected {spec.n_params} parameters, got {theta.size}")
        ws, bs, pos = [], [], 0
        widths = spec.layer_widths
        for i in range(len(widths) - 1):
            fo, fi = widths[i + 1], widths[i]
            ws.append(theta[pos:pos + fo * fi].reshape(fo, fi))
            pos += fo * fi
            bs.append(theta[pos:pos + fo])
            pos += fo
        return cls(tuple(ws), tuple(bs))


def _check(spec: MlpSpec, weights: MlpWeights):
    widths = spec.layer_widths
    if len(weights.weights) != len(widths) - 1 or any(
            w.shape != (widths[i + 1], widths[i]) for i, w in enumerate(weights.weights)):
        raise ValueError("weights do not match the layer spec")


def init_weights(spec: MlpSpec, seed: int = 0) -> MlpWeights:
    """Uniform(-s, s) weights with s = sqrt(6 / (fan_in + fan_out)),
    zero biases, from a seeded generator."""
    rng = np.random.default_rng(seed)
    widths = spec.layer_widths
    ws, bs = [], []
    for i in range(len(widths) - 1):
        fi, fo = widths[i], widths[i + 1]
        s = math.sqrt(6.0 / (fi + fo))
        ws.append(rng.uniform(-s, s, size=(fo, fi)))
        bs.append(np.zeros(fo))
    return MlpWeights(tuple(ws), tuple(bs))


def widen_weights(spec: MlpSpec, weights: MlpWeights, hidden_widths,
                  seed: int = 0) -> tuple[MlpSpec, MlpWeights]:
    """Embed a trained network in a wider one without changing its output.

    Every existing unit keeps its incoming weights, receives zeros from
    the new units, and new units contribute zero downstream, so the
    widened network computes exactly the same function; training then
    continues from a known-good point with fresh capacity. New incoming
    weights are Glorot-limit uniform draws. New first-layer units get a
    bias placing their kink at a seeded uniform point of the [0, 1]
    input range (a zero bias would pin it to the left edge, leaving
    negative-weight units inactive on the whole domain); other new
    biases are zero.

    hidden_widths must have the same depth and be at least as wide,
    layer for layer.
    """
    _check(spec, weights)
    new_spec = MlpSpec(spec.input_width, tuple(int(w) for w in hidden_widths),
                       spec.output_width)
    if len(new_spec.hidden_widths) != len(spec.hidden_widths):
        raise ValueError("widening cannot change the number of hidden layers")
    if any(n < o for n, o in zip(new_spec.hidden_widths, spec.hidden_widths)):
        raise ValueError("hidden widths may only grow")
    rng = np.random.default_rng(seed)
    old_w, new_w = spec.layer_widths, new_spec.layer_widths
    ws, bs = [], []
    for i in range(len(new_w) - 1):
        fi_o, fo_o = old_w[i], old_w[i + 1]
        fi_n, fo_n = new_w[i], new_w[i + 1]
        s = math.sqrt(6.0 / (fi_n + fo_n))
        W = rng.uniform(-s, s, size=(fo_n, fi_n))
        b = np.zeros(fo_n)
        if i == 0:
            kink = rng.uniform(0.0, 1.0, size=fo_n)
            b = -W[:, 0] * kink
        W[:fo_o, :fi_o] = weights.weights[i]
        W[:fo_o, fi_o:] = 0.0
        b[:fo_o] = weights.biases[i]
        ws.append(W)
        bs.append(b)
    return new_spec, MlpWeights(tuple(ws), tuple(bs))


def _forward_full(weights: MlpWeights, t: np.ndarray):
    """Activations and pre-activations for a batch of times, last layer linear."""
    h = t.reshape(-1, 1)
    acts = [h]       # h^0 .. h^m
    pres = []        # hidden pre-activations only
    n_layers = len(weights.weights)
    for i in range(n_layers - 1):
        pre = h @ weights.weights[i].T + weights.biases[i]
        pres.append(pre)
        h = np.maximum(pre, 0.0)
        acts.append(h)
    w_out, b_out = weights.weights[-1], weights.biases[-1]
    y = (h @ w_out.T + b_out)[:, 0]
    return acts, pres, y


def forward(spec: MlpSpec, weights: MlpWeights, t):
    """Network output at time(s) t: scalar in, scalar out; arrays map."""
    _check(spec, weights)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    _, _, y = _forward_full(weights, t_arr)
    return float(y[0]) if np.isscalar(t) else y.reshape(np.shape(t))


def time_derivative(spec: MlpSpec, weights: MlpWeights, t):
    """Analytic dy/dt via the gated forward recursion.

    Each hidden layer propagates v^i = relu'(pre^i) * (W^i v^(i-1));
    the linear output contributes its weights only.
    """
    _check(spec, weights)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    _, pres, _ = _forward_full(weights, t_arr)
    v = np.ones((t_arr.size, 1))
    for i, pre in enumerate(pres):
        v = (pre > 0.0) * (v @ weights.weights[i].T)
    dy = (v @ weights.weights[-1].T)[:, 0]
    return float(dy[0]) if np.isscalar(t) else dy.reshape(np.shape(t))


def jacobian(spec: MlpSpec, weights: MlpWeights, times) -> np.ndarray:
    """d(output)/d(parameter) for every sample time.

    Returns an (n_times, n_params) matrix whose column order matches
    MlpWeights.flatten(): per layer, the weight matrix row-major, then
    the bias.
    """
    _check(spec, weights)
    t_arr = np.asarray(times, dtype=float).reshape(-1)
    acts, pres, _ = _forward_full(weights, t_arr)
    n = t_arr.size
    n_layers = len(weights.weights)

    # sensitivities g^i = dy/d(pre-activation of layer i), per sample
    gs = [None] * n_layers
    g = np.ones((n, 1))                      # output layer is linear
    gs[-1] = g
    for i in range(n_layers - 2, -1, -1):
        g = (g @ weights.weights[i + 1]) * (pres[i] > 0.0)
        gs[i] = g

    cols = []
    for i in range(n_layers):
        gw = np.einsum("nk,nj->nkj", gs[i], acts[i]).reshape(n, -1)
        cols.append(gw)
        cols.append(gs[i])
    return np.concatenate(cols, axis=1)
