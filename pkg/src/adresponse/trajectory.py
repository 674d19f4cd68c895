"""Sampled market-share trajectories.

A trajectory is the common currency between the simulator, the synthetic
data generator, CSV ingestion, and the estimators: strictly increasing
sample times, the budget applied at each time, and the share of the
market reached, always on the [0, 1] scale.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _readonly(a) -> np.ndarray:
    out = np.asarray(a, dtype=float).copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Trajectory:
    """Ordered (time, budget, share) samples plus free-form metadata.

    Parameters
    ----------
    t : array_like
        Sample times, strictly increasing, finite.
    b : array_like
        Budget at each sample time, nonnegative and finite.
    x : array_like
        Market share at each sample time, inside [0, 1].
    meta : dict, optional
        Source label and any generator provenance. Stored as-is.

    The arrays are copied and frozen; instances are safe to share
    between threads.
    """

    t: np.ndarray
    b: np.ndarray
    x: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        t = _readonly(self.t)
        b = _readonly(self.b)
        x = _readonly(self.x)
        if t.ndim != 1 or t.size == 0:
            raise ValueError("trajectory needs at least one sample")
        if b.shape != t.shape or x.shape != t.shape:
            raise ValueError("t, b, x must have identical length")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(b)) and np.all(np.isfinite(x))):
            raise ValueError("trajectory samples must be finite")
        if t.size > 1 and not np.all(np.diff(t) > 0):
            raise ValueError("sample times must be strictly increasing")
        if np.any(b < 0):
            raise ValueError("budgets must be nonnegative")
        if np.any(x < 0) or np.any(x > 1):
            raise ValueError("shares must lie in [0, 1]")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "x", x)

    def __len__(self) -> int:
        return int(self.t.size)

    def to_json_dict(self) -> dict:
        """Serializable form: {"meta": ..., "samples": [[t, b, x], ...]}."""
        samples = [[float(a), float(c), float(d)] for a, c, d in zip(self.t, self.b, self.x)]
        return {"meta": dict(self.meta), "samples": samples}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Trajectory":
        samples = np.asarray(doc["samples"], dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 3:
            raise ValueError("samples must be a list of [t, b, x] triples")
        return cls(samples[:, 0], samples[:, 1], samples[:, 2], dict(doc.get("meta", {})))

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "Trajectory":
        return cls.from_json_dict(json.loads(text))
