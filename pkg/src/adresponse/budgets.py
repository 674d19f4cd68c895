"""Budget schedules: constant, rectangular pulse trains, reflected random walks.

Each pattern is a callable t -> spend level. Piecewise-constant patterns
also expose breakpoints(t0, t1) so the simulator can split integration
legs at discontinuities; switch times follow the half-open convention
(the new level applies exactly at the switch instant).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ConstantBudget:
    level: float

    def __post_init__(self):
        if not (math.isfinite(self.level) and self.level >= 0):
            raise ValueError("budget level must be finite and nonnegative")

    def __call__(self, t: float) -> float:
        return self.level

    def breakpoints(self, t0: float, t1: float) -> tuple:
        return ()


@dataclass(frozen=True)
class PulseTrain:
    """Cyclic on/off spending: pulse k spends levels[k % len] for
    `on` time units, then goes dark for `off` units.

    A sequence of distinct levels gives the estimators leverage on the
    spend elasticity; a single level only pins the product
    effectiveness * level**elasticity.
    """

    levels: tuple[float, ...]
    on: float
    off: float

    def __post_init__(self):
        levels = self.levels
        if isinstance(levels, (int, float)):
            levels = (float(levels),)
        levels = tuple(float(v) for v in levels)
        if not levels or any(not math.isfinite(v) or v < 0 for v in levels):
            raise ValueError("pulse levels must be finite and nonnegative")
        if not (self.on > 0) or self.off < 0:
            raise ValueError("need on > 0 and off >= 0")
        object.__setattr__(self, "levels", levels)

    @property
    def period(self) -> float:
        return self.on + self.off

    def __call__(self, t: float) -> float:
        if t < 0:
            return 0.0
        k = int(math.floor(t / self.period))
        phase = t - k * self.period
        if phase < self.on:
            return self.levels[k % len(self.levels)]
        return 0.0

    def breakpoints(self, t0: float, t1: float) -> tuple:
        out = []
        k = int(math.floor(t0 / self.period))
        while k * self.period < t1:
            for s in (k * self.period, k * self.period + self.on):
                if t0 < s < t1:
                    out.append(s)
            k += 1
        return tuple(out)


@dataclass(frozen=True)
class PiecewiseConstantBudget:
    """Right-continuous step function: level[i] on [knots[i], knots[i+1]).

    Holds levels[0] before the first knot and levels[-1] after the last
    segment begins.
    """

    knots: tuple[float, ...]
    levels: tuple[float, ...]

    def __post_init__(self):
        knots = tuple(float(v) for v in self.knots)
        levels = tuple(float(v) for v in self.levels)
        if len(knots) != len(levels) or not knots:
            raise ValueError("knots and levels must have equal, nonzero length")
        if any(b <= a for a, b in zip(knots, knots[1:])):
            raise ValueError("knots must be strictly increasing")
        if any(not math.isfinite(v) or v < 0 for v in levels):
            raise ValueError("levels must be finite and nonnegative")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "levels", levels)

    def __call__(self, t: float) -> float:
        i = int(np.searchsorted(self.knots, t, side="right")) - 1
        return self.levels[max(i, 0)]

    def breakpoints(self, t0: float, t1: float) -> tuple:
        return tuple(s for s in self.knots if t0 < s < t1)


def random_walk_budget(b_min: float, b_max: float, step_sigma: float,
                       segment: float, horizon: float, seed: int) -> PiecewiseConstantBudget:
    """Seeded reflected Gaussian walk, piecewise constant per segment.

    The walk starts at the band midpoint and folds back into
    [b_min, b_max] whenever an increment would leave it.
    """
    if not (b_max > b_min >= 0):
        raise ValueError("need 0 <= b_min < b_max")
    if not (step_sigma >= 0 and segment > 0 and horizon > 0):
        raise ValueError("need step_sigma >= 0, segment > 0, horizon > 0")
    rng = np.random.default_rng(seed)
    n = max(1, math.ceil(horizon / segment))
    width = b_max - b_min
    levels = np.empty(n)
    v = 0.5 * (b_min + b_max)
    for i in range(n):
        levels[i] = v
        v = v + rng.normal(0.0, step_sigma)
        # fold into the band: triangle wave with period 2*width
        u = (v - b_min) % (2.0 * width)
        v = b_min + (u if u <= width else 2.0 * width - u)
    knots = tuple(i * segment for i in range(n))
    return PiecewiseConstantBudget(knots, tuple(levels))


def parse_budget_spec(text: str, horizon: float = 100.0, seed: int = 0):
    """Parse a compact budget description.

    Forms:
      const:LEVEL
      pulse:L1[,L2,...]:ON:OFF
      walk:MIN:MAX:STEP[:SEGMENT]
    """
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind == "const" and len(parts) == 2:
            return ConstantBudget(float(parts[1]))
        if kind == "pulse" and len(parts) == 4:
            levels = tuple(float(v) for v in parts[1].split(","))
            return PulseTrain(levels, float(parts[2]), float(parts[3]))
        if kind == "walk" and len(parts) in (4, 5):
            segment = float(parts[4]) if len(parts) == 5 else max(horizon / 50.0, 1e-9)
            return random_walk_budget(float(parts[1]), float(parts[2]),
                                      float(parts[3]), segment, horizon, seed)
    except ValueError as exc:
        raise ValueError(f"bad budget spec {text!r}: {exc}") from exc
    raise ValueError(
        f"bad budget spec {text!r}; expected const:LEVEL, pulse:LEVELS:ON:OFF, "
        "or walk:MIN:MAX:STEP[:SEGMENT]")
