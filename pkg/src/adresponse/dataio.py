"""Campaign data ingestion, normalization, and synthetic generation.

CSV files carry a `t,budget,response` header; lines starting with `#`
are comments. Responses are raw sales, converted to shares by a market
potential M (default 1.05 times the observed maximum, leaving headroom
above the best period). Floats are written with 17 significant digits so
a write/read cycle is lossless.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gvw import GvwParams, simulate
from .trajectory import Trajectory

__all__ = ["CampaignRecord", "NormalizationConfig", "SyntheticSpec",
           "CsvFormatError", "NormalizationError", "DEFAULT_SCHEMA",
           "load_csv", "write_csv", "normalize", "default_market_potential",
           "generate_synthetic"]

DEFAULT_SCHEMA = {"t": "t", "budget": "budget", "response": "response"}


class CsvFormatError(ValueError):
    """Malformed campaign CSV; the message names the offending line."""


class NormalizationError(ValueError):
    """Responses cannot be mapped into [0, 1] with the given potential."""


@dataclass(frozen=True)
class CampaignRecord:
    """One observed period: time stamp, spend, raw response level."""

    t: float
    budget: float
    response: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.t, self.budget, self.response)):
            raise ValueError("record fields must be finite")
        if self.budget < 0:
            raise ValueError("budget must be nonnegative")
        if self.response < 0:
            raise ValueError("response must be nonnegative")


@dataclass(frozen=True)
class NormalizationConfig:
    """share = response / market_potential; time = (t - origin) * scale."""

    market_potential: float
    time_origin: float = 0.0
    time_scale: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.market_potential) and self.market_potential > 0):
            raise ValueError("market potential must be finite and > 0")
        if not (math.isfinite(self.time_scale) and self.time_scale > 0):
            raise ValueError("time scale must be finite and > 0")
        if not math.isfinite(self.time_origin):
            raise ValueError("time origin must be finite")


def load_csv(path, schema: dict | None = None) -> list[CampaignRecord]:
    """Read campaign records.

    Parameters
    ----------
    path : str or Path
    schema : dict, optional
        Maps the logical fields "t", "budget", "response" to the column
        names used in the file; defaults to the identity mapping.

    Raises CsvFormatError naming the first offending line for a missing
    header column, a short row, or a non-numeric cell, and on an empty
    file.
    """
    schema = dict(DEFAULT_SCHEMA if schema is None else schema)
    missing = {"t", "budget", "response"} - set(schema)
    if missing:
        raise ValueError(f"schema must map fields {sorted(missing)}")
    with open(path, "r", newline="") as fh:
        numbered = [(i + 1, line) for i, line in enumerate(fh)
                    if line.strip() and not line.lstrip().startswith("#")]
    if not numbered:
        raise CsvFormatError("no data: file holds no non-comment lines")
    header_no, header_line = numbered[0]
    header = next(csv.reader([header_line]))
    cols = {}
    for fieldname in ("t", "budget", "response"):
        col = schema[fieldname]
        if col not in header:
            raise CsvFormatError(
                f"line {header_no}: header {header!r} lacks column {col!r}")
        cols[fieldname] = header.index(col)
    records = []
    for line_no, line in numbered[1:]:
        row = next(csv.reader([line]))
        if len(row) < len(header):
            raise CsvFormatError(f"line {line_no}: expected {len(header)} cells, "
                                 f"got {len(row)}")
        vals = {}
        for fieldname, idx in cols.items():
            try:
                vals[fieldname] = float(row[idx])
            except ValueError:
                raise CsvFormatError(
                    f"line {line_no}: column {schema[fieldname]!r} value "
                    f"{row[idx]!r} is not numeric") from None
        try:
            records.append(CampaignRecord(vals["t"], vals["budget"], vals["response"]))
        except ValueError as exc:
            raise CsvFormatError(f"line {line_no}: {exc}") from None
    if not records:
        raise CsvFormatError("no data rows after the header")
    return records


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path, records: Sequence[CampaignRecord]) -> None:
    """Write records with the standard header, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        fh.write("t,budget,response\n")
        for rec in records:
            fh.write(f"{_fmt(rec.t)},{_fmt(rec.budget)},{_fmt(rec.response)}\n")


def default_market_potential(records: Sequence[CampaignRecord]) -> float:
    """1.05 times the largest observed response."""
    peak = max(rec.response for rec in records)
    if peak <= 0:
        raise NormalizationError("all responses are zero; no scale to infer")
    return 1.05 * peak


def normalize(records: Sequence[CampaignRecord],
              config: NormalizationConfig) -> Trajectory:
    """Map raw records onto the model's share/time axes.

    Responses exceeding the market potential cannot be shares; the error
    lists every offending record index.
    """
    if not records:
        raise ValueError("no records to normalize")
    shares = np.array([rec.response / config.market_potential for rec in records])
    over = [i for i, s in enumerate(shares) if s > 1.0]
    if over:
        raise NormalizationError(
            f"market potential {config.market_potential:g} is below the response "
            f"at record indices {over}")
    t = np.array([(rec.t - config.time_origin) * config.time_scale for rec in records])
    b = np.array([rec.budget for rec in records])
    meta = {"source": "normalize", "market_potential": config.market_potential,
            "time_origin": config.time_origin, "time_scale": config.time_scale}
    return Trajectory(t, b, shares, meta)


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a generated campaign.

    budget_pattern is any budget callable (see budgets module);
    n_samples are taken uniformly over [0, t_end]. Gaussian share noise
    of sd noise_sigma is added from the seeded generator and clamped
    back into [0, 1].
    """

    true_params: GvwParams
    budget_pattern: object
    n_samples: int = 200
    noise_sigma: float = 0.0
    seed: int = 0
    x0: float = 0.0
    t_end: float = 100.0

    def __post_init__(self):
        if int(self.n_samples) < 2:
            raise ValueError("need at least 2 samples")
        if not (self.noise_sigma >= 0):
            raise ValueError("noise_sigma must be >= 0")
        if not (0 <= self.x0 <= 1):
            raise ValueError("x0 must lie in [0, 1]")
        if not (self.t_end > 0):
            raise ValueError("t_end must be > 0")
        if not callable(self.budget_pattern):
            raise ValueError("budget_pattern must be callable")


def generate_synthetic(spec: SyntheticSpec) -> Trajectory:
    """Simulate the model under the given schedule and add seeded noise.

    Deterministic for a fixed spec. The returned metadata records the
    generator settings and how many samples the noise clamp touched.
    """
    grid = np.linspace(0.0, spec.t_end, int(spec.n_samples))
    clean = simulate(spec.true_params, spec.budget_pattern, spec.x0, grid)
    x = clean.x.copy()
    clamped = 0
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        noisy = x + rng.normal(0.0, spec.noise_sigma, size=x.size)
        clipped = np.clip(noisy, 0.0, 1.0)
        clamped = int(np.sum(clipped != noisy))
        x = clipped
    p = spec.true_params
    meta = {
        "source": "synthetic",
        "true_params": {"rho": p.rho, "alpha": p.alpha, "beta": p.beta,
                        "delta": p.delta},
        "budget_pattern": repr(spec.budget_pattern),
        "n_samples": int(spec.n_samples),
        "noise_sigma": spec.noise_sigma,
        "seed": spec.seed,
        "x0": spec.x0,
        "t_end": spec.t_end,
        "clamped_samples": clamped,
    }
    return Trajectory(grid, clean.b, x, meta)
