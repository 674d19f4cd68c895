"""Command-line front end.

Subcommands: simulate, pulse, fit, steady, sensitivity, compare. Output
is CSV (with header; `#` lines are comments), JSON (sorted keys), or a
self-contained SVG chart. Runs are deterministic: the same arguments and
seed produce byte-identical output. The seed falls back to the
ADRESPONSE_SEED environment variable, then 0.

Exit codes: 0 success, 1 numeric or estimation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from .budgets import parse_budget_spec
from .dataio import (NormalizationConfig, default_market_potential, load_csv,
                     normalize)
from .econ import ComparisonScenario, EconParams, compare_models
from .estimate import EstimationProblem, fit_gvw, fit_gvw_fd
from .gvw import (GvwParams, PulseSpec, elasticity_threshold, pulse_response,
                  sensitivity_sweep, simulate, steady_budget, steady_share,
                  taylor_reduce, classify_shape)
from .mlp import MlpSpec
from .ode import integrate
from .svg import line_chart
from .train import TrainConfig

__all__ = ["main"]


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("ADRESPONSE_SEED", "0"))


def _gvw_from(args) -> GvwParams:
    return GvwParams(args.rho, args.alpha, args.beta, args.delta)


def _add_gvw_flags(p: argparse.ArgumentParser, required: bool = True,
                   rho=None, alpha=None, beta=None, delta=None) -> None:
    p.add_argument("--rho", type=float, required=required and rho is None,
                   default=rho, help="ad effectiveness (> 0)")
    p.add_argument("--alpha", type=float, required=required and alpha is None,
                   default=alpha, help="spend elasticity (0, 2]")
    p.add_argument("--beta", type=float, required=required and beta is None,
                   default=beta, help="word-of-mouth index [0, 2]")
    p.add_argument("--delta", type=float, required=required and delta is None,
                   default=delta, help="decay rate")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--seed", type=int, default=None,
                   help="seed (default $ADRESPONSE_SEED, else 0)")


# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    params = _gvw_from(args)
    seed = _resolve_seed(args)
    budget = parse_budget_spec(args.budget, horizon=args.t_end, seed=seed)
    grid = np.linspace(0.0, args.t_end, args.n)
    traj = simulate(params, budget, args.x0, grid)
    if args.format == "json":
        _emit(json.dumps(traj.to_json_dict(), sort_keys=True) + "\n", args.out)
    elif args.format == "svg":
        _emit(line_chart([("share", traj.t, traj.x)], title="simulated share",
                         x_label="time", y_label="share"), args.out)
    else:
        lines = ["t,budget,share"]
        lines += [f"{_fmt(t)},{_fmt(b)},{_fmt(x)}"
                  for t, b, x in zip(traj.t, traj.b, traj.x)]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_pulse(args) -> int:
    params = _gvw_from(args)
    pulse = PulseSpec(args.b0, args.t_end, args.x0)
    horizon = args.horizon if args.horizon is not None else 2.0 * args.t_end
    if horizon <= 0:
        raise ValueError("horizon must be > 0")
    grid = np.linspace(0.0, horizon, args.n)
    closed = np.atleast_1d(pulse_response(params, pulse, grid))

    # independent route: verified RK4 on the reduced dynamics
    red = taylor_reduce(params, pulse.b0)
    on_nodes = np.unique(np.concatenate([grid[grid <= pulse.t_end],
                                         [0.0, pulse.t_end]]))
    h0 = min(float(np.min(np.diff(on_nodes))) if on_nodes.size > 1 else pulse.t_end,
             pulse.t_end) / 20.0
    on_vals = integrate(lambda t, x: red.k1 * x * x + red.k2 * x + red.k3,
                        pulse.x0, on_nodes, h0, tol=1e-10)
    x_end = on_vals[-1]
    numeric = np.empty_like(closed)
    on_mask = grid <= pulse.t_end
    numeric[on_mask] = on_vals[np.searchsorted(on_nodes, grid[on_mask])]
    numeric[~on_mask] = x_end * np.exp(-params.delta * (grid[~on_mask] - pulse.t_end))
    diff = np.abs(closed - numeric)
    max_diff = float(np.max(diff))

    if args.format == "json":
        doc = {"max_abs_diff": max_diff,
               "rows": [[float(a), float(b), float(c), float(d)]
                        for a, b, c, d in zip(grid, closed, numeric, diff)]}
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    elif args.format == "svg":
        _emit(line_chart([("closed form", grid, closed), ("integrated", grid, numeric)],
                         title="pulse response", x_label="time", y_label="share"),
              args.out)
    else:
        lines = ["t,x_closed_form,x_integrated,abs_diff"]
        lines += [f"{_fmt(a)},{_fmt(b)},{_fmt(c)},{_fmt(d)}"
                  for a, b, c, d in zip(grid, closed, numeric, diff)]
        lines.append(f"# max_abs_diff={_fmt(max_diff)}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_fit(args) -> int:
    records = load_csv(args.input)
    if args.market_potential == "auto":
        potential = default_market_potential(records)
    else:
        potential = float(args.market_potential)
    traj = normalize(records, NormalizationConfig(market_potential=potential))
    seed = _resolve_seed(args)
    widths = tuple(int(w) for w in args.widths.split(","))
    problem = EstimationProblem(
        data=traj,
        surrogate_spec=MlpSpec(1, widths, 1),
        train_config=TrainConfig(validation_fraction=0.0, seed=seed,
                                 max_epochs=args.epochs),
        multistart_count=args.starts)
    report = fit_gvw(problem) if args.method == "dnn" else fit_gvw_fd(problem)
    doc = report.to_json_dict()
    table = ("rho        alpha   beta    delta       mse\n"
             f"{report.params.rho:<10.4G} {report.params.alpha:<7.3f} "
             f"{report.params.beta:<7.3f} {report.params.delta:<11.4G} "
             f"{report.residual_mse:.3E}\n")
    sys.stdout.write(table)
    _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    return 0


def cmd_steady(args) -> int:
    params = _gvw_from(args)
    if args.b_min <= 0 or args.b_max <= args.b_min:
        raise ValueError("need 0 < b-min < b-max")
    grid = np.logspace(math.log10(args.b_min), math.log10(args.b_max), args.n)
    shares = np.array([steady_share(params, b) for b in grid])
    roundtrip = np.array([abs(steady_budget(params, x) - b) / b
                          for b, x in zip(grid, shares)])
    threshold = elasticity_threshold(params)
    if args.format == "json":
        doc = {"elasticity_threshold": threshold,
               "rows": [[float(a), float(b), float(c)]
                        for a, b, c in zip(grid, shares, roundtrip)]}
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    elif args.format == "svg":
        _emit(line_chart([("steady share", grid, shares)], title="steady state",
                         x_label="budget", y_label="share"), args.out)
    else:
        lines = ["budget,share,roundtrip_rel_err"]
        lines += [f"{_fmt(a)},{_fmt(b)},{_fmt(c)}"
                  for a, b, c in zip(grid, shares, roundtrip)]
        lines.append(f"# elasticity_threshold={_fmt(threshold)}")
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_sensitivity(args) -> int:
    params = _gvw_from(args)
    values = [float(v) for v in args.values.split(",")]
    if args.b_min <= 0 or args.b_max <= args.b_min:
        raise ValueError("need 0 < b-min < b-max")
    grid = np.logspace(math.log10(args.b_min), math.log10(args.b_max), args.n)
    curves = sensitivity_sweep(params, args.vary, values, grid)
    labeled = []
    for curve in curves:
        if curve.shares is None:
            labeled.append((curve, "error"))
        else:
            labeled.append((curve, classify_shape(
                np.column_stack([curve.budgets, curve.shares]))))
    if args.format == "json":
        doc = [{"value": c.value, "shape": shape,
                "budgets": c.budgets.tolist(),
                "shares": None if c.shares is None else c.shares.tolist(),
                "error": c.error}
               for c, shape in labeled]
        _emit(json.dumps(doc, sort_keys=True) + "\n", args.out)
    elif args.format == "svg":
        series = [(f"{args.vary}={c.value:g} ({shape})", c.budgets, c.shares)
                  for c, shape in labeled if c.shares is not None]
        _emit(line_chart(series, title=f"steady share vs budget ({args.vary} sweep)",
                         x_label="budget", y_label="share"), args.out)
    else:
        lines = []
        for c, shape in labeled:
            lines.append(f"# shape[{args.vary}={c.value:g}]={shape}")
        lines.append("value,budget,share")
        for c, shape in labeled:
            if c.shares is None:
                continue
            lines += [f"{_fmt(c.value)},{_fmt(b)},{_fmt(x)}"
                      for b, x in zip(c.budgets, c.shares)]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_compare(args) -> int:
    gvw = _gvw_from(args)
    econ = EconParams(args.c0, args.c1, args.c2)
    if args.b_min <= 0 or args.b_max <= args.b_min:
        raise ValueError("need 0 < b-min < b-max")
    scenario = ComparisonScenario(
        pulse=PulseSpec(args.b0, args.t_end, args.x0),
        n_periods=args.periods,
        budget_grid=tuple(np.linspace(args.b_min, args.b_max, args.n)))
    report = compare_models(gvw, econ, scenario)
    if args.format == "svg":
        _emit(line_chart([("share model", report["pulse"]["time"], report["pulse"]["gvw"]),
                          ("log-log model", report["pulse"]["time"], report["pulse"]["econ"])],
                         title="pulse comparison", x_label="time", y_label="share"),
              args.out)
    elif args.format == "csv":
        lines = ["section,series,x,y"]
        for sec, xkey in (("pulse", "time"), ("steady", "budget")):
            for series in ("gvw", "econ"):
                lines += [f"{sec},{series},{_fmt(a)},{_fmt(b)}"
                          for a, b in zip(report[sec][xkey], report[sec][series])]
        lines.append(f"# gvw_decay_rate={_fmt(report['pulse']['gvw_decay_rate'])}")
        lines.append(f"# econ_decay_ratio={_fmt(report['pulse']['econ_decay_ratio'])}")
        lines.append(f"# econ_steady_exponent="
                     f"{_fmt(report['diminishing_returns']['econ_steady_exponent'])}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(json.dumps(report, sort_keys=True) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adresponse",
        description="Advertising-response modeling: simulation, pulse analysis, "
                    "steady states, parameter estimation, model comparison.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the response ODE")
    _add_gvw_flags(p)
    p.add_argument("--budget", required=True,
                   help="const:LEVEL | pulse:LEVELS:ON:OFF | walk:MIN:MAX:STEP[:SEG]")
    p.add_argument("--t-end", type=float, default=100.0)
    p.add_argument("--n", type=int, default=101)
    p.add_argument("--x0", type=float, default=0.0)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pulse", help="closed-form pulse response vs integration")
    _add_gvw_flags(p)
    p.add_argument("--b0", type=float, required=True, help="pulse spend level")
    p.add_argument("--t-end", type=float, required=True, help="pulse duration")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--horizon", type=float, default=None,
                   help="last evaluation time (default 2*t-end)")
    p.add_argument("--n", type=int, default=101)
    _add_common(p)
    p.set_defaults(func=cmd_pulse)

    p = sub.add_parser("fit", help="recover parameters from a campaign CSV")
    p.add_argument("--input", required=True, help="CSV with t,budget,response")
    p.add_argument("--method", choices=("dnn", "fd"), default="dnn")
    p.add_argument("--market-potential", default="1.0",
                   help="sales scale M ('auto' = 1.05 * max response)")
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--epochs", type=int, default=1000)
    p.add_argument("--widths", default="16,32", help="hidden widths, comma-separated")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("steady", help="steady-state curve over a log budget grid")
    _add_gvw_flags(p)
    p.add_argument("--b-min", type=float, default=1e-3)
    p.add_argument("--b-max", type=float, default=1e3)
    p.add_argument("--n", type=int, default=41)
    _add_common(p)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("sensitivity", help="steady-state curves under a parameter sweep")
    _add_gvw_flags(p, required=False, rho=0.10, alpha=1.0, beta=1.0, delta=0.01)
    p.add_argument("--vary", choices=("alpha", "beta"), required=True)
    p.add_argument("--values", required=True, help="comma-separated sweep values")
    p.add_argument("--b-min", type=float, default=1e-3)
    p.add_argument("--b-max", type=float, default=1e3)
    p.add_argument("--n", type=int, default=41)
    _add_common(p)
    p.set_defaults(func=cmd_sensitivity)

    p = sub.add_parser("compare", help="response model vs log-log baseline")
    _add_gvw_flags(p)
    p.add_argument("--c0", type=float, required=True)
    p.add_argument("--c1", type=float, required=True)
    p.add_argument("--c2", type=float, required=True)
    p.add_argument("--b0", type=float, default=1.0)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--x0", type=float, default=0.05)
    p.add_argument("--periods", type=int, default=40)
    p.add_argument("--b-min", type=float, default=0.2)
    p.add_argument("--b-max", type=float, default=4.0)
    p.add_argument("--n", type=int, default=20)
    _add_common(p)
    p.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, np.linalg.LinAlgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
