"""Command-line surface.

Subcommands:

* ``fit``        — fit a model to a count CSV, write summaries and draws
* ``simulate``   — run the simulation study, write metric tables
* ``density``    — emit a marginal prior/posterior density grid as CSV
* ``bias``       — emit a posterior-mean bias curve as CSV
* ``summarize``  — summarize a draws CSV

Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.
Every run writes a manifest.json sufficient to reproduce it (config, seed,
version); wall times go to a separate timings.json so that same-seed reruns
are byte-identical.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .data import CountDataset, load_count_csv, synthetic_areal_dataset
from .errors import NumericalError, ParameterDomainError
from .mcmc import HyperPriors, ModelSpec, run_chain
from .oracle import bias_curve
from .priors import (
    GlobalParams,
    PriorFamily,
    marginal_posterior_lambda,
    marginal_prior_lambda,
)
from .simstudy import METHODS, METRIC_NAMES, run_study
from .streams import spawn_stream

_FMT = "%.17g"   # full round-trip precision for all numeric CSV output


class _Parser(argparse.ArgumentParser):
    def error(self, message):   # argparse defaults to exit code 2; we use 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([(_FMT % v) if isinstance(v, float) else v
                             for v in row])


def _write_manifest(outdir: Path, subcommand: str, config: dict):
    manifest = {
        "tool": "countshrink",
        "version": __version__,
        "subcommand": subcommand,
        "config": {k: (v.tolist() if isinstance(v, np.ndarray) else v)
                   for k, v in sorted(config.items())},
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")


def _write_timings(outdir: Path, timings: dict):
    (outdir / "timings.json").write_text(json.dumps(timings, indent=2) + "\n")


def _family_from_args(args) -> PriorFamily:
    kind = args.family.upper()
    if kind == "PG":
        return PriorFamily("PG")
    return PriorFamily(kind, gamma=args.gamma,
                       ig_finite_mean=getattr(args, "ig_finite_mean", False))


def _load_config_defaults(parser, argv):
    """Flat key=value config file applied as parser defaults; explicit CLI
    flags always win."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    overrides = {}
    for lineno, raw in enumerate(Path(known.config).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterDomainError(
                f"{known.config}: line {lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        overrides[key.replace("-", "_")] = val
    targets = [parser]
    sub = next((a for a in parser._actions
                if isinstance(a, argparse._SubParsersAction)), None)
    if sub is not None and argv and argv[0] in sub.choices:
        targets.append(sub.choices[argv[0]])
    for target in targets:
        for action in target._actions:
            if action.dest in overrides:
                val = overrides[action.dest]
                if action.type is not None:
                    val = action.type(val)
                elif isinstance(action.const, bool) or isinstance(action.default, bool):
                    val = val.lower() in ("1", "true", "yes")
                action.default = val


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------

def _cmd_fit(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()

    if args.input == "synthetic-areal":
        data, _, _, _ = synthetic_areal_dataset(master_seed=args.seed)
    else:
        data = load_count_csv(args.input)
    family = _family_from_args(args)
    spec = ModelSpec(
        family=family,
        hyper=HyperPriors(step_sd=args.step_sd),
        n_draws=args.draws,
        n_burn=args.burn,
        seed=args.seed,
    )
    draws = run_chain(data, spec)

    summaries = draws.summaries()
    rows = [
        (name, s.mean, s.sd, s.q025, s.q975, s.inefficiency_factor)
        for name, s in summaries.items()
    ]
    _write_csv(outdir / "summary.csv",
               ["parameter", "mean", "sd", "q025", "q975", "ineff"], rows)
    (outdir / "summary.json").write_text(json.dumps(
        {name: {"mean": s.mean, "sd": s.sd, "q025": s.q025, "q975": s.q975,
                "ineff": s.inefficiency_factor, "n_draws": s.n_draws}
         for name, s in summaries.items()}, indent=2) + "\n")

    # hotspot list: top-10 posterior means, plus a seeded random-10 reference
    lam_mean = draws.lam.mean(axis=0)
    lam_lo, lam_hi = np.percentile(draws.lam, [2.5, 97.5], axis=0)
    order = np.argsort(lam_mean)[::-1]
    top = order[: min(10, data.n_units)]
    _write_csv(outdir / "hotspots.csv", ["id", "mean", "q025", "q975"],
               [(data.ids[i], float(lam_mean[i]), float(lam_lo[i]),
                 float(lam_hi[i])) for i in top])
    rest = order[min(10, data.n_units):]
    pick_rng = spawn_stream(args.seed, 424242)
    pick = (pick_rng.choice(rest, size=min(10, rest.size), replace=False)
            if rest.size else np.array([], dtype=int))
    _write_csv(outdir / "random10.csv", ["id", "mean", "q025", "q975"],
               [(data.ids[i], float(lam_mean[i]), float(lam_lo[i]),
                 float(lam_hi[i])) for i in np.sort(pick)])

    if args.store_draws:
        cols = list(draws.columns())
        _write_csv(outdir / "draws.csv", [c[0] for c in cols],
                   zip(*[map(float, c[1]) for c in cols]))

    _write_manifest(outdir, "fit", {
        "input": args.input, "family": args.family, "gamma": args.gamma,
        "draws": args.draws, "burn": args.burn, "seed": args.seed,
        "step_sd": args.step_sd, "store_draws": args.store_draws,
        "n_units": data.n_units, "n_covariates": data.n_covariates,
    })
    _write_timings(outdir, {"fit_seconds": time.perf_counter() - t0})
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    methods = tuple(s.strip().upper() for s in args.methods.split(","))
    replicates = 1000 if args.full else args.replicates
    result = run_study(
        scenarios=(args.scenario,), omegas=(args.omega,), m=args.m,
        methods=methods, replicates=replicates, n_draws=args.draws,
        n_burn=args.burn, master_seed=args.seed, threads=args.threads,
    )

    rows = []
    for metric in METRIC_NAMES:
        row = [args.scenario, args.omega, metric]
        for method in methods:
            row.append(result.value(args.scenario, args.omega, method, metric))
        rows.append(row)
    _write_csv(outdir / "metrics.csv",
               ["scenario", "omega", "metric", *methods], rows)

    _write_manifest(outdir, "simulate", {
        "scenario": args.scenario, "omega": args.omega, "m": args.m,
        "methods": list(methods), "replicates": replicates,
        "draws": args.draws, "burn": args.burn, "seed": args.seed,
        "n_failed": {r.method: r.n_failed for r in result.rows},
    })
    _write_timings(outdir, {"study_seconds": time.perf_counter() - t0})
    return 0


# ---------------------------------------------------------------------------
# density / bias grids
# ---------------------------------------------------------------------------

def _grid(args) -> np.ndarray:
    if args.log_grid:
        return np.geomspace(args.grid_min, args.grid_max, args.grid_points)
    return np.linspace(args.grid_min, args.grid_max, args.grid_points)


def _cmd_density(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    family = _family_from_args(args)
    globals_ = GlobalParams(args.alpha, args.beta)
    grid = _grid(args)
    if args.kind == "prior":
        vals = np.array([marginal_prior_lambda(family, globals_, la)
                         for la in grid])
    else:
        vals = marginal_posterior_lambda(family, globals_, args.y, args.eta,
                                         grid)
    tag = args.tag or args.family.upper()
    _write_csv(outdir / f"density_{tag}.csv", ["lambda", "density"],
               zip(map(float, grid), map(float, vals)))
    _write_manifest(outdir, "density", {
        "kind": args.kind, "family": args.family, "gamma": args.gamma,
        "alpha": args.alpha, "beta": args.beta, "y": args.y, "eta": args.eta,
        "grid_min": args.grid_min, "grid_max": args.grid_max,
        "grid_points": args.grid_points, "log_grid": args.log_grid,
        "tag": tag, "seed": args.seed,
    })
    return 0


def _cmd_bias(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    family = _family_from_args(args)
    globals_ = GlobalParams(args.alpha, args.beta)
    y_values = sorted(int(s) for s in args.y_values.split(","))
    curve = bias_curve(family, globals_, y_values)
    tag = args.tag or args.family.upper()
    _write_csv(outdir / f"bias_{tag}.csv", ["y", "bias", "relative"],
               zip(map(int, curve.y_values), map(float, curve.bias),
                   map(float, curve.relative)))
    _write_manifest(outdir, "bias", {
        "family": args.family, "gamma": args.gamma, "alpha": args.alpha,
        "beta": args.beta, "y_values": y_values, "tag": tag, "seed": args.seed,
    })
    return 0


# ---------------------------------------------------------------------------
# summarize
# ---------------------------------------------------------------------------

def _cmd_summarize(args) -> int:
    from .diagnostics import chain_summary

    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(args.draws_csv, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols = np.array([[float(v) for v in row] for row in reader])
    if cols.size == 0:
        raise ParameterDomainError(f"{args.draws_csv}: no draws")
    rows = []
    for j, name in enumerate(header):
        s = chain_summary(cols[:, j])
        rows.append((name, s.mean, s.sd, s.q025, s.q975,
                     s.inefficiency_factor))
    _write_csv(outdir / "chain_summary.csv",
               ["parameter", "mean", "sd", "q025", "q975", "ineff"], rows)
    _write_manifest(outdir, "summarize", {"draws_csv": args.draws_csv,
                                          "seed": args.seed})
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="countshrink",
                     description="Global-local shrinkage for count data")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=1, help="master seed")
        p.add_argument("--config", help="flat key=value config file")

    def model_opts(p):
        p.add_argument("--family", default="eh",
                       choices=["ig", "eh", "pg", "IG", "EH", "PG"])
        p.add_argument("--gamma", type=float, default=1.0)
        p.add_argument("--ig-finite-mean", action="store_true",
                       help="use the IG(gamma+1, gamma) finite-mean variant")

    p = sub.add_parser("fit", help="fit a model to a count CSV")
    common(p)
    model_opts(p)
    p.add_argument("--input", required=True,
                   help="CSV with columns id,y[,offset][,x1..xp]; "
                        "'synthetic-areal' for the bundled generator")
    p.add_argument("--draws", type=int, default=3000)
    p.add_argument("--burn", type=int, default=500)
    p.add_argument("--step-sd", type=float, default=1.0)
    p.add_argument("--store-draws", action="store_true")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("simulate", help="run the simulation study")
    common(p)
    p.add_argument("--scenario", default="I", choices=["I", "II", "III", "IV"])
    p.add_argument("--omega", type=float, default=0.1)
    p.add_argument("--m", type=int, default=200)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--full", action="store_true",
                   help="run the full 1000-replicate study")
    p.add_argument("--methods", default=",".join(METHODS))
    p.add_argument("--draws", type=int, default=3000)
    p.add_argument("--burn", type=int, default=500)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("density", help="emit a density grid CSV")
    common(p)
    model_opts(p)
    p.add_argument("--kind", default="prior", choices=["prior", "posterior"])
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--y", type=int, default=1)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--grid-min", type=float, default=0.01)
    p.add_argument("--grid-max", type=float, default=10.0)
    p.add_argument("--grid-points", type=int, default=512)
    p.add_argument("--log-grid", action="store_true")
    p.add_argument("--tag", help="output filename tag (density_<tag>.csv)")
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("bias", help="emit a bias-curve CSV")
    common(p)
    model_opts(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--y-values", default="1,2,5,10,20,50,100,1000,10000")
    p.add_argument("--tag")
    p.set_defaults(func=_cmd_bias)

    p = sub.add_parser("summarize", help="summarize a draws CSV")
    common(p)
    p.add_argument("--draws-csv", required=True)
    p.set_defaults(func=_cmd_summarize)

    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        _load_config_defaults(parser, argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except (ParameterDomainError, FileNotFoundError, ValueError) as exc:
        print(f"countshrink: validation error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"countshrink: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
