"""Command-line driver.

Exit status: 0 when every verdict row passes, 2 when any fails, 1 on errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .config import KINDS, ExperimentConfig, load_config, spec_from_dict
from .engine import build_chain, stationary_distribution, write_chain_json, write_state_csv
from .exceptions import MJPError
from .experiments import (
    ResultTable,
    default_delta,
    provenance,
    report_constants,
    run_bivariate_application,
    run_bounds_suite,
    run_coupling,
    run_scaling_study,
    run_simulator_check,
    run_stein_scaling,
)
from .process import build_elementary, geometry_of

log = logging.getLogger("mjpstein")


def _delta(cfg, spec):
    return cfg.delta if cfg.delta is not None else default_delta(spec)


def _spec(cfg, n):
    return spec_from_dict(cfg.process, n)


def _twin(cfg):
    def make(n):
        s = _spec(cfg, n)
        g = geometry_of(s)
        return build_elementary(s.c, g.A, g.sigma2, n=n).spec

    return make


def cmd_constants(cfg, out):
    return report_constants(_spec(cfg, cfg.n_grid[0]), config=cfg)


def cmd_equilibrium(cfg, out):
    table = ResultTable("equilibrium", provenance=provenance(cfg))
    for n in cfg.n_grid:
        spec = _spec(cfg, n)
        geom = geometry_of(spec)
        chain = build_chain(spec, geom, _delta(cfg, spec))
        pi = stationary_distribution(chain)
        res = chain.meta["stationary_residual"]
        tol = 1e-12 * chain.uniformization_rate
        table.add(n, "states", chain.size)
        table.add(n, "stationary_residual", res, f"<= {tol:.3g}", res <= tol)
        write_state_csv(out / f"equilibrium_n{n}.csv", chain.states, pi.probs, "probability")
        write_chain_json(out / f"chain_n{n}.json", chain)
    return table


def cmd_stein(cfg, out):
    spec0 = _spec(cfg, cfg.n_grid[0])
    return run_stein_scaling(lambda n: _spec(cfg, n), cfg.n_grid, _delta(cfg, spec0), cfg.seed, cfg.n_sets, cfg)


def cmd_bounds(cfg, out):
    table = ResultTable("bounds", provenance=provenance(cfg))
    for n in cfg.n_grid:
        spec = _spec(cfg, n)
        sub = run_bounds_suite(spec, delta=cfg.delta, seed=cfg.seed, n_sets=cfg.n_sets, config=cfg)
        table.rows.extend(sub.rows)
    return table


def _extremes(chain):
    c = chain.center
    d = chain.states - c
    return chain.states[np.argmin(d.sum(axis=1))], chain.states[np.argmax(d.sum(axis=1))]


def cmd_couple(cfg, out):
    n = cfg.n_grid[0]
    spec = _spec(cfg, n)
    geom = geometry_of(spec)
    delta = _delta(cfg, spec)
    chain = build_chain(spec, geom, delta)
    x1, x2 = _extremes(chain)
    horizon = cfg.horizon if cfg.horizon is not None else 10.0 / geom.alpha1
    t_grid = np.linspace(0.0, horizon, 21)[1:]
    return run_coupling(spec, delta, x1, x2, t_grid, cfg.reps, cfg.seed, config=cfg)


def cmd_simulate(cfg, out):
    n = cfg.n_grid[0]
    spec = _spec(cfg, n)
    geom = geometry_of(spec)
    delta = _delta(cfg, spec)
    x0 = np.round(spec.n * spec.c).astype(np.int64)
    t = cfg.horizon if cfg.horizon is not None else 0.5 / geom.alpha1
    return run_simulator_check(spec, delta, x0, t, cfg.reps, cfg.seed, config=cfg)


def cmd_bivariate(cfg, out):
    p = {k: v for k, v in cfg.process.items() if k not in ("type", "delta0")}
    return run_bivariate_application(n_grid=cfg.n_grid, delta=cfg.delta, config=cfg, **p)


def cmd_scaling(cfg, out):
    spec0 = _spec(cfg, cfg.n_grid[0])
    return run_scaling_study(lambda n: _spec(cfg, n), _twin(cfg), cfg.n_grid, _delta(cfg, spec0), cfg)


COMMANDS = {
    "constants": cmd_constants,
    "equilibrium": cmd_equilibrium,
    "stein": cmd_stein,
    "couple": cmd_couple,
    "simulate": cmd_simulate,
    "bivariate": cmd_bivariate,
    "scaling": cmd_scaling,
    "bounds": cmd_bounds,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="mjpstein", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in KINDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="YAML or JSON experiment config")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="unsigned 64-bit seed")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, args.command) if args.config else ExperimentConfig(kind=args.command)
        if args.seed is not None:
            cfg = ExperimentConfig(**{**cfg.to_dict(), "seed": args.seed})
        out = Path(args.out if args.out is not None else cfg.output)
        out.mkdir(parents=True, exist_ok=True)
        table = COMMANDS[args.command](cfg, out)
        path = out / f"{args.command}.{args.format}"
        if args.format == "csv":
            table.write_csv(path)
        else:
            table.write_json(path)
    except (MJPError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for name, ok in table.verdicts:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    print(f"wrote {path}")
    return 0 if table.passed else 2


if __name__ == "__main__":
    sys.exit(main())
