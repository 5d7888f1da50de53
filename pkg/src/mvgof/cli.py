"""Command-line interface.

Subcommands:

- ``simulate --config F --out PREFIX``: write a particle panel as
  ``PREFIX.csv`` plus a ``PREFIX.json`` sidecar.
- ``test --data PREFIX --basis SPEC --alpha A [--mode relative
  --delta D] --out R.json``: run the goodness-of-fit test on a stored
  panel.
- ``experiment --config F --out DIR``: Monte Carlo harness; writes
  per-replication CSV, aggregate JSON, and diagnostic figures.
- ``oracle CHECK``: run a named brute-force validation (``w2``,
  ``grad``, ``reference``, ``scaling``).

Exit codes: 0 success, 1 usage error, 2 data/config error, 3 numerical
degeneracy.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .errors import ConfigError, DataError, NumericalError
from .experiments import (
    ExperimentConfig,
    run_experiment,
    write_aggregate_json,
    write_replications_csv,
)
from .gof import grad_g, run_test
from .measures import EmpiricalMeasure, wasserstein2
from .models import build_basis, build_model
from .oracle import grad_fd, moment_scaling_check, reference_distance, w2_bruteforce
from .simulate import grid_from_config, load_grid, save_grid

_SIM_KEYS = {"schema_version", "model", "N", "n", "T", "seed"}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the documented contract is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(1)


def parse_basis_spec(spec: str) -> list:
    """Parse a CLI basis string like ``const,x2`` or ``expx:beta=0.5``."""
    entries = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if ":" in token:
            name, _, rest = token.partition(":")
            entry = {"name": name}
            for kv in rest.split(";"):
                key, _, value = kv.partition("=")
                if not key or not value:
                    raise ConfigError(f"bad basis atom spec {token!r}")
                entry[key] = float(value)
            entries.append(entry)
        else:
            entries.append(token)
    if not entries:
        raise ConfigError("empty basis spec")
    return entries


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _cmd_simulate(args) -> int:
    doc = _load_config(args.config)
    unknown = set(doc) - _SIM_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if doc.get("schema_version") != 1:
        raise ConfigError("simulate config needs schema_version = 1")
    missing = _SIM_KEYS - set(doc)
    if missing:
        raise ConfigError(f"missing config keys: {sorted(missing)}")
    grid = grid_from_config(doc)
    save_grid(grid, args.out)
    print(f"wrote {args.out}.csv and {args.out}.json")
    return 0


def _cmd_test(args) -> int:
    grid = load_grid(args.data)
    basis = build_basis(parse_basis_spec(args.basis))
    report = run_test(grid, basis, args.alpha, args.mode, args.delta)
    with open(args.out, "w", newline="\n") as fh:
        fh.write(report.to_json() + "\n")
    print(
        f"statistic={report.statistic:.6g} p={report.p_value:.6g} "
        f"reject={report.reject}"
    )
    return 0


def _cmd_experiment(args) -> int:
    config = ExperimentConfig.from_dict(_load_config(args.config))
    result = run_experiment(config)
    os.makedirs(args.out, exist_ok=True)
    write_replications_csv(result, os.path.join(args.out, "replications.csv"))
    write_aggregate_json(result, os.path.join(args.out, "aggregate.json"))
    from .plots import render_experiment_figures  # defer matplotlib import

    render_experiment_figures(result, args.out)
    agg = result.aggregates
    print(
        f"replications={agg['replications']} failures={agg['failures']} "
        f"rejection_rate={agg['rejection_rate']:.4g}"
    )
    return 0


def _parse_params(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--params must be a JSON object: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("--params must be a JSON object")
    return doc


def _cmd_oracle(args) -> int:
    rng = np.random.Generator(np.random.Philox(key=np.uint64(args.seed)))
    if args.check == "w2":
        worst = 0.0
        for _ in range(100):
            size = int(rng.integers(1, 9))
            mu = EmpiricalMeasure.from_samples(rng.normal(size=size))
            nu = EmpiricalMeasure.from_samples(rng.normal(size=size))
            worst = max(worst, abs(wasserstein2(mu, nu) - w2_bruteforce(mu, nu)))
        print(f"w2 max |sorted - bruteforce| over 100 pairs: {worst:.3e}")
        return 0 if worst <= 1e-12 else 3
    if args.check == "grad":
        worst = 0.0
        for _ in range(20):
            d = int(rng.integers(1, 4))
            root = rng.normal(size=(d, d))
            lam = root @ root.T + np.eye(d)
            gam = rng.normal(size=d)
            b = float(rng.normal()) + 5.0
            exact = grad_g(gam, b, lam)
            approx = grad_fd(gam, b, lam, step=1e-6)
            worst = max(
                worst,
                float(
                    np.max(np.abs(exact - approx) / np.maximum(np.abs(exact), 1.0))
                ),
            )
        print(f"grad max rel err over 20 instances: {worst:.3e}")
        return 0 if worst <= 1e-6 else 3
    if args.check == "reference":
        model = build_model(args.model, _parse_params(args.params))
        basis = build_basis(parse_basis_spec(args.basis))
        ref = reference_distance(
            model, basis, args.nref, args.nsteps, args.seed, T=args.T
        )
        print(f"L_ref={ref.L_ref:.6g} B_ref={ref.B_ref:.6g}")
        return 0
    if args.check == "scaling":
        model = build_model(args.model, _parse_params(args.params))
        n_list = [int(v) for v in args.n_list.split(",")]
        slope = moment_scaling_check(model, args.p, n_list, seed=args.seed)
        print(f"p={args.p} slope={slope:.4f} (expected {args.p / 2})")
        return 0
    raise ConfigError(f"unknown oracle check {args.check!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mvgof", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a particle panel")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("test", help="run the goodness-of-fit test")
    p.add_argument("--data", required=True, help="panel prefix (from simulate)")
    p.add_argument("--basis", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--mode", choices=["absolute", "relative"], default="absolute")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_test)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("oracle", help="run a named brute-force validation")
    p.add_argument("check", choices=["w2", "grad", "reference", "scaling"])
    p.add_argument("--model", default="mv-ou")
    p.add_argument("--params", default='{"theta": 1.0, "kappa": 0.0, "sigma": 1.0}')
    p.add_argument("--basis", default="const")
    p.add_argument("--nref", type=int, default=10000)
    p.add_argument("--nsteps", type=int, default=1000)
    p.add_argument("--n-list", default="100,200,400,800")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        sys.stderr.write(f"mvgof: {type(exc).__name__}: {exc}\n")
        return 2
    except NumericalError as exc:
        sys.stderr.write(f"mvgof: {type(exc).__name__}: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
