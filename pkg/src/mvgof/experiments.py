"""Monte Carlo harness: replication management, size/power aggregates.

A single experiment runs M independent panels (replication r uses seed
``base_seed + r``), applies the goodness-of-fit test to each, and
aggregates rejection rates and shape diagnostics for the standardized
statistic. Replications may run on a thread pool (size taken from the
``MVGOF_THREADS`` environment variable, default 1); results are keyed
by replication index, so output is identical for any pool size.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence

import numpy as np

from .errors import ConfigError, ExperimentDegenerate, NumericalError, TooFewSamples
from .gof import run_test
from .ioutil import dump_json
from .models import build_basis, build_model
from .normal import normal_cdf
from .oracle import ReferenceDistance, reference_distance
from .simulate import simulate_particles

SCHEMA_VERSION = 1

_TOP_KEYS = {
    "schema_version",
    "model",
    "basis",
    "N",
    "n",
    "T",
    "alpha",
    "mode",
    "delta",
    "replications",
    "base_seed",
    "reference",
}


@dataclass(frozen=True)
class ExperimentConfig:
    model_name: str
    model_params: Mapping[str, float]
    basis_spec: Sequence
    N: int
    n: int
    T: float
    alpha: float
    mode: str = "absolute"
    delta: Optional[float] = None
    replications: int = 1
    base_seed: int = 0
    reference: Optional[Mapping[str, int]] = None

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ExperimentConfig":
        unknown = set(doc) - _TOP_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ConfigError(
                f"config schema_version must be {SCHEMA_VERSION}, "
                f"got {doc.get('schema_version')!r}"
            )
        try:
            model = doc["model"]
            cfg = cls(
                model_name=str(model["name"]),
                model_params=dict(model.get("params", {})),
                basis_spec=list(doc["basis"]),
                N=int(doc["N"]),
                n=int(doc["n"]),
                T=float(doc["T"]),
                alpha=float(doc["alpha"]),
                mode=str(doc.get("mode", "absolute")),
                delta=None if doc.get("delta") is None else float(doc["delta"]),
                replications=int(doc["replications"]),
                base_seed=int(doc["base_seed"]),
                reference=dict(doc["reference"]) if doc.get("reference") else None,
            )
        except KeyError as exc:
            raise ConfigError(f"missing config key: {exc}") from exc
        if cfg.replications < 1:
            raise ConfigError("replications must be >= 1")
        if cfg.reference is not None:
            extra = set(cfg.reference) - {"N_ref", "n_ref", "seed"}
            if extra:
                raise ConfigError(f"unknown reference keys: {sorted(extra)}")
        # fail fast on bad model/basis specs before any simulation
        build_model(cfg.model_name, cfg.model_params)
        build_basis(cfg.basis_spec)
        return cfg


@dataclass(frozen=True)
class ReplicationRecord:
    rep: int
    seed: int
    s_hat: float
    g_hat: float
    tau2_hat: float
    statistic: float
    reject: bool
    failure: str  # empty on success, exception class name otherwise


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    records: List[ReplicationRecord]
    aggregates: Mapping
    reference: Optional[ReferenceDistance] = field(default=None, compare=False)


def ks_normal(values) -> float:
    """Sup-distance of the empirical CDF of ``values`` to the standard
    normal CDF."""
    arr = np.sort(np.asarray(values, dtype=float))
    m = arr.shape[0]
    if m < 10:
        raise TooFewSamples(f"KS diagnostic needs >= 10 values, got {m}")
    cdf = np.array([normal_cdf(v) for v in arr])
    ranks = np.arange(1, m + 1) / m
    return float(max(np.max(ranks - cdf), np.max(cdf - (ranks - 1.0 / m))))


def _run_single(config: ExperimentConfig, rep: int) -> ReplicationRecord:
    model = build_model(config.model_name, config.model_params)
    basis = build_basis(config.basis_spec)
    seed = config.base_seed + rep
    try:
        grid = simulate_particles(model, config.N, config.n, config.T, seed)
        report = run_test(grid, basis, config.alpha, config.mode, config.delta)
    except NumericalError as exc:
        return ReplicationRecord(
            rep=rep,
            seed=seed,
            s_hat=math.nan,
            g_hat=math.nan,
            tau2_hat=math.nan,
            statistic=math.nan,
            reject=False,
            failure=type(exc).__name__,
        )
    return ReplicationRecord(
        rep=rep,
        seed=seed,
        s_hat=report.summary.S_hat,
        g_hat=report.summary.G_hat,
        tau2_hat=report.tau2_hat,
        statistic=report.statistic,
        reject=report.reject,
        failure="",
    )


def _n_workers() -> int:
    raw = os.environ.get("MVGOF_THREADS", "")
    if raw:
        return max(1, int(raw))
    return 1


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run all replications and aggregate.

    Replications that hit a numerical degeneracy are recorded with their
    exception name and excluded from the aggregates; more than 20% of
    them flags a broken configuration via :class:`ExperimentDegenerate`.
    """
    M = config.replications
    workers = _n_workers()
    if workers > 1 and M > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda r: _run_single(config, r), range(M)))
    else:
        records = [_run_single(config, r) for r in range(M)]

    failures = sum(1 for r in records if r.failure)
    if failures > 0.2 * M:
        raise ExperimentDegenerate(
            f"{failures}/{M} replications failed; configuration looks broken"
        )
    good = [r for r in records if not r.failure]
    stats = np.array([r.statistic for r in good])
    rejects = sum(1 for r in good if r.reject)

    aggregates = {
        "replications": M,
        "failures": failures,
        "successes": len(good),
        "rejection_rate": rejects / len(good),
        "statistic_mean": float(stats.mean()),
        "statistic_sd": float(stats.std()),
        "ks_normal": ks_normal(stats) if len(good) >= 10 else None,
        "alpha": config.alpha,
        "mode": config.mode,
    }

    reference = None
    if config.reference is not None:
        model = build_model(config.model_name, config.model_params)
        basis = build_basis(config.basis_spec)
        reference = reference_distance(
            model,
            basis,
            int(config.reference["N_ref"]),
            int(config.reference["n_ref"]),
            int(config.reference.get("seed", config.base_seed + M)),
            T=config.T,
        )
        aggregates["L_ref"] = reference.L_ref
        aggregates["median_abs_error"] = float(
            np.median(np.abs(np.array([r.s_hat for r in good]) - reference.L_ref))
        )

    return ExperimentResult(
        config=config, records=records, aggregates=aggregates, reference=reference
    )


REPLICATION_HEADER = "rep,seed,S_hat,G_hat,tau2_hat,statistic,reject,failure"


def write_replications_csv(result: ExperimentResult, path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(REPLICATION_HEADER + "\n")
        for r in result.records:
            fh.write(
                f"{r.rep},{r.seed},{r.s_hat:.17g},{r.g_hat:.17g},"
                f"{r.tau2_hat:.17g},{r.statistic:.17g},"
                f"{int(r.reject)},{r.failure}\n"
            )


def write_aggregate_json(result: ExperimentResult, path: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(dump_json(dict(result.aggregates)) + "\n")
