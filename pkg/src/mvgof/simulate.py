"""Euler-Maruyama simulation of the interacting particle system.

The particle system is advanced on the observation grid itself
(t_j = T j / n), with the empirical measure of the current column fed
back into the coefficients at every step. Noise comes from a Philox
counter-based generator keyed by the run seed; each (particle, step)
pair maps to a fixed position in the counter stream (initial draws
occupy positions 0..N-1, step j / particle i occupies N + j*N + i), so
the output is a pure function of (model, N, n, T, seed) regardless of
evaluation order or thread count. The generator family (Philox 4x64)
is part of the reproducibility contract and must not change between
releases.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .errors import (
    BadFactor,
    CoefficientEvaluation,
    ConfigError,
    NumericalBlowup,
)
from .ioutil import dump_json
from .measures import EmpiricalMeasure
from .models import CoefficientModel, build_model


@dataclass(frozen=True)
class ObservationGrid:
    """Panel of particle positions X^i_{t_j}, i = 1..N, j = 0..n.

    ``values`` has shape (N, n+1); column j holds the system at time
    t_j = T j / n. ``delta`` is the sampling step T/n.
    """

    values: np.ndarray
    T: float
    n: int
    N: int
    delta: float
    seed: int
    model_name: str
    params: Mapping[str, float]


def simulate_particles(
    model: CoefficientModel, N: int, n: int, T: float, seed: int
) -> ObservationGrid:
    """Simulate the N-particle system and return the observation panel.

    Initial positions are i.i.d. Gaussian draws from the model's initial
    law; each Euler step uses the (re-sorted) empirical measure of the
    current column in both coefficients.
    """
    if N < 1 or n < 1 or T <= 0:
        raise ConfigError("need N >= 1, n >= 1, T > 0")
    delta = T / n
    sqdt = math.sqrt(delta)

    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    x0 = model.m0 + model.s0 * rng.standard_normal(N)
    noise = rng.standard_normal((n, N))

    values = np.empty((N, n + 1))
    values[:, 0] = x0
    for j in range(n):
        col = values[:, j]
        mu = EmpiricalMeasure(np.sort(col))
        b = np.asarray(model.drift(col, mu), dtype=float)
        a2 = np.asarray(model.a2(col, mu), dtype=float)
        bad = ~np.isfinite(a2) | (a2 < 0) | ~np.isfinite(b)
        if bad.any():
            i = int(np.argmax(bad))
            raise CoefficientEvaluation(
                f"coefficient evaluation failed at particle {i}, step {j}: "
                f"b={b[i]!r}, a2={a2[i]!r}",
                particle=i,
                step=j,
            )
        nxt = col + b * delta + np.sqrt(a2) * sqdt * noise[j]
        if not np.all(np.isfinite(nxt)):
            i = int(np.argmax(~np.isfinite(nxt)))
            raise NumericalBlowup(
                f"state became non-finite at particle {i}, step {j + 1}"
            )
        values[:, j + 1] = nxt

    return ObservationGrid(
        values=values,
        T=float(T),
        n=n,
        N=N,
        delta=delta,
        seed=int(seed),
        model_name=model.name,
        params=dict(model.params),
    )


def subsample(grid: ObservationGrid, factor: int) -> ObservationGrid:
    """Keep every ``factor``-th column, widening the sampling step."""
    if factor < 1 or grid.n % factor != 0:
        raise BadFactor(f"factor {factor} does not divide n = {grid.n}")
    if factor == 1:
        return grid
    new_n = grid.n // factor
    return replace(
        grid,
        values=grid.values[:, ::factor].copy(),
        n=new_n,
        delta=grid.T / new_n,
    )


def save_grid(grid: ObservationGrid, prefix: str) -> None:
    """Write the panel to ``prefix.csv`` plus a ``prefix.json`` sidecar.

    CSV: one row per particle, header t_0..t_n, 17 significant digits
    (round-trip exact for doubles).
    """
    header = ",".join(f"t_{j}" for j in range(grid.n + 1))
    with open(prefix + ".csv", "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in grid.values:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")
    meta = {
        "T": grid.T,
        "n": grid.n,
        "N": grid.N,
        "seed": grid.seed,
        "model_name": grid.model_name,
        "params": dict(grid.params),
    }
    with open(prefix + ".json", "w", newline="\n") as fh:
        fh.write(dump_json(meta) + "\n")


def load_grid(prefix: str) -> ObservationGrid:
    """Read a panel written by :func:`save_grid`."""
    with open(prefix + ".json") as fh:
        meta = json.load(fh)
    values = np.loadtxt(prefix + ".csv", delimiter=",", skiprows=1, ndmin=2)
    n = int(meta["n"])
    N = int(meta["N"])
    if values.shape != (N, n + 1):
        raise ConfigError(
            f"grid CSV shape {values.shape} does not match sidecar (N={N}, n={n})"
        )
    return ObservationGrid(
        values=values,
        T=float(meta["T"]),
        n=n,
        N=N,
        delta=float(meta["T"]) / n,
        seed=int(meta["seed"]),
        model_name=str(meta["model_name"]),
        params=dict(meta.get("params", {})),
    )


def grid_from_config(cfg: Mapping) -> ObservationGrid:
    """Simulate from a plain config mapping (see CLI schema)."""
    model = build_model(cfg["model"]["name"], cfg["model"].get("params", {}))
    return simulate_particles(
        model, int(cfg["N"]), int(cfg["n"]), float(cfg["T"]), int(cfg["seed"])
    )
