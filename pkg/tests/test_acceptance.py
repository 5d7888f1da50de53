"""Acceptance suite: one test per criterion, each printing a pass/fail line.

All tolerances are fixed here. Heavy Monte Carlo pieces are shared via
session fixtures; every seed below is frozen so results are exactly
reproducible. Run with ``pytest tests/test_acceptance.py -v -s``.
"""

import numpy as np
import pytest

import mvgof
from mvgof.experiments import ExperimentConfig, run_experiment
from mvgof.gof import grad_g, grad_g_relative
from mvgof.measures import EmpiricalMeasure, wasserstein2
from mvgof.oracle import (
    grad_fd,
    moment_scaling_check,
    reference_distance,
    w2_bruteforce,
)

NULL_MODEL = {"theta": 1, "lambda1": 1, "lambda2": 0.5}


def check(num, desc, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {desc} ({detail})"
    print(line)
    assert ok, line


@pytest.fixture(scope="session")
def null_experiment():
    cfg = ExperimentConfig(
        model_name="state-vol",
        model_params=NULL_MODEL,
        basis_spec=["const", "x2"],
        N=300,
        n=300,
        T=1.0,
        alpha=0.05,
        replications=400,
        base_seed=5000,
    )
    return run_experiment(cfg)


@pytest.fixture(scope="session")
def power_experiment():
    cfg = ExperimentConfig(
        model_name="sin-vol",
        model_params={"theta": 1, "eta": 1},
        basis_spec=["const"],
        N=500,
        n=300,
        T=1.0,
        alpha=0.05,
        replications=200,
        base_seed=42,
    )
    return run_experiment(cfg)


def test_criterion_1_null_size(null_experiment):
    rate = null_experiment.aggregates["rejection_rate"]
    check(
        1,
        "null rejection rate in [0.025, 0.085] at alpha = 0.05",
        0.025 <= rate <= 0.085,
        f"rate = {rate:.4f}, M = 400",
    )


def test_criterion_2_clt_shape(null_experiment):
    ks = null_experiment.aggregates["ks_normal"]
    check(
        2,
        "KS distance of standardized statistics to N(0,1) <= 0.10",
        ks <= 0.10,
        f"ks = {ks:.4f}",
    )


def test_criterion_3_power(power_experiment):
    rate = power_experiment.aggregates["rejection_rate"]
    model = mvgof.build_model("sin-vol", {"theta": 1, "eta": 1})
    ref = reference_distance(model, mvgof.build_basis(["const"]), 20_000, 1000, 3)
    check(
        3,
        "power >= 0.90 against sin-vol and oracle L_ref > 0.01",
        rate >= 0.90 and ref.L_ref > 0.01,
        f"rate = {rate:.3f}, L_ref = {ref.L_ref:.4f}",
    )


def test_criterion_4_consistency_rate():
    model = mvgof.build_model("state-vol", NULL_MODEL)
    basis = mvgof.build_basis(["const", "x2"])
    ref = reference_distance(model, basis, 100_000, 2000, 77)
    medians = {}
    for N in (200, 800):
        errs = []
        for rep in range(100):
            grid = mvgof.simulate_particles(model, N, 400, 1.0, 500 + rep)
            errs.append(abs(mvgof.compute_summary(grid, basis).S_hat - ref.L_ref))
        medians[N] = float(np.median(errs))
    check(
        4,
        "median |S_hat - L_ref| shrinks by >= 1.5x from N=200 to N=800",
        medians[800] <= medians[200] / 1.5,
        f"median(200) = {medians[200]:.5f}, median(800) = {medians[800]:.5f}",
    )


def test_criterion_5_quarticity_anchor():
    model = mvgof.build_model("mv-ou", {"theta": 0, "kappa": 0, "sigma": 1})
    basis = mvgof.build_basis(["const"])
    vals = []
    for rep in range(200):
        grid = mvgof.simulate_particles(model, 500, 500, 1.0, 10_000 + rep)
        vals.append(mvgof.compute_summary(grid, basis).B_hat)
    mean = float(np.mean(vals))
    check(
        5,
        "mean B_hat within 2% of sigma^4 T = 1 on driftless unit-volatility paths",
        abs(mean - 1.0) <= 0.02,
        f"mean = {mean:.5f} over 200 seeds",
    )


def _rel_err(exact, approx):
    return float(np.max(np.abs(approx - exact) / np.maximum(np.abs(exact), 1.0)))


def test_criterion_6_gradient_correctness():
    rng = np.random.default_rng(12)
    worst_abs = worst_rel = 0.0
    for _ in range(20):
        d = int(rng.integers(1, 4))
        root = rng.normal(size=(d, d))
        lam = root @ root.T + np.eye(d)
        gam = rng.normal(size=d)
        b = 5.0 + abs(rng.normal())
        worst_abs = max(worst_abs, _rel_err(grad_g(gam, b, lam), grad_fd(gam, b, lam)))

        def h(g_, b_, l_):
            return mvgof.closed_form_distance(g_, b_, l_) / b_

        fd = np.empty(d * d + d + 1)
        step = 1e-6
        for k in range(d):
            e = np.zeros(d)
            e[k] = step
            fd[k] = (h(gam + e, b, lam) - h(gam - e, b, lam)) / (2 * step)
        fd[d] = (h(gam, b + step, lam) - h(gam, b - step, lam)) / (2 * step)
        for l in range(d):
            for k in range(d):
                P = np.zeros((d, d))
                P[k, l] += step
                P[l, k] += step
                fd[d + 1 + l * d + k] = (h(gam, b, lam + P) - h(gam, b, lam - P)) / (4 * step)
        worst_rel = max(worst_rel, _rel_err(grad_g_relative(gam, b, lam), fd))
    check(
        6,
        "analytic gradients match finite differences at rel err <= 1e-6",
        worst_abs <= 1e-6 and worst_rel <= 1e-6,
        f"absolute-mode err = {worst_abs:.2e}, relative-mode err = {worst_rel:.2e}",
    )


def test_criterion_7_w2_oracle_equivalence():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        size = int(rng.integers(1, 9))
        mu = EmpiricalMeasure.from_samples(rng.normal(size=size))
        nu = EmpiricalMeasure.from_samples(rng.normal(size=size))
        worst = max(worst, abs(wasserstein2(mu, nu) - w2_bruteforce(mu, nu)))
    check(
        7,
        "sorted-coupling W2 equals brute-force minimum to 1e-12",
        worst <= 1e-12,
        f"max deviation = {worst:.2e} over 100 pairs",
    )


def test_criterion_8_increment_moment_scaling():
    slopes = {}
    for name, params in (
        ("mv-ou", {"theta": 1, "kappa": 0, "sigma": 1}),
        ("state-vol", NULL_MODEL),
    ):
        model = mvgof.build_model(name, params)
        for p, tol in ((2, 0.15), (4, 0.2)):
            slope = moment_scaling_check(model, p, [100, 200, 400, 800], N=1000, seed=11)
            slopes[(name, p)] = (slope, abs(slope - p / 2) <= tol)
    ok = all(v[1] for v in slopes.values())
    detail = ", ".join(f"{k[0]} p={k[1]}: {v[0]:.3f}" for k, v in slopes.items())
    check(8, "log-log increment moment slopes near p/2", ok, detail)


def test_criterion_9_exact_span_zero():
    results = []
    for name, params, basis_spec in (
        ("state-vol", NULL_MODEL, ["const", "x2"]),
        ("mv-ou", {"theta": 1, "kappa": 0, "sigma": 1}, ["const"]),
    ):
        model = mvgof.build_model(name, params)
        ref = reference_distance(model, mvgof.build_basis(basis_spec), 20_000, 1000, 5)
        results.append((name, ref.L_ref, ref.B_ref, abs(ref.L_ref) <= 5e-3 * ref.B_ref))
    ok = all(r[3] for r in results)
    detail = ", ".join(f"{r[0]}: L_ref/B_ref = {r[1] / r[2]:.2e}" for r in results)
    check(9, "reference distance vanishes on exact-span null models", ok, detail)


def test_criterion_10_cli_reproducibility(tmp_path, monkeypatch):
    import json as _json

    from mvgof.cli import main

    sim_cfg = tmp_path / "sim.json"
    sim_cfg.write_text(
        _json.dumps(
            {
                "schema_version": 1,
                "model": {"name": "state-vol", "params": NULL_MODEL},
                "N": 50,
                "n": 60,
                "T": 1.0,
                "seed": 7,
            }
        )
    )
    exp_cfg = tmp_path / "exp.json"
    exp_cfg.write_text(
        _json.dumps(
            {
                "schema_version": 1,
                "model": {"name": "state-vol", "params": NULL_MODEL},
                "basis": ["const", "x2"],
                "N": 60,
                "n": 60,
                "T": 1.0,
                "alpha": 0.05,
                "replications": 16,
                "base_seed": 3,
            }
        )
    )
    outputs = {}
    for threads in ("1", "3"):
        monkeypatch.setenv("MVGOF_THREADS", threads)
        tag = f"t{threads}"
        assert main(["simulate", "--config", str(sim_cfg), "--out", str(tmp_path / f"g{tag}")]) == 0
        assert main(
            ["test", "--data", str(tmp_path / f"g{tag}"), "--basis", "const,x2",
             "--alpha", "0.05", "--out", str(tmp_path / f"r{tag}.json")]
        ) == 0
        assert main(["experiment", "--config", str(exp_cfg), "--out", str(tmp_path / f"e{tag}")]) == 0
        outputs[tag] = {
            "grid.csv": (tmp_path / f"g{tag}.csv").read_bytes(),
            "grid.json": (tmp_path / f"g{tag}.json").read_bytes(),
            "report.json": (tmp_path / f"r{tag}.json").read_bytes(),
            "replications.csv": (tmp_path / f"e{tag}" / "replications.csv").read_bytes(),
            "aggregate.json": (tmp_path / f"e{tag}" / "aggregate.json").read_bytes(),
            "hist.png": (tmp_path / f"e{tag}" / "statistic_hist.png").read_bytes(),
        }
    mismatches = [k for k in outputs["t1"] if outputs["t1"][k] != outputs["t3"][k]]
    check(
        10,
        "CLI outputs byte-identical across 1-thread and 3-thread runs",
        not mismatches,
        f"mismatches = {mismatches or 'none'}",
    )
