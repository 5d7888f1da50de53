"""Independent brute-force references for validating the main pipeline.

Everything here deliberately avoids the numerical kernels of the modules
it checks: the Wasserstein oracle enumerates couplings, the gradient
oracle uses central finite differences, and the reference distance
plugs the *true* squared volatility into plain per-step accumulation
loops (no squared increments, no shared summation code with
:mod:`mvgof.gof`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NaNSlope, SingularLambda, SizeMismatch, TooLarge
from .measures import EmpiricalMeasure
from .models import BasisFamily, CoefficientModel
from .simulate import simulate_particles

BRUTE_FORCE_MAX = 8  # 8! = 40320 couplings, still exact and fast


@dataclass(frozen=True)
class ReferenceDistance:
    """High-fidelity numerical approximation of the population distance."""

    L_ref: float
    B_ref: float
    Gamma_ref: np.ndarray
    Lambda_ref: np.ndarray
    N_ref: int
    n_ref: int
    seed: int


def w2_bruteforce(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """Exact Wasserstein-2 by enumerating all permutation couplings."""
    if mu.size != nu.size:
        raise SizeMismatch(f"sizes differ: {mu.size} vs {nu.size}")
    if mu.size > BRUTE_FORCE_MAX:
        raise TooLarge(f"brute force limited to size {BRUTE_FORCE_MAX}")
    x = mu.samples
    y = nu.samples
    best = math.inf
    for perm in itertools.permutations(range(mu.size)):
        cost = sum((x[i] - y[p]) ** 2 for i, p in enumerate(perm))
        best = min(best, cost)
    return math.sqrt(best / mu.size)


def grad_fd(
    Gamma: np.ndarray, B: float, Lambda: np.ndarray, step: float = 1e-6
) -> np.ndarray:
    """Central-difference gradient of the closed-form distance.

    Matches the layout and derivative convention of
    :func:`mvgof.gof.grad_g`: off-diagonal Lambda entries are perturbed
    symmetrically (both (k,l) and (l,k)), and the resulting difference
    quotient is halved so the entry reported is the per-position
    derivative of the symmetric matrix argument.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    Gamma = np.atleast_1d(np.asarray(Gamma, dtype=float))
    Lambda = np.atleast_2d(np.asarray(Lambda, dtype=float))
    d = Gamma.shape[0]

    def g(gam, b, lam):
        eigs = np.linalg.eigvalsh(lam)
        if np.min(eigs) <= 0:
            raise SingularLambda("perturbed Lambda not positive definite")
        return float(b) - float(gam @ np.linalg.solve(lam, gam))

    out = np.empty(d * d + d + 1)
    for k in range(d):
        e = np.zeros(d)
        e[k] = step
        out[k] = (g(Gamma + e, B, Lambda) - g(Gamma - e, B, Lambda)) / (2 * step)
    out[d] = (g(Gamma, B + step, Lambda) - g(Gamma, B - step, Lambda)) / (2 * step)
    for l in range(d):
        for k in range(d):
            P = np.zeros((d, d))
            P[k, l] += step
            P[l, k] += step  # keep the perturbed matrix symmetric
            # the perturbation has total magnitude 2*step (on the diagonal the
            # two increments land on the same entry), so the central
            # difference is divided by 4*step in every position
            diff = g(Gamma, B, Lambda + P) - g(Gamma, B, Lambda - P)
            out[d + 1 + l * d + k] = diff / (4 * step)
    return out


def reference_distance(
    model: CoefficientModel,
    basis: BasisFamily,
    N_ref: int,
    n_ref: int,
    seed: int,
    T: float = 1.0,
) -> ReferenceDistance:
    """Approximate the population distance with the true coefficients.

    Simulates one large fine-grid system and forms Riemann sums in time
    and empirical averages over particles, plugging in the model's exact
    squared volatility instead of squared increments. This isolates the
    population target from estimator noise.
    """
    grid = simulate_particles(model, N_ref, n_ref, T, seed)
    d = basis.d
    delta = grid.delta

    B_ref = 0.0
    Gamma_ref = np.zeros(d)
    Lambda_ref = np.zeros((d, d))
    for j in range(n_ref):  # left endpoints, j = 0..n-1
        col = grid.values[:, j]
        mu = EmpiricalMeasure(np.sort(col))
        a2 = np.asarray(model.a2(col, mu), dtype=float)
        atoms = [np.asarray(atom(col, mu), dtype=float) for atom in basis.atoms]
        B_ref += delta * float(np.mean(a2 * a2))
        for k in range(d):
            Gamma_ref[k] += delta * float(np.mean(atoms[k] * a2))
            for l in range(k, d):
                Lambda_ref[k, l] += delta * float(np.mean(atoms[k] * atoms[l]))
    for k in range(d):
        for l in range(k):
            Lambda_ref[k, l] = Lambda_ref[l, k]

    eigs = np.linalg.eigvalsh(Lambda_ref)
    if np.min(eigs) <= 1e-10 * np.max(np.abs(eigs)):
        raise SingularLambda("reference Gram matrix is numerically singular")
    L_ref = B_ref - float(Gamma_ref @ np.linalg.solve(Lambda_ref, Gamma_ref))

    return ReferenceDistance(
        L_ref=L_ref,
        B_ref=B_ref,
        Gamma_ref=Gamma_ref,
        Lambda_ref=Lambda_ref,
        N_ref=N_ref,
        n_ref=n_ref,
        seed=seed,
    )


def moment_scaling_check(
    model: CoefficientModel,
    p: int,
    n_list,
    N: int = 1000,
    T: float = 1.0,
    seed: int = 0,
) -> float:
    """Least-squares slope of log mean |increment|^p against log delta.

    Under the square-root scaling of diffusion increments the slope
    should be close to p/2. Each sampling frequency gets an independent
    simulation (seed offset by position in ``n_list``).
    """
    if p not in (2, 4, 6):
        raise ValueError("p must be one of 2, 4, 6")
    if len(n_list) < 3:
        raise ValueError("need at least 3 sampling frequencies")
    log_delta = []
    log_moment = []
    for idx, n in enumerate(n_list):
        grid = simulate_particles(model, N, int(n), T, seed + idx)
        incr = np.abs(np.diff(grid.values, axis=1)) ** p
        mean = float(incr.mean())
        if mean <= 0.0:
            raise NaNSlope("all increments are zero; scaling slope undefined")
        log_delta.append(math.log(T / n))
        log_moment.append(math.log(mean))
    slope = np.polyfit(np.asarray(log_delta), np.asarray(log_moment), 1)[0]
    return float(slope)
