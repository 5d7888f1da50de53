"""Goodness-of-fit pipeline for the squared volatility function.

Given an observation panel and a basis family a_1^2, ..., a_d^2, this
module builds the quarticity-type estimator B_hat, the mixed moments
Gamma_hat, the Gram matrix Lambda_hat, the projection distance
S_hat = B_hat - Gamma' Lambda^{-1} Gamma, the per-particle influence
vectors feeding the empirical covariance, the delta-method variance
tau2_hat, and the one-sided decision rule.

Conventions fixed here (and relied on by the oracle module and tests):

- increments run over j = 0..n-1 with left-endpoint coefficient
  evaluation, so the last point used is t_n = T;
- vec(.) of d x d matrices is column-major everywhere (influence-vector
  rows, gradients, covariance blocks);
- linear systems in Lambda_hat are solved via a Cholesky factorization,
  never an explicit inverse.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import (
    DegenerateData,
    DegenerateVariance,
    InsufficientParticles,
    InvalidParams,
    SingularLambda,
)
from .ioutil import dump_json
from .measures import EmpiricalMeasure
from .models import BasisFamily
from .normal import normal_cdf, normal_quantile
from .simulate import ObservationGrid

RCOND_MIN = 1e-10


@dataclass(frozen=True)
class GofSummary:
    """Estimators and per-particle influence vectors for one panel.

    ``V`` has shape (N, d^2 + d + 1); row i holds
    (Z_1^i, ..., Z_d^i, Z_B^i, vec(Z_Lambda^i)) with column-major vec.
    """

    B_hat: float
    Gamma_hat: np.ndarray
    Lambda_hat: np.ndarray
    S_hat: float
    G_hat: float
    V: np.ndarray
    d: int
    N: int
    n: int
    delta: float
    lambda_rcond: float


@dataclass(frozen=True)
class TestReport:
    statistic: float
    tau2_hat: float
    p_value: float
    alpha: float
    reject: bool
    mode: str
    delta_threshold: Optional[float]
    diagnostics: Mapping[str, float]
    summary: GofSummary = field(repr=False, compare=False, default=None)

    def to_json(self) -> str:
        doc = {
            "statistic": self.statistic,
            "tau2_hat": self.tau2_hat,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "reject": self.reject,
            "mode": self.mode,
            "delta_threshold": self.delta_threshold,
            "diagnostics": dict(self.diagnostics),
        }
        return dump_json(doc)


def _check_lambda(Lambda: np.ndarray):
    """Symmetrize, estimate reciprocal condition, return Cholesky factor."""
    Lambda = 0.5 * (Lambda + Lambda.T)
    eigs = np.linalg.eigvalsh(Lambda)
    emax = float(np.max(np.abs(eigs)))
    emin = float(np.min(eigs))
    rcond = emin / emax if emax > 0 else 0.0
    if not np.isfinite(rcond) or rcond < RCOND_MIN:
        raise SingularLambda(
            f"Lambda reciprocal condition {rcond:.3e} below {RCOND_MIN:.0e}; "
            "basis atoms are numerically dependent on this panel"
        )
    return Lambda, cho_factor(Lambda, lower=True), rcond


def compute_summary(grid: ObservationGrid, basis: BasisFamily) -> GofSummary:
    """Compute all estimators and influence vectors for one panel."""
    if grid.N < 2:
        raise InsufficientParticles("need at least 2 particles")
    X = grid.values
    N, n, delta, d = grid.N, grid.n, grid.delta, basis.d

    D = np.diff(X, axis=1)  # (N, n), increments over j = 0..n-1
    D2 = D * D
    D4 = D2 * D2

    # atom values a_k^2(X^i_{t_j}, mu^N_{t_j}) at left endpoints
    A = np.empty((d, N, n))
    for j in range(n):
        col = X[:, j]
        mu = EmpiricalMeasure(np.sort(col))
        for k, atom in enumerate(basis.atoms):
            A[k, :, j] = atom(col, mu)

    # per-particle influence vectors; j summed first (ascending), then
    # the particle dimension is reduced in index order below
    Z_B = D4.sum(axis=1) / (3.0 * delta)  # (N,)
    Z_G = (A * D2[None, :, :]).sum(axis=2)  # (d, N)
    Z_L = delta * np.einsum("kij,lij->kli", A, A)  # (d, d, N)

    B_hat = float(Z_B.mean())
    Gamma_hat = Z_G.mean(axis=1)
    Lambda_hat = Z_L.mean(axis=2)

    if B_hat == 0.0:
        raise DegenerateData("all increments are zero (constant paths)")

    Lambda_hat, chol, rcond = _check_lambda(Lambda_hat)
    y = cho_solve(chol, Gamma_hat)
    S_hat = B_hat - float(Gamma_hat @ y)
    G_hat = S_hat / B_hat

    m = d * d + d + 1
    V = np.empty((N, m))
    V[:, :d] = Z_G.T
    V[:, d] = Z_B
    V[:, d + 1 :] = Z_L.reshape(d * d, N, order="F").T

    return GofSummary(
        B_hat=B_hat,
        Gamma_hat=Gamma_hat,
        Lambda_hat=Lambda_hat,
        S_hat=S_hat,
        G_hat=G_hat,
        V=V,
        d=d,
        N=N,
        n=n,
        delta=delta,
        lambda_rcond=rcond,
    )


def closed_form_distance(Gamma: np.ndarray, B: float, Lambda: np.ndarray) -> float:
    """Projection distance B - Gamma' Lambda^{-1} Gamma."""
    Gamma = np.atleast_1d(np.asarray(Gamma, dtype=float))
    Lambda = np.atleast_2d(np.asarray(Lambda, dtype=float))
    Lambda, chol, _ = _check_lambda(Lambda)
    y = cho_solve(chol, Gamma)
    return float(B) - float(Gamma @ y)


def grad_g(Gamma: np.ndarray, B: float, Lambda: np.ndarray) -> np.ndarray:
    """Gradient of the projection distance in the influence-vector layout.

    Returns (dg/dGamma, dg/dB, vec(dg/dLambda)) of length d^2 + d + 1,
    with dg/dGamma = -2 Lambda^{-1} Gamma, dg/dB = 1 and
    dg/dLambda = (Lambda^{-1} Gamma)(Lambda^{-1} Gamma)', vec column-major.
    """
    Gamma = np.atleast_1d(np.asarray(Gamma, dtype=float))
    Lambda = np.atleast_2d(np.asarray(Lambda, dtype=float))
    Lambda, chol, _ = _check_lambda(Lambda)
    y = cho_solve(chol, Gamma)
    d = Gamma.shape[0]
    out = np.empty(d * d + d + 1)
    out[:d] = -2.0 * y
    out[d] = 1.0
    out[d + 1 :] = np.outer(y, y).reshape(-1, order="F")
    return out


def grad_g_relative(Gamma: np.ndarray, B: float, Lambda: np.ndarray) -> np.ndarray:
    """Gradient of the relative distance h = 1 - Gamma' Lambda^{-1} Gamma / B.

    Same layout as :func:`grad_g`: dh/dGamma = -2 Lambda^{-1} Gamma / B,
    dh/dB = Gamma' Lambda^{-1} Gamma / B^2,
    dh/dLambda = (Lambda^{-1} Gamma)(Lambda^{-1} Gamma)' / B.
    """
    Gamma = np.atleast_1d(np.asarray(Gamma, dtype=float))
    Lambda = np.atleast_2d(np.asarray(Lambda, dtype=float))
    Lambda, chol, _ = _check_lambda(Lambda)
    y = cho_solve(chol, Gamma)
    q = float(Gamma @ y)
    B = float(B)
    d = Gamma.shape[0]
    out = np.empty(d * d + d + 1)
    out[:d] = -2.0 * y / B
    out[d] = q / (B * B)
    out[d + 1 :] = (np.outer(y, y) / B).reshape(-1, order="F")
    return out


def covariance_hat(V: np.ndarray) -> np.ndarray:
    """Empirical covariance of influence-vector rows (divisor N)."""
    V = np.atleast_2d(np.asarray(V, dtype=float))
    N = V.shape[0]
    if N < 2:
        raise InsufficientParticles("covariance needs at least 2 rows")
    centered = V - V.mean(axis=0)
    sigma = centered.T @ centered / N
    return 0.5 * (sigma + sigma.T)


def _quadratic_form(grad: np.ndarray, sigma: np.ndarray) -> float:
    t = float(grad @ sigma @ grad)
    if t < 0.0:
        if t < -1e-12:
            raise DegenerateVariance(
                f"variance quadratic form is negative ({t:.3e})"
            )
        t = 0.0
    return t


def tau2_hat(summary: GofSummary) -> float:
    """Delta-method variance estimate for the absolute statistic."""
    grad = grad_g(summary.Gamma_hat, summary.B_hat, summary.Lambda_hat)
    sigma = covariance_hat(summary.V)
    return _quadratic_form(grad, sigma)


def run_test(
    grid: ObservationGrid,
    basis: BasisFamily,
    alpha: float,
    mode: str = "absolute",
    delta_threshold: Optional[float] = None,
) -> TestReport:
    """Run the one-sided volatility goodness-of-fit test on a panel.

    ``mode="absolute"`` tests the projection distance itself
    (statistic sqrt(N) S_hat / tau_hat); ``mode="relative"`` tests the
    unit-free ratio G = S/B against a threshold ``delta_threshold`` in
    (0, 1) (statistic sqrt(N) (G_hat - delta) / tau_G_hat). Rejection is
    strict: statistic > z_{1-alpha}.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidParams("alpha must lie in (0, 1)")
    if mode not in ("absolute", "relative"):
        raise InvalidParams(f"unknown mode {mode!r}")
    if mode == "relative":
        if delta_threshold is None or not 0.0 < delta_threshold < 1.0:
            raise InvalidParams("relative mode needs a threshold in (0, 1)")

    summary = compute_summary(grid, basis)
    sigma = covariance_hat(summary.V)

    if mode == "absolute":
        grad = grad_g(summary.Gamma_hat, summary.B_hat, summary.Lambda_hat)
        tau2 = _quadratic_form(grad, sigma)
        if tau2 == 0.0:
            raise DegenerateVariance("tau_hat is zero; statistic undefined")
        statistic = math.sqrt(summary.N) * summary.S_hat / math.sqrt(tau2)
    else:
        grad = grad_g_relative(summary.Gamma_hat, summary.B_hat, summary.Lambda_hat)
        tau2 = _quadratic_form(grad, sigma)
        if tau2 == 0.0:
            raise DegenerateVariance("tau_G_hat is zero; statistic undefined")
        statistic = (
            math.sqrt(summary.N)
            * (summary.G_hat - delta_threshold)
            / math.sqrt(tau2)
        )

    n_delta2 = summary.N * summary.delta**2
    if n_delta2 > 1.0:
        warnings.warn(
            f"N * delta^2 = {n_delta2:.3g} > 1: outside the asymptotic "
            "regime the limit theory assumes",
            RuntimeWarning,
            stacklevel=2,
        )

    z = normal_quantile(1.0 - alpha)
    return TestReport(
        statistic=statistic,
        tau2_hat=tau2,
        p_value=1.0 - normal_cdf(statistic),
        alpha=alpha,
        reject=bool(statistic > z),
        mode=mode,
        delta_threshold=delta_threshold,
        diagnostics={
            "lambda_rcond": summary.lambda_rcond,
            "N": summary.N,
            "n": summary.n,
            "delta": summary.delta,
            "d": summary.d,
            "N_delta2": n_delta2,
            "S_hat": summary.S_hat,
            "G_hat": summary.G_hat,
            "B_hat": summary.B_hat,
        },
        summary=summary,
    )
