"""Coefficient catalog and squared-volatility basis families.

The drift/diffusion evaluators take a state vector ``x`` (numpy array or
scalar) together with the current :class:`~mvgof.measures.EmpiricalMeasure`
of the particle system and return values broadcast against ``x``. All
catalog entries are Lipschitz with linear growth on bounded moment sets,
and every initial law is Gaussian so that all moments are finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Tuple

import numpy as np

from .errors import EmptyBasis, InvalidParams, UnknownAtom, UnknownModel
from .measures import EmpiricalMeasure

Evaluator = Callable[[np.ndarray, EmpiricalMeasure], np.ndarray]


@dataclass(frozen=True)
class CoefficientModel:
    """A named (drift, squared-diffusion) pair with a Gaussian initial law."""

    name: str
    params: Mapping[str, float]
    drift: Evaluator
    a2: Evaluator
    m0: float
    s0: float


@dataclass(frozen=True)
class BasisFamily:
    """Ordered family a_1^2, ..., a_d^2 of candidate squared volatilities.

    The order of ``atoms`` fixes the index k used by the test pipeline.
    """

    names: Tuple[str, ...]
    atoms: Tuple[Evaluator, ...]

    @property
    def d(self) -> int:
        return len(self.atoms)


_MODEL_PARAMS = {
    # name -> (required params, optional params with defaults)
    "mv-ou": (("theta", "kappa", "sigma"), {"m0": 0.0, "s0": 1.0}),
    "state-vol": (("theta", "lambda1", "lambda2"), {"m0": 0.0, "s0": 1.0}),
    "mean-vol": (("theta", "sigma", "c"), {"m0": 0.0, "s0": 1.0}),
    "sin-vol": (("theta", "eta"), {"m0": 0.0, "s0": 1.0}),
}

# Parameters that must be nonnegative for a2 >= 0 / a well-defined
# initial law. Zero is allowed: degenerate dynamics are legitimate
# (constant paths are used as edge cases downstream).
_NONNEGATIVE = {"sigma", "lambda1", "lambda2", "c", "eta", "s0"}


def _check_params(name: str, params: Mapping[str, float]) -> dict:
    required, optional = _MODEL_PARAMS[name]
    out = dict(optional)
    for key, value in params.items():
        if key not in required and key not in optional:
            raise InvalidParams(f"model {name!r}: unknown parameter {key!r}")
        value = float(value)
        if not math.isfinite(value):
            raise InvalidParams(f"model {name!r}: parameter {key!r} must be finite")
        if key in _NONNEGATIVE and value < 0:
            raise InvalidParams(f"model {name!r}: parameter {key!r} must be >= 0")
        out[key] = value
    missing = [key for key in required if key not in out]
    if missing:
        raise InvalidParams(f"model {name!r}: missing parameters {missing}")
    return out


def build_model(name: str, params: Mapping[str, float]) -> CoefficientModel:
    """Instantiate a catalog model by name.

    Catalog (all with Gaussian initial law N(m0, s0^2)):

    - ``mv-ou``:     b = -theta (x - kappa * mean(mu)),  a2 = sigma^2
    - ``state-vol``: b = -theta x,                       a2 = lambda1 + lambda2 x^2
    - ``mean-vol``:  b = -theta (x - mean(mu)),          a2 = sigma^2 (1 + c mean(mu)^2)
    - ``sin-vol``:   b = -theta x,                       a2 = eta (2 + sin x)
    """
    if name not in _MODEL_PARAMS:
        raise UnknownModel(f"unknown model {name!r}; catalog: {sorted(_MODEL_PARAMS)}")
    p = _check_params(name, params)

    if name == "mv-ou":
        theta, kappa, sig2 = p["theta"], p["kappa"], p["sigma"] ** 2

        def drift(x, mu):
            return -theta * (np.asarray(x, dtype=float) - kappa * mu.mean)

        def a2(x, mu):
            return np.full_like(np.asarray(x, dtype=float), sig2)

    elif name == "state-vol":
        theta, lam1, lam2 = p["theta"], p["lambda1"], p["lambda2"]

        def drift(x, mu):
            return -theta * np.asarray(x, dtype=float)

        def a2(x, mu):
            x = np.asarray(x, dtype=float)
            return lam1 + lam2 * x * x

    elif name == "mean-vol":
        theta, sig2, c = p["theta"], p["sigma"] ** 2, p["c"]

        def drift(x, mu):
            return -theta * (np.asarray(x, dtype=float) - mu.mean)

        def a2(x, mu):
            x = np.asarray(x, dtype=float)
            return np.full_like(x, sig2 * (1.0 + c * mu.mean**2))

    else:  # sin-vol
        theta, eta = p["theta"], p["eta"]

        def drift(x, mu):
            return -theta * np.asarray(x, dtype=float)

        def a2(x, mu):
            x = np.asarray(x, dtype=float)
            return eta * (2.0 + np.sin(x))

    return CoefficientModel(
        name=name, params=p, drift=drift, a2=a2, m0=p["m0"], s0=p["s0"]
    )


def _atom_const(params):
    def atom(x, mu):
        return np.ones_like(np.asarray(x, dtype=float))

    return atom


def _atom_x2(params):
    def atom(x, mu):
        x = np.asarray(x, dtype=float)
        return x * x

    return atom


def _atom_x4(params):
    def atom(x, mu):
        x = np.asarray(x, dtype=float)
        return x**4

    return atom


def _atom_expx(params):
    beta = float(params.get("beta", 1.0))

    def atom(x, mu):
        return np.exp(beta * np.asarray(x, dtype=float))

    return atom


def _atom_mean2(params):
    def atom(x, mu):
        return np.full_like(np.asarray(x, dtype=float), mu.mean**2)

    return atom


def _atom_var(params):
    def atom(x, mu):
        return np.full_like(np.asarray(x, dtype=float), mu.var)

    return atom


_ATOM_BUILDERS = {
    "const": _atom_const,
    "x2": _atom_x2,
    "x4": _atom_x4,
    "expx": _atom_expx,
    "mean2": _atom_mean2,
    "var": _atom_var,
}


def build_basis(spec: Sequence) -> BasisFamily:
    """Build an ordered basis family from atom specs.

    Each entry is either an atom name (``"const"``, ``"x2"``, ``"x4"``,
    ``"expx"``, ``"mean2"``, ``"var"``) or a mapping
    ``{"name": ..., <param>: ...}`` for parametrized atoms (``expx``
    takes ``beta``, default 1.0).
    """
    if len(spec) == 0:
        raise EmptyBasis("basis needs at least one atom")
    names = []
    atoms = []
    for entry in spec:
        if isinstance(entry, str):
            name, params = entry, {}
        else:
            entry = dict(entry)
            name = entry.pop("name", None)
            params = entry
        if name not in _ATOM_BUILDERS:
            raise UnknownAtom(
                f"unknown basis atom {name!r}; available: {sorted(_ATOM_BUILDERS)}"
            )
        names.append(name)
        atoms.append(_ATOM_BUILDERS[name](params))
    return BasisFamily(names=tuple(names), atoms=tuple(atoms))
