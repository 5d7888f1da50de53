"""Empirical probability measures on the real line.

Measures are equal-weight atom collections, stored sorted once at
construction so that the Wasserstein-2 distance between equal-size
measures reduces to the root-mean-square gap of order statistics.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptySample, NonFiniteInput, SizeMismatch


class EmpiricalMeasure:
    """Uniform distribution over ``size`` real atoms, kept in sorted order.

    Immutable after construction; the ``samples`` array should not be
    written to. Mean and variance are cached on first access since the
    coefficient catalog queries them repeatedly inside simulation loops.
    """

    __slots__ = ("samples", "size", "_mean", "_var")

    def __init__(self, sorted_samples: np.ndarray):
        # Internal constructor: assumes a sorted, finite, owned array.
        # External callers should go through from_samples().
        self.samples = sorted_samples
        self.size = sorted_samples.shape[0]
        self._mean = None
        self._var = None

    @classmethod
    def from_samples(cls, values) -> "EmpiricalMeasure":
        """Build a measure from atom locations in any order."""
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1:
            arr = arr.reshape(-1)
        if arr.size == 0:
            raise EmptySample("empirical measure needs at least one sample")
        if not np.all(np.isfinite(arr)):
            raise NonFiniteInput("samples must be finite reals")
        return cls(np.sort(arr))

    @property
    def mean(self) -> float:
        if self._mean is None:
            self._mean = float(self.samples.mean())
        return self._mean

    @property
    def var(self) -> float:
        if self._var is None:
            self._var = float(self.samples.var())
        return self._var


def wasserstein2(mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> float:
    """Wasserstein-2 distance between two equal-size empirical measures.

    For equal-weight 1-D samples the optimal coupling is the sorted
    (monotone) one, so the distance is
    ``sqrt(mean((x_(i) - y_(i))**2))`` over order statistics.
    """
    if mu.size != nu.size:
        raise SizeMismatch(
            f"measure sizes differ: {mu.size} vs {nu.size}"
        )
    diff = mu.samples - nu.samples
    return float(np.sqrt(np.mean(diff * diff)))


def moment(mu: EmpiricalMeasure, p: int) -> float:
    """Empirical absolute moment (1/N) sum |x_i|^p for integer p >= 1."""
    if p < 1:
        raise ValueError("moment order must be >= 1")
    return float(np.mean(np.abs(mu.samples) ** p))
