"""Volatility goodness-of-fit testing for interacting particle systems.

Library layout:

- :mod:`mvgof.measures`    empirical measures, Wasserstein-2, moments
- :mod:`mvgof.models`      coefficient catalog and basis families
- :mod:`mvgof.simulate`    Euler-Maruyama panel simulation
- :mod:`mvgof.gof`         estimators, test statistic, decision rule
- :mod:`mvgof.oracle`      independent brute-force references
- :mod:`mvgof.experiments` Monte Carlo harness
- :mod:`mvgof.plots`       report figures
- :mod:`mvgof.cli`         command-line entry point
"""

from .measures import EmpiricalMeasure, moment, wasserstein2
from .models import BasisFamily, CoefficientModel, build_basis, build_model
from .simulate import ObservationGrid, simulate_particles, subsample
from .gof import (
    GofSummary,
    TestReport,
    closed_form_distance,
    compute_summary,
    covariance_hat,
    grad_g,
    grad_g_relative,
    run_test,
    tau2_hat,
)
from .experiments import ExperimentConfig, ExperimentResult, ks_normal, run_experiment

__version__ = "0.1.0"

__all__ = [
    "BasisFamily",
    "CoefficientModel",
    "EmpiricalMeasure",
    "ExperimentConfig",
    "ExperimentResult",
    "GofSummary",
    "ObservationGrid",
    "TestReport",
    "build_basis",
    "build_model",
    "closed_form_distance",
    "compute_summary",
    "covariance_hat",
    "grad_g",
    "grad_g_relative",
    "ks_normal",
    "moment",
    "run_experiment",
    "run_test",
    "simulate_particles",
    "subsample",
    "tau2_hat",
    "wasserstein2",
]
