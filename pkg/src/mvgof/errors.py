"""Exception hierarchy.

Two branches matter for the CLI exit-code mapping: ``DataError`` (bad
inputs, configs, files -> exit 2) and ``NumericalError`` (degenerate or
ill-conditioned numerics -> exit 3).
"""


class MvgofError(Exception):
    """Base class for all package errors."""


class DataError(MvgofError):
    """Invalid user input, configuration, or data file."""


class NumericalError(MvgofError):
    """Numerical degeneracy detected at runtime."""


# -- data / input errors --------------------------------------------------

class EmptySample(DataError):
    pass


class NonFiniteInput(DataError):
    pass


class SizeMismatch(DataError):
    pass


class UnknownModel(DataError):
    pass


class InvalidParams(DataError):
    pass


class UnknownAtom(DataError):
    pass


class EmptyBasis(DataError):
    pass


class BadFactor(DataError):
    pass


class TooLarge(DataError):
    pass


class TooFewSamples(DataError):
    pass


class InsufficientParticles(DataError):
    pass


class ConfigError(DataError):
    pass


# -- numerical errors ------------------------------------------------------

class CoefficientEvaluation(NumericalError):
    """A coefficient returned a negative or non-finite value.

    Carries the (particle, step) location when raised from the simulator.
    """

    def __init__(self, message, particle=None, step=None):
        super().__init__(message)
        self.particle = particle
        self.step = step


class NumericalBlowup(NumericalError):
    pass


class SingularLambda(NumericalError):
    pass


class DegenerateData(NumericalError):
    pass


class DegenerateVariance(NumericalError):
    pass


class NaNSlope(NumericalError):
    pass


class ExperimentDegenerate(NumericalError):
    pass
