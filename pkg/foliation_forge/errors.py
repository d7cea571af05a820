"""Exceptions raised by foliation_forge.

All of them are ValueErrors, so callers that only care about "bad input" can catch that.
Verification outcomes are never raised; see checks.CheckResult.
"""


class DimensionMismatchError(ValueError):
    pass


class ChartMismatchError(ValueError):
    pass


class DegreeError(ValueError):
    pass


class BackendError(ValueError):
    """An operation that needs Exact (polynomial) data was given Smooth data."""


class SingularPointError(ValueError):
    """The point is singular (rank too low) or too close to the singular set."""


class VanishingFactorError(ValueError):
    pass


class SymmetryError(ValueError):
    pass


class LiftError(ValueError):
    """A tangent vector is not in the image of the anchor map."""


class ScenarioError(ValueError):
    pass


class PolynomialParseError(ScenarioError):
    pass
