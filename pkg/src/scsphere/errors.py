"""Exception and warning types shared across the library."""

from __future__ import annotations


class ScSphereError(Exception):
    """Base class for all library errors."""


class ValidationError(ScSphereError):
    """Malformed input: wrong shapes, non-normalized states, bad files."""


class NumericalError(ScSphereError):
    """Mathematically ill-posed request or failed numerical procedure."""


class AllZeroPolynomial(NumericalError):
    """Every polynomial coefficient is below the absolute floor."""


class DegenerateBasis(NumericalError):
    """Two SC-basis directions closer than the separation tolerance."""


class DegenerateConstellation(NumericalError):
    """Operation requires distinct stars but found a multiple star."""


class DegenerateStar(NumericalError):
    """Star has multiplicity > 1 where a simple star is required."""


class NotCritical(NumericalError):
    """Direction fails the Husimi criticality condition."""


class AntipodalTarget(NumericalError):
    """Geodesic endpoints at distance pi/2: the connecting geodesic is not unique."""


class CutLocus(NumericalError):
    """Log-map target on (or numerically at) the cut locus of the base point."""


class DegenerateTriangle(NumericalError):
    """Tangent-angle formula undefined: some side is 0 or pi/2."""


class UndefinedPhase(NumericalError):
    """Bargmann phase undefined: a pairwise overlap vanishes."""


class ZeroCombination(NumericalError):
    """Requested superposition is the zero vector."""


class DegenerateDenominator(NumericalError):
    """Closed-form denominator vanishes (intersection point at infinity)."""


class PoleAtT(NumericalError):
    """Trajectory root passes through infinity at the requested parameter."""


class MasonBoundViolation(NumericalError):
    """Observed distinct-star count fell below the Mason lower bound."""


class SchemaMismatch(ValidationError):
    """Input file does not match the documented column/field schema."""


class IllConditionedWarning(UserWarning):
    """Vandermonde system condition number exceeds the warning threshold."""


class NonUniqueClosestWarning(UserWarning):
    """Several SC states are equidistant-closest within tolerance."""


class ConvergenceWarning(UserWarning):
    """Some multistart seeds failed to converge."""
