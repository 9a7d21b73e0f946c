"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations

__all__ = [
    "DensityLabError",
    "InvalidParameters",
    "PointOutsideGroundSet",
    "IncompatibleLevel",
    "IncoherentDelta",
    "ModulusMismatch",
    "NotRepresentable",
    "LevelIntractable",
    "RepresentativeUnavailable",
    "OracleInconclusive",
    "InvariantViolation",
]


class DensityLabError(Exception):
    """Base class; uncaught instances map to the internal-error exit code."""

    code = "internal"
    exit_code = 70


class InvalidParameters(DensityLabError, ValueError):
    code = "invalid-parameters"
    exit_code = 2


class PointOutsideGroundSet(InvalidParameters):
    code = "point-outside-ground-set"


class IncompatibleLevel(InvalidParameters):
    code = "incompatible-level"


class IncoherentDelta(InvalidParameters):
    code = "incoherent-delta"


class ModulusMismatch(InvalidParameters):
    code = "modulus-mismatch"


class NotRepresentable(InvalidParameters):
    """A rational has no finite expansion in the requested digit system."""

    code = "not-representable"


class LevelIntractable(DensityLabError):
    code = "level-intractable"
    exit_code = 3


class RepresentativeUnavailable(DensityLabError):
    code = "representative-unavailable"
    exit_code = 3


class OracleInconclusive(DensityLabError):
    """An intersection oracle answered "unknown" where exact mode needs a decision."""

    code = "oracle-inconclusive"
    exit_code = 4


class InvariantViolation(DensityLabError):
    code = "invariant-violation"
    exit_code = 70
