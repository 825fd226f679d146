"""Exception types shared across the package.

Everything user-facing derives from :class:`HandrvError` so the CLI can map
validation failures to exit code 1 in one place.
"""


class HandrvError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(HandrvError):
    """A dataset line could not be decoded."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class ValidationError(HandrvError):
    """An invariant of a loaded or constructed object is violated."""


class SizeMismatchError(ValidationError):
    """An embedding blob does not contain exactly rows * dim * 4 bytes."""


class DegeneratePathError(ValidationError):
    """A path is too short to operate on (fewer than 2 points / empty deltas)."""


class MissingKinematicsError(ValidationError):
    """Kinematic segmentation was requested but the trajectory has no kin data."""


class InfeasibleSplitError(ValidationError):
    """An even split was requested that cannot satisfy the minimum length."""


class MissingEmbeddingsError(ValidationError):
    """An operation needs embeddings the trajectory does not carry."""


class IncompatibleEmbeddingsError(ValidationError):
    """Two embedding tables cannot be compared (dimension mismatch)."""


class InvalidCostError(ValidationError):
    """A cost value is negative or non-finite."""


class InfeasibleBandError(ValidationError):
    """A band constraint leaves no admissible alignment at all."""
