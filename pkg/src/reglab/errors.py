"""Exception taxonomy shared by all reglab modules."""


class RegLabError(Exception):
    """Base class for all reglab errors."""


class DomainError(RegLabError):
    """An argument is outside the mathematical domain of an operation."""


class DegenerateInput(RegLabError):
    """Input is structurally unusable (too few points, nonpositive data, ...)."""


class NonConvergence(RegLabError):
    """Adaptive quadrature exceeded its subdivision depth cap."""


class SizeMismatch(RegLabError):
    """Array lengths are inconsistent with the attached grid."""


class StepSizeError(RegLabError):
    """Time step violates the integrator's step-size contract."""


class ResolutionError(RegLabError):
    """Spatial grid is too coarse for the requested computation."""


class InsufficientSnapshots(RegLabError):
    """Stored trajectory snapshots are too sparse for the requested integral."""


class BlowUpError(RegLabError):
    """Finite-time blow-up reached (analytically or by the amplitude monitor).

    ``time`` is the blow-up time: for exact formulas the critical time of the
    denominator, for integrators the time stamp of the step that tripped the
    amplitude threshold.  ``partial`` optionally carries the truncated run.
    """

    def __init__(self, message: str, time: float, partial=None):
        super().__init__(message)
        self.time = float(time)
        self.partial = partial


class ConfigError(RegLabError):
    """Invalid experiment configuration (CLI exit code 2)."""


class IoError(RegLabError):
    """File could not be read or written."""


class FormatError(RegLabError):
    """Trajectory file is corrupt; ``offset`` points at the failure."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (offset {offset})")
        self.offset = offset


class VersionError(RegLabError):
    """Trajectory file has an unsupported format version."""
