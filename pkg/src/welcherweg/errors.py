"""Exception hierarchy.

``WelcherwegError`` is the base for every domain-level failure; the CLI maps
it to exit code 3. ``ParseError`` (scenario files) maps to exit code 2 and
``IoError`` to exit code 4.
"""

from __future__ import annotations


class WelcherwegError(Exception):
    """Base class for all domain errors raised by this package."""


class NameCollision(WelcherwegError):
    """Two subsystems in one composite space share a name."""


class UnknownSubsystem(WelcherwegError):
    """An operation referenced a subsystem name that is not present."""


class DimensionMismatch(WelcherwegError):
    """Vector or matrix sizes do not match the declared subsystem dimensions."""


class ZeroNorm(WelcherwegError):
    """A vector with (numerically) zero norm cannot be normalized."""


class InvalidSpec(WelcherwegError):
    """A declarative specification violates one of its invariants."""


class DegenerateOutcome(WelcherwegError):
    """Post-selection on an outcome whose probability is numerically zero."""


class GridTooNarrow(WelcherwegError):
    """A momentum grid does not contain enough of the requested Gaussian."""


class ShiftTooLarge(WelcherwegError):
    """A momentum translation too large for the periodic grid to support."""


class GridMismatch(WelcherwegError):
    """Two wavepackets on different grids were combined."""


class ParseError(WelcherwegError):
    """A scenario file is missing, malformed, or fails schema checks."""


class IoError(WelcherwegError):
    """Reading input or writing output failed at the file-system level."""
