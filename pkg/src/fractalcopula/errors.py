"""Exception hierarchy.

Every failure this library can diagnose raises a subclass of
:class:`FractalCopulaError`, so callers can catch one base. The CLI maps
subclasses to exit codes: parse problems exit 1, violated mathematical
preconditions exit 2, failed verification checks exit 3.
"""

from __future__ import annotations


class FractalCopulaError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FractalCopulaError):
    """A constructed object violates its invariants."""


class NegativeEntry(ValidationError):
    def __init__(self, i: int, j: int, value):
        self.i = i
        self.j = j
        self.value = value
        super().__init__(
            "negative entry %s at column %d, row %d (0-based)" % (value, i, j)
        )


class MassNotOne(ValidationError):
    def __init__(self, total):
        self.total = total
        super().__init__("total mass is %s, not 1" % total)


class EmptyRowOrColumn(ValidationError):
    def __init__(self, axis: str, index: int):
        self.axis = axis  # "row" or "column"
        self.index = index
        super().__init__("%s %d (0-based) has zero total mass" % (axis, index))


class BadMarginal(ValidationError):
    def __init__(self, axis: str, index: int, got, want):
        self.axis = axis
        self.index = index
        self.got = got
        self.want = want
        super().__init__(
            "%s-cell %d carries mass %s, its width is %s" % (axis, index, got, want)
        )


class NotAPartition(ValidationError):
    def __init__(self, detail: str):
        super().__init__(detail)


class RankExceedsOne(FractalCopulaError):
    """A block of an invariant-pair decomposition has a nonzero 2x2 minor."""

    def __init__(self, block_index: int, cols, rows, minor):
        self.block_index = block_index  # 0-based
        self.cols = cols  # (i, i') 0-based columns of the offending minor
        self.rows = rows  # (j, j') 0-based rows
        self.minor = minor
        super().__init__(
            "block %d is not rank one: minor over columns {%d,%d}, rows {%d,%d} "
            "(1-based) equals %s"
            % (
                block_index + 1,
                cols[0] + 1,
                cols[1] + 1,
                rows[0] + 1,
                rows[1] + 1,
                minor,
            )
        )


class OutOfRange(FractalCopulaError):
    """An argument lies outside [0, 1] or indexes a nonexistent cell."""


class MeshMismatch(FractalCopulaError):
    """Two objects that must share a mesh do not."""


class BadAddress(FractalCopulaError):
    """A block address is empty or indexes a nonexistent block."""


class NoContraction(FractalCopulaError):
    """The patching operator of this matrix carries no contraction certificate."""


class NotMeasurePreserving(FractalCopulaError):
    """A step map's fibers do not carry the measure of their target cells."""


class VerificationError(FractalCopulaError):
    """An identity that must hold exactly failed to."""


class ParseError(FractalCopulaError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line  # 1-based line number in the input text
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class IoError(FractalCopulaError):
    """Wraps an OS-level failure while reading or writing an artifact."""
