"""Exception taxonomy.

Every failure mode that CLI reports need to distinguish gets its own class
with a stable machine-readable ``code``.
"""

from __future__ import annotations


class PsikpError(Exception):
    """Base class for all library errors."""

    code = "error"

    def payload(self) -> dict:
        """Machine-readable description, used by CLI error reports."""
        return {"code": self.code, "message": str(self)}


class RingMismatch(PsikpError):
    code = "ring-mismatch"


class NonZeroMean(PsikpError):
    """Antiderivative requested for an element with non-vanishing mean."""

    code = "nonzero-mean"

    def __init__(self, message, mean=None, step=None):
        super().__init__(message)
        self.mean = mean
        self.step = step

    def payload(self) -> dict:
        out = super().payload()
        if self.step is not None:
            out["step"] = self.step
        if self.mean is not None:
            out["mean"] = str(self.mean)
        return out


class UnsupportedRing(PsikpError):
    code = "unsupported-ring"


class NotAUnit(PsikpError):
    code = "not-a-unit"


class InsufficientDepth(PsikpError):
    """Coefficient asked for below the reliable window of an operator."""

    code = "insufficient-depth"


class DepthInsufficient(PsikpError):
    """An operation would need data below the reliable window of its input.

    Also raised when a composition has an infinite negative tail and no
    truncation depth was supplied.
    """

    code = "depth-insufficient"


class OrderViolation(PsikpError):
    code = "order-violation"


class NotInvertibleAtZero(PsikpError):
    code = "not-invertible-at-zero"


class PredicateViolation(PsikpError):
    code = "predicate-violation"


class TruncationMismatch(PsikpError):
    code = "truncation-mismatch"


class InsufficientKMax(PsikpError):
    code = "insufficient-kmax"


class FormatError(PsikpError):
    """Malformed JSON input."""

    code = "format-error"
