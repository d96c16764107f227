"""Exception hierarchy shared by every module."""

from __future__ import annotations


class RamseyChiError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(RamseyChiError, ValueError):
    """An argument is out of range; ``field`` names the offending parameter."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class CapabilityError(RamseyChiError):
    """The request exceeds a supported size or a search budget."""


class Graph6Error(RamseyChiError, ValueError):
    """Malformed graph6/sparse6 input; ``offset`` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class HypothesisUnmetError(RamseyChiError):
    """A theorem threshold is not met and the caller did not force the run."""

    def __init__(self, message: str, **margins):
        super().__init__(message)
        self.margins = margins


class InternalInvariantError(RamseyChiError):
    """A counting or structural step of a proof failed.

    ``operands`` holds the violated inequality's ingredients so that the
    failure can be replayed.
    """

    def __init__(self, step: str, message: str, **operands):
        super().__init__(f"[{step}] {message}")
        self.step = step
        self.operands = operands


class SparsenessViolation(InternalInvariantError):
    """A counting step failed because a pair ``(A, B)`` is too dense.

    This is a certificate that the host is not ``(c, t)``-sparse whenever
    ``|A|, |B| >= t``.
    """

    def __init__(self, step: str, A, B, count: int, c):
        A = sorted(A)
        B = sorted(B)
        super().__init__(
            step,
            f"e(A,B)={count} > (1-{c})*{len(A)}*{len(B)}",
            A=A,
            B=B,
            count=count,
            c=c,
        )
        self.A = A
        self.B = B
        self.count = count
        self.c = c
