"""Exception hierarchy.

Every error carries a ``kind`` string (the class name) so the command line
front end can report it in machine-readable form.  Errors that stem from
malformed input derive from :class:`InputError`; errors raised while a
well-formed computation runs derive from :class:`ComputationError`.
"""

from __future__ import annotations


class HolomonError(Exception):
    """Base class for all library errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class InputError(HolomonError, ValueError):
    pass


class ComputationError(HolomonError, ArithmeticError):
    pass


# numerics
class NonFiniteSample(ComputationError):
    def __init__(self, s: float):
        super().__init__(f"integrand returned a non-finite value at s={s!r}")
        self.s = s


class ToleranceNotMet(ComputationError):
    def __init__(self, estimate: float, tol: float):
        super().__init__(f"error estimate {estimate:.3g} exceeds tolerance {tol:.3g} at refinement cap")
        self.estimate = estimate
        self.tol = tol


class StepUnderflow(ComputationError):
    def __init__(self, s: float, h: float):
        super().__init__(f"adaptive step {h:.3g} underflowed at s={s!r}")
        self.s = s
        self.h = h


# transport
class PoleTooClose(ComputationError):
    def __init__(self, pole_index: int, s: float, distance: float):
        super().__init__(
            f"path passes within {distance:.3g} of pole {pole_index} (at parameter s={s:.6g})"
        )
        self.pole_index = pole_index
        self.s = s
        self.distance = distance


class NotClosed(InputError):
    pass


class BasePointMismatch(InputError):
    pass


class RankMismatch(InputError):
    pass


class TruncationTooLarge(InputError):
    pass


# systems
class BadGenus(InputError):
    pass


class WrongGeneratorCount(InputError):
    pass


class ExplosionGuard(ComputationError):
    pass


class BranchPointOnPath(ComputationError):
    pass


# algebra
class RelationViolated(ComputationError):
    def __init__(self, index: int, residual: float):
        super().__init__(f"relation {index} is not killed (residual {residual:.3g})")
        self.index = index
        self.residual = residual


class CountMismatch(InputError):
    pass


# cli
class ParseError(InputError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SchemaError(InputError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
