"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map error families to
distinct process exit statuses.
"""

from __future__ import annotations


class AchomeoError(Exception):
    exit_code = 1


# -- input / parsing ---------------------------------------------------------

class ParseError(AchomeoError, ValueError):
    exit_code = 3


# -- validation of PL data and domains ---------------------------------------

class ValidationError(AchomeoError, ValueError):
    exit_code = 4


class NonMonotone(ValidationError):
    pass


class TooFewPoints(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class DomainMismatch(ValidationError):
    pass


class ParityMismatch(ValidationError):
    pass


class HasInteriorFixedPoint(ValidationError):
    pass


class OrbitalMismatch(ValidationError):
    pass


# -- construction parameters -------------------------------------------------

class ConstructionError(AchomeoError, ValueError):
    exit_code = 5


class BadParameter(ConstructionError):
    pass


class NotAFixedPoint(ConstructionError):
    pass


class OverlappingSites(ConstructionError):
    pass


class SharedFixedPoint(ConstructionError):
    pass


# -- budgets, caps and search failures ---------------------------------------

class BudgetError(AchomeoError, RuntimeError):
    exit_code = 6


class BreakpointBudgetExceeded(BudgetError):
    pass


class IterationCapExceeded(BudgetError):
    pass


class OracleEvaluationFailure(BudgetError):
    pass


class BudgetExhausted(BudgetError):
    """Greedy pushing stalled or ran out of moves.

    ``stall_point`` is the least common fixed point of the generators lying at
    or above the start (exact, when it can be computed); ``obstructed`` is True
    when that point does not exceed the target, i.e. no budget would suffice.
    """

    def __init__(self, message, *, reached=None, stall_point=None,
                 fixers=(), obstructed=None):
        super().__init__(message)
        self.reached = reached
        self.stall_point = stall_point
        self.fixers = tuple(fixers)
        self.obstructed = obstructed


class PushFailed(BudgetError):
    pass


class NoEscape(BudgetError):
    pass
