"""Exception types shared across the package.

Budget overruns are ordinary outcomes at desk scale, so they carry enough
context to be reported as an "unverified" verdict instead of crashing a run.
"""


class BudgetExceeded(Exception):
    """A configurable search or enumeration budget ran out."""

    def __init__(self, kind, message, **context):
        super().__init__(message)
        self.kind = kind
        self.context = context


class HomBudgetExceeded(BudgetExceeded):
    """Homomorphism enumeration hit its result or node cap."""

    def __init__(self, message, **context):
        super().__init__("hom-enumeration", message, **context)


class ClosureOverflow(BudgetExceeded):
    """A closure grew past its size budget; the operator is undefined here."""

    def __init__(self, message, **context):
        super().__init__("closure-overflow", message, **context)


class IntegralityError(Exception):
    """A reduction produced a non-integer coefficient.

    This is an internal invariant violation: reductions of monomials modulo
    vanishing ideals of Boolean point sets are always integral.
    """


class InsularityError(Exception):
    """Extension over an edge set failed because no boundary element exists."""


class NullConstrainingError(Exception):
    """A pinned path or edge sub-instance admits no solution.

    Raised when a template declared null-constraining fails the constructive
    check; carries the witness sub-instance description.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ReplayMismatch(Exception):
    """A replayed trial does not match the stored record."""
