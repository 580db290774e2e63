"""Exception types shared across the package."""

from __future__ import annotations


class TrifoldError(Exception):
    """Base class for all package errors."""


class InvalidPermutation(TrifoldError):
    pass


class OrderExceedsCap(TrifoldError):
    pass


class NotNormal(TrifoldError):
    pass


class BadQuotient(TrifoldError):
    pass


class GroupMismatch(TrifoldError):
    pass


class UnsupportedFamily(TrifoldError):
    pass


class BadParams(TrifoldError):
    pass


class NotAnAutomorphism(TrifoldError):
    pass


class NotCentral(TrifoldError):
    pass


class NotIsomorphism(TrifoldError):
    pass


class IncompleteOrder(TrifoldError):
    """Raised when a catalog cannot vouch for every group of some order."""

    def __init__(self, order: int):
        super().__init__(f"no complete catalog for order {order}")
        self.order = order


class ParseError(TrifoldError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class AxiomViolation(TrifoldError):
    pass


class CapExceeded(TrifoldError):
    pass


class IdentityElement(TrifoldError):
    pass


class ElementInDiagonal(TrifoldError):
    pass


class NonIntegralAverage(TrifoldError):
    """A character average that should be an integer was not; always a bug."""


class BadCoset(TrifoldError):
    pass


class BadShape(TrifoldError):
    pass


class NotMinimal(TrifoldError):
    pass


class UnresolvedOrders(TrifoldError):
    """Some admissible orders could not be searched; ``rows`` holds what was found."""

    def __init__(self, orders, rows=None):
        self.orders = sorted(set(orders))
        self.rows = list(rows or [])
        super().__init__(f"unresolved group orders: {self.orders}")
