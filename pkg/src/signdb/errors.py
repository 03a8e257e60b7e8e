class SignDBError(Exception):
    """Base class for errors raised by signdb."""


class ParseError(SignDBError, ValueError):
    """Malformed textual or JSON input."""


class SchemaError(ParseError):
    """Serialized payload does not match the expected schema or version."""


class BudgetError(SignDBError):
    """A configured resource budget would be exceeded."""


class GridTooLarge(BudgetError):
    pass


class BoundTooLarge(BudgetError):
    pass


class DomainError(SignDBError, ValueError):
    """A query or call violates a domain precondition."""


class OutOfDomain(DomainError):
    """Query point lies outside the unit hypercube."""


class OutsideRegion(DomainError):
    """Query point fails the exact ``delta(x) >= 1`` check."""


class ZeroRootPresent(DomainError):
    pass


class CertificateError(SignDBError):
    """An internal certificate was contradicted; indicates a bug, never user error."""
