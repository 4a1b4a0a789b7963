"""Exception types raised by symreach."""


class SymreachError(Exception):
    """Base class for all library errors."""


class NonTracelessError(SymreachError, ValueError):
    """Matrix is not an element of sp(2, R)."""


class NotSymplecticError(SymreachError, ValueError):
    """Matrix does not have unit determinant."""


class NotHyperbolicError(SymreachError, ValueError):
    """Generator is not (numerically) hyperbolic."""


class DomainError(SymreachError, ValueError):
    """Argument outside the domain of a closed-form expression."""


class NotUnstableError(SymreachError, ValueError):
    """Some accessible generator A + vB is elliptic or parabolic."""


class RankCriterionError(SymreachError, ValueError):
    """A, B and [A, B] do not span sp(2, R)."""


class NoBracketError(SymreachError, ValueError):
    """Bisection endpoints have the same reach status."""


class EmptyInputError(SymreachError, ValueError):
    """An operation that needs records received none."""
