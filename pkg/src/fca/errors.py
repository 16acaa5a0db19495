"""Exception hierarchy shared by the toolkit."""

from __future__ import annotations


class FCAError(Exception):
    """Base class for all toolkit errors."""


class ModeCountMismatch(FCAError, ValueError):
    pass


class SiteOutOfRange(FCAError, IndexError):
    pass


class NotAGroup(FCAError, ValueError):
    pass


class NotNormal(FCAError, ValueError):
    """Kernel of a finite quotient is not a normal subgroup."""


class MissingAssignment(FCAError, KeyError):
    pass


class NoSolution(FCAError, ValueError):
    """A requested solution family is empty or the parameters violate it."""


class NullSpaceDimension(FCAError):
    """The intertwiner space of the evolved fields is not one-dimensional."""

    def __init__(self, dimension: int):
        self.dimension = dimension
        super().__init__(
            f"joint null space has dimension {dimension}, expected 1; "
            "the rule is not a CAR automorphism"
        )


class NotUnitary(FCAError):
    pass


class OrderingMismatch(FCAError, ValueError):
    pass
