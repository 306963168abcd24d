"""Exception types raised by womlab."""


class WomlabError(Exception):
    """Base class for all library errors."""


class InvalidArgument(WomlabError, ValueError):
    """An input lies outside the domain of the operation."""


class NoComparisonError(WomlabError):
    """No consumer can ever compare two prices, so the price law degenerates."""


class DivergedError(WomlabError, ArithmeticError):
    """A numerical intermediate overflowed or became non-finite."""


class NoEquilibriumError(WomlabError):
    """No equilibrium with active trade exists for the given parameters."""
