class HswError(Exception):
    """Base class for errors raised by this package."""


class GraphError(HswError, ValueError):
    """Malformed or disconnected graph input."""


class BudgetExceeded(HswError):
    """A size limit (vertex budget, dense limit) would be exceeded."""


class SpectrumError(HswError, ValueError):
    """Malformed spectrum, e.g. missing the zero eigenvalue."""


class SimulationError(HswError, ValueError):
    """Invalid simulation configuration (stability, delay grid, burn-in)."""
