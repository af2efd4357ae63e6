"""Exception hierarchy shared by every module in the package."""


class OrderFindingError(Exception):
    """Base class for all package errors."""


class ConfigError(OrderFindingError, ValueError):
    """Bad parameters: out-of-range n, m, x, y, or an invalid experiment config."""


class EmptyWindowError(ConfigError):
    """A prime window that was required to be nonempty has no primes."""


class ResourceError(OrderFindingError, MemoryError):
    """A request exceeds the configured memory budget."""


class CapacityError(OrderFindingError):
    """A chain or adversary ran out of room (domain exhausted, cycle too short)."""


class InconsistencyError(OrderFindingError, RuntimeError):
    """An oracle, adversary or solver invariant was violated."""


class BudgetExhausted(OrderFindingError):
    """Raised by a query budget wrapper once its allowance is spent."""
