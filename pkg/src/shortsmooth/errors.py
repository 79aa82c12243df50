"""Exception hierarchy shared by all modules and mapped to CLI exit codes."""


class ShortSmoothError(Exception):
    exit_code = 1


class DomainError(ShortSmoothError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 2


class ConfigError(ShortSmoothError, ValueError):
    exit_code = 2


class BudgetError(ShortSmoothError):
    """A request exceeds the configured sieve or enumeration budget."""

    exit_code = 3


class DatasetError(ShortSmoothError):
    exit_code = 4


class SingularityError(ShortSmoothError, ArithmeticError):
    exit_code = 1


class ConvergenceError(ShortSmoothError, ArithmeticError):
    exit_code = 1
