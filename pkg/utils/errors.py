class CircuitToolError(Exception):
    """Base error; `exit_code` is what the CLI returns for it."""
    exit_code = 1


class ConfigError(CircuitToolError):
    exit_code = 2


class PersistenceError(CircuitToolError):
    exit_code = 3


class NumericalError(CircuitToolError):
    exit_code = 4
