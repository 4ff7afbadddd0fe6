class SymstatError(Exception):
    """Base class for all errors raised by symstat."""


class KernelError(SymstatError, ValueError):
    """Malformed kernel, distribution, or argument outside a documented range."""


class NotDegenerateError(SymstatError, ValueError):
    """Kernel fails E(Y | X_1..X_{m-1}) = 0 on the given law."""

    def __init__(self, residual: float, message: str | None = None):
        self.residual = residual
        super().__init__(message or f"kernel is not degenerate (residual {residual:.3e})")


class BudgetExceeded(SymstatError, RuntimeError):
    """Requested computation is larger than the configured budget."""


class DegenerateZeroKernel(SymstatError, ValueError):
    """Every bound term vanishes, so ratios and slopes are undefined."""


class SpecError(SymstatError, ValueError):
    """Kernel/sequence JSON violates the schema; ``path`` names the offending key."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class NumericalOverflow(SymstatError, ArithmeticError):
    """A simulated power overflowed to infinity."""
