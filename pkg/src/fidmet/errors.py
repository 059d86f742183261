"""Exception types shared across the package."""


class FidmetError(Exception):
    """Base class for package-specific failures."""


class BudgetExceededError(FidmetError, ValueError):
    """Raised when an exact-enumeration routine is asked for a lattice size
    beyond its hard budget. The Monte Carlo routes cover larger sizes."""


class NoiseFloorError(FidmetError, ArithmeticError):
    """Raised when a finite-difference step is so small that 1 - F sits below
    the floating-point noise floor and the quotient would be meaningless."""
