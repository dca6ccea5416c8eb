class ChainInvariantError(ValueError):
    """A chain violates a structural requirement (length, positivity)."""


class IntegrationError(RuntimeError):
    """Time stepping produced an invalid state."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class DegeneracyError(ArithmeticError):
    """A spectral formula hit a removable or genuine singularity."""


class ReconstructionError(ValueError):
    """Trace-formula output is inconsistent with a positive chain."""
