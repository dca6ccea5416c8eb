"""Periodic Volterra chain: direct integration, inverse-spectral flow and trace-formula reconstruction."""

from .errors import ChainInvariantError, DegeneracyError, IntegrationError, ReconstructionError
from .flow import evolve_spectral
from .hill import aux_spectra, periodic_spectrum
from .lattice import ChainState, integrate_direct
from .reconstruct import reconstruct_general
from .verify import end_to_end

__all__ = [
    "ChainState",
    "integrate_direct",
    "evolve_spectral",
    "periodic_spectrum",
    "aux_spectra",
    "reconstruct_general",
    "end_to_end",
    "ChainInvariantError",
    "DegeneracyError",
    "IntegrationError",
    "ReconstructionError",
]
