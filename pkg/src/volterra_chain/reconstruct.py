"""Trace formulas recovering ``a_k^2`` (so ``u_k = 4 a_k^2``) from spectral data.

The Dirichlet spectrum at shift ``k`` determines ``a_k^2``, with ``a_0 = a_N``.
Site-ordered outputs list sites ``1 .. N``, so entry ``i`` comes from
shift ``(i + 1) % N``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import hill
from .errors import DegeneracyError, ReconstructionError
from .flow import SpectralTrajectory, _pair_products, dubrovin_velocity

__all__ = [
    "ReconstructionReport",
    "reconstruct_general",
    "reconstruct_odd_period",
    "pair_sums",
    "reconstruct_log_derivative",
    "log_derivative_analytic",
    "flow_terms",
]


@dataclass(frozen=True)
class ReconstructionReport:
    """Site-ordered reconstruction with the pieces of the formula kept for inspection.

    ``lam_moment`` is ``sum(lambda**2)``. ``mu_moments[k]`` and
    ``flow_terms[k]`` are indexed by shift.
    """

    u: np.ndarray
    a2: np.ndarray
    lam_moment: float
    mu_moments: np.ndarray
    flow_terms: np.ndarray

    @property
    def min_a2(self) -> float:
        return float(np.min(self.a2))


def _spectral_scale(spectrum: hill.HillSpectrum) -> float:
    # max(a) never exceeds the largest periodic eigenvalue
    return max(1.0, float(np.max(np.abs(spectrum.lam)))) ** 2


def _site_order(values_by_shift: np.ndarray) -> np.ndarray:
    N = values_by_shift.shape[-1]
    return values_by_shift[..., (np.arange(N) + 1) % N]


def flow_terms(spectrum: hill.HillSpectrum, aux: hill.AuxSpectrum, edge_tol: Optional[float] = None) -> float:
    """``sum_j sigma_j sqrt(R(mu_j)) / prod_{i != j}(mu_j - mu_i)`` for one shift.

    Radicands within ``edge_tol`` below zero are clamped to zero.
    """
    if edge_tol is None:
        edge_tol = hill.radicand_tolerance(spectrum)
    mu = np.asarray(aux.mu, dtype=float)
    rad = spectrum.radicand(mu)
    if np.any(rad < -edge_tol):
        raise DegeneracyError(f"Dirichlet eigenvalue outside its gap at shift {aux.shift}")
    p = _pair_products(mu)
    if np.any(p == 0):
        raise DegeneracyError(f"coinciding Dirichlet eigenvalues at shift {aux.shift}")
    return float(np.sum(aux.sigma * np.sqrt(np.maximum(rad, 0.0)) / p))


def reconstruct_general(
    spectrum: hill.HillSpectrum,
    aux: Sequence[hill.AuxSpectrum],
    strict: bool = True,
    scale: Optional[float] = None,
) -> ReconstructionReport:
    """``a_k^2 = sum(lambda^2)/8 - sum_j mu_{j,k}^2/4 - F_k/2`` for every shift.

    ``F_k`` is :func:`flow_terms`. Negative ``a_k^2`` down to
    ``-1e-8 * scale**2`` is clamped with a warning; anything lower raises
    :class:`ReconstructionError` unless ``strict`` is false, in which case the
    raw values stay in ``a2`` and ``u`` uses the clamped ones.
    """
    N = spectrum.N
    if len(aux) != N:
        raise ValueError(f"need one Dirichlet spectrum per shift ({N}), got {len(aux)}")
    scale = _spectral_scale(spectrum) if scale is None else scale
    edge_tol = hill.radicand_tolerance(spectrum)
    lam_moment = float(spectrum.lam @ spectrum.lam)
    by_shift = sorted(aux, key=lambda x: x.shift % N)
    mu_moments = np.array([float(x.mu @ x.mu) for x in by_shift])
    terms = np.array([flow_terms(spectrum, x, edge_tol) for x in by_shift])
    a2_shift = lam_moment / 8 - mu_moments / 4 - terms / 2
    a2 = _site_order(a2_shift)
    floor = -1e-8 * scale**2
    if strict and np.any(a2 < floor):
        site = int(np.argmin(a2)) + 1
        raise ReconstructionError(
            f"a^2 = {a2.min():.6g} at site {site}: spectral data (sign or mu) inconsistent"
        )
    if np.any(a2 < 0) and np.all(a2 >= floor):
        warnings.warn("clamping slightly negative a^2 to zero", RuntimeWarning, stacklevel=2)
    u = 4.0 * np.maximum(a2, 0.0)
    return ReconstructionReport(u, a2, lam_moment, mu_moments, terms)


def pair_sums(spectrum: hill.HillSpectrum, aux: Sequence[hill.AuxSpectrum]) -> np.ndarray:
    """Predicted ``a_k^2 + a_{k+1}^2 = sum(lambda^2)/4 - sum_j mu_{j,k}^2/2``, indexed by shift."""
    N = spectrum.N
    lam_moment = float(spectrum.lam @ spectrum.lam)
    out = np.empty(N)
    for x in aux:
        out[x.shift % N] = lam_moment / 4 - float(x.mu @ x.mu) / 2
    return out


def reconstruct_odd_period(spectrum: hill.HillSpectrum, aux: Sequence[hill.AuxSpectrum], m: int) -> float:
    """``a_m^2`` from the alternating sum of shifted ``mu`` moments; needs odd ``N``.

    Uses no sign information.
    """
    N = spectrum.N
    if N % 2 == 0:
        raise ValueError(f"the alternating-sum formula needs an odd period, got N={N}")
    moments = np.empty(N)
    for x in aux:
        moments[x.shift % N] = float(x.mu @ x.mu)
    alt = sum((-1) ** k * moments[(m + k) % N] for k in range(N))
    return float(spectrum.lam @ spectrum.lam) / 8 - alt / 4


def _log_abs_product(mu: np.ndarray, tol: float) -> float:
    if np.any(np.abs(mu) <= tol):
        raise DegeneracyError("a Dirichlet eigenvalue vanishes; the log-derivative form does not apply")
    return float(np.sum(np.log(np.abs(mu))))


def reconstruct_log_derivative(
    traj: SpectralTrajectory, k: int, t: float, h: float
) -> float:
    """``a_k^2 = sum(lambda^2)/8 - sum_j mu_{j,k}^2/4 + (1/8) d/dt ln|prod_j mu_{j,k}|``.

    The derivative is a central difference with step ``h``; samples at
    ``t - h``, ``t`` and ``t + h`` must exist in ``traj``.
    """
    spectrum = traj.spectrum
    N = spectrum.N
    k = k % N
    tol = 1e-8 * _spectral_scale(spectrum)
    i_m, i_0, i_p = (traj.index_of(t - h), traj.index_of(t), traj.index_of(t + h))
    span = traj.times[i_p] - traj.times[i_m]
    deriv = (_log_abs_product(traj.mu[i_p, k], tol) - _log_abs_product(traj.mu[i_m, k], tol)) / span
    mu = traj.mu[i_0, k]
    _log_abs_product(mu, tol)
    return float(spectrum.lam @ spectrum.lam) / 8 - float(mu @ mu) / 4 + deriv / 8


def log_derivative_analytic(spectrum: hill.HillSpectrum, aux: hill.AuxSpectrum, edge_tol: Optional[float] = None) -> float:
    """``sum_j mu_j' / mu_j`` with ``mu_j'`` from :func:`dubrovin_velocity`."""
    mu = np.asarray(aux.mu, dtype=float)
    if np.any(mu == 0):
        raise DegeneracyError("a Dirichlet eigenvalue vanishes")
    vel = [dubrovin_velocity(mu[j], aux.sigma[j], j, mu, spectrum, edge_tol) for j in range(mu.size)]
    return float(np.sum(np.asarray(vel) / mu))
