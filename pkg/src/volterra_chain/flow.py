"""Motion of the Dirichlet eigenvalues through their spectral gaps.

Each ``mu_{j,k}`` obeys

    mu' = -4 mu sigma sqrt(prod_i (mu - lambda_i)) / prod_{i != j} (mu - mu_i),

which has a square-root singularity at the gap edges, where ``sigma`` flips.
Integration is carried out on the gap angle ``psi`` defined by
``mu = mid + half_width * cos(psi)``. In this coordinate the two edge
factors come out as ``(half_width * sin(psi))**2`` and the right-hand side is
smooth. The sign is read back as ``sigma = -sign(sin(psi))`` (``+1`` at the
edges). With that orientation the angle equation is

    psi' = -4 mu sqrt(-Q) / prod_{i != j} (mu - mu_i),

where ``Q`` is the product over the ``2N - 2`` eigenvalues outside gap ``j``.
Gap indices ``j`` are 0-based in this module; gap ``j`` lies between
``lam[2j + 1]`` and ``lam[2j + 2]``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Optional

import numpy as np

from . import hill
from ._rk4 import rk4_path
from .errors import DegeneracyError, IntegrationError
from .lattice import ChainState
from .symm_poly import lagrange_closed_form

__all__ = [
    "SpectralFlowState",
    "SpectralTrajectory",
    "dubrovin_velocity",
    "angle_velocity",
    "encode",
    "integrate_angles",
    "evolve_spectral",
    "weighted_sum_residual",
    "velocity_power_sums",
    "velocity_power_sums_expected",
    "velocity_power_sums_oracle",
]

EDGE_SIN = 1e-12


def _gap_arrays(spectrum: hill.HillSpectrum):
    mid = np.array([g.mid for g in spectrum.gaps])
    half = np.array([g.half_width for g in spectrum.gaps])
    return mid, half


def _pair_products(mu: np.ndarray) -> np.ndarray:
    """``prod_{i != j}(mu_j - mu_i)`` along the last axis."""
    diff = mu[..., :, None] - mu[..., None, :]
    m = mu.shape[-1]
    diff[..., np.arange(m), np.arange(m)] = 1.0
    return np.prod(diff, axis=-1)


def _outer_products(mu: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Product of ``mu_j - lambda_i`` over all ``i`` except the two edges of gap ``j``."""
    m = mu.shape[-1]
    diff = mu[..., None] - lam
    own = np.zeros((m, lam.size), dtype=bool)
    idx = np.arange(m)
    own[idx, 2 * idx + 1] = True
    own[idx, 2 * idx + 2] = True
    return np.prod(np.where(own, 1.0, diff), axis=-1)


def dubrovin_velocity(
    mu: float,
    sigma: int,
    j: int,
    all_mu,
    spectrum: hill.HillSpectrum,
    edge_tol: Optional[float] = None,
) -> float:
    """Right-hand side of the ``mu`` equation for gap ``j`` (0-based).

    A radicand within ``edge_tol`` below zero is treated as zero.
    """
    if edge_tol is None:
        edge_tol = hill.radicand_tolerance(spectrum)
    all_mu = np.asarray(all_mu, dtype=float)
    others = np.delete(all_mu, j)
    denom = float(np.prod(mu - others))
    if denom == 0.0:
        raise DegeneracyError(f"coinciding Dirichlet eigenvalues at mu={mu!r}")
    rad = float(spectrum.radicand(mu))
    if rad < 0:
        if rad < -edge_tol:
            raise DegeneracyError(f"mu={mu!r} lies outside gap {j} (radicand {rad:.3e})")
        rad = 0.0
    return -4.0 * mu * sigma * np.sqrt(rad) / denom


@dataclass(frozen=True)
class SpectralFlowState:
    """Angles ``psi[k, j]`` for every shift ``k`` and gap ``j``.

    Closed gaps do not move; their eigenvalue is kept in ``mu_frozen``.
    """

    spectrum: hill.HillSpectrum
    psi: np.ndarray
    mu_frozen: np.ndarray
    t: float = 0.0

    @property
    def N(self) -> int:
        return self.spectrum.N

    @property
    def open_mask(self) -> np.ndarray:
        return self.spectrum.open_mask

    def decode_mu(self, psi: Optional[np.ndarray] = None) -> np.ndarray:
        psi = self.psi if psi is None else psi
        mid, half = _gap_arrays(self.spectrum)
        return np.where(self.open_mask, mid + half * np.cos(psi), self.mu_frozen)

    def decode_sigma(self, psi: Optional[np.ndarray] = None) -> np.ndarray:
        psi = self.psi if psi is None else psi
        s = np.sin(psi)
        sigma = np.where(s > EDGE_SIN, -1, 1)
        return np.where(self.open_mask, sigma, 1).astype(int)

    def aux(self, psi: Optional[np.ndarray] = None) -> list[hill.AuxSpectrum]:
        mu = self.decode_mu(psi)
        sigma = self.decode_sigma(psi)
        return [hill.AuxSpectrum(k, mu[k], sigma[k]) for k in range(mu.shape[0])]

    def signed_roots(self, psi: Optional[np.ndarray] = None) -> np.ndarray:
        """``sigma * sqrt(prod_i(mu - lambda_i))`` evaluated without a square root of the edge factors."""
        psi = self.psi if psi is None else psi
        mu = self.decode_mu(psi)
        _, half = _gap_arrays(self.spectrum)
        q = _outer_products(mu, self.spectrum.lam)
        root = -half * np.sin(psi) * np.sqrt(np.maximum(-q, 0.0))
        return np.where(self.open_mask, root, 0.0)

    def angle_rhs(self, psi: np.ndarray) -> np.ndarray:
        mu = self.decode_mu(psi)
        q = _outer_products(mu, self.spectrum.lam)
        p = _pair_products(mu)
        if np.any(p == 0):
            raise DegeneracyError("coinciding Dirichlet eigenvalues")
        rate = -4.0 * mu * np.sqrt(np.maximum(-q, 0.0)) / p
        return np.where(self.open_mask, rate, 0.0)


def angle_velocity(psi: float, j: int, k: int, state: SpectralFlowState) -> float:
    """``dpsi/dt`` for gap ``j`` at shift ``k`` with that one angle set to ``psi``."""
    if not state.open_mask[j]:
        return 0.0
    angles = state.psi.copy()
    angles[k, j] = psi
    return float(state.angle_rhs(angles)[k, j])


def encode(a, flip_sigma: Iterable[tuple[int, int]] = ()) -> SpectralFlowState:
    """Spectral data of the chain with coefficients ``a`` as a flow state at ``t = 0``.

    ``flip_sigma`` lists ``(j, k)`` pairs (gap, shift) whose initial sign is
    deliberately reversed; it exists for failure-injection tests only.
    """
    a = hill.coefficients(a)
    spectrum = hill.periodic_spectrum(a)
    aux = hill.aux_spectra(a)
    mu0 = np.array([x.mu for x in aux])
    sigma0 = np.array([x.sigma for x in aux])
    for j, k in flip_sigma:
        sigma0[k, j] = -sigma0[k, j]
    mid, half = _gap_arrays(spectrum)
    safe_half = np.where(half > 0, half, 1.0)
    base = np.arccos(np.clip((mu0 - mid) / safe_half, -1.0, 1.0))
    psi = np.where(sigma0 > 0, (2 * np.pi - base) % (2 * np.pi), base)
    psi = np.where(spectrum.open_mask, psi, 0.0)
    return SpectralFlowState(spectrum, psi, mu0)


@dataclass(frozen=True)
class SpectralTrajectory:
    """Sampled angles with decoded ``mu`` and ``sigma`` (arrays indexed ``[sample, shift, gap]``)."""

    times: np.ndarray
    psi: np.ndarray
    mu: np.ndarray
    sigma: np.ndarray
    initial: SpectralFlowState
    dt: float

    @property
    def spectrum(self) -> hill.HillSpectrum:
        return self.initial.spectrum

    def state(self, i: int) -> SpectralFlowState:
        return replace(self.initial, psi=self.psi[i], t=float(self.times[i]))

    def aux_at(self, i: int) -> list[hill.AuxSpectrum]:
        return self.state(i).aux()

    def index_of(self, t: float, atol: float = 1e-9) -> int:
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > atol:
            raise KeyError(f"no sample at t={t}")
        return i


def integrate_angles(
    state: SpectralFlowState,
    t_end: float,
    dt: float,
    sample_every: int = 1,
    reverse: bool = False,
) -> SpectralTrajectory:
    """RK4 on all angles from ``state.t`` to ``t_end``; ``reverse`` negates the velocity field."""
    sign = -1.0 if reverse else 1.0
    shape = state.psi.shape
    mid, half = _gap_arrays(state.spectrum)
    lo, hi = mid - half, mid + half
    tol = hill.EDGE_RTOL * max(1.0, float(np.max(np.abs(state.spectrum.lam)))) ** 2

    def rhs(t, y):
        return sign * state.angle_rhs(y.reshape(shape)).ravel()

    def check(t, y):
        psi = y.reshape(shape)
        if not np.all(np.isfinite(psi)):
            raise IntegrationError(f"non-finite gap angle at t={t:.17g}", t=t)
        mu = state.decode_mu(psi)
        outside = np.where(state.open_mask, np.maximum(lo - mu, mu - hi), 0.0)
        if np.any(outside > tol):
            raise IntegrationError(f"Dirichlet eigenvalue left its gap at t={t:.17g}", t=t)

    times, ys = rk4_path(rhs, state.psi.ravel(), state.t, t_end, dt, sample_every, check)
    psi = ys.reshape((-1,) + shape)
    mu = np.array([state.decode_mu(p) for p in psi])
    sigma = np.array([state.decode_sigma(p) for p in psi])
    return SpectralTrajectory(times, psi, mu, sigma, state, dt)


def evolve_spectral(
    initial: ChainState,
    t_end: float,
    dt: float,
    sample_every: int = 1,
    flip_sigma: Iterable[tuple[int, int]] = (),
) -> SpectralTrajectory:
    """Evolve every shifted Dirichlet spectrum of ``initial`` up to ``t_end``."""
    if not t_end > initial.t:
        raise ValueError(f"t_end={t_end} must exceed the initial time {initial.t}")
    state = replace(encode(initial.a, flip_sigma), t=initial.t)
    return integrate_angles(state, t_end, dt, sample_every)


def _signed_terms(spectrum: hill.HillSpectrum, aux: hill.AuxSpectrum, edge_tol: Optional[float]):
    if edge_tol is None:
        edge_tol = hill.radicand_tolerance(spectrum)
    mu = np.asarray(aux.mu, dtype=float)
    rad = spectrum.radicand(mu)
    if np.any(rad < -edge_tol):
        raise DegeneracyError("a Dirichlet eigenvalue lies outside its gap")
    root = aux.sigma * np.sqrt(np.maximum(rad, 0.0))
    p = _pair_products(mu)
    if np.any(p == 0):
        raise DegeneracyError("coinciding Dirichlet eigenvalues")
    return mu, root, p


def weighted_sum_residual(spectrum: hill.HillSpectrum, aux: hill.AuxSpectrum, edge_tol: Optional[float] = None) -> float:
    """``|sum_j mu_j sigma_j sqrt(R(mu_j)) / prod_{i != j}(mu_j - mu_i)|``."""
    mu, root, p = _signed_terms(spectrum, aux, edge_tol)
    return float(abs(np.sum(mu * root / p)))


def velocity_power_sums(spectrum: hill.HillSpectrum, aux: hill.AuxSpectrum, edge_tol: Optional[float] = None) -> np.ndarray:
    """Weighted sums ``sum_j mu_j^(s-1) mu_j' / (sigma_j sqrt(R(mu_j)))`` for ``s = 1 .. N-1``.

    ``mu_j'`` comes from :func:`dubrovin_velocity`. Terms whose radicand
    vanishes (edge or closed gap) are indeterminate there and are replaced by
    their limit ``-4 mu_j^s / prod_{i != j}(mu_j - mu_i)``.
    """
    if edge_tol is None:
        edge_tol = hill.radicand_tolerance(spectrum)
    mu, root, p = _signed_terms(spectrum, aux, edge_tol)
    m = mu.size
    if m + 1 < 4:
        raise ValueError("the weighted-sum identities need N >= 4")
    vel = np.array(
        [dubrovin_velocity(mu[j], aux.sigma[j], j, mu, spectrum, edge_tol) for j in range(m)]
    )
    usable = np.abs(root) > 1e-9 * np.max(np.abs(root), initial=1.0)
    sums = np.empty(m)
    for s in range(1, m + 1):
        direct = np.where(usable, mu ** (s - 1) * vel / np.where(usable, root, 1.0), 0.0)
        limit = np.where(usable, 0.0, -4.0 * mu**s / p)
        sums[s - 1] = np.sum(direct + limit)
    return sums


def velocity_power_sums_expected(N: int) -> np.ndarray:
    out = np.zeros(N - 1)
    out[N - 3] = -4.0
    return out


def velocity_power_sums_oracle(aux: hill.AuxSpectrum) -> np.ndarray:
    """``-4 f(s, mu)`` from the closed-form power sums, ``s = 1 .. N-1``."""
    nodes = [float(x) for x in aux.mu]
    return np.array([-4.0 * float(lagrange_closed_form(s, nodes)) for s in range(1, len(nodes) + 1)])
