"""Discrete Hill equation with zero diagonal.

The three-term relation is

    a_{n-1} y_{n-1} + a_n y_{n+1} = lambda y_n,

with ``a`` periodic of period ``N``. An index shift ``k`` replaces ``a_n`` by
``a_{n+k}`` throughout. Coefficient arrays follow the lattice convention:
``a[i]`` is ``a_{i+1}`` and ``a_0 = a_N``.

``scale`` is ``max(1, max a)**2`` and sets the absolute size of every
tolerance below.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import ChainInvariantError, DegeneracyError

__all__ = [
    "FundamentalPair",
    "Gap",
    "HillSpectrum",
    "AuxSpectrum",
    "coefficients",
    "scale_of",
    "shifted",
    "fundamental_solutions",
    "discriminant",
    "periodic_spectrum",
    "dirichlet_spectrum",
    "dirichlet_spectrum_theta",
    "sigma_signs",
    "aux_spectra",
    "spectral_polynomial_residual",
    "theta_prime_product_residual",
    "norm_identity_residual",
    "wronskian",
    "wronskian_residual",
    "edge_tolerance",
    "radicand_tolerance",
]

CLOSED_GAP_RTOL = 1e-10
EDGE_RTOL = 1e-12


def coefficients(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise ChainInvariantError("need N >= 2 coefficients")
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise ChainInvariantError("coefficients a_n must be finite and positive")
    return a


def scale_of(a) -> float:
    return max(1.0, float(np.max(a))) ** 2


def edge_tolerance(a) -> float:
    """Threshold on ``Delta^2 - 4`` below which a point counts as a gap edge."""
    return EDGE_RTOL * scale_of(a) ** 4


def radicand_tolerance(spectrum: "HillSpectrum") -> float:
    """Edge threshold for ``prod_i (x - lambda_i)``, which carries ``2N`` factors of size ``|lambda|``."""
    size = max(1.0, float(np.max(np.abs(spectrum.lam))))
    return EDGE_RTOL * size ** spectrum.lam.size


def shifted(a, shift: int) -> np.ndarray:
    """Coefficients ``a_{n+shift}`` for ``n = 0 .. N+1`` (site indexing, ``a_0 = a_N``)."""
    a = np.asarray(a, dtype=float)
    N = a.size
    n = np.arange(N + 2)
    return a[(n - 1 + shift) % N]


@dataclass(frozen=True)
class FundamentalPair:
    """``theta``/``phi`` with ``(theta_0, theta_1) = (1, 0)``, ``(phi_0, phi_1) = (0, 1)``.

    Each array has the site index ``0 .. N+1`` on axis 0; trailing axes follow
    the shape of ``lam``.
    """

    theta: np.ndarray
    phi: np.ndarray
    theta_prime: np.ndarray
    phi_prime: np.ndarray
    lam: np.ndarray
    shift: int

    @property
    def N(self) -> int:
        return self.theta.shape[0] - 2

    @property
    def wronskian(self):
        N = self.N
        return self.theta[N] * self.phi[N + 1] - self.theta[N + 1] * self.phi[N]


def fundamental_solutions(a, lam, shift: int = 0) -> FundamentalPair:
    ext = shifted(a, shift)
    N = ext.size - 2
    lam = np.asarray(lam, dtype=float)
    out = np.zeros((4, N + 2) + lam.shape)
    th, ph, dth, dph = out
    th[0] = 1.0
    ph[1] = 1.0
    for n in range(1, N + 1):
        th[n + 1] = (lam * th[n] - ext[n - 1] * th[n - 1]) / ext[n]
        ph[n + 1] = (lam * ph[n] - ext[n - 1] * ph[n - 1]) / ext[n]
        dth[n + 1] = (lam * dth[n] + th[n] - ext[n - 1] * dth[n - 1]) / ext[n]
        dph[n + 1] = (lam * dph[n] + ph[n] - ext[n - 1] * dph[n - 1]) / ext[n]
    return FundamentalPair(th, ph, dth, dph, lam, shift)


def wronskian(a, lam, shift: int = 0):
    return fundamental_solutions(a, lam, shift).wronskian


def wronskian_residual(a, lam, shift: int = 0):
    """``|W - 1|`` relative to the size of the two products forming ``W``."""
    fp = fundamental_solutions(a, lam, shift)
    N = fp.N
    size = np.abs(fp.theta[N] * fp.phi[N + 1]) + np.abs(fp.theta[N + 1] * fp.phi[N])
    return np.abs(fp.wronskian - 1) / np.maximum(1.0, size)


def discriminant(a, lam):
    """``Delta(lambda) = theta_N + phi_{N+1}`` at shift 0."""
    fp = fundamental_solutions(a, lam, 0)
    N = fp.N
    return fp.theta[N] + fp.phi[N + 1]


@dataclass(frozen=True)
class Gap:
    lo: float
    hi: float
    closed: bool

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.hi - self.lo)


@dataclass(frozen=True)
class HillSpectrum:
    """Sorted periodic/antiperiodic eigenvalues and the ``N - 1`` gaps between bands."""

    lam: np.ndarray
    gaps: tuple

    @property
    def N(self) -> int:
        return self.lam.size // 2

    @property
    def open_mask(self) -> np.ndarray:
        return np.array([not g.closed for g in self.gaps], dtype=bool)

    def radicand(self, x):
        """``prod_i (x - lambda_i)``, vectorised over ``x``."""
        x = np.asarray(x, dtype=float)
        return np.prod(x[..., None] - self.lam, axis=-1)


def _boundary_matrix(a, sign: float) -> np.ndarray:
    N = a.size
    m = np.zeros((N, N))
    for i in range(N - 1):
        m[i, i + 1] += a[i]
    # y_0 = sign * y_N and y_{N+1} = sign * y_1, coupled through a_0 = a_N
    m[0, N - 1] += sign * a[N - 1]
    return m + m.T - np.diag(np.diag(m))


def periodic_spectrum(a) -> HillSpectrum:
    """Roots of ``Delta^2 = 4`` from the periodic and antiperiodic matrices."""
    a = coefficients(a)
    lam = np.sort(
        np.concatenate(
            [
                np.linalg.eigvalsh(_boundary_matrix(a, +1.0)),
                np.linalg.eigvalsh(_boundary_matrix(a, -1.0)),
            ]
        )
    )
    gaps = []
    for j in range(1, a.size):
        lo, hi = float(lam[2 * j - 1]), float(lam[2 * j])
        gaps.append(Gap(lo, hi, hi - lo <= CLOSED_GAP_RTOL * (1 + abs(lo))))
    return HillSpectrum(lam, tuple(gaps))


@dataclass(frozen=True)
class AuxSpectrum:
    """Dirichlet eigenvalues ``mu_{j,k}`` for one shift, with optional signs."""

    shift: int
    mu: np.ndarray
    sigma: Optional[np.ndarray] = None


def _sturm_count(e2: np.ndarray, x: float) -> int:
    """Number of eigenvalues below ``x`` for zero diagonal, squared off-diagonals ``e2``."""
    count = 0
    q = -x
    tiny = np.finfo(float).tiny
    if q < 0:
        count += 1
    for e in e2:
        if q == 0.0:
            q = tiny
        q = -x - e / q
        if q < 0:
            count += 1
    return count


def _bisect_eigenvalues(e: np.ndarray) -> np.ndarray:
    m = e.size + 1
    if m == 1:
        return np.zeros(1)
    e2 = e**2
    bound = 2.0 * float(np.max(np.abs(e))) + 1e-300
    abs_tol = 1e-4 * np.finfo(float).eps * bound
    out = np.empty(m)
    for idx in range(m):
        lo, hi = -bound, bound
        # a zero pivot is replaced by ``tiny``; the resulting overflow to -inf is the IEEE-correct count
        while hi - lo > abs_tol:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            with np.errstate(over="ignore", divide="ignore"):
                below = _sturm_count(e2, mid)
            if below > idx:
                hi = mid
            else:
                lo = mid
        out[idx] = 0.5 * (lo + hi)
    return out


def dirichlet_spectrum(a, shift: int = 0) -> AuxSpectrum:
    """Eigenvalues under ``y_1 = y_{N+1} = 0`` by Sturm-sequence bisection.

    The matrix has size ``N - 1``, zero diagonal and off-diagonal entries
    ``a_{2+shift} .. a_{N-1+shift}``.
    """
    a = coefficients(a)
    ext = shifted(a, shift)
    N = a.size
    return AuxSpectrum(shift, _bisect_eigenvalues(ext[2:N]))


def dirichlet_spectrum_theta(a, shift: int = 0, spectrum: Optional[HillSpectrum] = None) -> AuxSpectrum:
    """Same eigenvalues located as roots of ``theta_{N+1}``, one per gap.

    Each root is bracketed between the midpoints of the two bands that
    surround its gap, where ``theta_{N+1}`` has exactly one simple zero.
    """
    a = coefficients(a)
    if spectrum is None:
        spectrum = periodic_spectrum(a)
    N = a.size
    lam = spectrum.lam

    def theta_end(x):
        return float(fundamental_solutions(a, x, shift).theta[N + 1])

    mu = np.empty(N - 1)
    for j in range(1, N):
        left = 0.5 * (lam[2 * j - 2] + lam[2 * j - 1])
        right = 0.5 * (lam[2 * j] + lam[2 * j + 1])
        mu[j - 1] = brentq(theta_end, left, right, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return AuxSpectrum(shift, mu)


def sigma_signs(a, aux: AuxSpectrum) -> AuxSpectrum:
    """Fill ``sigma_{j,k} = sign(theta_N - 1/theta_N)`` at each ``mu_{j,k}``.

    Points with ``(theta_N - 1/theta_N)^2`` under the edge tolerance get the
    conventional sign ``+1``.
    """
    a = coefficients(a)
    N = a.size
    theta_n = fundamental_solutions(a, aux.mu, aux.shift).theta[N]
    if np.any(theta_n == 0):
        raise DegeneracyError(f"theta_N vanishes at a Dirichlet eigenvalue (shift {aux.shift})")
    d = theta_n - 1.0 / theta_n
    sigma = np.where(d**2 <= edge_tolerance(a), 1, np.sign(d)).astype(int)
    return replace(aux, sigma=sigma)


def aux_spectra(a) -> list[AuxSpectrum]:
    """Signed Dirichlet spectra for every shift ``k = 0 .. N-1``."""
    a = coefficients(a)
    return [sigma_signs(a, dirichlet_spectrum(a, k)) for k in range(a.size)]


def spectral_polynomial_residual(
    a, lam, spectrum: Optional[HillSpectrum] = None, relative: bool = False
):
    """``|Delta^2 - 4 - prod(a)^-2 prod_i (lam - lambda_i)|``.

    With ``relative`` the residual is divided by ``1 + Delta^2``; outside the
    spectrum ``Delta`` grows like ``lam**N`` and the absolute form is limited
    by floating-point resolution rather than by the identity.
    """
    a = coefficients(a)
    if spectrum is None:
        spectrum = periodic_spectrum(a)
    d = discriminant(a, lam)
    res = np.abs(d**2 - 4 - spectrum.radicand(lam) / np.prod(a) ** 2)
    return res / (1 + d**2) if relative else res


def theta_prime_product_residual(a, aux: AuxSpectrum) -> float:
    """Derivative recurrence vs ``-a_0 / prod(a) * prod_{i != j}(mu_j - mu_i)``."""
    a = coefficients(a)
    N = a.size
    mu = aux.mu
    dth = fundamental_solutions(a, mu, aux.shift).theta_prime[N + 1]
    diff = mu[:, None] - mu[None, :]
    np.fill_diagonal(diff, 1.0)
    a0 = shifted(a, aux.shift)[0]
    product = -a0 / np.prod(a) * np.prod(diff, axis=1)
    return float(np.max(np.abs(dth - product)))


def norm_identity_residual(a, aux: AuxSpectrum) -> float:
    """``sum_{n=1}^N theta_n^2`` vs ``a_N theta_N theta'_{N+1}`` at each ``mu``."""
    a = coefficients(a)
    N = a.size
    fp = fundamental_solutions(a, aux.mu, aux.shift)
    lhs = np.sum(fp.theta[1 : N + 1] ** 2, axis=0)
    a_n = shifted(a, aux.shift)[N]
    rhs = a_n * fp.theta[N] * fp.theta_prime[N + 1]
    return float(np.max(np.abs(lhs - rhs)))
