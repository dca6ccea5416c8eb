"""The periodic Volterra chain ``u_n' = u_n (u_{n+1} - u_{n-1})`` in direct form.

Arrays hold one period. Entry ``i`` of ``u`` (or ``a``) is site ``n = i + 1``;
any site index is reduced modulo ``N``, so site 0 and site ``N`` share a slot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._rk4 import rk4_path
from .errors import ChainInvariantError, IntegrationError

__all__ = [
    "ChainState",
    "ChainTrajectory",
    "volterra_rhs",
    "a_from_u",
    "u_from_a",
    "a_rhs",
    "integrate_direct",
]


@dataclass(frozen=True)
class ChainState:
    """One period of positive amplitudes ``u`` at time ``t``."""

    u: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        u = np.array(self.u, dtype=float)
        if u.ndim != 1 or u.size < 2:
            raise ChainInvariantError("u must be a flat list with N >= 2 entries")
        if not np.all(np.isfinite(u)) or np.any(u <= 0):
            raise ChainInvariantError("u must be finite and strictly positive")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def N(self) -> int:
        return self.u.size

    @property
    def a(self) -> np.ndarray:
        return a_from_u(self.u)

    @classmethod
    def from_a(cls, a, t: float = 0.0) -> "ChainState":
        return cls(u_from_a(a), t)


@dataclass(frozen=True)
class ChainTrajectory:
    """Sampled direct solution plus conserved-quantity drift per sample.

    ``sum_drift`` and ``prod_drift`` are relative deviations of ``sum(u)``
    and ``prod(u)`` from their values at the first sample.
    """

    times: np.ndarray
    u: np.ndarray
    dt: float
    sum_drift: np.ndarray = field(repr=False)
    prod_drift: np.ndarray = field(repr=False)

    def state(self, i: int) -> ChainState:
        return ChainState(self.u[i], float(self.times[i]))

    @property
    def final(self) -> ChainState:
        return self.state(-1)


def volterra_rhs(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return u * (np.roll(u, -1) - np.roll(u, 1))


def a_from_u(u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ChainInvariantError("u must be strictly positive to form a = sqrt(u)/2")
    return 0.5 * np.sqrt(u)


def u_from_a(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise ChainInvariantError("a must be strictly positive")
    return 4.0 * a**2


def a_rhs(a) -> np.ndarray:
    """``a_n' = 2 a_n (a_{n+1}^2 - a_{n-1}^2)``."""
    a = np.asarray(a, dtype=float)
    return 2.0 * a * (np.roll(a, -1) ** 2 - np.roll(a, 1) ** 2)


def integrate_direct(
    state: ChainState, t_end: float, dt: float, sample_every: int = 1
) -> ChainTrajectory:
    """Classical RK4 on the chain, landing exactly on ``t_end``.

    Raises :class:`IntegrationError` as soon as any amplitude becomes
    non-positive; nothing is clamped.
    """
    if not t_end > state.t:
        raise ValueError(f"t_end={t_end} must exceed the initial time {state.t}")

    def check(t, u):
        if not np.all(np.isfinite(u)) or np.any(u <= 0):
            raise IntegrationError(f"non-positive amplitude at t={t:.17g}", t=t)

    times, us = rk4_path(
        lambda t, u: volterra_rhs(u), state.u, state.t, t_end, dt, sample_every, check
    )
    s0 = state.u.sum()
    p0 = np.prod(state.u)
    sum_drift = np.abs(us.sum(axis=1) - s0) / s0
    prod_drift = np.abs(np.prod(us, axis=1) - p0) / p0
    return ChainTrajectory(times, us, dt, sum_drift, prod_drift)
