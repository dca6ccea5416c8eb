"""Fixed-step classical Runge-Kutta driver shared by the direct and spectral flows."""

from __future__ import annotations

import math
from typing import Callable, Optional

import numpy as np


def rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + h / 2, y + h / 2 * k1)
    k3 = f(t + h / 2, y + h / 2 * k2)
    k4 = f(t + h, y + h * k3)
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def rk4_path(
    f: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    t0: float,
    t_end: float,
    dt: float,
    sample_every: int = 1,
    check: Optional[Callable[[float, np.ndarray], None]] = None,
):
    """Integrate ``y' = f(t, y)`` from ``t0`` to ``t_end``.

    Steps have length ``dt`` except the last one, which is shortened so the
    path lands exactly on ``t_end``. A sample is recorded at ``t0``, after
    every ``sample_every`` steps, and at ``t_end``. ``check(t, y)`` runs after
    each accepted step and may raise to abort.

    Returns ``(times, states)`` with ``states`` stacked along axis 0.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < t0:
        raise ValueError(f"t_end={t_end} precedes t0={t0}")
    if sample_every < 1:
        raise ValueError("sample_every must be >= 1")
    span = t_end - t0
    n_steps = max(math.ceil(span / dt - 1e-9), 0)
    y = np.array(y0, dtype=float)
    times = [t0]
    states = [y.copy()]
    for i in range(1, n_steps + 1):
        t = t0 + (i - 1) * dt
        h = dt if i < n_steps else t_end - t
        y = rk4_step(f, t, y, h)
        t_new = t_end if i == n_steps else t0 + i * dt
        if check is not None:
            check(t_new, y)
        if i % sample_every == 0 or i == n_steps:
            times.append(t_new)
            states.append(y.copy())
    return np.array(times), np.array(states)
