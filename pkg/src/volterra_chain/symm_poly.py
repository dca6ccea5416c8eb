"""Complete homogeneous symmetric polynomials and Lagrange-type power sums.

For distinct nodes ``x_0, ..., x_n`` the power sum

    f(s, n) = sum_j x_j**s / prod_{l != j} (x_j - x_l)

has a closed form in terms of the complete homogeneous symmetric
polynomials ``g_l``. Both sides are provided here so that each can serve as
an oracle for the other. Every function works on floats and on
:class:`fractions.Fraction` inputs; with rationals the results are exact.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Number
from typing import Sequence

__all__ = [
    "complete_homogeneous",
    "lagrange_terms",
    "lagrange_power_sum",
    "lagrange_closed_form",
    "recursion_check",
    "as_exact",
]


def complete_homogeneous(l: int, u: Sequence[Number]) -> Number:
    """Return ``g_l(u_0, ..., u_n)``, the sum of all degree-``l`` monomials.

    Uses the recurrence ``g_l(u_0..u_n) = g_l(u_0..u_{n-1}) + u_n g_{l-1}(u_0..u_n)``,
    which costs ``O(n * l)`` operations.
    """
    if l < 0:
        raise ValueError(f"degree must be non-negative, got {l}")
    u = list(u)
    if l == 0:
        return 1 if not u else u[0] ** 0
    if not u:
        return 0
    # h[m] holds g_m over the variables consumed so far
    h = [u[0] ** 0] + [0 * u[0]] * l
    for ui in u:
        for m in range(1, l + 1):
            h[m] = h[m] + ui * h[m - 1]
    return h[l]


def _check_nodes(s: int, x: Sequence[Number]) -> list:
    x = list(x)
    if len(x) < 2:
        raise ValueError("need at least two nodes (n >= 1)")
    for j in range(len(x)):
        for m in range(j + 1, len(x)):
            if x[j] == x[m]:
                raise ValueError(f"nodes {j} and {m} coincide: {x[j]!r}")
    if s <= -1 and any(xj == 0 for xj in x):
        raise ZeroDivisionError(f"zero node with negative exponent s={s}")
    return x


def lagrange_terms(s: int, x: Sequence[Number]) -> list:
    """Individual summands ``x_j**s / prod_{l != j}(x_j - x_l)``."""
    x = _check_nodes(s, x)
    terms = []
    for j, xj in enumerate(x):
        denom = xj ** 0
        for l, xl in enumerate(x):
            if l != j:
                denom = denom * (xj - xl)
        terms.append(xj**s / denom)
    return terms


def lagrange_power_sum(s: int, x: Sequence[Number]) -> Number:
    """Direct evaluation of ``f(s, n)``; no closed form involved."""
    return sum(lagrange_terms(s, x))


def lagrange_closed_form(s: int, x: Sequence[Number]) -> Number:
    """Closed form of ``f(s, n)``, choosing the branch from ``s`` and ``n``.

    * ``s <= -1``: ``(-1)**n / prod(x) * g_{|s|-1}(1/x_0, ..., 1/x_n)``
    * ``0 <= s <= n - 1``: ``0``
    * ``s = n + k``, ``k >= 0``: ``g_k(x_0, ..., x_n)``
    """
    x = _check_nodes(s, x)
    n = len(x) - 1
    if s <= -1:
        prod = x[0] ** 0
        for xj in x:
            prod = prod * xj
        inv = [1 / xj for xj in x]
        return (-1) ** n / prod * complete_homogeneous(-s - 1, inv)
    if s < n:
        return 0 * x[0]
    return complete_homogeneous(s - n, x)


def recursion_check(s: int, x: Sequence[Number]) -> Number:
    """Residual of ``f(s, n) = f(s-1, n-1) + f(s-1, n) x_n`` by direct sums."""
    x = list(x)
    if len(x) < 3:
        raise ValueError("recursion needs n >= 2 (at least three nodes)")
    lhs = lagrange_power_sum(s, x)
    rhs = lagrange_power_sum(s - 1, x[:-1]) + lagrange_power_sum(s - 1, x) * x[-1]
    return abs(lhs - rhs)


def as_exact(x: Sequence[Number]) -> list[Fraction]:
    """Convert nodes to exact rationals (floats are converted exactly)."""
    return [Fraction(v) for v in x]
