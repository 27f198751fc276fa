r"""Integer-order Bessel functions and the Bessel route to cycle amplitudes.

:math:`J_k(t)` for all orders ``0..K`` at once is obtained by Miller's
downward recurrence

.. math::
    J_{k-1}(t) = \frac{2k}{t} J_k(t) - J_{k+1}(t)

started well above the turning point ``k ~ t`` and normalized with
:math:`J_0(t) + 2\sum_{k\ge 1} J_{2k}(t) = 1`.

The continuous-time quantum walk on C_N is then the lattice-wrapped version
of the line walk with amplitudes :math:`(-i)^k J_k(t)`, which gives an
independent route to the spectral amplitudes in :mod:`cyclewalk.walks`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

__all__ = [
    "BesselTable",
    "truncation_order",
    "bessel_table",
    "LineDistribution",
    "line_walk_distribution",
    "wrapped_amplitude",
    "wrapped_probability",
    "wrapped_normalization",
    "cross_term_sum",
]

_RESCALE = 1e250


def truncation_order(t: float) -> int:
    """Order beyond which ``|J_k(t)|`` is negligible in double precision."""
    return math.ceil(t) + max(20, math.ceil(10.0 * (t + 1.0) ** (1.0 / 3.0)))


@dataclass(frozen=True)
class BesselTable:
    """``values[k] = J_k(t)`` for ``k = 0..K``."""

    t: float
    K: int
    values: NDArray[np.float64]

    def __call__(self, k: int) -> float:
        """``J_k(t)`` for any integer ``k`` with ``|k| <= K``; negative orders by parity."""
        if abs(k) > self.K:
            raise IndexError(f"order {k} outside table of size {self.K}")
        v = self.values[abs(k)]
        return -v if k < 0 and k % 2 else v

    def signed(self, orders: NDArray[np.int64]) -> NDArray[np.float64]:
        """Vectorized ``J_k(t)`` for integer orders, zero beyond the table."""
        orders = np.asarray(orders)
        a = np.abs(orders)
        inside = a <= self.K
        out = np.zeros(orders.shape)
        out[inside] = self.values[a[inside]]
        flip = (orders < 0) & (a % 2 == 1)
        out[flip] = -out[flip]
        return out

    def square_sum(self) -> float:
        """Truncated ``sum_{|k| <= K} J_k(t)**2`` (should equal 1)."""
        v = self.values
        return float(v[0] ** 2 + 2.0 * np.sum(v[1:] ** 2))


def bessel_table(t: float, K: int) -> BesselTable:
    """Tabulate ``J_0(t) .. J_K(t)`` by downward recurrence.

    Parameters
    ----------
    t : float
        Nonnegative argument.
    K : int
        Largest order wanted (>= 1).

    Returns
    -------
    BesselTable
    """
    if K < 1:
        raise ValueError(f"K must be >= 1 (got {K})")
    if t < 0:
        raise ValueError(f"argument must be nonnegative (got {t})")
    K = int(K)
    values = np.zeros(K + 1)
    if t == 0:
        values[0] = 1.0
        return BesselTable(0.0, K, values)

    start = 2 * max(K, truncation_order(t))
    start += start % 2
    f = np.zeros(start + 2)
    f[start] = 1e-300
    for k in range(start, 0, -1):
        f[k - 1] = (2.0 * k / t) * f[k] - f[k + 1]
        if abs(f[k - 1]) > _RESCALE:
            f[k - 1 :] /= _RESCALE
    norm = f[0] + 2.0 * math.fsum(f[2:start + 1:2])
    values[:] = f[: K + 1] / norm
    return BesselTable(float(t), K, values)


@dataclass(frozen=True)
class LineDistribution:
    """``p[i]`` is the probability of site ``sites[i]`` on the integer line."""

    sites: NDArray[np.int64]
    p: NDArray[np.float64]
    a: float
    t: float

    @property
    def mass(self) -> float:
        return float(np.sum(self.p))

    def __getitem__(self, n: int) -> float:
        M = (len(self.sites) - 1) // 2
        return float(self.p[n + M])


def line_walk_distribution(t: float, a: float, M: int) -> LineDistribution:
    """Squared-Bessel distribution ``P(n, t) = J_n(a t)**2`` for ``|n| <= M``.

    This is the continuum-time limit of a coined walk on the line whose coin
    has upper-left entry ``a``; ``a = 1/sqrt(2)`` is the Hadamard walk.
    """
    if not 0 < a <= 1:
        raise ValueError(f"coin parameter must lie in (0, 1] (got {a})")
    if M < 1:
        raise ValueError(f"window must be >= 1 (got {M})")
    table = bessel_table(a * t, M)
    sites = np.arange(-M, M + 1)
    p = table.signed(sites) ** 2
    dist = LineDistribution(sites, p, float(a), float(t))
    if dist.mass < 1.0 - 1e-10:
        warnings.warn(
            f"window |n| <= {M} holds only {dist.mass:.12f} of the mass at a*t = {a * t}",
            RuntimeWarning,
            stacklevel=2,
        )
    return dist


def _wrapped_orders(N: int, n: int, K: int) -> NDArray[np.int64]:
    # all k with k = n (mod N) and |k| <= K
    lo = -((K + n) // N)
    hi = (K - n) // N
    return np.arange(lo, hi + 1) * N + n


def _table_for(t: float) -> BesselTable:
    if t < 0:
        raise ValueError(f"time must be nonnegative (got {t})")
    return bessel_table(t, truncation_order(t))


def wrapped_amplitude(N: int, n: int, t: float) -> complex:
    """``sum_{k = n mod N} (-i)**k J_k(t)``, truncated at ``|k| <= K(t)``."""
    if not 0 <= n < N:
        raise ValueError(f"vertex {n} outside 0..{N - 1}")
    table = _table_for(t)
    k = _wrapped_orders(N, n, table.K)
    phase = (-1j) ** (k % 4)
    return complex(np.sum(phase * table.signed(k)))


def _probability_from_table(N: int, n: int, table: BesselTable, off_diagonal_only: bool = False) -> float:
    k = _wrapped_orders(N, n, table.K)
    j = (k - n) // N
    J = table.signed(k)
    weight = np.cos(0.5 * np.pi * np.subtract.outer(j, j) * N)
    # cos((pi/2) m) is exactly 0 or +-1; round off the 6e-17 residues
    weight = np.round(weight)
    if off_diagonal_only:
        np.fill_diagonal(weight, 0.0)
    return float(J @ weight @ J)


def wrapped_probability(N: int, n: int, t: float) -> float:
    """Double sum ``sum_{j,k} cos(pi (j - k) N / 2) J_{jN+n}(t) J_{kN+n}(t)``."""
    if not 0 <= n < N:
        raise ValueError(f"vertex {n} outside 0..{N - 1}")
    return _probability_from_table(N, n, _table_for(t))


def wrapped_normalization(N: int, t: float) -> float:
    """``sum_n sum_k J_{kN+n}(t)**2``; every order appears once, so this is 1."""
    table = _table_for(t)
    return float(sum(np.sum(table.signed(_wrapped_orders(N, n, table.K)) ** 2) for n in range(N)))


def cross_term_sum(N: int, t: float) -> float:
    """Off-diagonal part of :func:`wrapped_probability` summed over all vertices.

    Vanishes identically: the diagonal parts already sum to one.
    """
    table = _table_for(t)
    return float(sum(_probability_from_table(N, n, table, off_diagonal_only=True) for n in range(N)))
