"""Total variation mixing, instantaneous uniform mixing and the diffusive limit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate
from scipy.optimize import brentq

from .walks import WalkSpec, ct_classical_deviation, distribution_series

__all__ = [
    "MixingReport",
    "tv_distance",
    "distance_to_uniform",
    "d_curve",
    "golden_section",
    "iump_scan",
    "wrapped_normal_density",
    "d_infinity",
    "scaling_comparison",
]

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def tv_distance(P: ArrayLike, Q: ArrayLike) -> float:
    """Total variation distance ``(1/2) sum_n |P(n) - Q(n)|``."""
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if P.shape != Q.shape:
        raise ValueError(f"length mismatch: {P.shape} vs {Q.shape}")
    return 0.5 * float(np.sum(np.abs(P - Q)))


def distance_to_uniform(spec: WalkSpec, times: ArrayLike, threads: int = 1) -> NDArray[np.float64]:
    """``d_N(t)``: total variation distance to the uniform law at each time."""
    times = np.asarray(times, dtype=float)
    if spec.model == "ct-classical":
        # deviation from uniform directly, avoids cancellation as d -> 0
        dev = ct_classical_deviation(spec.N, times)
    else:
        dev = distribution_series(spec, times, threads=threads) - 1.0 / spec.N
    return 0.5 * np.sum(np.abs(dev), axis=-1)


def d_curve(spec: WalkSpec, times: ArrayLike, threads: int = 1) -> NDArray[np.float64]:
    return distance_to_uniform(spec, times, threads)


def golden_section(f, a: float, b: float, width: float = 1e-10) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > width:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    candidates = [(fc, c), (fd, d)]
    x = 0.5 * (a + b)
    candidates.append((f(x), x))
    fx, x = min(candidates)
    return x, fx


@dataclass
class MixingReport:
    N: int
    t_grid: NDArray[np.float64]
    d_values: NDArray[np.float64]
    iump_found: bool
    iump_times: list = field(default_factory=list)
    minima: list = field(default_factory=list)  # every refined local minimum as (t, d)
    eps: float = 1e-8

    @property
    def min_d(self) -> float:
        """Smallest distance seen on the grid or after refinement (``t > 0``)."""
        vals = [d for _, d in self.minima]
        vals.extend(self.d_values[1:].tolist())
        return min(vals)


def iump_scan(
    N: int,
    t_max: float,
    eps: float = 1e-8,
    step: float = 0.01,
    width: float = 1e-10,
    model: str = "ct-quantum",
    threads: int = 1,
) -> MixingReport:
    """Search ``(0, t_max]`` for times at which the walk is exactly uniform.

    ``d_N`` is sampled every ``step``; each interior local minimum is refined by
    golden-section search to ``width``, and refined minima with ``d < eps``
    are reported as uniform-mixing times.
    """
    if t_max <= 0 or eps <= 0:
        raise ValueError("t_max and eps must be positive")
    spec = WalkSpec(model, N)
    count = int(math.floor(t_max / step + 1e-9))
    grid = step * np.arange(count + 1)
    d = distance_to_uniform(spec, grid, threads)

    def at(t: float) -> float:
        return float(distance_to_uniform(spec, [t])[0])

    minima = []
    for i in range(1, len(grid) - 1):
        if d[i] <= d[i - 1] and d[i] <= d[i + 1]:
            minima.append(golden_section(at, grid[i - 1], grid[i + 1], width))
    hits = [(t, v) for t, v in minima if v < eps]
    return MixingReport(N, grid, d, bool(hits), hits, minima, eps)


def wrapped_normal_density(x: ArrayLike, t: float) -> NDArray[np.float64] | float:
    """Density of ``sqrt(t) Z mod 1`` for standard normal ``Z``."""
    if t <= 0:
        raise ValueError(f"variance must be positive (got {t})")
    x = np.asarray(x, dtype=float)
    # images out to 10 standard deviations; tail mass below 1e-22
    M = math.ceil(10.0 * math.sqrt(t)) + 2
    m = np.arange(-M, M + 1)
    terms = np.exp(-np.add.outer(x, m) ** 2 / (2.0 * t))
    out = terms.sum(axis=-1) / math.sqrt(2.0 * math.pi * t)
    return float(out) if out.ndim == 0 else out


def d_infinity(t: float, tol: float = 1e-8) -> float:
    """``(1/2) int_0^1 |f_t(x) - 1| dx``, the limiting distance to uniform."""
    if t <= 0:
        raise ValueError(f"t must be positive (got {t})")
    # f_t is symmetric about 1/2 and decreasing on [0, 1/2]; split at the crossing
    g = lambda x: wrapped_normal_density(x, t) - 1.0  # noqa: E731
    lo, hi = g(0.0), g(0.5)
    pts = []
    if lo > 0 > hi:
        pts.append(brentq(g, 0.0, 0.5, xtol=1e-15))
    val, _ = integrate.quad(lambda x: abs(g(x)), 0.0, 0.5, points=pts or None, epsabs=tol * 1e-2, epsrel=1e-12, limit=500)
    return float(val)


def scaling_comparison(N: int, t: float) -> tuple[float, float]:
    """``(d_N(t N^2), d_inf(t))`` for the continuous-time classical walk."""
    if t <= 0:
        raise ValueError(f"t must be positive (got {t})")
    dN = 0.5 * float(np.sum(np.abs(ct_classical_deviation(N, t * N * N))))
    return dN, d_infinity(t)
