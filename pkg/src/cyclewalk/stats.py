"""Time-averaged distributions and temporal standard deviations.

Three routes are offered and tagged on every report:

``closed``
    explicit formulas: quantum walks for the sizes where they exist, and the
    classical walks, whose averages are uniform and whose fluctuations vanish
    (except the discrete-time walk on an even cycle, which stays periodic)
``resonance``
    exact long-time averages of the continuous-time quantum walk, obtained by
    collecting the cosine terms of ``R_N(n, t)`` by frequency. Only the
    zero-frequency group survives averaging, and the mean square of an almost
    periodic function is the sum of its squared Fourier coefficients.
``quadrature``
    finite-horizon Simpson (continuous time) or Cesaro (discrete time) averages
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import simpson

from .walks import WalkSpec, distribution_series, hadamard, phase_grid

__all__ = [
    "ROUTES",
    "RESONANCE_TOL",
    "QUADRATURE_STEP",
    "DEFAULT_HORIZON",
    "ResonanceError",
    "ResonanceTerms",
    "AverageReport",
    "SigmaReport",
    "resonance_terms",
    "resonance_spectrum",
    "resonance_mean",
    "resonance_second_moment",
    "resonance_sigma",
    "pbar_resonance",
    "pbar_closed_form",
    "second_moment_closed",
    "sigma_ct_closed",
    "sigma_dt_closed",
    "sigma_asymptote",
    "quadrature_time_average",
    "quadrature_sigma",
    "average_report",
    "sigma_report",
]

ROUTES = ("closed", "resonance", "quadrature")
RESONANCE_TOL = 1e-9
QUADRATURE_STEP = 0.05
DEFAULT_HORIZON = 1e4


class ResonanceError(ArithmeticError):
    """Frequencies are too close to tell resonant from non-resonant terms."""


@dataclass(frozen=True)
class ResonanceTerms:
    """The cosine terms ``weight * cos(frequency * t - phase)`` of ``R_N(n, t)``."""

    frequency: NDArray[np.float64]
    phase: NDArray[np.float64]
    weight: NDArray[np.float64]

    def __len__(self) -> int:
        return len(self.frequency)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return (self.weight * np.cos(np.multiply.outer(t, self.frequency) - self.phase)).sum(axis=-1)


def resonance_terms(N: int, n: int) -> ResonanceTerms:
    xi = phase_grid(N)
    j, k = np.triu_indices(N, 1)
    return ResonanceTerms(
        frequency=np.cos(xi[j]) - np.cos(xi[k]),
        phase=n * (xi[j] - xi[k]),
        weight=np.ones(len(j)),
    )


@lru_cache(maxsize=64)
def _frequency_groups(N: int, tol: float):
    """Cluster the signed frequencies ``+-(cos xi_j - cos xi_k)``.

    Returns the sorted cluster centres and, for each of the ``2 * N(N-1)/2``
    signed terms, the index of its cluster.
    """
    xi = phase_grid(N)
    j, k = np.triu_indices(N, 1)
    # product form keeps exact zeros exact when xi_j + xi_k = 2 pi
    w = -2.0 * np.sin(0.5 * (xi[j] + xi[k])) * np.sin(0.5 * (xi[j] - xi[k]))
    signed = np.concatenate([w, -w])
    order = np.argsort(signed, kind="stable")
    s = signed[order]
    new = np.concatenate([[True], np.diff(s) > tol])
    label_sorted = np.cumsum(new) - 1
    labels = np.empty_like(label_sorted)
    labels[order] = label_sorted
    starts = np.flatnonzero(new)
    ends = np.concatenate([starts[1:], [len(s)]]) - 1
    if np.any(s[ends] - s[starts] > tol):
        raise ResonanceError(f"frequency cluster wider than {tol:g} at N={N}")
    centres = 0.5 * (s[starts] + s[ends])
    if len(centres) > 1:
        gap = np.min(np.diff(centres))
        if gap <= 100 * tol:
            raise ResonanceError(f"distinct frequencies only {gap:.3e} apart at N={N}; tolerance {tol:g} too coarse")
    return centres, labels


def resonance_spectrum(N: int, n: int, tol: float = RESONANCE_TOL):
    """Fourier coefficients of ``t -> R_N(n, t)`` grouped by frequency.

    Returns ``(frequencies, coefficients)`` with
    ``R_N(n, t) = sum_w c_w exp(i w t)``; ``c_{-w}`` is the conjugate of ``c_w``.
    """
    if not 0 <= n < N:
        raise ValueError(f"vertex {n} outside 0..{N - 1}")
    centres, labels = _frequency_groups(N, tol)
    xi = phase_grid(N)
    j, k = np.triu_indices(N, 1)
    ph = n * (xi[j] - xi[k])
    # cos(w t - ph) = (e^{i(w t - ph)} + e^{-i(w t - ph)}) / 2
    c = 0.5 * np.concatenate([np.exp(-1j * ph), np.exp(1j * ph)])
    re = np.bincount(labels, weights=c.real, minlength=len(centres))
    im = np.bincount(labels, weights=c.imag, minlength=len(centres))
    return centres, re + 1j * im


def resonance_mean(N: int, n: int, tol: float = RESONANCE_TOL) -> float:
    """Exact long-time average of ``R_N(n, t)``: the zero-frequency coefficient."""
    freq, coef = resonance_spectrum(N, n, tol)
    return float(np.sum(coef[np.abs(freq) <= tol]).real)


def resonance_second_moment(N: int, n: int, tol: float = RESONANCE_TOL) -> float:
    """Exact long-time average of ``R_N(n, t)**2``."""
    _, coef = resonance_spectrum(N, n, tol)
    return float(np.sum(coef.real**2 + coef.imag**2))


def resonance_sigma(N: int, n: int, tol: float = RESONANCE_TOL) -> float:
    """Exact temporal standard deviation of the continuous-time quantum walk.

    ``sigma = (2 / N**2) * sqrt(<R**2> - <R>**2)``; valid for odd and even N.
    """
    freq, coef = resonance_spectrum(N, n, tol)
    var = float(np.sum((coef.real**2 + coef.imag**2)[np.abs(freq) > tol]))
    return 2.0 / N**2 * math.sqrt(max(var, 0.0))


def pbar_resonance(N: int, tol: float = RESONANCE_TOL) -> NDArray[np.float64]:
    return np.array([1.0 / N + 2.0 * resonance_mean(N, n, tol) / N**2 for n in range(N)])


def _check_odd(N: int):
    if int(N) != N or N < 3 or N % 2 == 0:
        raise ValueError(f"closed form needs an odd cycle size >= 3 (got {N})")


def pbar_closed_form(N: int) -> NDArray[np.float64]:
    """Time-averaged distribution of the continuous-time quantum walk.

    ``1/N + 2 R_N(n) / N**2`` where ``R_N(n)`` is ``floor((N-1)/2)`` on the
    vertices with ``2n = 0 (mod N)`` and ``-1/2`` (odd N) or ``-1`` (even N)
    elsewhere.
    """
    if int(N) != N or N < 3:
        raise ValueError(f"cycle size must be an integer >= 3 (got {N})")
    nbar = (N - 1) // 2
    off = -0.5 if N % 2 else -1.0
    r = np.full(N, off)
    r[0] = nbar
    if N % 2 == 0:
        r[N // 2] = nbar
    return 1.0 / N + 2.0 * r / N**2


def second_moment_closed(N: int, n: int) -> float:
    """Long-time average of ``R_N(n, t)**2`` for odd N."""
    _check_odd(N)
    if n % N == 0:
        return 0.25 * (N - 1) * (5 * N - 9)
    return 0.25 * (N * N - 5 * N + 9)


def sigma_ct_closed(N: int, n: int) -> float:
    _check_odd(N)
    if n % N == 0:
        return 2.0 * math.sqrt(N * N - 3 * N + 2) / N**2
    return math.sqrt(N * N - 5 * N + 8) / N**2


def sigma_dt_closed(N: int, n: int) -> float:
    """Temporal standard deviation of the Hadamard walk on an odd cycle.

    Matches :func:`cyclewalk.walks.dt_coined_distribution` with the default
    shift convention and initial coin ``(1, 0)``.
    """
    _check_odd(N)
    if not 0 <= n < N:
        raise ValueError(f"vertex {n} outside 0..{N - 1}")
    theta = 4.0 * np.pi * np.arange(N) / N
    c = np.cos(theta)
    den = 3.0 + c
    s0 = np.sum(1.0 / den)
    s1 = np.sum(c / den)
    a, b = np.cos((n - 1) * theta), np.cos(n * theta)
    s_plus = np.sum((a + b) / den)
    s_minus = np.sum((a - b) / den)
    th, cc = theta[1:], c[1:]
    s2 = np.sum((7.0 + np.cos(2 * th) + 8.0 * cc * np.cos((n - 0.5) * th) ** 2) / (3.0 + cc) ** 2)
    var = (2 * (s_plus**2 + s_minus**2) + 11 * s0**2 + 10 * s0 * s1 + 3 * s1**2 - s2) / N**4 - 2.0 / N**3
    if var < -1e-15:
        raise ArithmeticError(f"negative variance {var:.3e} at N={N}, n={n}")
    return math.sqrt(max(var, 0.0))


def sigma_asymptote(model: str, n_class: str) -> float:
    """Leading coefficient ``c`` in ``sigma_N(n) = c / N + o(1/N)``."""
    if n_class not in ("origin", "non-origin"):
        raise ValueError(f"n_class must be 'origin' or 'non-origin' (got {n_class!r})")
    if model == "ct-quantum":
        return 2.0 if n_class == "origin" else 1.0
    if model in ("dt-quantum", "dt-coined") and n_class == "origin":
        return math.sqrt(13.0 - 8.0 * math.sqrt(2.0))
    raise ValueError(f"no asymptote known for {model} at {n_class}")


def _horizon_samples(spec: WalkSpec, T: float, step: float):
    if T <= 0:
        raise ValueError(f"horizon must be positive (got {T})")
    if spec.discrete:
        steps = int(round(T))
        if steps < 1:
            raise ValueError("discrete horizon needs at least one step")
        return np.arange(steps, dtype=float)
    intervals = math.ceil(T / step)
    intervals += intervals % 2
    return np.linspace(0.0, T, intervals + 1)


def _time_mean(spec: WalkSpec, values: NDArray, times: NDArray, T: float) -> NDArray:
    if spec.discrete:
        return values.mean(axis=0)
    return simpson(values, x=times, axis=0) / T


def quadrature_time_average(spec: WalkSpec, n: int | None, T: float = DEFAULT_HORIZON, step: float = QUADRATURE_STEP, threads: int = 1):
    """Finite-horizon average of ``P_N(n, t)`` over ``[0, T]`` (or steps ``0..T-1``).

    ``n=None`` averages every vertex and returns a vector.
    """
    times = _horizon_samples(spec, T, step)
    p = distribution_series(spec, times, threads=threads)
    avg = _time_mean(spec, p, times, T)
    return avg if n is None else float(avg[n])


def _reference_pbar(spec: WalkSpec) -> NDArray[np.float64] | None:
    if spec.model == "ct-quantum":
        base = pbar_closed_form(spec.N)
        return np.roll(base, spec.start % spec.N)
    if spec.model in ("ct-classical", "dt-classical"):
        return np.full(spec.N, 1.0 / spec.N)
    return None


def quadrature_sigma(
    spec: WalkSpec,
    n: int | None,
    T: float = DEFAULT_HORIZON,
    pbar=None,
    step: float = QUADRATURE_STEP,
    threads: int = 1,
):
    """Finite-horizon root-mean-square deviation of ``P_N(n, t)`` from ``pbar``.

    Without ``pbar`` the exact average is used where one is known (quantum
    continuous time: closed form; classical: uniform). The coined walk falls
    back on the Cesaro average over the same horizon.
    """
    times = _horizon_samples(spec, T, step)
    p = distribution_series(spec, times, threads=threads)
    if pbar is None:
        pbar = _reference_pbar(spec)
        if pbar is None:
            pbar = _time_mean(spec, p, times, T)
    sq = _time_mean(spec, (p - np.asarray(pbar)) ** 2, times, T)
    sigma = np.sqrt(np.maximum(sq, 0.0))
    return sigma if n is None else float(sigma[n])


@dataclass
class AverageReport:
    N: int
    pbar: NDArray[np.float64]
    route: str
    model: str = "ct-quantum"
    horizon: float | None = None

    def __post_init__(self):
        if abs(float(np.sum(self.pbar)) - 1.0) > 1e-10:
            raise ArithmeticError(f"time-averaged distribution sums to {np.sum(self.pbar)!r}")


@dataclass
class SigmaReport:
    N: int
    sigma: NDArray[np.float64]
    model: str
    route: str
    horizon: float | None = None
    extra: dict = field(default_factory=dict)


def _route_error(kind: str, spec: WalkSpec, route: str) -> ValueError:
    return ValueError(f"route {route!r} is not available for the {kind} of {spec.model} on C_{spec.N}")


def average_report(spec: WalkSpec, route: str, T: float = DEFAULT_HORIZON, threads: int = 1) -> AverageReport:
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")
    N = spec.N
    if route == "quadrature":
        pbar = quadrature_time_average(spec, None, T, threads=threads)
        return AverageReport(N, pbar, route, spec.model, T)
    if route == "resonance":
        if spec.model != "ct-quantum":
            raise _route_error("average", spec, route)
        pbar = np.roll(pbar_resonance(N), spec.start % N)
    elif spec.model == "ct-quantum":
        pbar = np.roll(pbar_closed_form(N), spec.start % N)
    elif spec.model in ("ct-classical", "dt-classical"):
        pbar = np.full(N, 1.0 / N)
    elif N % 2 == 1 and spec.coin == hadamard():
        # Hadamard walk on an odd cycle averages to uniform
        pbar = np.full(N, 1.0 / N)
    else:
        raise _route_error("average", spec, route)
    return AverageReport(N, pbar, route, spec.model)


def sigma_report(spec: WalkSpec, route: str, T: float = DEFAULT_HORIZON, threads: int = 1) -> SigmaReport:
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}; expected one of {ROUTES}")
    N = spec.N
    shift = spec.start % N
    if route == "quadrature":
        return SigmaReport(N, quadrature_sigma(spec, None, T, threads=threads), spec.model, route, T)
    if route == "resonance":
        if spec.model != "ct-quantum":
            raise _route_error("sigma", spec, route)
        sigma = np.array([resonance_sigma(N, n) for n in range(N)])
    elif spec.model == "ct-quantum" and N % 2 == 1:
        sigma = np.array([sigma_ct_closed(N, n) for n in range(N)])
    elif spec.model == "ct-classical" or (spec.model == "dt-classical" and N % 2 == 1):
        sigma = np.zeros(N)
    elif (
        spec.model == "dt-quantum"
        and N % 2 == 1
        and spec.coin == hadamard()
        and np.allclose(spec.initial_coin, (1.0, 0.0))
    ):
        sigma = np.array([sigma_dt_closed(N, n) for n in range(N)])
    else:
        raise _route_error("sigma", spec, route)
    return SigmaReport(N, np.roll(sigma, shift), spec.model, route)
