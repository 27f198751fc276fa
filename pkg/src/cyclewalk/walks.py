"""Walk models on the cycle graph C_N.

Four models are supported, all started from a point mass at a vertex:

- ``ct-quantum``: continuous-time quantum walk ``U(t) = exp(-i t A / 2)``
- ``ct-classical``: continuous-time simple random walk (unit total jump rate)
- ``dt-classical``: discrete-time simple random walk
- ``dt-quantum``: discrete-time coined walk with a 2x2 coin (alias ``dt-coined``)

Snapshots are computed from the spectral (Fourier) representation of the
circulant evolution, so every evaluation is exact up to round-off at any time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "MODELS",
    "NumericalInvariantError",
    "AmplitudeVector",
    "ProbabilityDistribution",
    "CoinMatrix",
    "CoinedState",
    "WalkSpec",
    "hadamard",
    "phase_grid",
    "ct_quantum_amplitude",
    "ct_quantum_distribution",
    "r_oscillation",
    "r_reference_closed",
    "ct_classical_distribution",
    "ct_classical_deviation",
    "dt_classical_distribution",
    "dt_coined_step",
    "dt_coined_distribution",
    "distribution",
    "distribution_series",
]

MODELS = ("ct-quantum", "ct-classical", "dt-classical", "dt-quantum")
_ALIASES = {"dt-coined": "dt-quantum"}

NORM_TOL = 1e-12
CLAMP_TOL = 1e-14


class NumericalInvariantError(ArithmeticError):
    """A computed quantity violates an invariant beyond its tolerance."""


def canonical_model(model: str) -> str:
    name = _ALIASES.get(model, model)
    if name not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS + tuple(_ALIASES)}")
    return name


def _check_size(N: int) -> int:
    if int(N) != N or N < 3:
        raise ValueError(f"cycle size must be an integer >= 3 (got {N})")
    return int(N)


@dataclass(frozen=True)
class AmplitudeVector:
    psi: NDArray[np.complex128]
    t: float

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.psi, dtype=dtype)

    def __len__(self) -> int:
        return len(self.psi)

    @property
    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.psi) ** 2)))


@dataclass(frozen=True)
class ProbabilityDistribution:
    """Distribution over the vertices of C_N at time ``t``.

    ``renormalized`` is set when round-off pushed the total away from one by
    more than ``NORM_TOL`` and the vector had to be rescaled.
    """

    p: NDArray[np.float64]
    t: float
    renormalized: bool = False

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.p, dtype=dtype)

    def __len__(self) -> int:
        return len(self.p)

    def __getitem__(self, n):
        return self.p[n]


def _finalize(p: NDArray[np.float64], t: float) -> ProbabilityDistribution:
    p = np.array(p, dtype=float)
    if np.any(p < -CLAMP_TOL):
        raise NumericalInvariantError(f"negative probability {p.min():.3e} at t={t}")
    p[p < 0] = 0.0
    total = p.sum()
    if abs(total - 1.0) > NORM_TOL:
        return ProbabilityDistribution(p / total, t, renormalized=True)
    return ProbabilityDistribution(p, t)


@dataclass(frozen=True)
class CoinMatrix:
    """2x2 coin ``[[a, b], [c, d]]``; must be unitary."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        m = self.matrix
        if not np.allclose(m.conj().T @ m, np.eye(2), rtol=0.0, atol=1e-12):
            raise ValueError(f"coin is not unitary: {m.tolist()}")

    @property
    def matrix(self) -> NDArray[np.complex128]:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)


def hadamard() -> CoinMatrix:
    s = 1.0 / math.sqrt(2.0)
    return CoinMatrix(s, s, s, -s)


@dataclass(frozen=True)
class CoinedState:
    """Position x coin amplitudes, ``chi[n, c]``, after ``t`` steps."""

    chi: NDArray[np.complex128]
    t: int = 0

    @classmethod
    def localized(cls, N: int, initial_coin: ArrayLike = (1.0, 0.0), start: int = 0) -> "CoinedState":
        N = _check_size(N)
        coin = np.asarray(initial_coin, dtype=np.complex128)
        if coin.shape != (2,) or abs(np.vdot(coin, coin).real - 1.0) > NORM_TOL:
            raise ValueError(f"initial coin must be a unit 2-vector (got {initial_coin!r})")
        chi = np.zeros((N, 2), dtype=np.complex128)
        chi[start % N] = coin
        return cls(chi, 0)

    @property
    def probabilities(self) -> NDArray[np.float64]:
        return np.sum(np.abs(self.chi) ** 2, axis=1)


@dataclass(frozen=True)
class WalkSpec:
    """Which walk to run and on which cycle.

    ``coin`` and ``initial_coin`` only matter for the coined model.
    """

    model: str
    N: int
    coin: CoinMatrix = field(default_factory=hadamard)
    initial_coin: tuple = (1.0, 0.0)
    start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "model", canonical_model(self.model))
        object.__setattr__(self, "N", _check_size(self.N))
        coin = np.asarray(self.initial_coin, dtype=np.complex128)
        if coin.shape != (2,) or abs(np.vdot(coin, coin).real - 1.0) > NORM_TOL:
            raise ValueError(f"initial coin must be a unit 2-vector (got {self.initial_coin!r})")

    @property
    def discrete(self) -> bool:
        return self.model.startswith("dt-")

    @property
    def quantum(self) -> bool:
        return self.model.endswith("quantum")


def phase_grid(N: int) -> NDArray[np.float64]:
    """Return the Fourier angles ``2*pi*j/N`` for ``j = 0..N-1``."""
    N = _check_size(N)
    return 2.0 * np.pi * np.arange(N) / N


def _inverse_dft(coeffs: NDArray) -> NDArray:
    # (1/N) sum_j c_j exp(+i n xi_j), along the last axis.
    return np.fft.ifft(coeffs, axis=-1)


def _relabel(values: NDArray, start: int) -> NDArray:
    return np.roll(values, start % values.shape[-1], axis=-1) if start else values


def ct_quantum_amplitude(N: int, t: float, start: int = 0) -> AmplitudeVector:
    """Amplitudes of the continuous-time quantum walk.

    ``psi[n] = (1/N) sum_j exp(-i (t cos xi_j - n xi_j))`` for a walk started
    at vertex 0; other start vertices are handled by cyclic relabeling.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative (got {t})")
    xi = phase_grid(N)
    psi = _inverse_dft(np.exp(-1j * t * np.cos(xi)))
    return AmplitudeVector(_relabel(psi, start), float(t))


def ct_quantum_distribution(N: int, t: float, start: int = 0) -> ProbabilityDistribution:
    psi = ct_quantum_amplitude(N, t, start).psi
    return _finalize(np.abs(psi) ** 2, float(t))


def r_oscillation(N: int, n: int, t: ArrayLike) -> NDArray[np.float64] | float:
    """Oscillating part ``R_N(n, t)`` of the quantum distribution.

    Sum over pairs ``0 <= j < k < N`` of
    ``cos(t (cos xi_j - cos xi_k) - n (xi_j - xi_k))``, so that
    ``P_N(n, t) = 1/N + 2 R_N(n, t) / N**2``. Accepts scalar or array ``t``.
    """
    xi = phase_grid(N)
    if not 0 <= n < N:
        raise ValueError(f"vertex {n} outside 0..{N - 1}")
    j, k = np.triu_indices(N, 1)
    freq = np.cos(xi[j]) - np.cos(xi[k])
    phase = n * (xi[j] - xi[k])
    tt = np.asarray(t, dtype=float)
    out = np.cos(np.multiply.outer(tt, freq) - phase).sum(axis=-1)
    return float(out) if out.ndim == 0 else out


_R_CLOSED = {
    3: (
        lambda t: 2 * np.cos(1.5 * t) + 1,
        lambda t: -np.cos(1.5 * t) - 0.5,
    ),
    4: (
        lambda t: np.cos(2 * t) + 4 * np.cos(t) + 1,
        lambda t: -np.cos(2 * t) - 1,
        lambda t: np.cos(2 * t) - 4 * np.cos(t) + 1,
    ),
    6: (
        lambda t: np.cos(2 * t) + 4 * np.cos(1.5 * t) + 4 * np.cos(t) + 4 * np.cos(0.5 * t) + 2,
        lambda t: -np.cos(2 * t) - 2 * np.cos(1.5 * t) - np.cos(t) + 2 * np.cos(0.5 * t) - 1,
        lambda t: np.cos(2 * t) - 2 * np.cos(1.5 * t) + np.cos(t) - 2 * np.cos(0.5 * t) - 1,
        lambda t: -np.cos(2 * t) + 4 * np.cos(1.5 * t) - 4 * np.cos(t) - 4 * np.cos(0.5 * t) + 2,
    ),
}


def r_reference_closed(N: int, n: int, t: ArrayLike):
    """Hand-expanded ``R_N(n, t)`` for N in {3, 4, 6}; used as a regression oracle."""
    if N not in _R_CLOSED:
        raise ValueError(f"closed forms are only tabulated for N in (3, 4, 6), got {N}")
    if not 0 <= n < N:
        raise ValueError(f"vertex {n} outside 0..{N - 1}")
    forms = _R_CLOSED[N]
    # tabulated for n <= N/2, the rest by mirror symmetry
    return forms[min(n, N - n)](np.asarray(t, dtype=float))


def ct_classical_deviation(N: int, t: ArrayLike) -> NDArray[np.float64]:
    """``P_N(n, t) - 1/N`` for the continuous-time classical walk from vertex 0.

    Computed from the nonzero Fourier modes only, so the result keeps full
    relative precision long after the walk is indistinguishable from uniform.
    Vectorized over ``t`` (leading axes) with vertices on the last axis.
    """
    xi = phase_grid(N)
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0):
        raise ValueError("time must be nonnegative")
    modes = np.exp(np.multiply.outer(tt, np.cos(xi) - 1.0))
    modes[..., 0] = 0.0
    return _inverse_dft(modes).real


def ct_classical_distribution(N: int, t: float, start: int = 0) -> ProbabilityDistribution:
    """``P_N(n, t) = (1/N) sum_j cos(xi_j n) exp(t (cos xi_j - 1))``."""
    p = 1.0 / N + ct_classical_deviation(N, t)
    return _finalize(_relabel(p, start), float(t))


def _check_steps(t) -> int:
    if int(t) != t or t < 0:
        raise ValueError(f"discrete time must be a nonnegative integer (got {t})")
    return int(t)


def dt_classical_distribution(N: int, t: int, start: int = 0) -> ProbabilityDistribution:
    """``P_N(n, t) = (1/N) sum_j cos(xi_j n) (cos xi_j)**t``."""
    t = _check_steps(t)
    xi = phase_grid(N)
    p = _inverse_dft(np.cos(xi) ** t).real
    return _finalize(_relabel(p, start), float(t))


def dt_coined_step(state: CoinedState, coin: CoinMatrix) -> CoinedState:
    """One coin toss followed by the conditional shift.

    Coin component 0 moves to ``n - 1`` and component 1 to ``n + 1`` (mod N).
    """
    if not isinstance(coin, CoinMatrix):
        coin = CoinMatrix(*np.asarray(coin, dtype=np.complex128).ravel())
    tossed = state.chi @ coin.matrix.T
    shifted = np.empty_like(tossed)
    shifted[:, 0] = np.roll(tossed[:, 0], -1)
    shifted[:, 1] = np.roll(tossed[:, 1], 1)
    return CoinedState(shifted, state.t + 1)


def dt_coined_distribution(
    N: int,
    t: int,
    coin: CoinMatrix | None = None,
    initial_coin: ArrayLike = (1.0, 0.0),
    start: int = 0,
) -> ProbabilityDistribution:
    t = _check_steps(t)
    coin = coin or hadamard()
    state = CoinedState.localized(N, initial_coin, start)
    for _ in range(t):
        state = dt_coined_step(state, coin)
    return _finalize(state.probabilities, float(t))


def distribution(spec: WalkSpec, t: float) -> ProbabilityDistribution:
    """Snapshot of ``spec`` at time ``t`` (number of steps for discrete models)."""
    if spec.model == "ct-quantum":
        return ct_quantum_distribution(spec.N, t, spec.start)
    if spec.model == "ct-classical":
        return ct_classical_distribution(spec.N, t, spec.start)
    if spec.model == "dt-classical":
        return dt_classical_distribution(spec.N, t, spec.start)
    return dt_coined_distribution(spec.N, t, spec.coin, spec.initial_coin, spec.start)


def _series_chunk(spec: WalkSpec, times: NDArray) -> NDArray[np.float64]:
    xi = phase_grid(spec.N)
    if spec.model == "ct-quantum":
        psi = _inverse_dft(np.exp(-1j * np.multiply.outer(times, np.cos(xi))))
        p = np.abs(psi) ** 2
    elif spec.model == "ct-classical":
        p = 1.0 / spec.N + ct_classical_deviation(spec.N, times)
    else:
        p = _inverse_dft(np.power.outer(np.cos(xi), times.astype(int)).T).real
    return _relabel(p, spec.start)


def distribution_series(spec: WalkSpec, times: ArrayLike, chunk: int = 4096, threads: int = 1) -> NDArray[np.float64]:
    """Distributions at every time in ``times``, shape ``(len(times), N)``.

    For the coined model ``times`` must be the consecutive steps ``0..T-1``
    (or any nonnegative integers; the walk is simulated up to the largest).
    Rows are not renormalized; callers that need validated snapshots should
    use :func:`distribution`.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise ValueError("times must be one-dimensional")
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    if spec.discrete and np.any(times != np.round(times)):
        raise ValueError("discrete models need integer times")

    if spec.model == "dt-quantum":
        steps = times.astype(int)
        last = int(steps.max()) if len(steps) else -1
        history = np.empty((last + 1, spec.N))
        state = CoinedState.localized(spec.N, spec.initial_coin, spec.start)
        for s in range(last + 1):
            history[s] = state.probabilities
            state = dt_coined_step(state, spec.coin)
        return history[steps]

    pieces = [times[i : i + chunk] for i in range(0, len(times), chunk)]
    if threads > 1 and len(pieces) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(lambda ts: _series_chunk(spec, ts), pieces))
    else:
        blocks = [_series_chunk(spec, ts) for ts in pieces]
    if not blocks:
        return np.empty((0, spec.N))
    return np.concatenate(blocks, axis=0)
