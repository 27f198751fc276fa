import math

import numpy as np
import pytest

from cyclewalk.stats import (
    AverageReport,
    ResonanceError,
    average_report,
    pbar_closed_form,
    pbar_resonance,
    quadrature_sigma,
    quadrature_time_average,
    resonance_mean,
    resonance_second_moment,
    resonance_sigma,
    resonance_spectrum,
    resonance_terms,
    second_moment_closed,
    sigma_asymptote,
    sigma_ct_closed,
    sigma_dt_closed,
    sigma_report,
)
from cyclewalk.walks import WalkSpec, r_oscillation

R2, R5 = math.sqrt(2), math.sqrt(5)

PAPER_SIGMA = {
    3: [2 * R2 / 9, R2 / 9, R2 / 9],
    4: [math.sqrt(34) / 16, R2 / 16, math.sqrt(34) / 16, R2 / 16],
    5: [4 * math.sqrt(3) / 25] + [2 * R2 / 25] * 4,
    6: [7 * R2 / 36, R5 / 18, R5 / 18, 7 * R2 / 36, R5 / 18, R5 / 18],
}


def transient_energy(N, discrete):
    """Exact sum/integral over all times of (P(n, t) - 1/N)**2 for the classical walks."""
    xi = 2 * np.pi * np.arange(1, N) / N
    c = np.cos(xi)
    kernel = 1 / (1 - np.outer(c, c)) if discrete else 1 / ((1 - c)[:, None] + (1 - c)[None, :])
    return np.array([np.cos(xi * n) @ kernel @ np.cos(xi * n) / N**2 for n in range(N)])


# resonance engine

def test_terms_reproduce_oscillation():
    terms = resonance_terms(7, 3)
    ts = np.linspace(0, 20, 41)
    assert len(terms) == 21
    assert np.all(np.abs(terms.frequency) <= 2)
    assert np.allclose(terms(ts), r_oscillation(7, 3, ts), atol=1e-12)


def test_spectrum_reconstructs_oscillation():
    freq, coef = resonance_spectrum(8, 3)
    ts = np.linspace(0, 30, 31)
    rebuilt = (coef * np.exp(1j * np.multiply.outer(ts, freq))).sum(axis=1)
    assert np.max(np.abs(rebuilt.imag)) < 1e-12
    assert np.allclose(rebuilt.real, r_oscillation(8, 3, ts), atol=1e-12)


@pytest.mark.parametrize("N", [3, 5, 7, 9, 21])
def test_resonance_mean_odd(N):
    assert resonance_mean(N, 0) == pytest.approx((N - 1) / 2, abs=1e-12)
    for n in range(1, N):
        assert resonance_mean(N, n) == pytest.approx(-0.5, abs=1e-12)


def test_resonance_mean_four():
    assert [round(resonance_mean(4, n), 12) for n in range(4)] == [1, -1, 1, -1]


def test_pbar_closed_examples():
    assert np.allclose(pbar_closed_form(3), [5 / 9, 2 / 9, 2 / 9], atol=1e-15)
    assert np.allclose(pbar_closed_form(4), [3 / 8, 1 / 8, 3 / 8, 1 / 8], atol=1e-15)
    assert np.allclose(pbar_closed_form(5), [9 / 25] + [4 / 25] * 4, atol=1e-15)
    assert np.allclose(pbar_resonance(5), [9 / 25] + [4 / 25] * 4, atol=1e-12)


def test_pbar_routes_agree():
    for N in range(3, 41):
        assert np.max(np.abs(pbar_resonance(N) - pbar_closed_form(N))) <= 1e-12
        assert abs(pbar_closed_form(N).sum() - 1) < 1e-14


def test_pbar_never_uniform():
    for N in range(3, 30):
        assert np.ptp(pbar_closed_form(N)) > 0


@pytest.mark.parametrize("N", [3, 4, 5, 6])
def test_resonance_sigma_table(N):
    got = [resonance_sigma(N, n) for n in range(N)]
    assert np.max(np.abs(np.array(got) - PAPER_SIGMA[N])) <= 1e-12


def test_second_moment_examples():
    assert second_moment_closed(3, 0) == 3
    assert second_moment_closed(3, 1) == 0.75
    assert second_moment_closed(7, 2) == 23 / 4
    assert resonance_second_moment(7, 2) == pytest.approx(23 / 4, abs=1e-10)
    with pytest.raises(ValueError):
        second_moment_closed(4, 0)


def test_second_moment_identity():
    for N in range(3, 42, 2):
        for n in range(N):
            assert abs(resonance_second_moment(N, n) - second_moment_closed(N, n)) <= 1e-10


def test_sigma_ct_closed_examples():
    assert np.allclose([sigma_ct_closed(3, n) for n in range(3)], PAPER_SIGMA[3], atol=1e-15)
    assert sigma_ct_closed(5, 0) == pytest.approx(4 * math.sqrt(3) / 25, abs=1e-15)
    assert 1001 * sigma_ct_closed(1001, 0) == pytest.approx(2, abs=3e-3)
    with pytest.raises(ValueError):
        sigma_ct_closed(6, 0)


def test_sigma_ct_ordering():
    for N in range(3, 202, 2):
        origin = sigma_ct_closed(N, 0)
        assert all(origin > sigma_ct_closed(N, n) for n in range(1, N))


def test_resonance_matches_closed_sigma():
    for N in range(3, 42, 2):
        for n in range(N):
            assert abs(resonance_sigma(N, n) - sigma_ct_closed(N, n)) <= 1e-10


def test_ct_slopes_approach_limits():
    sizes = list(range(101, 1002, 100))
    origin = [N * sigma_ct_closed(N, 0) for N in sizes]
    other = [N * sigma_ct_closed(N, 1) for N in sizes]
    assert np.all(np.diff(origin) > 0) and np.all(np.diff(other) > 0)
    assert abs(origin[-1] - 2) <= 1e-2 and abs(other[-1] - 1) <= 1e-2


def test_sigma_dt_closed_examples():
    assert sigma_dt_closed(3, 0) == pytest.approx(2 * math.sqrt(46) / 45, abs=1e-15)
    assert sigma_dt_closed(3, 1) == pytest.approx(2 * math.sqrt(46) / 45, abs=1e-15)
    assert sigma_dt_closed(3, 2) == pytest.approx(2 / 9, abs=1e-15)
    assert 1001 * sigma_dt_closed(1001, 0) == pytest.approx(math.sqrt(13 - 8 * R2), abs=2e-2)
    with pytest.raises(ValueError):
        sigma_dt_closed(4, 0)


@pytest.mark.parametrize("N", [3, 5, 7])
def test_sigma_dt_closed_matches_simulation(N):
    sim = quadrature_sigma(WalkSpec("dt-quantum", N), None, T=40_000)
    closed = np.array([sigma_dt_closed(N, n) for n in range(N)])
    assert np.max(np.abs(sim - closed)) < 2e-3


def test_asymptotes():
    assert sigma_asymptote("ct-quantum", "origin") == 2
    assert sigma_asymptote("ct-quantum", "non-origin") == 1
    assert sigma_asymptote("dt-quantum", "origin") == pytest.approx(1.2985728708914408, abs=1e-15)
    assert sigma_asymptote("ct-quantum", "origin") > sigma_asymptote("dt-quantum", "origin")
    with pytest.raises(ValueError):
        sigma_asymptote("dt-quantum", "non-origin")


def test_resonance_guard_trips_on_near_coincidence():
    with pytest.raises(ResonanceError):
        resonance_mean(103, 0)


# quadrature

def test_quadrature_average_examples():
    assert quadrature_time_average(WalkSpec("ct-quantum", 3), 0, 1e4) == pytest.approx(5 / 9, abs=1e-2)
    assert quadrature_time_average(WalkSpec("ct-quantum", 4), 1, 1e4) == pytest.approx(1 / 8, abs=1e-2)
    for N in (3, 6, 9):
        avg = quadrature_time_average(WalkSpec("ct-classical", N), None, 1e4)
        assert np.max(np.abs(avg - 1 / N)) < 1e-3


def test_quadrature_average_close_to_closed_form():
    for N in (3, 4, 5, 8):
        avg = quadrature_time_average(WalkSpec("ct-quantum", N), None, 1e4)
        assert np.max(np.abs(avg - pbar_closed_form(N))) <= 5e-3


def test_discrete_average_is_cesaro_mean():
    spec = WalkSpec("dt-classical", 5)
    from cyclewalk.walks import dt_classical_distribution

    direct = np.mean([dt_classical_distribution(5, t).p for t in range(37)], axis=0)
    assert np.allclose(quadrature_time_average(spec, None, 37), direct, atol=1e-15)


def test_quadrature_sigma_examples():
    assert quadrature_sigma(WalkSpec("ct-quantum", 3), 0, 1e4) == pytest.approx(2 * R2 / 9, abs=1e-2)
    assert quadrature_sigma(WalkSpec("ct-quantum", 6), 1, 1e4) == pytest.approx(R5 / 18, abs=1e-2)


def test_quadrature_sigma_matches_resonance():
    for N in (3, 4, 5, 7):
        sig = quadrature_sigma(WalkSpec("ct-quantum", N), None, 1e4)
        exact = np.array([resonance_sigma(N, n) for n in range(N)])
        assert np.max(np.abs(sig - exact)) <= 1e-2


@pytest.mark.parametrize("N", [3, 5, 8, 12])
def test_ct_classical_sigma_decays_like_root_horizon(N):
    # the fluctuation vanishes in the limit: T * sigma_T**2 tends to the transient energy
    energy = transient_energy(N, discrete=False)
    for T in (1e3, 1e4):
        sig = quadrature_sigma(WalkSpec("ct-classical", N), None, T)
        assert np.max(np.abs(T * sig**2 - energy)) < 1e-6


@pytest.mark.parametrize("N", [3, 5, 9, 11])
def test_dt_classical_sigma_decays_like_root_horizon_odd(N):
    energy = transient_energy(N, discrete=True)
    sig = quadrature_sigma(WalkSpec("dt-classical", N), None, 1000)
    assert np.max(np.abs(1000 * sig**2 - energy)) < 1e-12


@pytest.mark.parametrize("N", [4, 6, 10])
def test_dt_classical_even_cycle_keeps_oscillating(N):
    # periodic chain: P(n, t) -> (1 + (-1)**(n + t)) / N, so sigma -> 1/N
    sig = quadrature_sigma(WalkSpec("dt-classical", N), None, 20_000)
    assert np.allclose(sig, 1 / N, atol=2e-3)


# reports

def test_average_report_routes():
    spec = WalkSpec("ct-quantum", 4)
    closed = average_report(spec, "closed")
    res = average_report(spec, "resonance")
    assert closed.route == "closed" and res.route == "resonance"
    assert np.allclose(closed.pbar, res.pbar, atol=1e-12)
    assert average_report(WalkSpec("dt-classical", 6), "closed").pbar.tolist() == [1 / 6] * 6
    with pytest.raises(ValueError):
        average_report(WalkSpec("ct-classical", 5), "resonance")
    with pytest.raises(ValueError):
        average_report(spec, "bogus")
    with pytest.raises(ArithmeticError):
        AverageReport(3, np.array([0.5, 0.5, 0.5]), "closed")


def test_sigma_report_routes():
    rep = sigma_report(WalkSpec("ct-quantum", 5), "closed")
    assert np.allclose(rep.sigma, PAPER_SIGMA[5], atol=1e-15)
    rep = sigma_report(WalkSpec("dt-quantum", 3), "closed")
    assert np.allclose(rep.sigma, [2 * math.sqrt(46) / 45] * 2 + [2 / 9], atol=1e-15)
    assert np.all(sigma_report(WalkSpec("ct-classical", 8), "closed").sigma == 0)
    for spec in (WalkSpec("ct-quantum", 6), WalkSpec("dt-classical", 6), WalkSpec("dt-quantum", 4)):
        with pytest.raises(ValueError):
            sigma_report(spec, "closed")
    with pytest.raises(ValueError):
        sigma_report(WalkSpec("dt-quantum", 3, initial_coin=(0, 1)), "closed")


def test_reports_follow_start_vertex():
    rep = sigma_report(WalkSpec("ct-quantum", 5, start=2), "resonance")
    assert np.argmax(rep.sigma) == 2
    avg = average_report(WalkSpec("ct-quantum", 5, start=2), "closed")
    assert np.argmax(avg.pbar) == 2


def test_mirror_symmetric_sigma():
    for N in (4, 6, 8, 10):
        s = sigma_report(WalkSpec("ct-quantum", N), "resonance").sigma
        assert np.allclose(s[1:], s[1:][::-1], atol=1e-12)
