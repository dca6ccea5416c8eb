import numpy as np
import pytest

from volterra_chain import flow, hill, reconstruct
from volterra_chain.errors import DegeneracyError, ReconstructionError
from volterra_chain.lattice import ChainState, integrate_direct

from conftest import random_chains


def test_round_trip_corpus():
    for u, a in random_chains(15, [2, 3, 4, 5, 6, 8, 10], seed=61):
        rep = reconstruct.reconstruct_general(hill.periodic_spectrum(a), hill.aux_spectra(a))
        assert np.max(np.abs(rep.u - u) / u) <= 1e-7


def test_uniform_exact():
    a = np.ones(3)
    rep = reconstruct.reconstruct_general(hill.periodic_spectrum(a), hill.aux_spectra(a))
    np.testing.assert_allclose(rep.a2, 1.0, atol=1e-12)
    assert rep.lam_moment == pytest.approx(12.0)


def test_site_order():
    a = np.array([1.0, 2.0, 3.0, 4.0])
    rep = reconstruct.reconstruct_general(hill.periodic_spectrum(a), hill.aux_spectra(a))
    np.testing.assert_allclose(rep.a2, a**2, atol=1e-10)


def test_aux_order_irrelevant():
    a = np.array([0.9, 1.2, 0.7, 1.5, 1.1])
    aux = hill.aux_spectra(a)
    spec = hill.periodic_spectrum(a)
    r1 = reconstruct.reconstruct_general(spec, aux)
    r2 = reconstruct.reconstruct_general(spec, aux[::-1])
    np.testing.assert_array_equal(r1.u, r2.u)


def test_odd_period_example():
    a = np.array([1.0, 2.0, 3.0])
    spec = hill.periodic_spectrum(a)
    aux = hill.aux_spectra(a)
    assert reconstruct.reconstruct_odd_period(spec, aux, 1) == pytest.approx(1.0, abs=1e-12)
    assert reconstruct.reconstruct_odd_period(spec, aux, 2) == pytest.approx(4.0, abs=1e-12)
    assert reconstruct.reconstruct_odd_period(spec, aux, 3) == pytest.approx(9.0, abs=1e-12)


def test_odd_period_ignores_signs():
    for _, a in random_chains(6, [3, 5, 7, 9], seed=67):
        spec = hill.periodic_spectrum(a)
        aux = [hill.dirichlet_spectrum(a, k) for k in range(a.size)]
        got = [reconstruct.reconstruct_odd_period(spec, aux, m) for m in range(1, a.size + 1)]
        np.testing.assert_allclose(got, a**2, rtol=1e-8)


def test_odd_period_rejects_even():
    a = np.ones(4) + np.arange(4) / 10
    with pytest.raises(ValueError):
        reconstruct.reconstruct_odd_period(hill.periodic_spectrum(a), hill.aux_spectra(a), 1)


def test_pair_sums():
    for _, a in random_chains(6, [2, 4, 5, 8], seed=71):
        N = a.size
        got = reconstruct.pair_sums(hill.periodic_spectrum(a), hill.aux_spectra(a))
        # shift k pairs a_k with a_{k+1}, a_0 = a_N
        expected = a[(np.arange(N) - 1) % N] ** 2 + a**2
        np.testing.assert_allclose(got, expected, atol=1e-10)


def test_log_derivative_analytic():
    for _, a in random_chains(6, [3, 5, 7], seed=73):
        spec = hill.periodic_spectrum(a)
        for x in hill.aux_spectra(a):
            lhs = reconstruct.log_derivative_analytic(spec, x)
            assert lhs == pytest.approx(-4 * reconstruct.flow_terms(spec, x), abs=1e-9)


def test_log_derivative_second_order():
    state = ChainState([0.9, 2.1, 1.3, 1.7, 0.6])
    traj = flow.evolve_spectral(state, 1.0, 2.5e-4)
    direct = integrate_direct(state, 0.5, 2.5e-4).final.a ** 2
    errors = []
    for h in (1e-2, 5e-3, 2.5e-3):
        got = reconstruct.reconstruct_log_derivative(traj, 2, 0.5, h)
        errors.append(abs(got - direct[1]))
    rates = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))
    assert np.all(np.abs(rates - 2) < 0.3)


def test_log_derivative_degenerate_even():
    traj = flow.evolve_spectral(ChainState([0.9, 2.1, 1.3, 1.7]), 0.1, 1e-2)
    with pytest.raises(DegeneracyError):
        reconstruct.reconstruct_log_derivative(traj, 0, 0.05, 0.01)


def test_wrong_sign_detected():
    a = np.array([0.6, 1.8, 0.9, 1.4, 0.7])
    spec = hill.periodic_spectrum(a)
    aux = hill.aux_spectra(a)
    bad = [hill.AuxSpectrum(x.shift, x.mu, -x.sigma) for x in aux]
    try:
        rep = reconstruct.reconstruct_general(spec, bad)
    except ReconstructionError:
        return
    assert np.max(np.abs(rep.u - 4 * a**2)) > 1e-3


def test_sign_reversal_gives_shifted_chain():
    # reversing every sign maps the chain to its one-site shift
    for _, a in random_chains(4, [3, 4, 6], seed=79):
        spec = hill.periodic_spectrum(a)
        bad = [hill.AuxSpectrum(x.shift, x.mu, -x.sigma) for x in hill.aux_spectra(a)]
        rep = reconstruct.reconstruct_general(spec, bad)
        np.testing.assert_allclose(rep.a2, np.roll(a**2, -1), atol=1e-9)


def test_negative_a2_raises(monkeypatch):
    a = np.array([0.3, 2.5, 0.4])
    spec = hill.periodic_spectrum(a)
    aux = hill.aux_spectra(a)
    real = reconstruct.flow_terms
    monkeypatch.setattr(reconstruct, "flow_terms", lambda s, x, tol=None: real(s, x, tol) + 1.0)
    with pytest.raises(ReconstructionError):
        reconstruct.reconstruct_general(spec, aux)
    rep = reconstruct.reconstruct_general(spec, aux, strict=False)
    assert rep.min_a2 < 0 and np.all(rep.u >= 0)


def test_tiny_negative_clamped(monkeypatch):
    a = np.array([0.3, 2.5, 0.4])
    spec = hill.periodic_spectrum(a)
    aux = hill.aux_spectra(a)
    real = reconstruct.flow_terms
    # a_3^2 = 0.16 is reached from shift 0; push it just below zero
    monkeypatch.setattr(
        reconstruct, "flow_terms", lambda s, x, tol=None: real(s, x, tol) + (0.32 + 1e-10) * (x.shift == 0)
    )
    with pytest.warns(RuntimeWarning):
        rep = reconstruct.reconstruct_general(spec, aux)
    assert rep.u[2] == 0.0


def test_wrong_count():
    a = np.array([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        reconstruct.reconstruct_general(hill.periodic_spectrum(a), hill.aux_spectra(a)[:2])
