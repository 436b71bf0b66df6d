import numpy as np
import pytest

from futureq import (
    InsufficientData,
    ZeroNorm,
    build_q,
    decay_rate_fit,
    eig_decompose,
    generic_state,
    hermiticity_defect,
    random_diagonalizable,
    survival_fractions,
)


@pytest.fixture(scope="module")
def diag_pair():
    dec = eig_decompose(np.diag([0.0, 1.0j]))
    return dec, build_q(dec)


def test_top_eigenvector_has_unit_fidelity(diag_pair):
    dec, metric = diag_pair
    psi0 = dec.p[:, 0]
    series = survival_fractions(dec, metric, psi0, np.linspace(0, 5, 11))
    assert np.allclose(series.fidelity_top, 1.0, atol=1e-12)
    assert np.allclose(series.weights[:, 1], 0.0, atol=1e-12)


def test_hermitian_weights_constant(rng):
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = (g + g.conj().T) / 2
    dec = eig_decompose(h)
    metric = build_q(dec)
    psi0 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    series = survival_fractions(dec, metric, psi0, np.linspace(0, 5, 11))
    assert np.max(np.abs(series.weights - series.weights[0])) <= 1e-9


def test_closed_form_weight(diag_pair):
    # H = diag(0, i), psi0 = (1,1)/sqrt(2): top weight e^{2t}/(1+e^{2t})
    dec, metric = diag_pair
    psi0 = np.array([1.0, 1.0]) / np.sqrt(2)
    t = np.linspace(0.0, 4.0, 9)
    series = survival_fractions(dec, metric, psi0, t)
    expect = np.exp(2 * t) / (1 + np.exp(2 * t))
    assert np.allclose(series.fidelity_top, expect, atol=1e-12)
    assert np.allclose(series.weights.sum(axis=1), 1.0, atol=1e-9)


def test_fidelity_nondecreasing_generic(rnd_pair):
    dec, metric = rnd_pair(6, 23)
    psi0 = generic_state(6, seed=1)
    series = survival_fractions(dec, metric, psi0, np.linspace(0, 30, 61))
    assert np.all(np.diff(series.fidelity_top) >= -1e-6)
    assert series.fidelity_top[-1] > 0.999


def test_zero_norm_rejected(diag_pair):
    dec, metric = diag_pair
    with pytest.raises(ZeroNorm):
        survival_fractions(dec, metric, np.zeros(2), np.linspace(0, 1, 5))


def test_decay_rate_two_level(diag_pair):
    dec, metric = diag_pair
    psi0 = np.array([1.0, 1.0]) / np.sqrt(2)
    series = survival_fractions(dec, metric, psi0, np.linspace(0.0, 10.0, 41))
    slope = decay_rate_fit(series, 1)
    assert slope == pytest.approx(-2.0, rel=0.05)


def test_decay_rate_three_level():
    dec = eig_decompose(np.diag([0.0, 0.5j, 1.0j]))
    metric = build_q(dec)
    psi0 = generic_state(3, seed=0)
    series = survival_fractions(dec, metric, psi0, np.linspace(0.0, 20.0, 81))
    # sorted order: lam = (i, i/2, 0)
    assert decay_rate_fit(series, 1) == pytest.approx(-1.0, rel=0.05)
    assert decay_rate_fit(series, 2) == pytest.approx(-2.0, rel=0.05)


def test_decay_rate_rejects_top_component(diag_pair):
    dec, metric = diag_pair
    psi0 = np.array([1.0, 1.0]) / np.sqrt(2)
    series = survival_fractions(dec, metric, psi0, np.linspace(0.0, 5.0, 21))
    with pytest.raises(ValueError):
        decay_rate_fit(series, 0)


def test_decay_rate_insufficient_data(diag_pair):
    dec, metric = diag_pair
    psi0 = np.array([1.0, 1.0]) / np.sqrt(2)
    series = survival_fractions(dec, metric, psi0, np.linspace(0.0, 1.0, 4))
    with pytest.raises(InsufficientData):
        decay_rate_fit(series, 1)


def test_random_case_slopes_match_gaps():
    h = random_diagonalizable(8, 77)
    dec = eig_decompose(h)
    metric = build_q(dec)
    psi0 = generic_state(8, seed=2)
    gaps = dec.max_im - dec.lam.imag
    t_end = 12.0 / np.min(gaps[gaps > 1e-12])
    series = survival_fractions(dec, metric, psi0, np.linspace(0.0, t_end, 201))
    for comp in range(1, 8):
        slope = decay_rate_fit(series, comp)
        assert slope == pytest.approx(-2.0 * gaps[comp], rel=0.05)


def test_hermiticity_defect_examples(diag_pair):
    dec, metric = diag_pair
    # top eigenvector: no defect ever
    assert hermiticity_defect(dec, metric, dec.p[:, 0], 7.0) <= 1e-12
    psi0 = np.array([1.0, 1.0]) / np.sqrt(2)
    assert hermiticity_defect(dec, metric, psi0, 0.0) == pytest.approx(0.5, abs=1e-12)
    expect = 1.0 / (1.0 + np.exp(6.0))
    assert hermiticity_defect(dec, metric, psi0, 3.0) == pytest.approx(expect, rel=1e-9)


def test_defect_decays_exponentially(rnd_pair):
    dec, metric = rnd_pair(5, 29)
    psi0 = generic_state(5, seed=3)
    gap = dec.max_im - dec.lam.imag[1]
    d1 = hermiticity_defect(dec, metric, psi0, 5.0 / gap)
    d2 = hermiticity_defect(dec, metric, psi0, 10.0 / gap)
    assert d2 < d1 * 1e-3
    assert hermiticity_defect(dec, metric, psi0, 10.0 / gap) <= 1e-6


def test_generic_state_deterministic():
    a = generic_state(5, seed=4)
    b = generic_state(5, seed=4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, generic_state(5, seed=5))
    # near-uniform: jitter is small
    assert np.max(np.abs(np.abs(a) - 1.0 / np.sqrt(5))) < 1e-2
