import numpy as np
import pytest

from futureq import (
    EvolvingPair,
    NearOrthogonal,
    ZeroNorm,
    build_q,
    eig_decompose,
    evolve_a,
    evolve_b,
    identity_metric,
    ordinary_average,
    q_matrix_element,
    weak_value,
    weak_value_propagated,
)


def test_evolve_a_examples(std_pair):
    dec, _ = std_pair
    a0 = np.array([1.0, 1.0]) / np.sqrt(2)
    assert np.array_equal(evolve_a(dec, a0, 2.0, 2.0), a0)
    # diagonal action on diag(0, i)
    dec_d = eig_decompose(np.diag([0.0, 1.0j]))
    out = evolve_a(dec_d, a0, 0.0, 1.0)
    assert np.allclose(np.sort(np.abs(out)), np.array([1.0, np.e]) / np.sqrt(2))


def test_evolve_a_inverts(rnd_pair):
    dec, _ = rnd_pair(5, 3)
    rng = np.random.default_rng(0)
    a0 = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    there = evolve_a(dec, a0, 0.0, 1.7)
    back = evolve_a(dec, there, 1.7, 0.0)
    assert np.linalg.norm(back - a0) <= 1e-9 * np.linalg.norm(a0)


def test_evolve_b_modes_coincide_for_hermitian(rng):
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    h = (g + g.conj().T) / 2
    dec = eig_decompose(h)
    metric = build_q(dec)
    b0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    out_plain = evolve_b(dec, metric, b0, 1.0, 0.2, mode="plain_dagger")
    out_q = evolve_b(dec, metric, b0, 1.0, 0.2, mode="q_dagger")
    assert np.linalg.norm(out_plain - out_q) <= 1e-9 * np.linalg.norm(b0)


def test_evolve_b_q_dagger_eigenvector_scaling(std_pair):
    dec, metric = std_pair
    for k in range(2):
        v = dec.p[:, k]
        dt = 0.8
        out = evolve_b(dec, metric, v, 0.0, dt, mode="q_dagger")
        expect = np.exp(-1j * np.conj(dec.lam[k]) * dt) * v
        assert np.linalg.norm(out - expect) <= 1e-9 * np.linalg.norm(expect)
    assert np.array_equal(
        evolve_b(dec, metric, dec.p[:, 0], 1.0, 1.0, mode="q_dagger"), dec.p[:, 0]
    )


def test_renormalize_flag_keeps_quotients(std_pair):
    dec, metric = std_pair
    a0 = np.array([1.0, 0.3 + 0.2j])
    plain = evolve_a(dec, a0, 0.0, 3.0)
    unit = evolve_a(dec, a0, 0.0, 3.0, renormalize=True)
    assert np.linalg.norm(unit) == pytest.approx(1.0, abs=1e-12)
    o = np.array([[1.0, 0.5], [0.5, -1.0]], dtype=complex)
    assert ordinary_average(o, plain) == pytest.approx(ordinary_average(o, unit))


def test_ordinary_average_examples():
    assert ordinary_average(np.eye(2, dtype=complex), np.array([0.3, -2.0j])) == 1.0
    o = np.diag([1.0, -1.0]).astype(complex)
    assert ordinary_average(o, np.array([1.0, 1.0]) / np.sqrt(2)) == pytest.approx(0.0)
    assert ordinary_average(o, np.array([2.0, 1.0]) / np.sqrt(5)) == pytest.approx(3 / 5)
    with pytest.raises(ZeroNorm):
        ordinary_average(o, np.zeros(2))


def test_ordinary_average_real_for_hermitian(rng):
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = (g + g.conj().T) / 2
    a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert ordinary_average(h, a).imag == pytest.approx(0.0, abs=1e-12)


def test_weak_value_reduces_and_is_linear(rng):
    a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    b = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    o1 = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    o2 = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert weak_value(o1, a, a) == ordinary_average(o1, a)
    lhs = weak_value(2.0 * o1 + 3.0j * o2, b, a)
    rhs = 2.0 * weak_value(o1, b, a) + 3.0j * weak_value(o2, b, a)
    assert lhs == pytest.approx(rhs)
    assert weak_value(np.eye(3, dtype=complex), b, a) == 1.0 + 0.0j


def test_weak_value_near_orthogonal():
    o = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(NearOrthogonal):
        weak_value(o, np.array([0.0, 1.0]), np.array([1.0, 0.0]))


def test_weak_value_scale_invariance(rng):
    a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    b = a + 0.1 * (rng.standard_normal(4) + 1j * rng.standard_normal(4))
    o = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    base = weak_value(o, b, a)
    scaled = weak_value(o, (0.2 - 1.4j) * b, (3.0 + 0.5j) * a)
    assert abs(scaled - base) <= 1e-10 * (1 + abs(base))


def test_weak_value_propagated_identity_and_boundary(std_pair):
    dec, _ = std_pair
    rng = np.random.default_rng(5)
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    eye = np.eye(2, dtype=complex)
    for t in (0.0, 0.4, 1.0):
        assert weak_value_propagated(dec, eye, a, b, t, 0.0, 1.0) == 1.0 + 0.0j
    # boundary t = T_A: a unevolved, b dragged back from T_B with H in the bra
    o = np.array([[0.2, 1.0], [0.0, -0.7j]])
    from futureq.linalg import mat_exp_prop

    b_back = mat_exp_prop(dec, 1.0).conj().T @ b
    expect = weak_value(o, b_back, a)
    got = weak_value_propagated(dec, o, a, b, 0.0, 0.0, 1.0)
    assert got == pytest.approx(expect, abs=1e-12)


def test_weak_value_propagated_composition(std_pair):
    dec, metric = std_pair
    rng = np.random.default_rng(6)
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    o = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    t, t_a, t_b = 0.37, 0.0, 1.0
    a_t = evolve_a(dec, a, t_a, t)
    b_t = evolve_b(dec, metric, b, t_b, t, mode="plain_dagger")
    expect = weak_value(o, b_t, a_t)
    got = weak_value_propagated(dec, o, a, b, t, t_a, t_b)
    assert abs(got - expect) <= 1e-9 * (1 + abs(expect))


def test_weak_value_propagated_scale_invariance(rnd_pair):
    dec, _ = rnd_pair(4, 8)
    rng = np.random.default_rng(7)
    a = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    o = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    base = weak_value_propagated(dec, o, a, b, 0.5, 0.0, 1.0)
    scaled = weak_value_propagated(dec, o, 2.5j * a, (0.1 - 0.9j) * b, 0.5, 0.0, 1.0)
    assert abs(scaled - base) <= 1e-10 * (1 + abs(base))


def test_q_matrix_element(std_pair, rng):
    dec, metric = std_pair
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    assert q_matrix_element(metric, np.eye(2, dtype=complex), b, a) == 1.0 + 0.0j
    # Q = I reduces to the plain weak value
    o = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    eye_metric = identity_metric(2)
    assert q_matrix_element(eye_metric, o, b, a) == pytest.approx(weak_value(o, b, a))


def test_q_matrix_element_real_for_q_hermitian_diagonal(std_pair, rng):
    from futureq import random_q_hermitian

    dec, metric = std_pair
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    o = random_q_hermitian(metric, 3)
    val = q_matrix_element(metric, o, a, a)
    assert abs(val.imag) <= 1e-10 * (1 + abs(val))


def test_evolving_pair_validation(std_pair):
    _, metric = std_pair
    a0 = np.array([1.0, 0.0])
    b0 = np.array([0.0, 1.0])
    with pytest.raises(ValueError):
        EvolvingPair(a0=a0, b0=b0, t_a=1.0, t_b=0.0)
    with pytest.raises(ValueError):
        EvolvingPair(a0=a0, b0=b0, t_a=0.0, t_b=1.0, b_adjoint_mode="sideways")
    pair = EvolvingPair(a0=a0, b0=b0, t_a=0.0, t_b=1.0, normalized=True)
    with pytest.raises(ValueError):
        pair.check_normalization(metric)  # b0 is not Q-normalized
    from futureq import q_normalize

    good = EvolvingPair(
        a0=q_normalize(metric, a0),
        b0=q_normalize(metric, b0),
        t_a=0.0,
        t_b=1.0,
        normalized=True,
    )
    good.check_normalization(metric)  # raises if off
    # the flag gates the check entirely
    EvolvingPair(a0=a0, b0=b0, t_a=0.0, t_b=1.0).check_normalization(metric)
