"""Randomized invariants (kept light: these back up the targeted unit
tests rather than replace them)."""

import numpy as np
from hypothesis import given, settings, strategies as st

from futureq import (
    build_q,
    commutator_norm,
    eig_decompose,
    evolve_a,
    q_inner,
    q_norm,
    random_diagonalizable,
    weak_value,
)

scalars = st.complex_numbers(
    min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False
)


def _pair(dim, seed):
    dec = eig_decompose(random_diagonalizable(dim, seed))
    return dec, build_q(dec)


def _states(dim, seed):
    rng = np.random.default_rng([seed, 9])
    a = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    b = a + 0.5 * (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
    return a, b


@settings(max_examples=25, deadline=None)
@given(dim=st.integers(2, 6), seed=st.integers(0, 10_000), ca=scalars, cb=scalars)
def test_weak_value_is_projective(dim, seed, ca, cb):
    _, _ = _pair(dim, seed)  # exercises generation, not needed for the quotient
    a, b = _states(dim, seed)
    rng = np.random.default_rng([seed, 10])
    op = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    w0 = weak_value(op, b, a)
    w1 = weak_value(op, cb * b, ca * a)
    assert abs(w1 - w0) <= 1e-8 * (1 + abs(w0))


@settings(max_examples=25, deadline=None)
@given(dim=st.integers(2, 6), seed=st.integers(0, 10_000))
def test_q_inner_conjugate_symmetry(dim, seed):
    _, metric = _pair(dim, seed)
    x, y = _states(dim, seed)
    lhs = q_inner(metric, x, y)
    rhs = np.conj(q_inner(metric, y, x))
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(lhs))


@settings(max_examples=25, deadline=None)
@given(dim=st.integers(2, 6), seed=st.integers(0, 10_000), c=scalars)
def test_q_norm_homogeneity(dim, seed, c):
    _, metric = _pair(dim, seed)
    x, _ = _states(dim, seed)
    scaled = q_norm(metric, c * x)
    assert abs(scaled - abs(c) * q_norm(metric, x)) <= 1e-12 * scaled


@settings(max_examples=25, deadline=None)
@given(dim=st.integers(2, 5), seed=st.integers(0, 10_000))
def test_commutator_antisymmetry(dim, seed):
    rng = np.random.default_rng([seed, 11])
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    b = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    assert commutator_norm(a, b) == commutator_norm(b, a)


@settings(max_examples=20, deadline=None)
@given(dim=st.integers(2, 8), seed=st.integers(0, 10**6))
def test_eigenvalue_sort_order(dim, seed):
    dec = eig_decompose(random_diagonalizable(dim, seed))
    order = np.lexsort((dec.lam.real, -dec.lam.imag))
    assert np.array_equal(order, np.arange(dim))
    assert dec.max_im == dec.lam.imag[0]


@settings(max_examples=15, deadline=None)
@given(
    dim=st.integers(2, 5),
    seed=st.integers(0, 10_000),
    t1=st.floats(-2.0, 2.0),
    t2=st.floats(-2.0, 2.0),
)
def test_evolution_composes(dim, seed, t1, t2):
    dec, _ = _pair(dim, seed)
    a0, _ = _states(dim, seed)
    via = evolve_a(dec, evolve_a(dec, a0, 0.0, t1), t1, t2)
    direct = evolve_a(dec, a0, 0.0, t2)
    assert np.linalg.norm(via - direct) <= 1e-8 * (1 + np.linalg.norm(direct))
