import numpy as np
import pytest

from futureq import (
    EvolvingPair,
    NoConvergence,
    analytic_maximize,
    build_q,
    effective_generator_check,
    eig_decompose,
    evolve_a,
    evolve_b,
    mat_exp_prop,
    numeric_maximize,
    observable_seeds,
    q_angle,
    q_inner,
    q_norm,
    q_normalize,
    standard_2x2,
    verify_reality,
)


def test_hermitian_amplitude_is_one(rng):
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    h = (g + g.conj().T) / 2
    dec = eig_decompose(h)
    metric = build_q(dec)
    res = analytic_maximize(dec, metric, 0.0, 2.0)
    assert res.amplitude == pytest.approx(1.0, abs=1e-9)


def test_standard_2x2_maximizer(std_pair):
    dec, metric = std_pair
    res = analytic_maximize(dec, metric, 0.0, 1.0)
    assert res.amplitude == pytest.approx(np.e, abs=1e-9)
    assert res.subspace_dim == 1
    assert res.max_im == pytest.approx(1.0)
    # a_star is the lambda = i eigenvector (up to phase)
    v = np.array([1.0, 1.0j]) / np.sqrt(2)
    overlap = abs(np.vdot(v, res.a_star)) / np.linalg.norm(res.a_star)
    assert overlap == pytest.approx(1.0, abs=1e-10)
    assert q_norm(metric, res.a_star) == pytest.approx(1.0, abs=1e-10)
    assert q_norm(metric, res.b_star) == pytest.approx(1.0, abs=1e-10)


def test_degenerate_top_subspace():
    dec = eig_decompose(np.diag([1.0j, 1.0j, 0.0]))
    metric = build_q(dec)
    res = analytic_maximize(dec, metric, 0.0, 1.5)
    assert res.subspace_dim == 2
    assert res.amplitude == pytest.approx(np.exp(1.5), rel=1e-9)
    # support stays in the top eigenspace
    assert abs(res.a_star[2]) <= 1e-12


def test_amplitude_bound_holds(std_pair, rng):
    dec, metric = std_pair
    res = analytic_maximize(dec, metric, 0.0, 1.0)
    u = mat_exp_prop(dec, 1.0)
    for _ in range(200):
        a = q_normalize(metric, rng.standard_normal(2) + 1j * rng.standard_normal(2))
        b = q_normalize(metric, rng.standard_normal(2) + 1j * rng.standard_normal(2))
        assert abs(q_inner(metric, b, u @ a)) <= res.amplitude + 1e-9


def test_numeric_matches_analytic(rnd_pair):
    for dim, seed in [(2, 0), (4, 1), (7, 2)]:
        dec, metric = rnd_pair(dim, seed)
        ana = analytic_maximize(dec, metric, 0.0, 1.0)
        num = numeric_maximize(dec, metric, 0.0, 1.0, restarts=3, seed=seed)
        assert abs(num.amplitude - ana.amplitude) <= 1e-7
        assert num.method == "numeric"
        assert ana.method == "analytic"


def test_numeric_converges_to_top_eigenvector():
    dec = eig_decompose(np.diag([0.0, 1.0j]))
    metric = build_q(dec)
    res = numeric_maximize(dec, metric, 0.0, 1.0, restarts=2, seed=0)
    # e2 carries Im = 1, so the optimum concentrates on component 1
    overlap = abs(res.a_star[1])
    assert overlap == pytest.approx(1.0, abs=1e-7)


def test_numeric_objective_monotone(std_pair):
    dec, metric = std_pair
    res = numeric_maximize(dec, metric, 0.0, 1.0, restarts=1, seed=3)
    hist = np.asarray(res.objective_history)
    assert np.all(np.diff(hist) >= -1e-12)


def test_numeric_no_convergence(std_pair):
    dec, metric = std_pair
    with pytest.raises(NoConvergence):
        numeric_maximize(
            dec, metric, 0.0, 1.0, restarts=2, seed=0, max_iters=1, step_tol=1e-30
        )


def test_numeric_deterministic(std_pair):
    dec, metric = std_pair
    r1 = numeric_maximize(dec, metric, 0.0, 1.0, restarts=3, seed=11)
    r2 = numeric_maximize(dec, metric, 0.0, 1.0, restarts=3, seed=11)
    assert np.array_equal(r1.a_star, r2.a_star)
    assert r1.amplitude == r2.amplitude


def test_verify_reality_passes_at_optimum(rnd_pair):
    dec, metric = rnd_pair(5, 13)
    res = analytic_maximize(dec, metric, 0.0, 1.0)
    rep = verify_reality(dec, metric, res, n_observables=10, seed=4, tol=1e-8)
    assert rep.passed
    assert rep.max_abs_im <= 1e-8
    assert rep.observables == 10
    assert rep.time_points >= 2


def test_verify_reality_negative_control(rnd_pair):
    dec, metric = rnd_pair(5, 13)
    rng = np.random.default_rng(99)
    a0 = q_normalize(metric, dec.p @ (rng.uniform(0.5, 1.5, 5) + 0.3j))
    b0 = q_normalize(metric, rng.standard_normal(5) + 1j * rng.standard_normal(5))
    pair = EvolvingPair(a0=a0, b0=b0, t_a=0.0, t_b=1.0)
    rep = verify_reality(dec, metric, pair, n_observables=10, seed=4, tol=1e-8)
    assert not rep.passed
    assert rep.max_abs_im > 1e-4


def test_proportionality_at_optimum(rnd_pair):
    dec, metric = rnd_pair(6, 17)
    res = analytic_maximize(dec, metric, 0.0, 1.0)
    for t in np.linspace(0.0, 1.0, 7):
        a_t = evolve_a(dec, res.a_star, 0.0, t)
        b_t = evolve_b(dec, metric, res.b_star, 1.0, t, mode="q_dagger")
        assert q_angle(metric, b_t, a_t) <= 1e-7
        # at the optimum, B(t) is a positive real multiple of A(t)
        ratio = q_inner(metric, a_t, b_t) / q_inner(metric, a_t, a_t)
        assert abs(ratio.imag) <= 1e-9 * abs(ratio)
        assert ratio.real > 0


def test_effective_generator_scalar_and_degenerate():
    dec = eig_decompose(standard_2x2())
    metric = build_q(dec)
    res = analytic_maximize(dec, metric, 0.0, 1.0)
    assert effective_generator_check(dec, metric, res)

    dec3 = eig_decompose(np.diag([1.0j, 1.0j, 0.0]))
    metric3 = build_q(dec3)
    res3 = analytic_maximize(dec3, metric3, 0.0, 1.0)
    assert effective_generator_check(dec3, metric3, res3)


def test_effective_generator_mixed_top_subspace(rng):
    # two eigenvalues sharing Im = 1 but with real parts {0, 1}, mixed
    # eigenvectors; the restriction minus i*max_im has real spectrum
    lam = np.array([1.0j, 1.0 + 1.0j, -1.0j])
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    p = np.eye(3) + 0.3 * g / np.sqrt(3)
    h = p @ np.diag(lam) @ np.linalg.inv(p)
    dec = eig_decompose(h)
    metric = build_q(dec)
    res = analytic_maximize(dec, metric, 0.0, 1.0)
    assert res.subspace_dim == 2
    assert effective_generator_check(dec, metric, res)


def test_observable_seeds_deterministic():
    s1 = observable_seeds(42, 8)
    s2 = observable_seeds(42, 8)
    assert list(s1) == list(s2)
    assert len(set(s1)) == 8
    assert list(observable_seeds(43, 8)) != list(s1)


def test_maximizer_result_as_pair(std_pair):
    dec, metric = std_pair
    res = analytic_maximize(dec, metric, 0.0, 1.0)
    pair = res.as_pair()
    assert pair.t_a == 0.0 and pair.t_b == 1.0
    assert pair.normalized
    pair.check_normalization(metric)  # raises if the boundary states are off
