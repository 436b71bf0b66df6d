"""Boundary-state selection by transition-amplitude maximization.

Over Q-normalized |A(t_a)> and |B(t_b)>, the modulus of
<B|Q exp(-iH(t_b - t_a))|A> is bounded by exp(max_im * (t_b - t_a)) with
max_im the largest imaginary eigenvalue part, and the bound is attained
exactly on the top-imaginary eigenspace.  This module provides the
closed-form maximizer, an independent alternating-ascent maximizer, and
the reality / effective-generator diagnostics evaluated at the optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence
from .evolution import EvolvingPair, evolve_a, evolve_b, q_matrix_element
from .linalg import SpectralDecomposition, mat_exp_prop
from .qmetric import QMetric, is_q_hermitian, q_inner, q_normalize, random_q_hermitian


@dataclass
class MaximizerResult:
    """Maximizing boundary pair with its amplitude and top-subspace data."""

    a_star: np.ndarray
    b_star: np.ndarray
    amplitude: float
    max_im: float
    subspace_dim: int
    method: str  # "analytic" or "numeric"
    t_a: float
    t_b: float
    objective_history: list = field(default_factory=list, repr=False)

    def as_pair(self) -> EvolvingPair:
        return EvolvingPair(
            a0=self.a_star,
            b0=self.b_star,
            t_a=self.t_a,
            t_b=self.t_b,
            b_adjoint_mode="q_dagger",
            normalized=True,
        )


@dataclass
class RealityReport:
    """max |Im| of Q-matrix elements over an observable/time battery."""

    observables: int
    time_points: int
    max_abs_im: float
    passed: bool
    tol: float


def _amplitude(metric: QMetric, dec: SpectralDecomposition, a, b, dt: float) -> float:
    return abs(q_inner(metric, b, mat_exp_prop(dec, dt) @ a))


def analytic_maximize(
    dec: SpectralDecomposition,
    metric: QMetric,
    t_a: float,
    t_b: float,
    deg_tol: float | None = None,
) -> MaximizerResult:
    """Closed-form maximizer of the Q transition amplitude.

    The optimum is supported on the eigenspace whose imaginary parts lie
    within ``deg_tol`` of the maximum; there the B-coefficients are the
    phase-aligned images exp(-i lam dt) of the A-coefficients.  The
    degenerate case returns the uniform superposition over the top
    subspace as a canonical representative.
    """
    if not t_b > t_a:
        raise ValueError(f"t_b={t_b} must exceed t_a={t_a}")
    dt = t_b - t_a
    top = dec.top_subspace(deg_tol)
    k = top.size

    alpha = np.zeros(dec.dim, dtype=complex)
    alpha[top] = 1.0 / np.sqrt(k)
    beta = np.zeros(dec.dim, dtype=complex)
    beta[top] = np.exp(-1j * dec.lam[top] * dt) * alpha[top]

    a_star = q_normalize(metric, dec.p @ alpha)
    b_star = q_normalize(metric, dec.p @ beta)
    amp = _amplitude(metric, dec, a_star, b_star, dt)
    return MaximizerResult(
        a_star=a_star,
        b_star=b_star,
        amplitude=amp,
        max_im=dec.max_im,
        subspace_dim=int(k),
        method="analytic",
        t_a=t_a,
        t_b=t_b,
    )


def numeric_maximize(
    dec: SpectralDecomposition,
    metric: QMetric,
    t_a: float,
    t_b: float,
    restarts: int = 4,
    seed: int = 0,
    max_iters: int = 2000,
    step_tol: float = 1e-13,
) -> MaximizerResult:
    """Alternating-ascent maximizer, the spectral-free cross-check.

    For fixed a the optimal b is the Q-normalized image of exp(-iH dt) a
    (closed inner step); a is then updated by one power-ascent step of
    the induced objective ||exp(-iH dt) a||_Q, which is non-decreasing.
    Deterministic in ``seed``; restarts are reduced by best amplitude
    with ties going to the earliest restart.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if not t_b > t_a:
        raise ValueError(f"t_b={t_b} must exceed t_a={t_a}")
    dt = t_b - t_a
    kprop = mat_exp_prop(dec, dt)
    n = dec.dim

    best = None
    best_history = None
    any_converged = False
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        a = q_normalize(metric, a)
        history = []
        converged = False
        for _ in range(max_iters):
            u = kprop @ a
            obj = np.sqrt(max(q_inner(metric, u, u).real, 0.0))
            history.append(obj)
            # power-ascent step on K^dag_Q K in the Q geometry
            w = metric.q_inv @ (kprop.conj().T @ (metric.q @ u))
            a_new = q_normalize(metric, w)
            drift = 1.0 - min(abs(q_inner(metric, a_new, a)), 1.0)
            a = a_new
            if drift <= step_tol:
                converged = True
                break
        any_converged = any_converged or converged
        u = kprop @ a
        amp = np.sqrt(max(q_inner(metric, u, u).real, 0.0))
        if best is None or amp > best[0]:
            best = (amp, a, u)
            best_history = history

    if not any_converged:
        raise NoConvergence(
            f"no restart met step_tol={step_tol:.1e} within {max_iters} iterations"
        )
    amp, a_star, u = best
    b_star = q_normalize(metric, u)
    return MaximizerResult(
        a_star=a_star,
        b_star=b_star,
        amplitude=_amplitude(metric, dec, a_star, b_star, dt),
        max_im=dec.max_im,
        subspace_dim=int(dec.top_subspace().size),
        method="numeric",
        t_a=t_a,
        t_b=t_b,
        objective_history=best_history,
    )


def observable_seeds(seed: int, count: int) -> list[int]:
    """Child seeds for an observable battery, deterministic in ``seed``."""
    state = np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64)
    return [int(s) for s in state]


def verify_reality(
    dec: SpectralDecomposition,
    metric: QMetric,
    res,
    n_observables: int = 20,
    t_grid=None,
    seed: int = 0,
    tol: float = 1e-8,
) -> RealityReport:
    """Evaluate Q-matrix elements of random Q-Hermitian observables on
    the evolving pair and report the worst imaginary part.

    ``res`` may be a :class:`MaximizerResult` or any
    :class:`EvolvingPair`; |A> is pushed forward with H and |B> is
    pulled back with the Q-adjoint Hamiltonian.
    """
    pair = res.as_pair() if isinstance(res, MaximizerResult) else res
    if t_grid is None:
        t_grid = np.linspace(pair.t_a, pair.t_b, 10)
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < pair.t_a) or np.any(t_grid > pair.t_b):
        raise ValueError("t_grid must lie within [t_a, t_b]")

    obs = [random_q_hermitian(metric, s) for s in observable_seeds(seed, n_observables)]
    max_abs_im = 0.0
    for t in t_grid:
        at = evolve_a(dec, pair.a0, pair.t_a, t)
        bt = evolve_b(dec, metric, pair.b0, pair.t_b, t, mode="q_dagger")
        for op in obs:
            val = q_matrix_element(metric, op, bt, at)
            max_abs_im = max(max_abs_im, abs(val.imag))
    return RealityReport(
        observables=n_observables,
        time_points=int(t_grid.size),
        max_abs_im=max_abs_im,
        passed=max_abs_im <= tol,
        tol=tol,
    )


def effective_generator_check(
    dec: SpectralDecomposition,
    metric: QMetric,
    res: MaximizerResult,
    tol: float = 1e-8,
) -> bool:
    """Check that the surviving dynamics has a Q-Hermitian generator.

    Restricts H to the top-imaginary eigenspace through the Q-orthogonal
    projector and subtracts i * max_im there; what remains must be
    Q-Hermitian.
    """
    k = res.subspace_dim
    proj = dec.p[:, :k] @ dec.p_inv[:k, :]
    h = dec.matrix()
    m = proj @ h @ proj - 1j * res.max_im * proj
    return is_q_hermitian(metric, m, tol)
