"""Self-contained verification battery for the whole package.

Ten numbered criteria, each an independent pass/fail check with its own
tolerances, runnable from the test suite or the CLI ``selftest``
subcommand.  Every criterion builds its own inputs from fixed seeds, so
the battery is deterministic end to end.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import classical as cl
from .emergence import (
    decay_rate_fit,
    generic_state,
    hermiticity_defect,
    survival_fractions,
)
from .evolution import (
    EvolvingPair,
    ordinary_average,
    weak_value,
    weak_value_propagated,
    q_matrix_element,
)
from .hamiltonians import random_diagonalizable
from .linalg import commutator_norm, eig_decompose, mat_exp_prop
from .maximize import analytic_maximize, numeric_maximize, verify_reality
from .qmetric import build_q, q_adjoint, q_angle, q_normalize
from .scenario import parse_scenario, run_scenario


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    inconclusive: bool = False
    detail: str = ""
    seconds: float = 0.0

    @property
    def status(self) -> str:
        if self.passed and self.inconclusive:
            return "INCONCLUSIVE"
        return "PASS" if self.passed else "FAIL"

    def line(self) -> str:
        return (
            f"[{self.status}] criterion {self.number}: {self.title}"
            f" — {self.detail} ({self.seconds:.1f}s)"
        )


def _timed(fn):
    def wrapper() -> CriterionResult:
        t0 = time.perf_counter()
        res = fn()
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    return wrapper


def _dims_cycle(lo: int, hi: int, count: int) -> list:
    span = list(range(lo, hi + 1))
    return [span[k % len(span)] for k in range(count)]


@lru_cache(maxsize=1)
def _battery25():
    """25 seeded non-degenerate decompositions (dims 2..10) with their
    metrics and analytic maximizers at (T_A, T_B) = (0, 1)."""
    out = []
    for k, dim in enumerate(_dims_cycle(2, 10, 25)):
        h = random_diagonalizable(dim, 2000 + k)
        dec = eig_decompose(h)
        metric = build_q(dec)
        ana = analytic_maximize(dec, metric, 0.0, 1.0)
        out.append((dec, metric, ana))
    return tuple(out)


@_timed
def criterion_1() -> CriterionResult:
    """Q-normality: [H, H^(Q-dagger)] vanishes for 50 random matrices."""
    worst = 0.0
    for k, dim in enumerate(_dims_cycle(2, 16, 50)):
        h = random_diagonalizable(dim, 1000 + k)
        dec = eig_decompose(h)
        metric = build_q(dec)
        if not metric.chol_ok:
            return CriterionResult(1, _T1, False, detail=f"case {k}: Q not positive definite")
        herm = np.linalg.norm(metric.q - metric.q.conj().T, "fro")
        if herm > 1e-10:
            return CriterionResult(
                1, _T1, False, detail=f"case {k}: Q hermiticity residual {herm:.2e}"
            )
        rel = commutator_norm(h, q_adjoint(metric, h)) / np.linalg.norm(h, "fro") ** 2
        worst = max(worst, rel)
    return CriterionResult(
        1,
        _T1,
        worst <= 1e-8,
        detail=f"max commutator ratio {worst:.2e} over 50 cases, dims 2-16 (tol 1e-8)",
    )


@_timed
def criterion_2() -> CriterionResult:
    """Maximization: analytic vs numeric vs theory vs brute-force sampling."""
    worst_gap = 0.0
    worst_rel = 0.0
    worst_excess = -math.inf
    n_pairs = 100_000
    for k, (dec, metric, ana) in enumerate(_battery25()):
        num = numeric_maximize(dec, metric, 0.0, 1.0, restarts=3, seed=k)
        gap = abs(ana.amplitude - num.amplitude)
        theory = math.exp(dec.max_im)
        rel = abs(ana.amplitude - theory) / theory
        worst_gap = max(worst_gap, gap)
        worst_rel = max(worst_rel, rel)

        rng = np.random.default_rng([9000, k])
        d = dec.dim
        ga = rng.standard_normal((n_pairs, d)) + 1j * rng.standard_normal((n_pairs, d))
        gb = rng.standard_normal((n_pairs, d)) + 1j * rng.standard_normal((n_pairs, d))
        qa = np.sqrt(np.einsum("ki,ij,kj->k", ga.conj(), metric.q, ga).real)
        qb = np.sqrt(np.einsum("ki,ij,kj->k", gb.conj(), metric.q, gb).real)
        ga /= qa[:, None]
        gb /= qb[:, None]
        u = mat_exp_prop(dec, 1.0)
        amps = np.abs(np.einsum("ki,ij,kj->k", gb.conj(), metric.q @ u, ga))
        worst_excess = max(worst_excess, float(np.max(amps)) - ana.amplitude)
    passed = worst_gap <= 1e-7 and worst_rel <= 1e-7 and worst_excess <= 1e-9
    return CriterionResult(
        2,
        _T2,
        passed,
        detail=(
            f"analytic-numeric gap {worst_gap:.2e} (tol 1e-7), theory rel err "
            f"{worst_rel:.2e} (tol 1e-7), sampled excess {worst_excess:.2e} "
            f"(tol 1e-9, {n_pairs} pairs x 25 cases)"
        ),
    )


@_timed
def criterion_3() -> CriterionResult:
    """Reality of weak values at the optimum, with a negative control."""
    grid = np.linspace(0.0, 1.0, 10)
    worst = 0.0
    control_hits = 0
    for k, (dec, metric, ana) in enumerate(_battery25()):
        rep = verify_reality(
            dec, metric, ana, n_observables=20, t_grid=grid, seed=7000 + k, tol=1e-8
        )
        worst = max(worst, rep.max_abs_im)
        if not rep.passed:
            return CriterionResult(
                3, _T3, False, detail=f"case {k}: max |Im| = {rep.max_abs_im:.2e} > 1e-8"
            )
        rng = np.random.default_rng([7500, k])
        d = dec.dim
        coords = rng.uniform(0.5, 1.5, d) * np.exp(2j * np.pi * rng.uniform(0.0, 1.0, d))
        a0 = q_normalize(metric, dec.p @ coords)
        b0 = q_normalize(
            metric, rng.standard_normal(d) + 1j * rng.standard_normal(d)
        )
        pair = EvolvingPair(a0=a0, b0=b0, t_a=0.0, t_b=1.0)
        rep_neg = verify_reality(
            dec, metric, pair, n_observables=20, t_grid=grid, seed=7000 + k, tol=1e-8
        )
        if rep_neg.max_abs_im > 1e-4:
            control_hits += 1
    inconclusive = control_hits < 20
    return CriterionResult(
        3,
        _T3,
        True,
        inconclusive=inconclusive,
        detail=(
            f"max |Im| at optimum {worst:.2e} (tol 1e-8); negative control"
            f" exceeded 1e-4 in {control_hits}/25 cases (need >= 20)"
        ),
    )


@_timed
def criterion_4() -> CriterionResult:
    """Q-angle between evolved B(t) and A(t) vanishes at the optimum."""
    from .evolution import evolve_a, evolve_b

    grid = np.linspace(0.0, 1.0, 10)
    worst = 0.0
    for dec, metric, ana in _battery25():
        for t in grid:
            a_t = evolve_a(dec, ana.a_star, 0.0, t)
            b_t = evolve_b(dec, metric, ana.b_star, 1.0, t, mode="q_dagger")
            worst = max(worst, q_angle(metric, b_t, a_t))
    return CriterionResult(
        4,
        _T4,
        worst <= 1e-7,
        detail=f"max Q-angle {worst:.2e} over 25 cases x 10 times (tol 1e-7)",
    )


@_timed
def criterion_5() -> CriterionResult:
    """Survival-weight decay slopes match -2*(Im gap); defect vanishes."""
    h = np.diag([0.0, 0.5j, 1.0j])
    dec = eig_decompose(h)
    metric = build_q(dec)
    psi0 = generic_state(3, seed=0)
    series = survival_fractions(dec, metric, psi0, np.linspace(0.0, 40.0, 161))
    worst_rel = 0.0
    # sorted by decreasing Im: component 1 has gap 1/2, component 2 gap 1
    for comp, gap in ((1, 0.5), (2, 1.0)):
        slope = decay_rate_fit(series, comp)
        worst_rel = max(worst_rel, abs(slope + 2.0 * gap) / (2.0 * gap))
    defect = hermiticity_defect(dec, metric, psi0, 10.0 / 0.5)
    worst_defect = defect

    for k in range(10):
        h = random_diagonalizable(8, 5000 + k)
        dec = eig_decompose(h)
        metric = build_q(dec)
        psi0 = generic_state(8, seed=k)
        gaps = dec.max_im - dec.lam.imag
        min_gap = float(np.min(gaps[gaps > 1e-12]))
        series = survival_fractions(
            dec, metric, psi0, np.linspace(0.0, 12.0 / min_gap, 201)
        )
        for comp in range(1, 8):
            gap = float(gaps[comp])
            slope = decay_rate_fit(series, comp)
            worst_rel = max(worst_rel, abs(slope + 2.0 * gap) / (2.0 * gap))
        top_gap = float(gaps[1])
        worst_defect = max(
            worst_defect, hermiticity_defect(dec, metric, psi0, 10.0 / top_gap)
        )
    passed = worst_rel <= 0.05 and worst_defect <= 1e-6
    return CriterionResult(
        5,
        _T5,
        passed,
        detail=(
            f"max slope rel err {worst_rel:.2e} (tol 5e-2), max defect at"
            f" t=10/gap {worst_defect:.2e} (tol 1e-6)"
        ),
    )


def _saddle_search_spec():
    return cl.double_well_spec(bumps=[cl.hilltop_bump(1, 0.25, 1.0)])


@_timed
def criterion_6() -> CriterionResult:
    """Classical optimizer finds the hilltop and is no worse than a grid."""
    spec = _saddle_search_spec()
    horizon, dt = 30.0, 1e-3
    axes = np.linspace(-1.2, 1.2, 41)
    mesh = np.stack(np.meshgrid(axes, axes, indexing="ij"), axis=-1).reshape(-1, 2)
    grid_best = float(np.max(cl.reward_of_starts(spec, mesh, horizon, dt)))
    search = cl.SearchConfig(
        bounds=np.array([[-1.2, 1.2], [-1.2, 1.2]]),
        restarts=4,
        seed=0,
        max_evals=400,
        simplex_tol=1e-9,
        grid_presearch=41,
    )
    opt = cl.optimize_initial(spec, horizon, dt, search)
    dist = float(np.max(np.abs(opt.s0_star.as_vector())))
    margin = opt.reward_star - grid_best
    passed = dist <= 0.05 and margin >= -1e-6
    return CriterionResult(
        6,
        _T6,
        passed,
        detail=(
            f"|s0*| max coord {dist:.3f} (tol 0.05), reward {opt.reward_star:.6f}"
            f" vs 41x41 grid {grid_best:.6f} (margin {margin:+.2e}, tol -1e-6)"
        ),
    )


@_timed
def criterion_7() -> CriterionResult:
    """Saddle dwell time follows ln(Delta/delta)/lyapunov within 15%."""
    spec = cl.double_well_spec()
    ratios = []
    for delta in (1e-4, 1e-6, 1e-8):
        res = cl.dwell_time(spec, delta, 0.1, 1.0, dt=1e-3)
        ratios.append(res.ratio)
    passed = all(0.85 <= r <= 1.15 for r in ratios)
    return CriterionResult(
        7,
        _T7,
        passed,
        detail=(
            "measured/predicted = "
            + ", ".join(f"{r:.3f}" for r in ratios)
            + " for delta = 1e-4, 1e-6, 1e-8 (need within [0.85, 1.15])"
        ),
    )


@_timed
def criterion_8() -> CriterionResult:
    """Three uncoupled modes: product dwell structure, joint-origin optimum."""
    rep = cl.inflaton_toy(3, 1.0, horizon=20.0, dt=1e-3, delta=1e-8)
    mode_rel = float(
        np.max(np.abs(rep.per_mode_dwell - rep.predicted_mode_dwell))
        / rep.predicted_mode_dwell
    )
    dist = float(np.max(np.abs(rep.s0_star.as_vector())))
    passed = mode_rel <= 0.15 and dist <= 0.05
    return CriterionResult(
        8,
        _T8,
        passed,
        detail=(
            f"per-mode dwell rel dev {mode_rel:.3f} (tol 0.15), optimizer"
            f" max |coord| {dist:.3f} (tol 0.05)"
        ),
    )


_DETERMINISM_SCENARIOS = (
    """
{
  "kind": "quantum",
  "seed": 3,
  "hamiltonian": {"generator": {"name": "standard_2x2"}},
  "times": {"t_a": 0.0, "t_b": 1.0, "grid_points": 8}
}
""",
    """
{
  "kind": "classical",
  "seed": 1,
  "classical": {
    "masses": [1.0],
    "poly_coeffs": [[0.0, 0.0, -0.5, 0.0, 0.25, 0.0, 0.0]],
    "bumps": [{"center_q": [0.0], "center_p": [0.0], "sigma": 0.25, "weight": 1.0}],
    "dt": 0.01,
    "horizon": 2.0,
    "table_stride": 5,
    "dwell": {"delta": 1e-4, "big_delta": 0.1, "lyapunov": 1.0, "dt": 0.001}
  },
  "search": {
    "bounds": [[-1.2, 1.2], [-1.2, 1.2]],
    "restarts": 2,
    "seed": 0,
    "max_evals": 120,
    "simplex_tol": 1e-9,
    "grid_presearch": 5
  }
}
""",
    """
{
  "kind": "inflaton",
  "seed": 2,
  "inflaton": {
    "n_modes": 1, "mode_curvature": 1.0, "horizon": 2.0, "dt": 0.01,
    "delta": 1e-4, "exit_radius": 0.1, "table_stride": 5
  },
  "search": {
    "bounds": [[-1.2, 1.2], [-1.2, 1.2]],
    "restarts": 1,
    "seed": 0,
    "max_evals": 80,
    "simplex_tol": 1e-9,
    "grid_presearch": 5
  }
}
""",
)


@_timed
def criterion_9() -> CriterionResult:
    """Leapfrog energy drift bound; scenario reruns byte-identical."""
    spec = cl.double_well_spec()
    traj = cl.integrate(spec, cl.PhaseState([1.0], [0.5]), 1e-3, 100_000)
    drift = float(
        np.max(np.abs(traj.energy - traj.energy[0]))
        / max(1.0, abs(float(traj.energy[0])))
    )
    if drift > 1e-6:
        return CriterionResult(
            9, _T9, False, detail=f"energy drift {drift:.2e} > 1e-6 over horizon 100"
        )
    for text in _DETERMINISM_SCENARIOS:
        s = parse_scenario(text)
        b1 = run_scenario(s)
        b2 = run_scenario(parse_scenario(text))
        if b1.summary_json() != b2.summary_json() or b1.tables != b2.tables:
            return CriterionResult(
                9, _T9, False, detail=f"{s.kind} scenario rerun differed"
            )
    return CriterionResult(
        9,
        _T9,
        True,
        detail=(
            f"energy drift {drift:.2e} (tol 1e-6); quantum/classical/inflaton"
            " scenario reruns byte-identical"
        ),
    )


@_timed
def criterion_10() -> CriterionResult:
    """weak_value(O, a, a) reduces to the ordinary average; identity is exact."""
    worst = 0.0
    for k, dim in enumerate(_dims_cycle(2, 8, 100)):
        rng = np.random.default_rng([6000, k])
        o = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        a = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        diff = abs(weak_value(o, a, a) - ordinary_average(o, a))
        worst = max(worst, diff)
    if worst > 1e-12:
        return CriterionResult(
            10, _T10, False, detail=f"max |weak_value - ordinary| {worst:.2e} > 1e-12"
        )
    exact = True
    for k in range(10):
        dim = 2 + k % 5
        h = random_diagonalizable(dim, 6500 + k)
        dec = eig_decompose(h)
        metric = build_q(dec)
        rng = np.random.default_rng([6600, k])
        a = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        b = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        eye = np.eye(dim, dtype=complex)
        exact &= weak_value(eye, b, a) == 1.0 + 0.0j
        exact &= ordinary_average(eye, a) == 1.0 + 0.0j
        exact &= q_matrix_element(metric, eye, b, a) == 1.0 + 0.0j
        exact &= weak_value_propagated(dec, eye, a, b, 0.3, 0.0, 1.0) == 1.0 + 0.0j
    return CriterionResult(
        10,
        _T10,
        bool(exact),
        detail=(
            f"max |weak_value(O,a,a) - ordinary| {worst:.2e} over 100 cases"
            " (tol 1e-12); O = I returned exactly 1.0 in all four quotients"
            if exact
            else "O = I quotient was not exactly 1.0"
        ),
    )


_T1 = "Q-normality of random diagonalizable matrices"
_T2 = "maximized amplitude agreement (analytic, numeric, theory, sampling)"
_T3 = "reality of weak values at the optimum"
_T4 = "evolved B(t) parallel to A(t) at the optimum"
_T5 = "emergent-hermiticity decay rates and defect"
_T6 = "classical optimizer selects the saddle"
_T7 = "dwell-time logarithmic law"
_T8 = "inflaton toy product structure and joint optimum"
_T9 = "energy conservation and byte-identical reruns"
_T10 = "weak-value reductions and exact identity quotients"

ALL_CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
    criterion_10,
)


def run_all(numbers=None) -> list:
    """Run the numbered criteria (all by default), in order."""
    selected = numbers or range(1, len(ALL_CRITERIA) + 1)
    return [ALL_CRITERIA[n - 1]() for n in selected]
