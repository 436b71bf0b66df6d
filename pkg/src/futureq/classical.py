"""Classical phase-space dynamics scored by the imaginary Hamiltonian.

The real part of the Hamiltonian (kinetic + polynomial potential)
generates the motion through a leapfrog integrator; the imaginary part,
modeled as Gaussian bumps in phase space, never exerts a force and only
enters the reward functional integral(im_h) dt.  Initial conditions are
then selected by maximizing that reward, which is what makes saddle
points of the potential (where a trajectory can linger arbitrarily
long) the preferred starting places.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.optimize
from numba import njit

from .errors import Blowup, NoConvergence, NoImprovement

BLOWUP_BOUND = 1e6
MAX_POLY_POWER = 6
DWELL_RADIUS_SIGMAS = 2.0  # a trajectory "dwells" within 2 sigma of a bump


@dataclass(frozen=True)
class GaussianBump:
    """Isotropic Gaussian contribution to im_h, centered in phase space.
    Positive weight marks a favored region, negative a penalized one."""

    center_q: np.ndarray
    center_p: np.ndarray
    sigma: float
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "center_q", np.asarray(self.center_q, dtype=float).ravel())
        object.__setattr__(self, "center_p", np.asarray(self.center_p, dtype=float).ravel())
        if self.center_q.size != self.center_p.size:
            raise ValueError("bump centers must share the coordinate count")
        if not self.sigma > 0:
            raise ValueError("bump width must be positive")
        if not np.isfinite(self.weight):
            raise ValueError("bump weight must be finite")


@dataclass(frozen=True)
class ComplexHamiltonianSpec:
    """Separable real Hamiltonian plus a Gaussian-bump imaginary part.

    re_h(q, p) = sum_i p_i^2 / (2 m_i) + V(q) with V a per-coordinate
    polynomial (powers 0..6, one coefficient row per coordinate) plus
    pairwise bilinear couplings c * q_i * q_j.
    """

    masses: np.ndarray
    poly_coeffs: np.ndarray  # shape (n_modes, 7)
    couplings: tuple = ()  # entries (i, j, c)
    bumps: tuple = ()

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float).ravel()
        coeffs = np.atleast_2d(np.asarray(self.poly_coeffs, dtype=float))
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "poly_coeffs", coeffs)
        object.__setattr__(self, "couplings", tuple(tuple(c) for c in self.couplings))
        object.__setattr__(self, "bumps", tuple(self.bumps))
        n = masses.size
        if n < 1 or np.any(masses <= 0) or not np.all(np.isfinite(masses)):
            raise ValueError("masses must be positive finite")
        if coeffs.shape != (n, MAX_POLY_POWER + 1) or not np.all(np.isfinite(coeffs)):
            raise ValueError(
                f"potential table must be finite with shape ({n}, {MAX_POLY_POWER + 1})"
            )
        for i, j, c in self.couplings:
            if not (0 <= i < n and 0 <= j < n and i != j):
                raise ValueError(f"bad coupling indices ({i}, {j})")
            if not np.isfinite(c):
                raise ValueError("coupling coefficient must be finite")
        for b in self.bumps:
            if b.center_q.size != n:
                raise ValueError("bump center dim does not match coordinate count")

    @property
    def n_modes(self) -> int:
        return self.masses.size

    def potential(self, q) -> float:
        q = np.asarray(q, dtype=float).ravel()
        v = float(np.sum(self.poly_coeffs * q[:, None] ** np.arange(7)[None, :]))
        for i, j, c in self.couplings:
            v += c * q[i] * q[j]
        return v

    def grad_potential(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float).ravel()
        k = np.arange(7)
        g = np.sum(self.poly_coeffs[:, 1:] * k[1:] * q[:, None] ** (k[1:] - 1), axis=1)
        for i, j, c in self.couplings:
            g[i] += c * q[j]
            g[j] += c * q[i]
        return g

    def hess_potential(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float).ravel()
        n = q.size
        h = np.zeros((n, n))
        k = np.arange(2, 7)
        h[np.arange(n), np.arange(n)] = np.sum(
            self.poly_coeffs[:, 2:] * (k * (k - 1)) * q[:, None] ** (k - 2), axis=1
        )
        for i, j, c in self.couplings:
            h[i, j] += c
            h[j, i] += c
        return h

    def re_h(self, q, p) -> float:
        p = np.asarray(p, dtype=float).ravel()
        return float(np.sum(p * p / (2 * self.masses))) + self.potential(q)

    def im_h(self, q, p) -> float:
        q = np.asarray(q, dtype=float).ravel()
        p = np.asarray(p, dtype=float).ravel()
        s = 0.0
        for b in self.bumps:
            d2 = float(np.sum((q - b.center_q) ** 2) + np.sum((p - b.center_p) ** 2))
            s += b.weight * math.exp(-d2 / (2 * b.sigma**2))
        return s


@dataclass(frozen=True)
class PhaseState:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float).ravel()
        p = np.asarray(self.p, dtype=float).ravel()
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)
        if q.size != p.size or q.size < 1:
            raise ValueError("q and p must be nonempty and of equal length")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValueError("phase-space point must be finite")

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])


@dataclass(frozen=True)
class Trajectory:
    """Uniform-step leapfrog path with the energy record."""

    dt: float
    qs: np.ndarray  # (steps+1, n_modes)
    ps: np.ndarray
    energy: np.ndarray  # re_h at every recorded state

    @property
    def steps(self) -> int:
        return self.qs.shape[0] - 1

    @property
    def horizon(self) -> float:
        return self.dt * self.steps

    def state(self, k: int) -> PhaseState:
        return PhaseState(self.qs[k], self.ps[k])


@dataclass(frozen=True)
class RewardReport:
    reward: float
    dwell: dict  # bump index -> time spent nearest to that bump within 2 sigma
    nearest_saddle_distance: float


@dataclass(frozen=True)
class SearchConfig:
    """Multi-start simplex search over initial conditions."""

    bounds: np.ndarray  # (2 n_modes, 2) box for (q, p)
    restarts: int = 4
    seed: int = 0
    max_evals: int = 400
    simplex_tol: float = 1e-9
    grid_presearch: int = 0  # odd k > 1 adds a k-per-axis coarse scan start

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.bounds, dtype=float))
        object.__setattr__(self, "bounds", b)
        if b.ndim != 2 or b.shape[1] != 2 or np.any(b[:, 1] <= b[:, 0]):
            raise ValueError("bounds must be non-degenerate (lo < hi) pairs")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass(frozen=True)
class OptResult:
    s0_star: PhaseState
    reward_star: float
    evals: int


@dataclass(frozen=True)
class CriticalPoint:
    q: np.ndarray
    index: int  # number of negative Hessian eigenvalues
    hessian_eigenvalues: np.ndarray


@dataclass(frozen=True)
class DwellResult:
    measured: float
    predicted: float

    @property
    def ratio(self) -> float:
        return self.measured / self.predicted


@dataclass(frozen=True)
class InflatonReport:
    per_mode_dwell: np.ndarray
    predicted_mode_dwell: float
    total_reward: float
    efolding_analog: float
    s0_star: PhaseState
    evals: int


# ---------------------------------------------------------------------------
# compiled kernels (plain-array views of the spec)


@njit(cache=True)
def _grad_kernel(q, coeffs, ci, cj, cc, out):
    n = q.shape[0]
    for i in range(n):
        x = q[i]
        g = 0.0
        xp = 1.0
        for k in range(1, 7):
            g += k * coeffs[i, k] * xp
            xp *= x
        out[i] = g
    for m in range(ci.shape[0]):
        out[ci[m]] += cc[m] * q[cj[m]]
        out[cj[m]] += cc[m] * q[ci[m]]


@njit(cache=True)
def _pot_kernel(q, coeffs, ci, cj, cc):
    n = q.shape[0]
    v = 0.0
    for i in range(n):
        x = q[i]
        xp = 1.0
        for k in range(7):
            v += coeffs[i, k] * xp
            xp *= x
    for m in range(ci.shape[0]):
        v += cc[m] * q[ci[m]] * q[cj[m]]
    return v


@njit(cache=True)
def _imh_kernel(q, p, bq, bp, bs, bw):
    s = 0.0
    for b in range(bs.shape[0]):
        d2 = 0.0
        for i in range(q.shape[0]):
            dq = q[i] - bq[b, i]
            dp = p[i] - bp[b, i]
            d2 += dq * dq + dp * dp
        s += bw[b] * math.exp(-d2 / (2.0 * bs[b] * bs[b]))
    return s


@njit(cache=True)
def _traj_kernel(q0, p0, dt, steps, masses, coeffs, ci, cj, cc, bound):
    n = q0.shape[0]
    qs = np.empty((steps + 1, n))
    ps = np.empty((steps + 1, n))
    energy = np.empty(steps + 1)
    q = q0.copy()
    p = p0.copy()
    g = np.empty(n)
    qs[0] = q
    ps[0] = p
    kin = 0.0
    for i in range(n):
        kin += p[i] * p[i] / (2.0 * masses[i])
    energy[0] = kin + _pot_kernel(q, coeffs, ci, cj, cc)
    _grad_kernel(q, coeffs, ci, cj, cc, g)
    for k in range(1, steps + 1):
        for i in range(n):
            p[i] -= 0.5 * dt * g[i]
            q[i] += dt * p[i] / masses[i]
        _grad_kernel(q, coeffs, ci, cj, cc, g)
        kin = 0.0
        for i in range(n):
            p[i] -= 0.5 * dt * g[i]
            kin += p[i] * p[i] / (2.0 * masses[i])
            if abs(q[i]) > bound or abs(p[i]) > bound:
                return qs, ps, energy, k
        qs[k] = q
        ps[k] = p
        energy[k] = kin + _pot_kernel(q, coeffs, ci, cj, cc)
    return qs, ps, energy, 0


@njit(cache=True)
def _reward_kernel(q0s, p0s, dt, steps, masses, coeffs, ci, cj, cc, bq, bp, bs, bw, bound):
    """Fused leapfrog + trapezoid reward for a batch of initial states.
    Also accumulates per-bump dwell in trapezoid-weight units (nearest
    center within 2 sigma); multiply by dt to get time, so the summed
    dwell never exceeds steps*dt.  A blown-up trajectory reports -inf."""
    nb = q0s.shape[0]
    n = q0s.shape[1]
    nbump = bs.shape[0]
    rewards = np.empty(nb)
    dwell = np.zeros((nb, nbump))
    for b in range(nb):
        q = q0s[b].copy()
        p = p0s[b].copy()
        g = np.empty(n)
        _grad_kernel(q, coeffs, ci, cj, cc, g)
        acc = 0.5 * _imh_kernel(q, p, bq, bp, bs, bw)
        _dwell_tick(q, p, bq, bp, bs, dwell, b, 0.5)
        ok = True
        for k in range(1, steps + 1):
            for i in range(n):
                p[i] -= 0.5 * dt * g[i]
                q[i] += dt * p[i] / masses[i]
            _grad_kernel(q, coeffs, ci, cj, cc, g)
            for i in range(n):
                p[i] -= 0.5 * dt * g[i]
                if abs(q[i]) > bound or abs(p[i]) > bound:
                    ok = False
            if not ok:
                break
            w = 0.5 if k == steps else 1.0
            acc += w * _imh_kernel(q, p, bq, bp, bs, bw)
            _dwell_tick(q, p, bq, bp, bs, dwell, b, w)
        rewards[b] = acc * dt if ok else -np.inf
    return rewards, dwell


@njit(cache=True)
def _dwell_tick(q, p, bq, bp, bs, dwell, b, w):
    best = -1
    best_d2 = 0.0
    for m in range(bs.shape[0]):
        d2 = 0.0
        for i in range(q.shape[0]):
            dq = q[i] - bq[m, i]
            dp = p[i] - bp[m, i]
            d2 += dq * dq + dp * dp
        r = DWELL_RADIUS_SIGMAS * bs[m]
        if d2 <= r * r and (best < 0 or d2 < best_d2):
            best = m
            best_d2 = d2
    if best >= 0:
        dwell[b, best] += w


@njit(cache=True)
def _exit_kernel(q0, p0, dt, masses, coeffs, ci, cj, cc, center, radius, max_steps, bound):
    """Time for the trajectory to leave the ball |q - center| < radius,
    linearly interpolated between the straddling samples.
    Returns (time, status): status 0 exited, 1 budget exhausted, 2 blowup."""
    n = q0.shape[0]
    q = q0.copy()
    p = p0.copy()
    g = np.empty(n)
    d_prev = 0.0
    for i in range(n):
        d_prev += (q[i] - center[i]) ** 2
    d_prev = math.sqrt(d_prev)
    if d_prev >= radius:
        return 0.0, 0
    _grad_kernel(q, coeffs, ci, cj, cc, g)
    for k in range(1, max_steps + 1):
        for i in range(n):
            p[i] -= 0.5 * dt * g[i]
            q[i] += dt * p[i] / masses[i]
        _grad_kernel(q, coeffs, ci, cj, cc, g)
        d = 0.0
        for i in range(n):
            p[i] -= 0.5 * dt * g[i]
            if abs(q[i]) > bound or abs(p[i]) > bound:
                return 0.0, 2
            d += (q[i] - center[i]) ** 2
        d = math.sqrt(d)
        if d >= radius:
            frac = (radius - d_prev) / (d - d_prev)
            return (k - 1 + frac) * dt, 0
        d_prev = d
    return 0.0, 1


@njit(cache=True)
def _mode_exit_kernel(q0, p0, dt, masses, coeffs, ci, cj, cc, center, radius, max_steps, bound):
    """Per-coordinate exit times from |q_i - center_i| < radius.
    status 0 all exited, 1 budget exhausted, 2 blowup."""
    n = q0.shape[0]
    q = q0.copy()
    p = p0.copy()
    g = np.empty(n)
    times = np.full(n, -1.0)
    prev = np.empty(n)
    remaining = n
    for i in range(n):
        prev[i] = abs(q[i] - center[i])
        if prev[i] >= radius:
            times[i] = 0.0
            remaining -= 1
    if remaining == 0:
        return times, 0
    _grad_kernel(q, coeffs, ci, cj, cc, g)
    for k in range(1, max_steps + 1):
        for i in range(n):
            p[i] -= 0.5 * dt * g[i]
            q[i] += dt * p[i] / masses[i]
        _grad_kernel(q, coeffs, ci, cj, cc, g)
        for i in range(n):
            p[i] -= 0.5 * dt * g[i]
            if abs(q[i]) > bound or abs(p[i]) > bound:
                return times, 2
        for i in range(n):
            if times[i] < 0.0:
                d = abs(q[i] - center[i])
                if d >= radius:
                    frac = (radius - prev[i]) / (d - prev[i])
                    times[i] = (k - 1 + frac) * dt
                    remaining -= 1
                else:
                    prev[i] = d
        if remaining == 0:
            return times, 0
    return times, 1


def _packed(spec: ComplexHamiltonianSpec):
    n = spec.n_modes
    ci = np.array([c[0] for c in spec.couplings], dtype=np.int64)
    cj = np.array([c[1] for c in spec.couplings], dtype=np.int64)
    cc = np.array([c[2] for c in spec.couplings], dtype=np.float64)
    bq = (
        np.vstack([b.center_q for b in spec.bumps])
        if spec.bumps
        else np.zeros((0, n))
    )
    bp = (
        np.vstack([b.center_p for b in spec.bumps])
        if spec.bumps
        else np.zeros((0, n))
    )
    bs = np.array([b.sigma for b in spec.bumps], dtype=np.float64)
    bw = np.array([b.weight for b in spec.bumps], dtype=np.float64)
    return (
        np.ascontiguousarray(spec.masses),
        np.ascontiguousarray(spec.poly_coeffs),
        ci,
        cj,
        cc,
        np.ascontiguousarray(bq),
        np.ascontiguousarray(bp),
        bs,
        bw,
    )


# ---------------------------------------------------------------------------
# public operations


def integrate(
    spec: ComplexHamiltonianSpec,
    s0: PhaseState,
    dt: float,
    steps: int,
    bound: float = BLOWUP_BOUND,
) -> Trajectory:
    """Leapfrog (kick-drift-kick) integration of the re_h dynamics.

    im_h never influences the trajectory.  Raises :class:`Blowup` when
    any coordinate or momentum magnitude exceeds ``bound``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if s0.q.size != spec.n_modes:
        raise ValueError("initial state dim does not match the spec")
    masses, coeffs, ci, cj, cc, *_ = _packed(spec)
    qs, ps, energy, bad = _traj_kernel(
        s0.q, s0.p, float(dt), int(steps), masses, coeffs, ci, cj, cc, float(bound)
    )
    if bad:
        raise Blowup(f"trajectory escaped |q|,|p| <= {bound:.1e} at step {bad}")
    return Trajectory(dt=float(dt), qs=qs, ps=ps, energy=energy)


def reward(traj: Trajectory, spec: ComplexHamiltonianSpec) -> RewardReport:
    """Trapezoidal integral of im_h along a trajectory plus dwell times.

    Dwell assigns each sample to the nearest bump center within 2 sigma
    (so the per-region times always sum to at most the horizon) and the
    report carries the trajectory's closest approach to any saddle of
    the potential.
    """
    if traj.qs.shape[0] < 1:
        raise ValueError("empty trajectory")
    dq = traj.qs[:, None, :] - np.vstack([b.center_q for b in spec.bumps])[None, :, :] \
        if spec.bumps else None
    imvals = np.array([spec.im_h(traj.qs[k], traj.ps[k]) for k in range(traj.qs.shape[0])])
    w = np.ones(imvals.size)
    w[0] = w[-1] = 0.5
    total = float(np.dot(w, imvals) * traj.dt) if imvals.size > 1 else 0.0

    dwell = {m: 0.0 for m in range(len(spec.bumps))}
    if spec.bumps:
        dp = traj.ps[:, None, :] - np.vstack([b.center_p for b in spec.bumps])[None, :, :]
        d2 = np.sum(dq**2, axis=2) + np.sum(dp**2, axis=2)
        radii = np.array([DWELL_RADIUS_SIGMAS * b.sigma for b in spec.bumps])
        inside = d2 <= radii[None, :] ** 2
        d2_masked = np.where(inside, d2, np.inf)
        nearest = np.argmin(d2_masked, axis=1)
        has_any = inside.any(axis=1)
        # accumulate trapezoid weights, scale by dt once: the summed
        # dwell then cannot exceed steps*dt by rounding
        for k in np.nonzero(has_any)[0]:
            dwell[int(nearest[k])] += w[k]
        dwell = {m: v * traj.dt for m, v in dwell.items()}
        excess = sum(dwell.values()) - traj.horizon
        if excess > 0:  # last-place rounding from the per-bump scaling
            top = max(dwell, key=dwell.get)
            dwell[top] -= excess

    saddles = saddle_points(spec)
    if saddles:
        fixed = np.vstack([np.concatenate([cp.q, np.zeros_like(cp.q)]) for cp in saddles])
        pts = np.hstack([traj.qs, traj.ps])
        dist = np.sqrt(np.sum((pts[:, None, :] - fixed[None, :, :]) ** 2, axis=2))
        nearest_saddle = float(np.min(dist))
    else:
        nearest_saddle = math.inf

    weights = [b.weight for b in spec.bumps]
    if weights and all(wt > 0 for wt in weights):
        cap = traj.horizon * sum(weights)  # bump peaks can stack
        if total > cap * (1 + 1e-12) + 1e-12:
            raise AssertionError(
                f"reward {total} exceeds the peak-value bound {cap}"
            )
    return RewardReport(reward=total, dwell=dwell, nearest_saddle_distance=nearest_saddle)


def reward_of_starts(
    spec: ComplexHamiltonianSpec,
    starts: np.ndarray,
    horizon: float,
    dt: float,
    bound: float = BLOWUP_BOUND,
) -> np.ndarray:
    """Batched trapezoidal reward for rows of (q, p) initial conditions.
    Blown-up trajectories score -inf."""
    starts = np.atleast_2d(np.asarray(starts, dtype=float))
    n = spec.n_modes
    if starts.shape[1] != 2 * n:
        raise ValueError(f"starts must have 2*{n} columns")
    steps = _steps_for(horizon, dt)
    masses, coeffs, ci, cj, cc, bq, bp, bs, bw = _packed(spec)
    rewards, _ = _reward_kernel(
        np.ascontiguousarray(starts[:, :n]),
        np.ascontiguousarray(starts[:, n:]),
        float(dt),
        steps,
        masses,
        coeffs,
        ci,
        cj,
        cc,
        bq,
        bp,
        bs,
        bw,
        float(bound),
    )
    return rewards


def _steps_for(horizon: float, dt: float) -> int:
    steps = round(horizon / dt)
    if steps < 1 or abs(steps * dt - horizon) > 1e-9 * max(1.0, horizon):
        raise ValueError(f"horizon {horizon} is not an integer multiple of dt {dt}")
    return int(steps)


def optimize_initial(
    spec: ComplexHamiltonianSpec,
    horizon: float,
    dt: float,
    search: SearchConfig,
) -> OptResult:
    """Multi-start Nelder-Mead maximization of the reward over s0.

    Starting points are drawn uniformly in the bounds from per-restart
    seeds; an optional coarse grid scan contributes its best point as an
    extra start.  Deterministic in ``search.seed``.  Raises
    :class:`NoImprovement` when every evaluation returned the same value
    (flat reward landscape).
    """
    n = spec.n_modes
    bounds = search.bounds
    if bounds.shape[0] != 2 * n:
        raise ValueError(f"bounds must cover 2*{n} phase-space coordinates")
    _steps_for(horizon, dt)

    seen = {"lo": math.inf, "hi": -math.inf, "evals": 0}

    def objective(x: np.ndarray) -> float:
        r = float(reward_of_starts(spec, x[None, :], horizon, dt)[0])
        seen["evals"] += 1
        if math.isfinite(r):
            seen["lo"] = min(seen["lo"], r)
            seen["hi"] = max(seen["hi"], r)
            return -r
        return 1e300  # blown-up trajectory: maximally penalized

    starts = []
    if search.grid_presearch and search.grid_presearch > 1:
        axes = [np.linspace(lo, hi, search.grid_presearch) for lo, hi in bounds]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2 * n)
        if mesh.shape[0] > 200_000:
            raise ValueError("grid presearch too large; lower grid_presearch")
        rewards = reward_of_starts(spec, mesh, horizon, dt)
        seen["evals"] += mesh.shape[0]
        finite = np.isfinite(rewards)
        if finite.any():
            seen["lo"] = min(seen["lo"], float(np.min(rewards[finite])))
            seen["hi"] = max(seen["hi"], float(np.max(rewards[finite])))
        starts.append(mesh[int(np.argmax(rewards))])
    for r in range(search.restarts):
        rng = np.random.default_rng([search.seed, r])
        starts.append(rng.uniform(bounds[:, 0], bounds[:, 1]))

    best_x, best_r = None, -math.inf
    for x0 in starts:
        res = scipy.optimize.minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=scipy.optimize.Bounds(bounds[:, 0], bounds[:, 1]),
            options={
                "maxfev": search.max_evals,
                "xatol": search.simplex_tol,
                "fatol": search.simplex_tol,
            },
        )
        val = -float(res.fun)
        if val > best_r:
            best_r, best_x = val, np.asarray(res.x, dtype=float)

    if not (seen["hi"] > seen["lo"]):
        raise NoImprovement(
            "reward landscape is flat: every evaluation returned "
            f"{seen['hi'] if math.isfinite(seen['hi']) else 'non-finite'}"
        )
    return OptResult(
        s0_star=PhaseState(best_x[:n], best_x[n:]),
        reward_star=best_r,
        evals=seen["evals"],
    )


def saddle_points(
    spec: ComplexHamiltonianSpec,
    bounds: np.ndarray | None = None,
    n_starts: int = 64,
    seed: int = 0,
    grad_tol: float = 1e-9,
    dedup_tol: float = 1e-6,
) -> list[CriticalPoint]:
    """Critical points of the potential, classified by Hessian signature.

    Uncoupled potentials are solved exactly per coordinate (polynomial
    roots of V'); coupled ones fall back to seeded multi-start root
    finding on grad V.  index counts negative Hessian eigenvalues, so
    index 0 is a minimum and index >= 1 a saddle or maximum; the
    phase-space fixed points sit at (q*, 0).
    """
    n = spec.n_modes
    if not spec.couplings:
        per_coord = []
        for i in range(n):
            dcoef = spec.poly_coeffs[i, 1:] * np.arange(1, 7)
            if not np.any(dcoef):
                per_coord.append(np.array([0.0]))  # free coordinate: canonical 0
                continue
            roots = np.roots(dcoef[::-1])
            real = roots[np.abs(roots.imag) <= 1e-9 * (1 + np.abs(roots))].real
            real = np.unique(np.round(np.sort(real), 12))
            per_coord.append(real if real.size else np.array([]))
        if any(r.size == 0 for r in per_coord):
            return []
        total = int(np.prod([r.size for r in per_coord]))
        if total > 20000:
            raise ValueError("too many critical-point combinations to enumerate")
        mesh = np.stack(np.meshgrid(*per_coord, indexing="ij"), axis=-1).reshape(-1, n)
        candidates = list(mesh)
    else:
        if bounds is None:
            bounds = np.tile([-3.0, 3.0], (n, 1))
        rng = np.random.default_rng(seed)
        guesses = rng.uniform(bounds[:, 0], bounds[:, 1], size=(n_starts, n))
        candidates = []
        for g in guesses:
            sol = scipy.optimize.root(
                spec.grad_potential, g, jac=spec.hess_potential, method="hybr"
            )
            if sol.success:
                candidates.append(np.asarray(sol.x, dtype=float))

    points = []
    for q in candidates:
        if np.linalg.norm(spec.grad_potential(q)) > grad_tol * (1 + np.linalg.norm(q)):
            continue
        if any(np.linalg.norm(q - cp.q) <= dedup_tol for cp in points):
            continue
        eig = np.linalg.eigvalsh(spec.hess_potential(q))
        scale = max(1.0, float(np.max(np.abs(eig))) if eig.size else 1.0)
        index = int(np.count_nonzero(eig < -1e-9 * scale))
        points.append(CriticalPoint(q=q, index=index, hessian_eigenvalues=eig))
    points.sort(key=lambda cp: (cp.index, tuple(np.round(cp.q, 10))))
    return points


def dwell_time(
    spec: ComplexHamiltonianSpec,
    delta: float,
    big_delta: float,
    lyapunov: float,
    dt: float = 1e-3,
    saddle_q: np.ndarray | None = None,
    bound: float = BLOWUP_BOUND,
) -> DwellResult:
    """Escape time from a hyperbolic fixed point versus the log law.

    A trajectory released at rest a distance ``delta`` along the
    unstable direction leaves the ball of radius ``big_delta`` after
    roughly ln(big_delta/delta)/lyapunov; this measures both sides.
    """
    if not (0 < delta <= big_delta):
        raise ValueError("need 0 < delta <= big_delta")
    if not lyapunov > 0:
        raise ValueError("lyapunov exponent must be positive")
    if saddle_q is None:
        hyper = [cp for cp in saddle_points(spec) if cp.index >= 1]
        if not hyper:
            raise ValueError("potential has no hyperbolic critical point")
        saddle_q = min(hyper, key=lambda cp: float(np.linalg.norm(cp.q))).q
    saddle_q = np.asarray(saddle_q, dtype=float).ravel()

    hess = spec.hess_potential(saddle_q)
    eigval, eigvec = np.linalg.eigh(hess)
    if eigval[0] >= 0:
        raise ValueError("chosen critical point is not hyperbolic")
    u = eigvec[:, 0]
    nz = np.nonzero(np.abs(u) > 1e-12)[0][0]
    u = u * np.sign(u[nz])

    predicted = math.log(big_delta / delta) / lyapunov
    max_steps = int(math.ceil((4 * predicted + 50.0) / dt))
    masses, coeffs, ci, cj, cc, *_ = _packed(spec)
    t, status = _exit_kernel(
        saddle_q + delta * u,
        np.zeros_like(saddle_q),
        float(dt),
        masses,
        coeffs,
        ci,
        cj,
        cc,
        saddle_q,
        float(big_delta),
        max_steps,
        float(bound),
    )
    if status == 2:
        raise Blowup("trajectory escaped the phase-space bound before exiting")
    if status == 1:
        raise NoConvergence(
            f"no exit from radius {big_delta} within {max_steps * dt:.1f} time units"
        )
    return DwellResult(measured=float(t), predicted=predicted)


def double_well_spec(
    bumps=None,
    curvature: float = 1.0,
    n_modes: int = 1,
) -> ComplexHamiltonianSpec:
    """Uncoupled double wells V_i = -curvature q_i^2 / 2 + q_i^4 / 4.

    The origin is a saddle of the potential with linearized exponent
    sqrt(curvature); the wells sit at q_i = +-sqrt(curvature).
    """
    coeffs = np.zeros((n_modes, 7))
    coeffs[:, 2] = -curvature / 2.0
    coeffs[:, 4] = 0.25
    return ComplexHamiltonianSpec(
        masses=np.ones(n_modes),
        poly_coeffs=coeffs,
        couplings=(),
        bumps=tuple(bumps) if bumps else (),
    )


def hilltop_bump(n_modes: int = 1, sigma: float = 0.25, weight: float = 1.0) -> GaussianBump:
    """Favorable im_h region centered on the joint potential maximum."""
    return GaussianBump(
        center_q=np.zeros(n_modes),
        center_p=np.zeros(n_modes),
        sigma=sigma,
        weight=weight,
    )


def inflaton_toy(
    n_modes: int,
    mode_curvature: float,
    horizon: float,
    dt: float,
    search: SearchConfig | None = None,
    delta: float = 1e-8,
    exit_radius: float = 0.1,
    bump_sigma: float = 0.25,
    bump_weight: float = 1.0,
    bound: float = BLOWUP_BOUND,
) -> InflatonReport:
    """Uncoupled inverted-top modes with a favorable bump at the joint origin.

    Measures the per-mode escape times from a rest start displaced by
    ``delta`` in every coordinate (the modes are uncoupled, so each
    matches the single-mode log law), and runs the initial-condition
    optimizer, which should select the joint saddle.  The e-folding
    analog is the joint dwell time scaled by the linearized growth rate
    sqrt(mode_curvature).
    """
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    spec = double_well_spec(
        bumps=[hilltop_bump(n_modes, bump_sigma, bump_weight)],
        curvature=mode_curvature,
        n_modes=n_modes,
    )
    rate = math.sqrt(mode_curvature)
    predicted = math.log(exit_radius / delta) / rate
    masses, coeffs, ci, cj, cc, *_ = _packed(spec)
    max_steps = int(math.ceil((4 * predicted + 50.0) / dt))
    times, status = _mode_exit_kernel(
        np.full(n_modes, delta),
        np.zeros(n_modes),
        float(dt),
        masses,
        coeffs,
        ci,
        cj,
        cc,
        np.zeros(n_modes),
        float(exit_radius),
        max_steps,
        float(bound),
    )
    if status == 2:
        raise Blowup("mode trajectory escaped the phase-space bound")
    if status == 1:
        raise NoConvergence("a mode failed to exit within the time budget")

    if search is None:
        search = SearchConfig(
            bounds=np.tile([-1.2, 1.2], (2 * n_modes, 1)),
            restarts=4,
            seed=0,
            max_evals=200 * 2 * n_modes,
            simplex_tol=1e-9,
            grid_presearch=21 if n_modes == 1 else 3,
        )
    opt = optimize_initial(spec, horizon, dt, search)
    joint_dwell = float(np.min(times))
    return InflatonReport(
        per_mode_dwell=times,
        predicted_mode_dwell=predicted,
        total_reward=opt.reward_star,
        efolding_analog=rate * joint_dwell,
        s0_star=opt.s0_star,
        evals=opt.evals,
    )
