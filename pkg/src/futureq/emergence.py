"""Collapse of generic states onto the top-imaginary eigencomponents.

Expanded in the Q-orthonormal eigenbasis, each coefficient of an
evolving state carries a factor exp(im(lam_i) t), so after Q-
renormalization all weight migrates to the eigenvalues with the largest
imaginary part and the dynamics becomes indistinguishable from evolution
under a (Q-)Hermitian generator.  This module measures that collapse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, ZeroNorm
from .linalg import SpectralDecomposition, as_state, default_deg_tol
from .qmetric import QMetric

WEIGHT_FLOOR = 1e-280  # log-underflow guard for fit windows


@dataclass
class SurvivalSeries:
    """Per-eigencomponent Q-weight fractions along a time grid."""

    t_grid: np.ndarray
    weights: np.ndarray  # shape (times, dim), rows sum to 1
    fidelity_top: np.ndarray  # weight captured by the top-im subspace
    top_mask: np.ndarray  # bool, which components span the top subspace
    im_parts: np.ndarray  # im(lam) per component, for rate bookkeeping

    @property
    def dim(self) -> int:
        return self.weights.shape[1]


def survival_fractions(
    dec: SpectralDecomposition,
    metric: QMetric,
    psi0,
    t_grid,
    deg_tol: float | None = None,
) -> SurvivalSeries:
    """Eigencomponent weight history of the Q-renormalized evolved state.

    weight_i(t) = |c_i(t)|^2 / sum_j |c_j(t)|^2 with c = P^-1 psi(t);
    computed with a shifted-exponent softmax so arbitrarily late times
    neither overflow nor underflow.
    """
    psi0 = as_state(psi0)
    if np.linalg.norm(psi0) == 0.0:
        raise ZeroNorm("initial state has zero norm")
    t_grid = np.atleast_1d(np.asarray(t_grid, dtype=float))
    c0 = dec.p_inv @ psi0
    if not np.any(np.abs(c0) > 0.0):
        raise ZeroNorm("initial state has zero Q-norm")

    with np.errstate(divide="ignore"):
        log_w0 = 2.0 * np.log(np.abs(c0))  # -inf where a component is absent
    rates = 2.0 * dec.lam.imag
    log_w = log_w0[None, :] + rates[None, :] * t_grid[:, None]
    shift = np.max(log_w, axis=1, keepdims=True)
    w = np.exp(log_w - shift)
    weights = w / np.sum(w, axis=1, keepdims=True)

    if deg_tol is None:
        deg_tol = default_deg_tol(dec.max_im)
    top_mask = dec.max_im - dec.lam.imag <= deg_tol
    fidelity_top = np.sum(weights[:, top_mask], axis=1)
    return SurvivalSeries(
        t_grid=t_grid,
        weights=weights,
        fidelity_top=fidelity_top,
        top_mask=top_mask,
        im_parts=dec.lam.imag.copy(),
    )


def decay_rate_fit(series: SurvivalSeries, component: int) -> float:
    """Least-squares slope of log(weight_i / fidelity_top) over the tail.

    The fit window is the last half of the grid, restricted to weights
    above the underflow floor; fewer than 4 usable points raises
    :class:`InsufficientData`.  For exponential collapse the slope is
    -2 * (max_im - im(lam_i)).
    """
    if component < 0 or component >= series.dim:
        raise ValueError(f"component {component} out of range")
    if series.top_mask[component]:
        raise ValueError(
            f"component {component} lies in the top subspace; its ratio does not decay"
        )
    t = series.t_grid
    w = series.weights[:, component]
    usable = (t >= t[0] + (t[-1] - t[0]) / 2) & (w > WEIGHT_FLOOR) & (series.fidelity_top > 0)
    if np.count_nonzero(usable) < 4:
        raise InsufficientData(
            f"only {np.count_nonzero(usable)} usable points in the fit window"
        )
    y = np.log(w[usable] / series.fidelity_top[usable])
    slope = np.polyfit(t[usable], y, 1)[0]
    return float(slope)


def hermiticity_defect(
    dec: SpectralDecomposition,
    metric: QMetric,
    psi0,
    t: float,
    deg_tol: float | None = None,
) -> float:
    """Weight remaining outside the top subspace at time t (1 - fidelity)."""
    series = survival_fractions(dec, metric, psi0, [t], deg_tol=deg_tol)
    return float(1.0 - series.fidelity_top[0])


def generic_state(dim: int, seed: int = 0, jitter: float = 1e-3) -> np.ndarray:
    """Uniform superposition with a small seeded complex jitter, used as
    the default 'generic' initial state (avoids symmetry accidents)."""
    rng = np.random.default_rng(seed)
    v = np.ones(dim, dtype=complex)
    v += jitter * (rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
    return v / np.linalg.norm(v)
