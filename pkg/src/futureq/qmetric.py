"""Metric operator making a diagonalizable Hamiltonian normal.

With right eigenvectors collected in P, the metric Q = (P^-1)^dag P^-1
renders the eigenbasis Q-orthonormal, so H commutes with its Q-adjoint
Q^-1 H^dag Q.  The Q-inner product <x|Q|y> is the inner product in
which the non-Hermitian dynamics looks normal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimMismatch, IllConditioned
from .linalg import SpectralDecomposition, as_cmatrix, as_state, frobenius

HERM_TOL = 1e-10
INV_TOL = 1e-9


def _hermitize(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


@dataclass(frozen=True)
class QMetric:
    """Hermitian positive-definite metric with cached inverse and
    Cholesky factor (lower triangular, q = chol @ chol^dag)."""

    q: np.ndarray
    q_inv: np.ndarray
    chol: np.ndarray
    chol_ok: bool

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def _check_dim(self, n: int):
        if n != self.dim:
            raise DimMismatch(f"operand dim {n} does not match metric dim {self.dim}")


def identity_metric(dim: int) -> QMetric:
    """Trivial metric: the ordinary inner product."""
    eye = np.eye(dim, dtype=complex)
    return QMetric(q=eye.copy(), q_inv=eye.copy(), chol=eye.copy(), chol_ok=True)


def build_q(dec: SpectralDecomposition) -> QMetric:
    """Construct Q = (P^-1)^dag P^-1 from a spectral decomposition.

    The right eigenvectors become exactly Q-orthonormal and H becomes
    normal with respect to the Q-inner product.  Raises
    :class:`IllConditioned` when the Cholesky certificate or the
    inverse-consistency residual fails.
    """
    q = _hermitize(dec.p_inv.conj().T @ dec.p_inv)
    q_inv = _hermitize(dec.p @ dec.p.conj().T)
    try:
        chol = np.linalg.cholesky(q)
    except np.linalg.LinAlgError as exc:
        raise IllConditioned(f"metric failed positive-definiteness certificate: {exc}")
    inv_res = frobenius(q @ q_inv - np.eye(dec.dim))
    if inv_res > INV_TOL:
        raise IllConditioned(
            f"metric inverse residual {inv_res:.3e} exceeds {INV_TOL:.1e} "
            "(eigenvector basis too ill-conditioned)"
        )
    return QMetric(q=q, q_inv=q_inv, chol=chol, chol_ok=True)


def q_inner(metric: QMetric, x, y) -> complex:
    """Modified inner product <x|Q|y>."""
    x = as_state(x)
    y = as_state(y)
    if x.size != y.size:
        raise DimMismatch(f"vector dims {x.size} and {y.size} differ")
    metric._check_dim(x.size)
    return complex(x.conj() @ (metric.q @ y))


def q_norm(metric: QMetric, x) -> float:
    return float(np.sqrt(max(q_inner(metric, x, x).real, 0.0)))


def q_normalize(metric: QMetric, x) -> np.ndarray:
    from .errors import ZeroNorm

    x = as_state(x)
    n = q_norm(metric, x)
    if n == 0.0 or not np.isfinite(n):
        raise ZeroNorm("cannot Q-normalize a zero-norm state")
    return x / n


def q_angle(metric: QMetric, x, y) -> float:
    """Angle between rays in the Q geometry (0 for proportional vectors).

    Computed from both the parallel and the orthogonal component of x
    along y, which stays accurate near 0 where plain arccos of the
    overlap loses half the significant digits.
    """
    xn = q_normalize(metric, x)
    yn = q_normalize(metric, y)
    c = q_inner(metric, yn, xn)
    perp = xn - yn * c
    return float(np.arctan2(q_norm(metric, perp), abs(c)))


def q_adjoint(metric: QMetric, op) -> np.ndarray:
    """Q-adjoint Q^-1 O^dag Q."""
    op = as_cmatrix(op)
    metric._check_dim(op.shape[0])
    return metric.q_inv @ op.conj().T @ metric.q


def is_q_hermitian(metric: QMetric, op, tol: float = HERM_TOL) -> bool:
    """True iff O equals its Q-adjoint within ``tol`` (relative to the
    operator scale, floored at 1)."""
    op = as_cmatrix(op)
    metric._check_dim(op.shape[0])
    return frobenius(q_adjoint(metric, op) - op) <= tol * max(1.0, frobenius(op))


def random_q_hermitian(metric: QMetric, seed: int) -> np.ndarray:
    """Draw a random Q-Hermitian operator, deterministic in ``seed``.

    Uses the Cholesky factor L (Q = L L^dag): O = L^-dag B L^dag with B
    a random Hermitian Gaussian matrix, so O has the real spectrum of B.
    """
    n = metric.dim
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    b = _hermitize(g)
    lh = metric.chol.conj().T
    return scipy.linalg.solve_triangular(lh, b, lower=False) @ lh
