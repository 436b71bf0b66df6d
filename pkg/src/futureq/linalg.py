"""Dense complex matrix primitives.

Everything downstream (metric construction, state evolution, the
maximization machinery) works through the spectral decomposition built
here, so this module owns the determinism conventions: eigenvalue
ordering, eigenvector normalization and the diagonalizability
certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Defective, DimMismatch, PropagatorOverflow

DEFAULT_TOL_RECON = 1e-8
DEFAULT_COND_CEILING = 1e8
DEFAULT_MAG_CEILING = 1e150


def as_cmatrix(m) -> np.ndarray:
    """Validate and return a square, finite complex matrix."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimMismatch("matrix must be at least 1x1")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix entries must be finite")
    return a


def as_state(v) -> np.ndarray:
    """Validate and return a finite, nonzero complex state vector."""
    a = np.asarray(v, dtype=complex).ravel()
    if a.size < 1:
        raise DimMismatch("state vector must have at least one component")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("state entries must be finite")
    return a


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro"))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigensystem of a diagonalizable (generally non-normal) matrix.

    Columns of ``p`` are unit right eigenvectors, ordered by decreasing
    imaginary part of the eigenvalue, ties broken by increasing real
    part.  ``p_inv`` rows are the matching left eigenvectors (dual
    basis), so ``p @ diag(lam) @ p_inv`` reconstructs the input.
    """

    p: np.ndarray
    lam: np.ndarray
    p_inv: np.ndarray
    cond_p: float

    @property
    def dim(self) -> int:
        return self.p.shape[0]

    @property
    def max_im(self) -> float:
        """Largest imaginary part of the spectrum (first entry by ordering)."""
        return float(self.lam[0].imag)

    def matrix(self) -> np.ndarray:
        """Reconstruct the decomposed matrix."""
        return (self.p * self.lam) @ self.p_inv

    def top_subspace(self, deg_tol: float | None = None) -> np.ndarray:
        """Indices whose eigenvalues lie within ``deg_tol`` of the top
        imaginary part.  Contiguous from 0 by the sort order."""
        if deg_tol is None:
            deg_tol = default_deg_tol(self.max_im)
        mask = self.max_im - self.lam.imag <= deg_tol
        return np.nonzero(mask)[0]


def default_deg_tol(max_im: float) -> float:
    return 1e-9 * max(1.0, abs(max_im))


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Unit norm, with the largest-magnitude component made real positive."""
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    ph = v[k] / abs(v[k])
    return v * ph.conjugate()


def _column_key(v: np.ndarray):
    return tuple(x for c in v for x in (c.real, c.imag))


def eig_decompose(
    m,
    tol_recon: float = DEFAULT_TOL_RECON,
    cond_ceiling: float = DEFAULT_COND_CEILING,
) -> SpectralDecomposition:
    """Diagonalize a dense complex matrix with a reconstruction contract.

    Eigenvalues are sorted by decreasing imaginary part (ties: increasing
    real part; exact ties: lexicographic eigenvector order).  Raises
    :class:`Defective` when the relative reconstruction residual exceeds
    ``tol_recon`` or the eigenvector matrix has condition number above
    ``cond_ceiling`` -- the numerical signature of a non-diagonalizable
    input.
    """
    a = as_cmatrix(m)
    lam, vecs = np.linalg.eig(a)

    order = np.lexsort((lam.real, -lam.imag))
    lam = lam[order]
    vecs = vecs[:, order]
    p = np.column_stack([_fix_phase(vecs[:, j]) for j in range(vecs.shape[1])])

    # exact eigenvalue ties: stable order by eigenvector components
    j = 0
    n = lam.size
    while j < n:
        k = j + 1
        while k < n and lam[k] == lam[j]:
            k += 1
        if k - j > 1:
            sub = sorted(range(j, k), key=lambda i: _column_key(p[:, i]))
            p[:, j:k] = p[:, sub]
        j = k

    cond_p = float(np.linalg.cond(p))
    if not np.isfinite(cond_p) or cond_p > cond_ceiling:
        raise Defective(
            f"eigenvector condition number {cond_p:.3e} exceeds ceiling {cond_ceiling:.1e}"
        )
    p_inv = np.linalg.inv(p)

    scale = max(frobenius(a), np.finfo(float).tiny)
    recon = frobenius(a @ p - p * lam) / scale
    inv_res = frobenius(p @ p_inv - np.eye(n))
    if recon > tol_recon or inv_res > tol_recon:
        raise Defective(
            f"reconstruction residual {recon:.3e} / inverse residual {inv_res:.3e} "
            f"exceed tol {tol_recon:.1e}"
        )
    return SpectralDecomposition(p=p, lam=lam, p_inv=p_inv, cond_p=cond_p)


def mat_exp_prop(
    dec: SpectralDecomposition,
    t: float,
    mag_ceiling: float = DEFAULT_MAG_CEILING,
) -> np.ndarray:
    """Propagator exp(-i H t) assembled from the decomposition of H.

    Raises :class:`PropagatorOverflow` when any diagonal factor
    exp(im(lam) * t) would exceed ``mag_ceiling``.
    """
    growth = dec.lam.imag * t
    if np.max(growth) > np.log(mag_ceiling):
        raise PropagatorOverflow(
            f"propagator magnitude exp({np.max(growth):.3e}) exceeds ceiling"
        )
    phases = np.exp(-1j * dec.lam * t)
    return (dec.p * phases) @ dec.p_inv


def commutator_norm(a, b) -> float:
    """Frobenius norm of the commutator [a, b]."""
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape != b.shape:
        raise DimMismatch(f"incompatible shapes {a.shape} and {b.shape}")
    return frobenius(a @ b - b @ a)
