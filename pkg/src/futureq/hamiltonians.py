"""Hamiltonian factories for scenarios and the verification battery."""

from __future__ import annotations

import numpy as np


def standard_2x2() -> np.ndarray:
    """The running 2x2 example: non-normal, eigenvalues i and 0.

    The eigenvector for the growing eigenvalue i is (1, i)/sqrt(2), so
    the late-time/maximizing behavior is easy to check by hand.
    """
    return np.array([[0.0, 1.0], [0.0, 1j]], dtype=complex)


def random_diagonalizable(dim: int, seed: int, im_spread: float = 1.0) -> np.ndarray:
    """Seeded non-normal diagonalizable matrix with controlled Im spacing.

    Eigenvalue imaginary parts descend from near 0 to about -im_spread
    with a guaranteed pairwise gap of half the mean spacing, so the
    top-Im eigenvalue is always unique.  Eigenvectors are a mild jitter
    of the identity basis, keeping cond(P) small (well under the
    decomposition ceiling) while making the matrix genuinely non-normal.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if not im_spread > 0:
        raise ValueError("im_spread must be positive")
    spacing = im_spread / (dim - 1)
    for attempt in range(64):
        rng = np.random.default_rng([seed, attempt])
        im = -spacing * np.arange(dim) + rng.uniform(-0.2, 0.2, dim) * spacing
        im = np.sort(im)[::-1]
        for k in range(1, dim):
            im[k] = min(im[k], im[k - 1] - 0.5 * spacing)
        lam = rng.uniform(-1.0, 1.0, dim) + 1j * im
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        p = np.eye(dim) + 0.35 * g / np.sqrt(dim)
        if np.linalg.cond(p) > 50.0:
            continue
        h = p @ np.diag(lam) @ np.linalg.inv(p)
        comm = h @ h.conj().T - h.conj().T @ h
        if np.linalg.norm(comm) < 1e-6 * np.linalg.norm(h) ** 2:
            continue  # accidentally near-normal; redraw
        return h
    raise RuntimeError("failed to draw a well-conditioned non-normal matrix")
