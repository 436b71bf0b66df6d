"""Time development of the future-included state pair and the three
quotient observables: ordinary average, weak value, Q-matrix element.

|A(t)> evolves with H; |B(t)> evolves with H^dag or with the Q-adjoint
H^dag_Q depending on the chosen convention (both appear in the
literature this machinery serves, so both are supported).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimMismatch, NearOrthogonal, ZeroNorm
from .linalg import SpectralDecomposition, as_cmatrix, as_state, mat_exp_prop
from .qmetric import QMetric, q_inner, q_norm

B_MODES = ("plain_dagger", "q_dagger")
DEFAULT_DENOM_FLOOR = 1e-12


def _quot(num: complex, den: complex) -> complex:
    # conjugate formula keeps num == den dividing to exactly 1+0j
    s = den.real * den.real + den.imag * den.imag
    return num * den.conjugate() / s


@dataclass
class EvolvingPair:
    """Boundary data of a future-included pair: |A> anchored at t_a,
    |B> anchored at the later time t_b."""

    a0: np.ndarray
    b0: np.ndarray
    t_a: float
    t_b: float
    b_adjoint_mode: str = "q_dagger"
    normalized: bool = False

    def __post_init__(self):
        self.a0 = as_state(self.a0)
        self.b0 = as_state(self.b0)
        if self.a0.size != self.b0.size:
            raise DimMismatch("pair states must share a dimension")
        if not self.t_a < self.t_b:
            raise ValueError(f"t_a={self.t_a} must precede t_b={self.t_b}")
        if self.b_adjoint_mode not in B_MODES:
            raise ValueError(f"b_adjoint_mode must be one of {B_MODES}")

    def check_normalization(self, metric: QMetric, tol: float = 1e-10):
        """Verify unit Q-norm of both boundary states (normalized pairs only)."""
        if not self.normalized:
            return
        for label, v in (("a0", self.a0), ("b0", self.b0)):
            dev = abs(q_inner(metric, v, v).real - 1.0)
            if dev > tol:
                raise ValueError(f"{label} Q-normalization off by {dev:.3e}")


def evolve_a(
    dec: SpectralDecomposition,
    a0,
    t0: float,
    t1: float,
    renormalize: bool = False,
) -> np.ndarray:
    """exp(-i H (t1 - t0)) applied to a0 (either time order is allowed)."""
    a0 = as_state(a0)
    out = mat_exp_prop(dec, t1 - t0) @ a0
    if renormalize:
        out = _renorm(out)
    return out


def evolve_b(
    dec: SpectralDecomposition,
    metric: QMetric,
    b0,
    t0: float,
    t1: float,
    mode: str = "q_dagger",
    renormalize: bool = False,
) -> np.ndarray:
    """Evolve the B-side state from t0 to t1.

    mode "plain_dagger" uses exp(-i H^dag dt); mode "q_dagger" uses
    exp(-i H^dag_Q dt), whose action in the eigenbasis conjugates the
    eigenvalues.
    """
    b0 = as_state(b0)
    dt = t1 - t0
    if mode == "plain_dagger":
        out = mat_exp_prop(dec, -dt).conj().T @ b0
    elif mode == "q_dagger":
        phases = np.exp(-1j * dec.lam.conj() * dt)
        out = (dec.p * phases) @ (dec.p_inv @ b0)
    else:
        raise ValueError(f"mode must be one of {B_MODES}")
    if renormalize:
        out = _renorm(out)
    return out


def _renorm(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ZeroNorm("evolved state collapsed to zero norm")
    return v / n


def ordinary_average(op, a) -> complex:
    """Rayleigh quotient <a|O|a> / <a|a> in the ordinary inner product."""
    op = as_cmatrix(op)
    a = as_state(a)
    if op.shape[0] != a.size:
        raise DimMismatch("operator and state dims differ")
    den = complex(a.conj() @ a)
    if den.real == 0.0:
        raise ZeroNorm("state has zero norm")
    return _quot(complex(a.conj() @ (op @ a)), den)


def weak_value(op, b, a, denom_floor: float = DEFAULT_DENOM_FLOOR) -> complex:
    """Two-state quotient <b|O|a> / <b|a>.

    Raises :class:`NearOrthogonal` when |<b|a>| falls below
    ``denom_floor`` times the product of the state norms.
    """
    op = as_cmatrix(op)
    a = as_state(a)
    b = as_state(b)
    if a.size != b.size or op.shape[0] != a.size:
        raise DimMismatch("operator and state dims differ")
    den = complex(b.conj() @ a)
    scale = np.linalg.norm(a) * np.linalg.norm(b)
    if scale == 0.0:
        raise ZeroNorm("weak value undefined for a zero state")
    if abs(den) < denom_floor * scale:
        raise NearOrthogonal(
            f"|<b|a>| = {abs(den):.3e} below floor {denom_floor:.1e} * {scale:.3e}"
        )
    return _quot(complex(b.conj() @ (op @ a)), den)


def weak_value_propagated(
    dec: SpectralDecomposition,
    op,
    a_ta,
    b_tb,
    t: float,
    t_a: float,
    t_b: float,
    denom_floor: float = DEFAULT_DENOM_FLOOR,
) -> complex:
    """Weak value with explicit propagation from both boundaries:

        <b| exp(-i(t_b - t) H) O exp(-i(t - t_a) H) |a>
        -----------------------------------------------
              <b| exp(-i(t_b - t_a) H) |a>

    The denominator is evaluated through the same split propagators as
    the numerator, so O = identity gives exactly 1 at every insertion
    time.  Invariant under rescaling of either boundary state.
    """
    op = as_cmatrix(op)
    a_ta = as_state(a_ta)
    b_tb = as_state(b_tb)
    if not (t_a <= t <= t_b):
        raise ValueError(f"insertion time {t} outside [{t_a}, {t_b}]")
    u = mat_exp_prop(dec, t - t_a) @ a_ta
    v = mat_exp_prop(dec, t_b - t).conj().T @ b_tb  # bra side of the late leg
    den = complex(v.conj() @ u)
    scale = np.linalg.norm(u) * np.linalg.norm(v)
    if scale == 0.0:
        raise ZeroNorm("propagated states have zero norm")
    if abs(den) < denom_floor * scale:
        raise NearOrthogonal(
            f"|denominator| = {abs(den):.3e} below floor {denom_floor:.1e} * {scale:.3e}"
        )
    return _quot(complex(v.conj() @ (op @ u)), den)


def q_matrix_element(
    metric: QMetric,
    op,
    b,
    a,
    denom_floor: float = DEFAULT_DENOM_FLOOR,
) -> complex:
    """Q-normalized matrix element <b|Q O|a> / <b|Q|a>."""
    op = as_cmatrix(op)
    a = as_state(a)
    b = as_state(b)
    if a.size != b.size or op.shape[0] != a.size:
        raise DimMismatch("operator and state dims differ")
    den = q_inner(metric, b, a)
    scale = q_norm(metric, a) * q_norm(metric, b)
    if scale == 0.0:
        raise ZeroNorm("Q-matrix element undefined for a zero state")
    if abs(den) < denom_floor * scale:
        raise NearOrthogonal(
            f"|<b|Q|a>| = {abs(den):.3e} below floor {denom_floor:.1e} * {scale:.3e}"
        )
    return _quot(q_inner(metric, b, op @ a), den)
