"""Closed-form linear algebra for complex 2x2 matrices.

Everything in the simulator (Hamiltonians, propagators, density matrices,
states) lives in a fixed two-level basis: sigma_z = diag(+1, -1), so row/
column index 0 is spin-up and index 1 is spin-down. All operations here are
exact to roundoff for the 2x2 case:

* ``mat_exp`` uses the trace-split closed form
  exp(A) = e^{tr A / 2} (cosh(mu) I + sinhc(mu) B), where B = A - (tr A/2) I
  is traceless and mu^2 = -det B.  It is exact including the defective
  (mu -> 0) limit, where sinhc is evaluated by series.
* ``mat_log_principal`` uses the divided-difference (Lagrange-Sylvester)
  form of log on the two eigenvalues, which degrades gracefully to the
  nilpotent formula log(lam) I + N/lam at a defective input.
* ``eig2`` solves the characteristic quadratic and reports defectiveness,
  which is how exceptional points are detected downstream.

No general n x n machinery is used anywhere.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "IDENTITY",
    "KET_UP",
    "KET_DOWN",
    "BranchCutWarning",
    "Eigen2",
    "as_matrix2",
    "as_vector2",
    "dagger",
    "fro_norm",
    "mat_exp",
    "mat_log_principal",
    "eig2",
    "matrix_to_json",
    "matrix_from_json",
    "vector_to_json",
    "vector_from_json",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
KET_UP = np.array([1.0, 0.0], dtype=complex)
KET_DOWN = np.array([0.0, 1.0], dtype=complex)

# Tolerances fixed once for the whole package.
_SINHC_SERIES_CUTOFF = 1e-4      # |mu| below which the sinhc/cosh series is used
_SINGULAR_DET_TOL = 1e-14        # |det U| at or below this is "singular" for the log
_DEFECTIVE_GAP_TOL = 1e-8        # eigenvalue gap threshold, relative to max(1, ||A||)
_DEFECTIVE_OVERLAP_TOL = 1e-10   # eigenvector overlap within this of 1 is defective
_BRANCH_CUT_RTOL = 1e-14         # |Im lam| <= rtol*|lam| counts as "on the cut"


class BranchCutWarning(UserWarning):
    """An eigenvalue of the log argument lies on the negative real axis.

    The principal branch is still returned, with the tie resolved
    deterministically toward +pi.
    """


def as_matrix2(a) -> np.ndarray:
    """Coerce ``a`` to a finite complex (2, 2) ndarray (fresh copy)."""
    m = np.array(a, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValueError("matrix has non-finite entries")
    return m


def as_vector2(v) -> np.ndarray:
    """Coerce ``v`` to a finite complex (2,) ndarray (fresh copy)."""
    w = np.array(v, dtype=complex)
    if w.shape != (2,):
        raise ValueError(f"expected a 2-component vector, got shape {w.shape}")
    if not np.all(np.isfinite(w.view(float))):
        raise ValueError("vector has non-finite entries")
    return w


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def fro_norm(a: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(a))


def _cosh_sinhc_from_musq(musq: complex) -> tuple[complex, complex]:
    """Return (cosh(mu), sinh(mu)/mu) given mu^2, stable as mu -> 0.

    Only even powers of mu enter, so no square root is needed on the
    series branch; this is what makes the defective case exact.
    """
    if abs(musq) < _SINHC_SERIES_CUTOFF**2:
        # cosh(mu)  = 1 + m/2 + m^2/24 + m^3/720,   m = mu^2
        # sinhc(mu) = 1 + m/6 + m^2/120 + m^3/5040
        c = 1.0 + musq * (0.5 + musq * (1.0 / 24.0 + musq / 720.0))
        s = 1.0 + musq * (1.0 / 6.0 + musq * (1.0 / 120.0 + musq / 5040.0))
        return c, s
    mu = cmath.sqrt(musq)  # either root works: cosh and sinhc are even
    return cmath.cosh(mu), cmath.sinh(mu) / mu


def mat_exp(a) -> np.ndarray:
    """Matrix exponential of a complex 2x2 matrix, exact to roundoff.

    Splits A = (tr A / 2) I + B with B traceless and evaluates
    e^A = e^{tr A/2} (cosh(mu) I + sinhc(mu) B), mu^2 = -det B.
    Handles the defective case (mu = 0, B nilpotent) exactly via the
    series branch of sinhc.
    """
    m = as_matrix2(a)
    half_tr = 0.5 * (m[0, 0] + m[1, 1])
    b = m - half_tr * IDENTITY
    musq = -(b[0, 0] * b[1, 1] - b[0, 1] * b[1, 0])
    c, s = _cosh_sinhc_from_musq(musq)
    return cmath.exp(half_tr) * (c * IDENTITY + s * b)


def _principal_log_scalar(lam: complex, on_cut_flag: list) -> complex:
    """Principal log with the branch-cut tie broken toward +pi."""
    if lam.real < 0.0 and abs(lam.imag) <= _BRANCH_CUT_RTOL * abs(lam):
        on_cut_flag.append(lam)
        lam = complex(lam.real, +0.0)  # arg = +pi, also for an incoming -0.0
    return cmath.log(lam)


def mat_log_principal(u) -> np.ndarray:
    """Principal matrix logarithm: mat_exp(result) == u, eigenvalue
    imaginary parts in (-pi, pi].

    Uses L = log(lam2) I + dd (U - lam2 I) with the divided difference
    dd = (log lam1 - log lam2)/(lam1 - lam2), evaluated by series when the
    eigenvalues nearly coincide.  At a defective input this is exactly the
    nilpotent formula log(lam) I + N/lam.

    Raises ``ValueError`` for a (numerically) singular input.  Emits
    ``BranchCutWarning`` when an eigenvalue sits on the negative real axis;
    the +pi branch is then chosen deterministically.
    """
    m = as_matrix2(u)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) <= _SINGULAR_DET_TOL:
        raise ValueError(f"matrix is singular (|det| = {abs(det):.3e}); no logarithm")
    half_tr = 0.5 * (m[0, 0] + m[1, 1])
    disc = cmath.sqrt(half_tr * half_tr - det)
    lam1, lam2 = half_tr + disc, half_tr - disc

    on_cut: list = []
    log2 = _principal_log_scalar(lam2, on_cut)
    gap = lam1 - lam2
    if abs(gap) <= 1e-4 * abs(lam2):
        # dd = log(1 + r)/ (lam2 r) with r = gap/lam2, via the log1p series
        r = gap / lam2
        dd = (1.0 - r * (0.5 - r * (1.0 / 3.0 - 0.25 * r))) / lam2
    else:
        log1 = _principal_log_scalar(lam1, on_cut)
        dd = (log1 - log2) / gap
    if on_cut:
        warnings.warn(
            f"eigenvalue(s) {on_cut} lie on the negative real axis; "
            "choosing the +pi branch",
            BranchCutWarning,
            stacklevel=2,
        )
    return log2 * IDENTITY + dd * (m - lam2 * IDENTITY)


@dataclass(frozen=True)
class Eigen2:
    """Eigendecomposition of a 2x2 complex matrix.

    values
        Eigenvalue pair, sorted by (Re, then Im) descending.
    vectors
        Unit-norm eigenvectors matching ``values``.  When ``defective`` is
        true there is only one independent eigenvector and it is duplicated.
    defective
        True when the matrix is (numerically) non-diagonalizable: the
        eigenvalues coincide within tolerance while the matrix is not a
        multiple of the identity, or the eigenvectors have collapsed onto
        each other.
    condition
        Reciprocal condition estimate of the eigenvector basis,
        sqrt((1-|g|)/(1+|g|)) with g the eigenvector overlap; 1 for an
        orthogonal basis, 0 at an exceptional point.
    """

    values: tuple[complex, complex]
    vectors: tuple[np.ndarray, np.ndarray]
    defective: bool
    condition: float


def _canonical_gauge(v: np.ndarray) -> np.ndarray:
    """Fix the free phase: make the largest-magnitude component real >= 0."""
    idx = 0 if abs(v[0]) >= abs(v[1]) else 1
    phase = v[idx] / abs(v[idx])
    return v / phase


def _null_vector(m: np.ndarray) -> np.ndarray:
    """Unit-norm solution of m @ v = 0 for a rank-deficient 2x2 m."""
    r0 = np.array([-m[0, 1], m[0, 0]])
    r1 = np.array([m[1, 1], -m[1, 0]])
    v = r0 if np.linalg.norm(r0) >= np.linalg.norm(r1) else r1
    n = np.linalg.norm(v)
    if n == 0.0:  # m == 0: any vector is an eigenvector
        return KET_UP.copy()
    return _canonical_gauge(v / n)


def eig2(a) -> Eigen2:
    """Closed-form eigendecomposition via the characteristic quadratic.

    lam = tr A/2 +- sqrt((tr A/2)^2 - det A).  Defectiveness is declared
    when |lam1 - lam2| < 1e-8 max(1, ||A||) or the eigenvector overlap
    exceeds 1 - 1e-10 -- except for a scalar matrix (A ~ lam I), which is
    degenerate but diagonalizable and gets an orthonormal basis.
    """
    m = as_matrix2(a)
    norm = fro_norm(m)
    scale = max(1.0, norm)
    half_tr = 0.5 * (m[0, 0] + m[1, 1])
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = cmath.sqrt(half_tr * half_tr - det)
    lam1, lam2 = half_tr + disc, half_tr - disc
    if (lam2.real, lam2.imag) > (lam1.real, lam1.imag):
        lam1, lam2 = lam2, lam1

    gap_small = abs(lam1 - lam2) < _DEFECTIVE_GAP_TOL * scale
    if gap_small:
        mean = 0.5 * (lam1 + lam2)
        nilp = m - mean * IDENTITY
        if fro_norm(nilp) <= 1e-11 * norm:
            # scalar matrix to roundoff: degenerate but diagonalizable
            # (diabolic, not an EP); cutoff tight enough that the identity
            # basis still meets the defective=false residual contract
            return Eigen2((lam1, lam2), (KET_UP.copy(), KET_DOWN.copy()), False, 1.0)
        v = _null_vector(nilp)
        return Eigen2((lam1, lam2), (v, v.copy()), True, 0.0)

    v1 = _null_vector(m - lam1 * IDENTITY)
    v2 = _null_vector(m - lam2 * IDENTITY)
    overlap = abs(np.vdot(v1, v2))
    overlap = min(overlap, 1.0)
    condition = math.sqrt((1.0 - overlap) / (1.0 + overlap))
    if overlap > 1.0 - _DEFECTIVE_OVERLAP_TOL:
        return Eigen2((lam1, lam2), (v1, v1.copy()), True, condition)
    return Eigen2((lam1, lam2), (v1, v2), False, condition)


# -- JSON wire format ---------------------------------------------------------
#
# A complex number is the pair [re, im]; a 2x2 matrix is row-major
# [[[re,im],[re,im]],[[re,im],[re,im]]]; a 2-vector is [[re,im],[re,im]].
# Floats pass through Python's repr, so the round trip is bit-exact.


def matrix_to_json(a) -> list:
    m = as_matrix2(a)
    return [[[m[i, j].real, m[i, j].imag] for j in range(2)] for i in range(2)]


def matrix_from_json(obj) -> np.ndarray:
    if not (isinstance(obj, (list, tuple)) and len(obj) == 2):
        raise ValueError("matrix JSON must be a 2x2 nested list of [re, im] pairs")
    rows = []
    for row in obj:
        if not (isinstance(row, (list, tuple)) and len(row) == 2):
            raise ValueError("matrix JSON must be a 2x2 nested list of [re, im] pairs")
        try:
            rows.append([complex(float(e[0]), float(e[1])) for e in row])
        except (TypeError, IndexError) as exc:
            raise ValueError("matrix entries must be [re, im] pairs") from exc
    return as_matrix2(rows)


def vector_to_json(v) -> list:
    w = as_vector2(v)
    return [[w[i].real, w[i].imag] for i in range(2)]


def vector_from_json(obj) -> np.ndarray:
    if not (isinstance(obj, (list, tuple)) and len(obj) == 2):
        raise ValueError("vector JSON must be a list of two [re, im] pairs")
    try:
        return as_vector2([complex(float(e[0]), float(e[1])) for e in obj])
    except (TypeError, IndexError) as exc:
        raise ValueError("vector entries must be [re, im] pairs") from exc
