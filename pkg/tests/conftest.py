import numpy as np
from hypothesis import strategies as st

from aptsim.linalg2 import SIGMA_X, SIGMA_Y, SIGMA_Z, IDENTITY


def taylor_expm(a: np.ndarray, terms: int = 200) -> np.ndarray:
    """Independent matrix-exponential oracle: scaled 200-term Taylor series.

    Scaling-and-squaring brings ||A/2^k|| below 0.5, then the series is
    summed to `terms` and the result squared back up.  Deliberately does not
    share any code with the closed form under test.
    """
    a = np.asarray(a, dtype=complex)
    norm = np.linalg.norm(a)
    k = max(0, int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0)
    b = a / (2**k)
    out = np.eye(2, dtype=complex)
    term = np.eye(2, dtype=complex)
    for n in range(1, terms + 1):
        term = term @ b / n
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def char_poly_roots(a: np.ndarray) -> np.ndarray:
    """Eigenvalue oracle: roots of det(A - lam I) via numpy.roots."""
    a = np.asarray(a, dtype=complex)
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    return np.roots([1.0, -tr, det])


finite_reals = st.floats(
    min_value=-3.0, max_value=3.0, allow_nan=False, allow_infinity=False
)


@st.composite
def complex_matrices(draw, scale: float = 3.0):
    """Random complex 2x2 matrices with entries bounded by `scale`."""
    entries = [
        complex(draw(finite_reals), draw(finite_reals)) * (scale / 3.0)
        for _ in range(4)
    ]
    return np.array(entries, dtype=complex).reshape(2, 2)


@st.composite
def hermitian_matrices(draw, scale: float = 3.0):
    d0 = draw(finite_reals) * (scale / 3.0)
    d1 = draw(finite_reals) * (scale / 3.0)
    off = complex(draw(finite_reals), draw(finite_reals)) * (scale / 3.0)
    return np.array([[d0, off], [np.conj(off), d1]], dtype=complex)


@st.composite
def density_matrices(draw):
    """Random qubit density matrices: uniform Bloch vector in the unit ball."""
    v = np.array([draw(finite_reals), draw(finite_reals), draw(finite_reals)]) / 3.0
    r = np.linalg.norm(v)
    if r > 1.0:
        v = v / r * draw(st.floats(min_value=0.0, max_value=1.0))
    return 0.5 * (IDENTITY + v[0] * SIGMA_X + v[1] * SIGMA_Y + v[2] * SIGMA_Z)
