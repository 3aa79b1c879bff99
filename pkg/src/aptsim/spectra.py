"""Closed-form eigenvalue maps, Riemann sheets, and loop holonomy.

The effective generator alpha[(delta - i Gamma) sx - J sz - i Gamma I] has
eigenvalues

    E(+-) = alpha [ +- sqrt((delta - i Gamma)^2 + J^2) - i Gamma ],

a two-valued analytic function of (delta, Gamma) with a square-root branch
point (the exceptional point) at delta = 0, Gamma = J.  The radicand
crosses the negative real axis exactly on {delta = 0, Gamma >= J}, so the
principal square root, with the sign convention pinned at delta = 0 by a
+0 imaginary part, *is* the branch obtained by continuation from an anchor
deep in the symmetry-preserving phase (large Gamma/J, delta = 0) along any
path avoiding that cut.  ``riemann_sheet_grid`` therefore stores the
principal-labelled sheets; the continuation bookkeeping runs as a seam
detector: any grid edge across which keeping the labels would be farther
(in total eigenvalue displacement) than exchanging them is recorded as a
seam, and the recorded seams are falsifiable against the analytic cut
locus above.

``wind_around_ep`` does genuine path continuation: one eigenvalue is
tracked by nearest-neighbour matching around a closed parameter loop; a
loop enclosing the exceptional point an odd number of times ends on the
other branch (square-root monodromy of order two).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .floquet import APTParams, apt_hamiltonian
from .linalg2 import eig2

__all__ = [
    "EigenPair",
    "SpectrumSheet",
    "LoopResult",
    "UnderResolvedLoopError",
    "apt_eigenvalues",
    "detuned_eigenvalues",
    "riemann_sheet_grid",
    "wind_around_ep",
]


class UnderResolvedLoopError(RuntimeError):
    """A continuation step moved farther than half the local eigenvalue gap;
    rerun with more steps."""


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalue pair of the effective generator; e_plus + e_minus = -2i alpha Gamma."""

    e_plus: complex
    e_minus: complex


def _radicand(J: float, Gamma: float, delta: float) -> complex:
    # force a +0.0 imaginary part at delta = 0 so the on-cut value takes the
    # +i sqrt branch deterministically (ties toward the preserving-phase label)
    w = complex(delta * delta - Gamma * Gamma + J * J, -2.0 * delta * Gamma)
    if w.imag == 0.0:
        w = complex(w.real, +0.0)
    return w


def detuned_eigenvalues(J: float, Gamma: float, delta: float, alpha: float) -> EigenPair:
    """Closed-form eigenvalues alpha[+-sqrt((delta - i Gamma)^2 + J^2) - i Gamma].

    The square root is the principal branch with the +i convention on the
    cut, which equals continuation from the preserving-phase anchor (see
    module docstring); it is not an arbitrary choice.
    """
    if J <= 0.0:
        raise ValueError(f"coupling J must be > 0, got {J}")
    root = cmath.sqrt(_radicand(J, Gamma, delta))
    shift = -1j * alpha * Gamma
    return EigenPair(e_plus=alpha * root + shift, e_minus=-alpha * root + shift)


def apt_eigenvalues(J: float, Gamma: float, alpha: float) -> EigenPair:
    """Zero-detuning eigenvalues alpha(-i Gamma +- sqrt(J^2 - Gamma^2)).

    Labels: in the broken phase (Gamma < J) e_plus carries the positive
    real part; in the preserving phase (Gamma > J) e_plus is the slowly
    decaying branch (larger imaginary part).
    """
    return detuned_eigenvalues(J, Gamma, 0.0, alpha)


@dataclass(frozen=True)
class SpectrumSheet:
    """Continuation-labelled eigenvalue sheets over a (delta/J, Gamma/J) grid.

    ``sheet_plus``/``sheet_minus`` have shape (len(gamma_over_J),
    len(delta_over_J)).  ``seam`` flags cells incident to a grid edge
    across which the labels are discontinuous (the branch cut);
    ``defective`` flags cells within 1e-8 of the exceptional point.
    """

    delta_over_J: np.ndarray
    gamma_over_J: np.ndarray
    sheet_plus: np.ndarray
    sheet_minus: np.ndarray
    seam: np.ndarray
    defective: np.ndarray
    alpha: float
    J: float


def _edge_is_seam(pa: EigenPair, pb: EigenPair) -> bool:
    """True when value continuity across the edge demands exchanging labels."""
    d_keep = abs(pa.e_plus - pb.e_plus) + abs(pa.e_minus - pb.e_minus)
    d_swap = abs(pa.e_plus - pb.e_minus) + abs(pa.e_minus - pb.e_plus)
    return d_swap < d_keep


def riemann_sheet_grid(
    delta_range: tuple[float, float],
    gamma_range: tuple[float, float],
    resolution: int,
    alpha: float,
    J: float = 1.0,
) -> SpectrumSheet:
    """Evaluate both eigenvalue sheets over a rectangular grid.

    ``delta_range``/``gamma_range`` are inclusive (min, max) in units of J;
    ``resolution`` is the number of points per axis (>= 2).  Cells whose
    (delta/J, Gamma/J) lie within 1e-8 of the exceptional point (0, 1) are
    flagged defective and excluded from seam detection.
    """
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2 per axis, got {resolution}")
    deltas = np.linspace(delta_range[0], delta_range[1], resolution)
    gammas = np.linspace(gamma_range[0], gamma_range[1], resolution)
    pairs = [
        [detuned_eigenvalues(J, g * J, d * J, alpha) for d in deltas] for g in gammas
    ]
    plus = np.array([[p.e_plus for p in row] for row in pairs])
    minus = np.array([[p.e_minus for p in row] for row in pairs])
    defective = np.array(
        [[math.hypot(d, g - 1.0) <= 1e-8 for d in deltas] for g in gammas]
    )
    seam = np.zeros((resolution, resolution), dtype=bool)
    for i in range(resolution):
        for j in range(resolution):
            if defective[i, j]:
                continue
            if j + 1 < resolution and not defective[i, j + 1]:
                if _edge_is_seam(pairs[i][j], pairs[i][j + 1]):
                    seam[i, j] = seam[i, j + 1] = True
            if i + 1 < resolution and not defective[i + 1, j]:
                if _edge_is_seam(pairs[i][j], pairs[i + 1][j]):
                    seam[i, j] = seam[i + 1, j] = True
    return SpectrumSheet(
        delta_over_J=deltas,
        gamma_over_J=gammas,
        sheet_plus=plus,
        sheet_minus=minus,
        seam=seam,
        defective=defective,
        alpha=alpha,
        J=J,
    )


@dataclass(frozen=True)
class LoopResult:
    """Outcome of tracking one eigenvalue around a closed parameter loop."""

    loop: np.ndarray  # (steps+1, 2) points in (delta/J, Gamma/J)
    permutation: str  # "identity" | "swap"
    winding_valid: bool  # tracked value closed onto one of the start branches
    steps: int
    min_gap: float


def wind_around_ep(
    center: tuple[float, float],
    radius: float,
    steps: int,
    alpha: float,
    J: float = 1.0,
    turns: int = 1,
) -> LoopResult:
    """Continue the e_plus branch around a circle in (delta/J, Gamma/J).

    Returns permutation "swap" iff the continued value ends on the other
    branch, which happens exactly when the loop encloses the exceptional
    point (0, 1) an odd number of times.  Raises
    :class:`UnderResolvedLoopError` when any step moves the tracked value
    farther than half the local gap.
    """
    if steps < 64:
        raise ValueError(f"need at least 64 steps per loop, got {steps}")
    if turns < 1:
        raise ValueError(f"turns must be >= 1, got {turns}")
    cd, cg = float(center[0]), float(center[1])
    ep_clearance = abs(math.hypot(cd - 0.0, cg - 1.0) - radius)
    if ep_clearance < 1e-3:
        raise ValueError(
            f"loop passes within {ep_clearance:.2e} of the exceptional point; "
            "keep a clearance of at least 1e-3"
        )
    total = steps * turns
    angles = 2.0 * math.pi * turns * np.arange(total + 1) / total
    points = np.column_stack([cd + radius * np.cos(angles), cg + radius * np.sin(angles)])
    if np.any(points[:, 1] < 0.0):
        raise ValueError("loop leaves the physical half-plane Gamma >= 0")

    start = detuned_eigenvalues(J, points[0, 1] * J, points[0, 0] * J, alpha)
    tracked = start.e_plus
    min_gap = abs(start.e_plus - start.e_minus)
    for d, g in points[1:]:
        pair = detuned_eigenvalues(J, g * J, d * J, alpha)
        gap = abs(pair.e_plus - pair.e_minus)
        min_gap = min(min_gap, gap)
        d_plus, d_minus = abs(pair.e_plus - tracked), abs(pair.e_minus - tracked)
        nearest = pair.e_plus if d_plus <= d_minus else pair.e_minus
        if abs(nearest - tracked) > 0.5 * gap:
            raise UnderResolvedLoopError(
                f"continuation step displacement {abs(nearest - tracked):.3e} exceeds "
                f"half the local gap {gap:.3e}; increase steps (currently {steps})"
            )
        tracked = nearest
    d_plus, d_minus = abs(tracked - start.e_plus), abs(tracked - start.e_minus)
    tol = 1e-9 * max(1.0, abs(start.e_plus), abs(start.e_minus))
    winding_valid = min(d_plus, d_minus) <= tol
    permutation = "identity" if d_plus <= d_minus else "swap"
    return LoopResult(
        loop=points,
        permutation=permutation,
        winding_valid=winding_valid,
        steps=steps,
        min_gap=min_gap,
    )


def eigenvalues_from_matrix(params: APTParams) -> tuple[complex, complex]:
    """Numeric cross-check path: eigenvalues of the constructed generator."""
    return eig2(apt_hamiltonian(params)).values


def locate_exceptional_point(
    J: float = 1.0,
    guess: tuple[float, float] = (0.3, 1.5),
    tol: float = 1e-10,
    max_iter: int = 100,
) -> tuple[float, float]:
    """Numeric cross-check of the analytic EP location (0, J).

    2-D Newton iteration on (Re, Im) of the discriminant
    (delta - i Gamma)^2 + J^2; converges quadratically from any sensible
    guess in the upper half-plane.
    """
    d, g = float(guess[0]), float(guess[1])
    for _ in range(max_iter):
        f1 = d * d - g * g + J * J
        f2 = -2.0 * d * g
        if math.hypot(f1, f2) < tol * J * J:
            return d, g
        # Jacobian [[2d, -2g], [-2g, -2d]], determinant -4(d^2 + g^2)
        det = -4.0 * (d * d + g * g)
        if det == 0.0:
            raise ArithmeticError("Newton iteration stalled at the origin")
        dd = (2.0 * d * f1 - 2.0 * g * f2) / det
        dg = -(2.0 * g * f1 + 2.0 * d * f2) / det
        d, g = d + dd, g + dg
    raise ArithmeticError(f"EP locator failed to converge within {max_iter} iterations")
