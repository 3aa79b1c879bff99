"""State evolution, normalized density matrices, entropy, and asymptotic
eigenstate extraction.

Raw (trace-decaying) evolution is rho(t) = U(t) rho0 U(t)^dag with
U(t) = exp(-i H t) for a static generator, or the n-th power of the
one-period propagator for a driving protocol (stroboscopic times only).
Observables live on the normalized matrix rho_bar = rho / tr(rho); its
diagonal gives the normalized populations and its spectrum the base-2
von Neumann entropy.

In the symmetry-preserving phase (Gamma > J) rho_bar converges to the
projector onto the slowly decaying eigenstate of the effective generator;
running the phase-reversed protocol converges instead onto the fast one.
``asymptotic_eigenstates`` extracts both and reports spin populations,
relative phases, and the eigenstate overlap, which equals J/Gamma in this
phase and tends to one at the exceptional point.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .floquet import DrivingProtocol, canonical_protocol, period_propagator
from .linalg2 import IDENTITY, KET_DOWN, as_matrix2, as_vector2, eig2, fro_norm, mat_exp

__all__ = [
    "FullyDecayedError",
    "PhaseDomainError",
    "StroboscopicTimeError",
    "MixedState",
    "Trajectory",
    "EigenstateReport",
    "evolve_raw",
    "normalize_rho",
    "von_neumann_entropy",
    "entropy_series",
    "asymptotic_eigenstates",
    "eigenstate_overlap",
    "stroboscopic_times",
]

_HERMITICITY_TOL = 1e-10
_PSD_TOL = 1e-10
_TRACE_FLOOR = 1e-14
_TRACE_GROWTH_TOL = 1e-8


class FullyDecayedError(ValueError):
    """The raw state trace fell below the normalization floor."""

    def __init__(self, trace: float):
        super().__init__(f"state fully decayed: trace = {trace:.3e} <= {_TRACE_FLOOR}")
        self.trace = trace


class PhaseDomainError(ValueError):
    """Operation requires the symmetry-preserving phase (Gamma > J)."""


class StroboscopicTimeError(ValueError):
    """Protocol evolution was requested at a non-integer multiple of the period."""


def _check_density_like(rho: np.ndarray, context: str) -> None:
    if fro_norm(rho - rho.conj().T) > _HERMITICITY_TOL * max(1.0, fro_norm(rho)):
        raise ValueError(f"{context}: matrix is not Hermitian")
    evals = _hermitian_eigenvalues(rho)
    if evals[1] < -_PSD_TOL:
        raise ValueError(
            f"{context}: matrix is not positive semidefinite "
            f"(min eigenvalue {evals[1]:.3e})"
        )


def _hermitian_eigenvalues(rho: np.ndarray) -> tuple[float, float]:
    """(larger, smaller) real eigenvalues of a Hermitian 2x2 matrix."""
    m = 0.5 * (rho[0, 0].real + rho[1, 1].real)
    det = (rho[0, 0] * rho[1, 1] - rho[0, 1] * rho[1, 0]).real
    disc = max(m * m - det, 0.0)
    r = math.sqrt(disc)
    return m + r, m - r


def normalize_rho(rho) -> np.ndarray:
    """rho / tr(rho).  Scale invariant; raises FullyDecayedError when the
    trace is at or below 1e-14."""
    m = as_matrix2(rho)
    tr = (m[0, 0] + m[1, 1]).real
    if tr <= _TRACE_FLOOR:
        raise FullyDecayedError(tr)
    return m / tr


def von_neumann_entropy(rho_bar) -> float:
    """Base-2 entropy -sum(lam log2 lam) of a unit-trace Hermitian PSD matrix.

    Eigenvalues within 1e-10 of the [0, 1] interval are clamped onto it;
    anything farther out raises.
    """
    m = as_matrix2(rho_bar)
    if fro_norm(m - m.conj().T) > _HERMITICITY_TOL * max(1.0, fro_norm(m)):
        raise ValueError("entropy input is not Hermitian")
    tr = (m[0, 0] + m[1, 1]).real
    if abs(tr - 1.0) > 1e-10:
        raise ValueError(f"entropy input must have unit trace, got {tr}")
    s = 0.0
    for lam in _hermitian_eigenvalues(m):
        if lam < -_PSD_TOL or lam > 1.0 + _PSD_TOL:
            raise ValueError(f"eigenvalue {lam} outside [0, 1] beyond tolerance")
        lam = min(max(lam, 0.0), 1.0)
        if lam > 0.0:
            s -= lam * math.log2(lam)
    return abs(s)  # kill the -0.0 from a pure state


@dataclass(frozen=True)
class MixedState:
    """beta |psi1><psi1| + (1-beta) |psi2><psi2| with normalized pure states."""

    psi1: np.ndarray
    psi2: np.ndarray
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "psi1", as_vector2(self.psi1))
        object.__setattr__(self, "psi2", as_vector2(self.psi2))
        for name in ("psi1", "psi2"):
            v = getattr(self, name)
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError(f"{name} must be normalized to 1 within 1e-12")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must be in [0, 1], got {self.beta}")

    @property
    def rho0(self) -> np.ndarray:
        return self.beta * np.outer(self.psi1, self.psi1.conj()) + (
            1.0 - self.beta
        ) * np.outer(self.psi2, self.psi2.conj())


@dataclass(frozen=True)
class Trajectory:
    """Raw and normalized evolution at a sequence of times.

    ``alpha`` scales the auxiliary time axis alpha*t used in outputs.
    """

    times: np.ndarray = field(repr=False)
    rho_raw: np.ndarray = field(repr=False)  # (n, 2, 2)
    rho_bar: np.ndarray = field(repr=False)
    n_up: np.ndarray = field(repr=False)
    n_down: np.ndarray = field(repr=False)
    nbar_up: np.ndarray = field(repr=False)
    nbar_down: np.ndarray = field(repr=False)
    entropy: np.ndarray = field(repr=False)
    alpha: float = 1.0

    def __len__(self) -> int:
        return len(self.times)

    @property
    def trace_raw(self) -> np.ndarray:
        return self.n_up + self.n_down

    @classmethod
    def from_raw(cls, times, rho_raw, alpha: float = 1.0) -> "Trajectory":
        times = np.asarray(times, dtype=float)
        raw = np.asarray(rho_raw, dtype=complex)
        bars, ent = [], []
        for k in range(len(times)):
            _check_density_like(raw[k], f"rho_raw[{k}]")
            bar = normalize_rho(raw[k])
            bars.append(bar)
            ent.append(von_neumann_entropy(bar))
        bars = np.array(bars)
        return cls(
            times=times,
            rho_raw=raw,
            rho_bar=bars,
            n_up=raw[:, 0, 0].real.copy(),
            n_down=raw[:, 1, 1].real.copy(),
            nbar_up=bars[:, 0, 0].real.copy(),
            nbar_down=bars[:, 1, 1].real.copy(),
            entropy=np.array(ent),
            alpha=alpha,
        )


def stroboscopic_times(protocol: DrivingProtocol, n_periods: int) -> np.ndarray:
    """0, T, 2T, ..., n_periods*T."""
    return protocol.period * np.arange(n_periods + 1, dtype=float)


def _is_dissipative(h: np.ndarray) -> bool:
    """True when the anti-Hermitian part of the generator only ever shrinks
    the trace (decay rates >= 0)."""
    b = 1j * (h - h.conj().T) / 2.0  # H = A - iB, B Hermitian
    return _hermitian_eigenvalues(b)[1] >= -1e-12 * max(1.0, fro_norm(h))


def evolve_raw(generator, rho0, times, alpha: float | None = None) -> Trajectory:
    """Evolve rho0 under a DrivingProtocol (stroboscopic times only) or a
    static 2x2 generator (any nonnegative times).

    Raises StroboscopicTimeError for protocol times off the period grid and
    RuntimeError if the raw trace grows despite a purely dissipative
    generator (that would be a sign bug, not a physics outcome).
    """
    rho0 = as_matrix2(rho0)
    _check_density_like(rho0, "rho0")
    tr0 = (rho0[0, 0] + rho0[1, 1]).real
    if tr0 > 1.0 + 1e-12:
        raise ValueError(f"rho0 trace must be <= 1, got {tr0}")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0:
        raise ValueError("times must be a non-empty 1-D sequence")
    if np.any(times < 0.0) or np.any(np.diff(times) < 0.0):
        raise ValueError("times must be nonnegative and ascending")

    if isinstance(generator, DrivingProtocol):
        t_period = generator.period
        steps = []
        for t in times:
            n = round(t / t_period)
            if abs(t - n * t_period) > 1e-9 * t_period:
                raise StroboscopicTimeError(
                    f"time {t} is not an integer multiple of the period {t_period}"
                )
            steps.append(int(n))
        u_t = period_propagator(generator)
        dissipative = all(s.Gamma >= 0.0 for s in generator.segments)
        raw = np.empty((len(times), 2, 2), dtype=complex)
        rho = rho0.copy()
        current = 0
        for k, n in enumerate(steps):
            while current < n:
                rho = u_t @ rho @ u_t.conj().T
                current += 1
            raw[k] = rho
        if alpha is None:
            alpha = generator.alpha
    else:
        h = as_matrix2(generator)
        dissipative = _is_dissipative(h)
        raw = np.empty((len(times), 2, 2), dtype=complex)
        for k, t in enumerate(times):
            u = mat_exp(-1j * h * t)
            raw[k] = u @ rho0 @ u.conj().T
        if alpha is None:
            alpha = 1.0

    if dissipative:
        traces = raw[:, 0, 0].real + raw[:, 1, 1].real
        if np.any(traces > tr0 + _TRACE_GROWTH_TOL):
            raise RuntimeError(
                "raw trace grew under a dissipative generator; "
                f"max trace {traces.max()} (sign bug)"
            )
    return Trajectory.from_raw(times, raw, alpha=alpha)


def entropy_series(
    protocol: DrivingProtocol, mixed: MixedState, n_periods: int
) -> list[tuple[float, float]]:
    """Stroboscopic (t, S) pairs for a mixed initial state."""
    traj = evolve_raw(protocol, mixed.rho0, stroboscopic_times(protocol, n_periods))
    return list(zip(traj.times.tolist(), traj.entropy.tolist()))


def eigenstate_overlap(phi_plus, phi_minus) -> float:
    """|<phi_minus|phi_plus>| for unit-norm states."""
    a, b = as_vector2(phi_plus), as_vector2(phi_minus)
    for name, v in (("phi_plus", a), ("phi_minus", b)):
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise ValueError(f"{name} must be unit norm")
    return min(abs(np.vdot(b, a)), 1.0)


@dataclass(frozen=True)
class EigenstateReport:
    """Eigenstates extracted from asymptotic normalized evolution.

    Gauge: the spin-up amplitude is real and nonnegative (spin-down if the
    up amplitude vanishes); theta is arg(c_down) - arg(c_up) in (-pi, pi].
    """

    phi_plus: np.ndarray
    phi_minus: np.ndarray
    pop_up_plus: float
    pop_up_minus: float
    theta_plus: float
    theta_minus: float
    overlap: float
    converged: bool
    residual: float


def _gauge_fix(v: np.ndarray) -> np.ndarray:
    anchor = v[0] if abs(v[0]) >= 1e-12 else v[1]
    return v * (anchor.conjugate() / abs(anchor))


def _wrap_phase(x: float) -> float:
    y = math.fmod(x + math.pi, 2.0 * math.pi)
    if y < 0.0:
        y += 2.0 * math.pi
    y -= math.pi
    if y <= -math.pi:
        y += 2.0 * math.pi
    return y


def _dominant_eigenvector(rho_bar: np.ndarray) -> np.ndarray:
    res = eig2(rho_bar)
    # values sorted by real part descending; rho_bar is Hermitian PSD
    return _gauge_fix(res.vectors[0])


def _fixed_point(protocol: DrivingProtocol, horizon_periods: int) -> tuple[np.ndarray, bool, float]:
    u = period_propagator(protocol)
    rho = np.outer(KET_DOWN, KET_DOWN.conj())
    residual = math.inf
    for _ in range(horizon_periods):
        nxt = u @ rho @ u.conj().T
        nxt = nxt / (nxt[0, 0] + nxt[1, 1]).real
        residual = fro_norm(nxt - rho)
        rho = nxt
        if residual < 1e-8:
            return rho, True, residual
    return rho, False, residual


def asymptotic_eigenstates(
    J: float, Gamma: float, alpha: float, horizon_periods: int = 400
) -> EigenstateReport:
    """Extract both eigenstates from long-time normalized evolution.

    Forward driving converges (from spin-down) onto the slowly decaying
    eigenstate; the phase-reversed protocol onto the fast one.  Requires
    the symmetry-preserving phase Gamma > J strictly; near the exceptional
    point convergence slows down and the report carries the residual
    instead of looping forever.
    """
    if Gamma <= J:
        raise PhaseDomainError(
            f"asymptotic extraction needs Gamma > J (preserving phase); "
            f"got Gamma/J = {Gamma / J:.4g}"
        )
    fwd = canonical_protocol(J=J, Gamma=Gamma, alpha=alpha)
    rev = canonical_protocol(J=J, Gamma=Gamma, alpha=alpha, reverse=True)
    rho_p, ok_p, res_p = _fixed_point(fwd, horizon_periods)
    rho_m, ok_m, res_m = _fixed_point(rev, horizon_periods)
    phi_p = _dominant_eigenvector(rho_p)
    phi_m = _dominant_eigenvector(rho_m)
    return EigenstateReport(
        phi_plus=phi_p,
        phi_minus=phi_m,
        pop_up_plus=float(abs(phi_p[0]) ** 2),
        pop_up_minus=float(abs(phi_m[0]) ** 2),
        theta_plus=_wrap_phase(cmath.phase(phi_p[1]) - cmath.phase(phi_p[0])),
        theta_minus=_wrap_phase(cmath.phase(phi_m[1]) - cmath.phase(phi_m[0])),
        overlap=eigenstate_overlap(phi_p, phi_m),
        converged=ok_p and ok_m,
        residual=max(res_p, res_m),
    )
