import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aptsim.floquet import APTParams, apt_hamiltonian
from aptsim.linalg2 import eig2
from aptsim.spectra import (
    UnderResolvedLoopError,
    apt_eigenvalues,
    detuned_eigenvalues,
    eigenvalues_from_matrix,
    locate_exceptional_point,
    riemann_sheet_grid,
    wind_around_ep,
)


def radicand_on_cut(J, Gamma, delta):
    """Brute-force oracle: is (delta - i Gamma)^2 + J^2 on the closed negative
    real axis?"""
    w = (delta - 1j * Gamma) ** 2 + J**2
    return abs(w.imag) < 1e-12 * max(1.0, abs(w)) and w.real <= 0.0


class TestClosedForms:
    def test_preserving_phase_pure_imaginary(self):
        pair = apt_eigenvalues(J=1.0, Gamma=9.29, alpha=0.5)
        assert abs(pair.e_plus.real) < 1e-14 and abs(pair.e_minus.real) < 1e-14
        assert pair.e_plus.imag > pair.e_minus.imag  # slow branch labelled plus

    def test_exceptional_point_double_root(self):
        pair = apt_eigenvalues(J=1.0, Gamma=1.0, alpha=0.5)
        assert abs(pair.e_plus - pair.e_minus) < 1e-14
        assert abs(pair.e_plus - (-0.5j)) < 1e-14

    def test_broken_phase_same_imag_opposite_real(self):
        J, G, a = 1.0, 0.57, 0.5
        pair = apt_eigenvalues(J=J, Gamma=G, alpha=a)
        w = math.sqrt(J**2 - G**2)
        assert pair.e_plus == pytest.approx(a * w - 1j * a * G)
        assert pair.e_minus == pytest.approx(-a * w - 1j * a * G)

    def test_detuned_reduces_to_zero_detuning_form(self):
        for g in (0.3, 1.0, 4.0):
            p0 = apt_eigenvalues(1.0, g, 0.5)
            pd = detuned_eigenvalues(1.0, g, 0.0, 0.5)
            assert p0 == pd

    def test_detuned_ep_condition(self):
        pair = detuned_eigenvalues(J=1.0, Gamma=1.0, delta=0.0, alpha=0.5)
        assert abs(pair.e_plus - pair.e_minus) < 1e-14
        assert abs(pair.e_plus - (-0.5j)) < 1e-14

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(min_value=0.0, max_value=10.0),
        st.floats(min_value=-3.0, max_value=3.0),
        st.floats(min_value=0.05, max_value=0.95),
    )
    def test_trace_and_product_rules(self, gamma, delta, alpha):
        pair = detuned_eigenvalues(1.0, gamma, delta, alpha)
        target = -2j * alpha * gamma
        assert abs((pair.e_plus + pair.e_minus) - target) < 1e-12 * max(
            1.0, abs(target)
        )
        h = apt_hamiltonian(APTParams(J=1.0, Gamma=gamma, alpha=alpha, delta=delta))
        det = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
        assert abs(pair.e_plus * pair.e_minus - det) < 1e-12 * max(1.0, abs(det))

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(min_value=0.0, max_value=10.0),
        st.floats(min_value=-3.0, max_value=3.0),
    )
    def test_matches_matrix_eigenvalues(self, gamma, delta):
        alpha = 0.5
        pair = detuned_eigenvalues(1.0, gamma, delta, alpha)
        vals = eigenvalues_from_matrix(
            APTParams(J=1.0, Gamma=gamma, alpha=alpha, delta=delta)
        )
        mismatch = min(
            abs(pair.e_plus - vals[0]) + abs(pair.e_minus - vals[1]),
            abs(pair.e_plus - vals[1]) + abs(pair.e_minus - vals[0]),
        )
        assert mismatch < 1e-12 * max(1.0, abs(vals[0]), abs(vals[1]))

    @settings(max_examples=100, deadline=None)
    @given(
        st.floats(min_value=0.0, max_value=5.0),
        st.floats(min_value=-3.0, max_value=3.0),
    )
    def test_detuning_parity_of_eigenvalue_set(self, gamma, delta):
        # the SET at -delta equals the set computed from the +delta radicand
        # with Gamma -> -Gamma inside the root
        alpha = 0.5
        left = detuned_eigenvalues(1.0, gamma, -delta, alpha)
        root = cmath.sqrt((delta + 1j * gamma) ** 2 + 1.0)
        right = {
            alpha * (root - 1j * gamma),
            alpha * (-root - 1j * gamma),
        }
        for v in (left.e_plus, left.e_minus):
            assert min(abs(v - r) for r in right) < 1e-12 * max(1.0, abs(v))


class TestEPLocator:
    def test_newton_finds_analytic_location(self):
        d, g = locate_exceptional_point(J=1.0)
        assert math.hypot(d - 0.0, g - 1.0) < 1e-10

    def test_scales_with_coupling(self):
        d, g = locate_exceptional_point(J=2.5, guess=(0.4, 3.0))
        assert math.hypot(d, g - 2.5) < 1e-10 * 2.5


class TestSheetGrid:
    def test_small_grid_far_from_ep_no_seams(self):
        sheet = riemann_sheet_grid((1.5, 2.0), (0.2, 0.4), 2, alpha=0.5)
        assert not sheet.seam.any()
        assert not sheet.defective.any()
        pair = detuned_eigenvalues(1.0, 0.2, 1.5, 0.5)
        assert sheet.sheet_plus[0, 0] == pair.e_plus
        assert sheet.sheet_minus[0, 0] == pair.e_minus

    def test_seam_matches_radicand_oracle(self):
        sheet = riemann_sheet_grid((-2.0, 2.0), (0.2, 2.5), 41, alpha=0.5)
        deltas, gammas = sheet.delta_over_J, sheet.gamma_over_J
        # every flagged cell is adjacent to the analytic cut {delta=0, Gamma>=1}
        step = deltas[1] - deltas[0]
        for i, j in zip(*np.nonzero(sheet.seam)):
            assert abs(deltas[j]) <= step + 1e-12
            assert gammas[i] >= 1.0 - (gammas[1] - gammas[0]) - 1e-12
        # and the cut rows are all flagged: brute-force check of the radicand
        # (an edge crosses the cut when its delta interval straddles or touches
        # a point where the radicand sits on the closed negative real axis)
        for i, g in enumerate(gammas):
            row_crosses_cut = any(
                min(deltas[j], deltas[j + 1]) <= 0.0 <= max(deltas[j], deltas[j + 1])
                and radicand_on_cut(1.0, g, 0.0)
                and abs((0.0 - 1j * g) ** 2 + 1.0) > 1e-10  # not the EP itself
                for j in range(len(deltas) - 1)
            )
            assert row_crosses_cut == sheet.seam[i].any()

    def test_grid_strictly_broken_phase_has_no_seam(self):
        sheet = riemann_sheet_grid((-2.0, 2.0), (0.1, 0.9), 21, alpha=0.5)
        assert not sheet.seam.any()

    def test_grid_containing_ep_flags_defective_cell(self):
        # odd resolution puts (0, 1) exactly on the grid
        sheet = riemann_sheet_grid((-1.0, 1.0), (0.5, 1.5), 5, alpha=0.5)
        assert sheet.defective[2, 2]
        assert sheet.defective.sum() == 1

    def test_sheets_cover_both_values_pointwise(self):
        sheet = riemann_sheet_grid((-1.0, 1.0), (0.3, 2.0), 7, alpha=0.4)
        for i, g in enumerate(sheet.gamma_over_J):
            for j, d in enumerate(sheet.delta_over_J):
                pair = detuned_eigenvalues(1.0, g, d, 0.4)
                got = {sheet.sheet_plus[i, j], sheet.sheet_minus[i, j]}
                assert got == {pair.e_plus, pair.e_minus}


class TestWinding:
    def test_loop_around_ep_swaps(self):
        res = wind_around_ep(center=(0.0, 1.0), radius=0.5, steps=256, alpha=0.5)
        assert res.permutation == "swap"
        assert res.winding_valid

    def test_loop_away_from_ep_is_identity(self):
        res = wind_around_ep(center=(0.0, 2.0), radius=0.5, steps=256, alpha=0.5)
        assert res.permutation == "identity"
        assert res.winding_valid

    def test_double_loop_is_identity(self):
        res = wind_around_ep(
            center=(0.0, 1.0), radius=0.5, steps=256, alpha=0.5, turns=2
        )
        assert res.permutation == "identity"
        assert res.winding_valid

    @settings(max_examples=20, deadline=None)
    @given(st.integers(min_value=1, max_value=4))
    def test_monodromy_order_two(self, turns):
        res = wind_around_ep(
            center=(0.0, 1.0), radius=0.4, steps=128, alpha=0.5, turns=turns
        )
        expected = "swap" if turns % 2 == 1 else "identity"
        assert res.permutation == expected

    def test_under_resolved_raises(self):
        # loop grazing the EP (clearance just above the 1e-3 floor) cannot be
        # tracked at the coarsest step count
        with pytest.raises(UnderResolvedLoopError):
            wind_around_ep(center=(0.0, 1.5), radius=0.4988, steps=64, alpha=0.5)

    def test_loop_through_ep_rejected(self):
        with pytest.raises(ValueError, match="clearance"):
            wind_around_ep(center=(0.0, 1.5), radius=0.5, steps=128, alpha=0.5)

    def test_too_few_steps_rejected(self):
        with pytest.raises(ValueError, match="64 steps"):
            wind_around_ep(center=(0.0, 1.0), radius=0.5, steps=32, alpha=0.5)

    def test_min_gap_reported(self):
        res = wind_around_ep(center=(0.0, 1.0), radius=0.5, steps=256, alpha=0.5)
        assert 0.0 < res.min_gap < 2.0
        assert res.loop.shape == (257, 2)
