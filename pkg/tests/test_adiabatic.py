import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berrysim.adiabatic import (
    PredictionOrder,
    berry_correction_perturbative,
    berry_phase_line_integral,
    berry_phase_spectral,
    berry_phase_two_level,
    dressed_basis,
    loop_eigenvectors,
    loop_phase_from_vectors,
    predicted_interferometer_phase,
)
from berrysim.errors import ConfigurationError, DegeneracyError, ValidityDomainError
from berrysim.model import DriveConfig, effective_field, omega_for_solid_angle
from conftest import MHZ, paper_params

K_PAPER = 35.0 / 423.0


def drive_for(a_solid, delta_mhz=-35.0):
    delta = delta_mhz * MHZ
    return DriveConfig(omega=omega_for_solid_angle(a_solid, delta), phi=0.0, delta=delta)


class TestDressedBasis:
    def test_no_drive_is_bare(self, p4):
        basis = dressed_basis(p4, DriveConfig(0.0, 0.0, -35 * MHZ))
        for level in range(4):
            vec = basis.branch_vector(level)
            assert abs(vec[level]) == pytest.approx(1.0, abs=1e-12)

    def test_two_level_closed_form(self, p2):
        # oracle: analytic diagonalization of [[0, w/2], [w/2, d]]
        d = drive_for(0.9 * math.pi, delta_mhz=-35.0)
        basis = dressed_basis(p2, d)
        half = np.array([[0.0, d.omega / 2], [d.omega / 2, d.delta]])
        evals, evecs = np.linalg.eigh(half)
        for level in (0, 1):
            mine = basis.branch_vector(level)
            overlaps = np.abs(evecs.conj().T @ mine)
            assert overlaps.max() == pytest.approx(1.0, abs=1e-10)

    def test_orthonormal(self, p4):
        basis = dressed_basis(p4, drive_for(1.4 * math.pi))
        gram = basis.eigenvectors.conj().T @ basis.eigenvectors
        np.testing.assert_allclose(gram, np.eye(4), atol=1e-10)

    def test_branch_overlaps_stay_dominant(self, p3):
        basis = dressed_basis(p3, drive_for(5 * math.pi / 4))
        for level in range(3):
            assert abs(basis.branch_vector(level)[level]) > 0.85

    def test_gauge_largest_component_real_positive(self, p4):
        basis = dressed_basis(p4, drive_for(1.2 * math.pi))
        for col in basis.eigenvectors.T:
            idx = int(np.argmax(np.abs(col)))
            assert col[idx].real > 0
            assert abs(col[idx].imag) < 1e-12

    def test_degenerate_tracking_fails_loudly(self, p2):
        with pytest.raises(DegeneracyError):
            dressed_basis(p2, DriveConfig(omega=20 * MHZ, phi=0.0, delta=0.0))

    def test_minimum_ramp_steps(self, p4):
        with pytest.raises(ConfigurationError):
            dressed_basis(p4, drive_for(0.5), ramp_steps=32)

    def test_ramp_step_doubling_keeps_branch_map(self, p4):
        d = drive_for(1.45 * math.pi, delta_mhz=-25.0)
        a = dressed_basis(p4, d, ramp_steps=128)
        b = dressed_basis(p4, d, ramp_steps=256)
        assert a.branch_map == b.branch_map


class TestSpectralPhase:
    def test_bare_levels(self, p4):
        basis = dressed_basis(p4, DriveConfig(0.0, 0.0, -35 * MHZ))
        for j in range(4):
            assert berry_phase_spectral(basis, j) == pytest.approx(2 * math.pi * j, abs=1e-12)

    def test_two_level_closed_form(self, p2):
        for theta in np.linspace(0.03, math.pi / 2 - 0.01, 9):
            delta = -35 * MHZ
            d = DriveConfig(abs(delta) * math.tan(theta), 0.0, delta)
            basis = dressed_basis(p2, d)
            # for delta < 0 the branch from bare |1> carries pi(1 + cos t)
            assert berry_phase_spectral(basis, 1) == pytest.approx(
                berry_phase_two_level(theta, +1), abs=1e-9
            )
            assert berry_phase_spectral(basis, 0) == pytest.approx(
                berry_phase_two_level(theta, -1), abs=1e-9
            )

    def test_reversed_loop_negates(self, p4):
        basis = dressed_basis(p4, drive_for(1.1 * math.pi))
        forward = berry_phase_spectral(basis, 1, direction=+1)
        assert berry_phase_spectral(basis, 1, direction=-1) == -forward

    def test_gauge_invariance(self, p4):
        basis = dressed_basis(p4, drive_for(0.8 * math.pi))
        vec = basis.branch_vector(1)
        reference = berry_phase_spectral(basis, 1)
        # sign flips are exactly representable: bit-identical result
        flipped = dressed_basis(p4, drive_for(0.8 * math.pi))
        flipped.eigenvectors[:, flipped.branch_map[1]] = -vec
        assert berry_phase_spectral(flipped, 1) == reference

    def test_level_out_of_range(self, p4):
        basis = dressed_basis(p4, drive_for(0.5))
        with pytest.raises(ConfigurationError):
            berry_phase_spectral(basis, 4)


class TestLineIntegral:
    def test_two_level_closed_form(self, p2):
        theta = 0.9
        delta = -35 * MHZ
        d = DriveConfig(abs(delta) * math.tan(theta), 0.0, delta)
        got = berry_phase_line_integral(p2, d, 1, 2000)
        assert got == pytest.approx(berry_phase_two_level(theta, +1), abs=1e-6)

    def test_matches_spectral_n4(self, p4):
        d = drive_for(1.25 * math.pi)
        basis = dressed_basis(p4, d)
        for level in (0, 1):
            line = berry_phase_line_integral(p4, d, level, 2000)
            assert line == pytest.approx(berry_phase_spectral(basis, level), abs=1e-6)

    def test_gauge_invariance_under_random_phases(self, p4):
        d = drive_for(1.25 * math.pi)
        vectors = loop_eigenvectors(p4, d, 1, 256)
        reference = loop_phase_from_vectors(vectors)
        rng = np.random.default_rng(7)
        randomized = vectors * np.exp(1j * rng.uniform(0, 2 * math.pi, vectors.shape[0]))[:, None]
        assert loop_phase_from_vectors(randomized) == pytest.approx(reference, abs=1e-12)

    def test_error_decreases_with_steps(self, p4):
        d = drive_for(1.4 * math.pi, delta_mhz=-50.0)
        basis = dressed_basis(p4, d)
        exact = berry_phase_spectral(basis, 1)
        errors = [
            abs(berry_phase_line_integral(p4, d, 1, n) - exact) for n in (128, 256, 512, 1024)
        ]
        assert errors == sorted(errors, reverse=True)

    def test_reversed_direction(self, p4):
        d = drive_for(0.7 * math.pi)
        assert berry_phase_line_integral(p4, d, 0, 512, direction=-1) == pytest.approx(
            -berry_phase_line_integral(p4, d, 0, 512), abs=1e-12
        )

    def test_minimum_steps(self, p4):
        with pytest.raises(ConfigurationError):
            berry_phase_line_integral(p4, drive_for(0.5), 0, 8)


class TestTwoLevelClosedForm:
    @pytest.mark.parametrize(
        "theta,plus,minus",
        [
            (0.0, 2 * math.pi, 0.0),
            (math.pi / 2, math.pi, math.pi),
            (math.pi / 3, 3 * math.pi / 2, math.pi / 2),
        ],
    )
    def test_values(self, theta, plus, minus):
        assert berry_phase_two_level(theta, +1) == pytest.approx(plus, abs=1e-12)
        assert berry_phase_two_level(theta, -1) == pytest.approx(minus, abs=1e-12)

    def test_domain(self):
        with pytest.raises(ConfigurationError):
            berry_phase_two_level(-0.1, +1)
        with pytest.raises(ConfigurationError):
            berry_phase_two_level(0.3, 2)


class TestPerturbativeCorrection:
    def test_vanishes_on_axis(self):
        dgp, dgm, dg = berry_correction_perturbative(0.0, K_PAPER)
        assert dgp == dgm == dg == 0.0

    def test_vanishes_without_detuning_ratio(self):
        _, _, dg = berry_correction_perturbative(0.8, 0.0)
        assert dg == 0.0

    def test_paper_point(self):
        # A = 5*pi/4 has cos(theta) = 0.375; measured combination ~ 0.78 rad
        theta = math.acos(0.375)
        _, _, dg = berry_correction_perturbative(theta, K_PAPER)
        assert dg == pytest.approx(0.78, abs=0.01)
        assert dg / (2 * 5 * math.pi / 4) == pytest.approx(0.10, abs=0.005)

    def test_cross_check_against_three_level_spectral(self, p3):
        a_solid = 5 * math.pi / 4
        theta = math.acos(1 - a_solid / (2 * math.pi))
        _, _, dg = berry_correction_perturbative(theta, K_PAPER)
        exact = predicted_interferometer_phase(p3, a_solid, -35 * MHZ, PredictionOrder.EXACT_N)
        assert dg == pytest.approx(exact.gamma_pred - 2 * a_solid, rel=0.10)

    @given(k=st.floats(1e-4, 3e-3), theta=st.floats(0.2, 1.25))
    @settings(max_examples=60, deadline=None)
    def test_small_k_second_order(self, k, theta):
        # oracle: series of the closed form, checked symbolically:
        # dg = 2 pi k s^4/c - pi k^2 s^2 (2 + 3 s^2)/c + O(k^3)
        _, _, dg = berry_correction_perturbative(theta, k)
        c, s2 = math.cos(theta), math.sin(theta) ** 2
        second_order = 2 * math.pi * k * s2**2 / c - math.pi * k**2 * s2 * (2 + 3 * s2) / c
        assert abs(dg - second_order) <= 60.0 * k**3

    def test_large_anharmonicity_limit(self):
        _, _, dg = berry_correction_perturbative(math.pi / 4, 1e-4)
        assert abs(dg) < 1e-3

    def test_degeneracy_guard(self):
        # denominator k - (3k+2) cos(theta) vanishes at cos = k/(3k+2)
        k = 0.125
        theta = math.acos(k / (3 * k + 2))
        with pytest.raises(ValidityDomainError):
            berry_correction_perturbative(theta, k)


class TestInterferometerPrediction:
    def test_small_angle_limit(self, p4):
        r = predicted_interferometer_phase(p4, 1e-4, -35 * MHZ, PredictionOrder.EXACT_N)
        assert abs(r.gamma_pred) < 1e-3

    def test_two_level_reduction_identity(self, p2):
        for a_solid in np.linspace(0.1, 1.9 * math.pi, 7):
            r = predicted_interferometer_phase(p2, a_solid, -35 * MHZ, PredictionOrder.EXACT_N)
            assert r.gamma_pred == pytest.approx(2 * a_solid, abs=1e-9)

    def test_orders_agree_for_two_levels(self, p2):
        for a_solid in (0.4, 2.0, 4.0):
            exact = predicted_interferometer_phase(p2, a_solid, -35 * MHZ, PredictionOrder.EXACT_N)
            two = predicted_interferometer_phase(p2, a_solid, -35 * MHZ, PredictionOrder.TWO_LEVEL)
            assert exact.gamma_pred == pytest.approx(two.gamma_pred, abs=1e-9)

    def test_deviation_scale(self, p4):
        r = predicted_interferometer_phase(p4, 5 * math.pi / 4, -35 * MHZ, PredictionOrder.PERTURBATIVE)
        excess = (r.gamma_pred - 2 * r.a_solid) / (2 * r.a_solid)
        assert excess == pytest.approx(0.10, abs=0.01)
        r = predicted_interferometer_phase(p4, 1.5 * math.pi, -35 * MHZ, PredictionOrder.PERTURBATIVE)
        excess = (r.gamma_pred - 2 * r.a_solid) / (2 * r.a_solid)
        assert 0.13 <= excess <= 0.16

    def test_result_invariant(self, p4):
        r = predicted_interferometer_phase(p4, 1.1, -40 * MHZ, PredictionOrder.PERTURBATIVE)
        assert r.delta_gamma == pytest.approx(
            2 * (r.delta_gamma_minus - r.delta_gamma_plus), abs=1e-15
        )
        assert r.k == pytest.approx(40.0 / 423.0)

    def test_continuity_in_solid_angle(self, p4):
        grid = np.linspace(0.05, 1.5 * math.pi, 40)
        values = [
            predicted_interferometer_phase(p4, a, -35 * MHZ, PredictionOrder.EXACT_N).gamma_pred
            for a in grid
        ]
        steps = np.abs(np.diff(values))
        assert steps.max() < math.pi  # no 2*pi jumps anywhere

    def test_angle_domain(self, p4):
        with pytest.raises(ConfigurationError):
            predicted_interferometer_phase(p4, 0.0, -35 * MHZ, PredictionOrder.TWO_LEVEL)
        with pytest.raises(ConfigurationError):
            predicted_interferometer_phase(p4, 2 * math.pi, -35 * MHZ, PredictionOrder.TWO_LEVEL)
