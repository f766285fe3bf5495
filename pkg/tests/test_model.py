import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berrysim.errors import ConfigurationError, ConvergenceError, DegenerateFieldError
from berrysim.model import (
    DeviceParams,
    DriveConfig,
    alpha_ladder,
    build_hamiltonian,
    effective_field,
    hamiltonian_matrix,
    number_operator,
    omega_for_solid_angle,
    split_h0_v,
    transmon_spectrum,
)
from conftest import ALPHA2_RAD_S, MHZ, PAPER, paper_params


def drive(omega_mhz=50.0, phi=0.0, delta_mhz=-35.0):
    return DriveConfig(omega=omega_mhz * MHZ, phi=phi, delta=delta_mhz * MHZ)


class TestDeviceParams:
    def test_rejects_short_ladder(self):
        with pytest.raises(ConfigurationError):
            DeviceParams(n_levels=3, anharmonicities=(0.0, 0.0))

    def test_rejects_nonzero_alpha01(self):
        with pytest.raises(ConfigurationError):
            DeviceParams(n_levels=3, anharmonicities=(0.0, 1.0, ALPHA2_RAD_S))

    def test_rejects_unphysical_dephasing(self):
        with pytest.raises(ConfigurationError):
            DeviceParams(n_levels=2, anharmonicities=(0.0, 0.0), t1=0.5, t2_star=1.2)

    def test_minimum_levels(self):
        with pytest.raises(ConfigurationError):
            DeviceParams(n_levels=1, anharmonicities=(0.0,))


class TestBuildHamiltonian:
    def test_two_level_matrix(self):
        params = paper_params(2)
        d = drive(omega_mhz=50.0, phi=0.0, delta_mhz=-35.0)
        h = build_hamiltonian(params, d).entries
        expected = np.array([[0.0, d.omega / 2], [d.omega / 2, d.delta]])
        np.testing.assert_allclose(h, expected, rtol=0, atol=1e-6)

    def test_drive_off_is_diagonal(self, p4):
        d = DriveConfig(omega=0.0, phi=0.3, delta=-35 * MHZ)
        h = build_hamiltonian(p4, d).entries
        js = np.arange(4)
        expected = np.diag(js * d.delta + np.array(p4.anharmonicities))
        np.testing.assert_allclose(h, expected, atol=1e-9)

    def test_three_level_element_example(self, p3):
        # independent element-by-element construction of the same matrix
        d = drive(omega_mhz=50.0, phi=math.pi / 2, delta_mhz=-35.0)
        h = build_hamiltonian(p3, d).entries
        assert h[2, 1] == pytest.approx((d.omega / 2) * math.sqrt(2) * np.exp(-1j * math.pi / 2))
        by_hand = np.zeros((3, 3), dtype=complex)
        for j in range(3):
            by_hand[j, j] = j * d.delta + p3.anharmonicities[j]
        for j in range(2):
            by_hand[j + 1, j] = 0.5 * d.omega * math.sqrt(j + 1) * np.exp(-1j * d.phi)
            by_hand[j, j + 1] = np.conj(by_hand[j + 1, j])
        np.testing.assert_allclose(h, by_hand, atol=1e-9)

    @given(
        n=st.integers(2, 6),
        omega=st.floats(0.0, 500.0),
        phi=st.floats(-10.0, 10.0),
        delta=st.floats(-100.0, 100.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_hermitian_for_all_inputs(self, n, omega, phi, delta):
        params = DeviceParams(n_levels=n, anharmonicities=tuple(alpha_ladder(ALPHA2_RAD_S, n)))
        h = hamiltonian_matrix(params, DriveConfig(omega * MHZ, phi, delta * MHZ))
        assert np.abs(h - h.conj().T).max() <= 1e-12 * max(1.0, np.abs(h).max())

    @given(phi=st.floats(-7.0, 7.0), omega=st.floats(1.0, 300.0), delta=st.floats(-80.0, -10.0))
    @settings(max_examples=40, deadline=None)
    def test_frame_rotation_identity(self, phi, omega, delta):
        params = paper_params(4)
        h_phi = hamiltonian_matrix(params, DriveConfig(omega * MHZ, phi, delta * MHZ))
        h_0 = hamiltonian_matrix(params, DriveConfig(omega * MHZ, 0.0, delta * MHZ))
        n_op = number_operator(4)
        rot = np.diag(np.exp(-1j * phi * np.diag(n_op)))
        rebuilt = rot @ h_0 @ rot.conj().T
        scale = np.abs(h_phi).max()
        assert np.abs(h_phi - rebuilt).max() <= 1e-12 * scale

    def test_negative_drive_rejected(self):
        with pytest.raises(ConfigurationError):
            DriveConfig(omega=-1.0, phi=0.0, delta=0.0)


class TestEffectiveField:
    def test_no_drive(self):
        f = effective_field(drive(omega_mhz=0.0, delta_mhz=-35.0))
        assert f.theta == 0.0
        assert f.a_solid == 0.0

    def test_resonant_drive(self):
        f = effective_field(DriveConfig(omega=50 * MHZ, phi=0.0, delta=0.0))
        assert f.theta == pytest.approx(math.pi / 2)
        assert f.a_solid == pytest.approx(2 * math.pi)

    def test_equal_magnitudes(self):
        f = effective_field(drive(omega_mhz=35.0, delta_mhz=-35.0))
        assert f.theta == pytest.approx(math.pi / 4)
        assert f.a_solid == pytest.approx(2 * math.pi * (1 - math.sqrt(2) / 2))

    def test_components(self):
        d = drive(omega_mhz=50.0, phi=0.7, delta_mhz=-35.0)
        f = effective_field(d)
        assert f.b[0] == pytest.approx(d.omega * math.cos(0.7))
        assert f.b[1] == pytest.approx(d.omega * math.sin(0.7))
        assert f.b[2] == d.delta
        assert f.magnitude == pytest.approx(math.hypot(d.omega, d.delta))

    def test_degenerate_field(self):
        with pytest.raises(DegenerateFieldError):
            effective_field(DriveConfig(omega=0.0, phi=0.0, delta=0.0))


class TestOmegaForSolidAngle:
    def test_zero_angle(self):
        assert omega_for_solid_angle(0.0, -35 * MHZ) == 0.0

    def test_half_sphere_angle(self):
        # A = pi means cos(theta) = 1/2, so omega = |delta| * sqrt(3)
        assert omega_for_solid_angle(math.pi, -35 * MHZ) == pytest.approx(
            35 * MHZ * math.sqrt(3), rel=1e-12
        )

    def test_five_quarter_pi_roundtrip(self):
        omega = omega_for_solid_angle(5 * math.pi / 4, -35 * MHZ)
        f = effective_field(DriveConfig(omega, 0.0, -35 * MHZ))
        assert math.cos(f.theta) == pytest.approx(0.375, rel=1e-12)
        assert f.a_solid == pytest.approx(5 * math.pi / 4, rel=1e-12)

    @given(a_solid=st.floats(0.0, 2 * math.pi, exclude_max=True), delta=st.floats(-90.0, -5.0))
    @settings(max_examples=60, deadline=None)
    def test_roundtrip_property(self, a_solid, delta):
        omega = omega_for_solid_angle(a_solid, delta * MHZ)
        f = effective_field(DriveConfig(omega, 0.0, delta * MHZ))
        assert f.a_solid == pytest.approx(a_solid, rel=1e-12, abs=1e-12)

    def test_full_sphere_rejected(self):
        with pytest.raises(ConfigurationError):
            omega_for_solid_angle(2 * math.pi, -35 * MHZ)

    def test_zero_detuning_rejected(self):
        with pytest.raises(ConfigurationError):
            omega_for_solid_angle(1.0, 0.0)


class TestSplit:
    def test_two_level_has_no_perturbation(self, p2):
        _, v = split_h0_v(p2, drive())
        assert np.abs(v.entries).max() == 0.0

    def test_three_level_coupling(self, p3):
        d = drive(omega_mhz=50.0)
        h0, v = split_h0_v(p3, d)
        expected = np.zeros((3, 3), dtype=complex)
        expected[2, 1] = expected[1, 2] = 0.5 * d.omega * math.sqrt(2)
        np.testing.assert_allclose(v.entries, expected, atol=1e-9)
        assert h0.entries[1, 0] == pytest.approx(0.5 * d.omega)

    def test_split_sums_to_full(self, p4):
        d = drive(omega_mhz=80.0)
        h0, v = split_h0_v(p4, d)
        np.testing.assert_array_equal(h0.entries + v.entries, hamiltonian_matrix(p4, d))

    def test_requires_zero_phase(self, p3):
        with pytest.raises(ConfigurationError):
            split_h0_v(p3, drive(phi=0.1))


class TestTransmonSpectrum:
    def test_paper_device(self):
        omega01, alphas = transmon_spectrum(PAPER["ej_ghz"], PAPER["ec_ghz"], 4)
        ghz = omega01 / (2 * math.pi * 1e9)
        assert ghz == pytest.approx(PAPER["omega01_ghz"], rel=0.02)
        assert alphas[2] < 0.0
        assert abs(alphas[3]) > abs(alphas[2])

    def test_deep_transmon_asymptotics(self):
        # E_J >> E_C: omega01 -> sqrt(8 E_J E_C) - E_C, alpha2 -> -E_C
        e_j, e_c = 50.0, 0.05
        omega01, alphas = transmon_spectrum(e_j, e_c, 3, charge_cutoff=40)
        asym = (math.sqrt(8 * e_j * e_c) - e_c) * 2 * math.pi * 1e9
        assert omega01 == pytest.approx(asym, rel=5e-3)
        assert alphas[2] == pytest.approx(-e_c * 2 * math.pi * 1e9, rel=0.10)

    def test_cutoff_invariance(self):
        a = transmon_spectrum(PAPER["ej_ghz"], PAPER["ec_ghz"], 4, charge_cutoff=30)
        b = transmon_spectrum(PAPER["ej_ghz"], PAPER["ec_ghz"], 4, charge_cutoff=60)
        assert a[0] == pytest.approx(b[0], rel=1e-9)
        for x, y in zip(a[1][2:], b[1][2:]):
            assert x == pytest.approx(y, rel=1e-8)

    def test_unconverged_cutoff(self):
        with pytest.raises(ConvergenceError):
            transmon_spectrum(PAPER["ej_ghz"], PAPER["ec_ghz"], 4, charge_cutoff=3)

    def test_invalid_energies(self):
        with pytest.raises(ConfigurationError):
            transmon_spectrum(-1.0, 0.3, 3)
