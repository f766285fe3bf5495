"""Rotating-frame model of a driven, weakly anharmonic multi-level qubit.

The drive Hamiltonian (units of angular frequency, frame corotating with
the drive) is

    H(phi)/hbar = sum_j (j*delta + alpha_j) |j><j|
                + (omega/2) sum_j sqrt(j+1) (e^{-i phi} |j+1><j| + h.c.)

with alpha_0 = alpha_1 = 0 and the sqrt(j+1) coupling ladder of a weakly
anharmonic oscillator.  Restricted to the lowest two levels this is a
spin-1/2 in the effective field B = (omega*cos(phi), omega*sin(phi), delta).

All frequencies in this module are angular (rad/s); interface layers
convert from MHz/GHz.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ConvergenceError, DegenerateFieldError

HERMITICITY_RTOL = 1e-12

TWO_PI = 2.0 * np.pi


def alpha_ladder(alpha2: float, n_levels: int) -> list[float]:
    """Default anharmonicity ladder alpha_j = alpha2 * j(j-1)/2.

    Leading-order scaling of a weakly anharmonic (transmon-like) ladder;
    used when higher anharmonicities are not configured explicitly.
    """
    return [alpha2 * j * (j - 1) / 2.0 if j >= 2 else 0.0 for j in range(n_levels)]


@dataclass(frozen=True)
class DeviceParams:
    """Static device parameters.

    e_j, e_c are in GHz*h (spectroscopy units, used only for level-structure
    computations); anharmonicities are angular (rad/s); coherence times are
    in microseconds.
    """

    n_levels: int
    anharmonicities: tuple[float, ...]
    e_j: float = 0.0
    e_c: float = 0.0
    t1: float | None = None
    t2_star: float | None = None

    def __post_init__(self):
        if self.n_levels < 2:
            raise ConfigurationError(f"n_levels must be >= 2, got {self.n_levels}")
        if len(self.anharmonicities) != self.n_levels:
            raise ConfigurationError(
                f"need {self.n_levels} anharmonicities, got {len(self.anharmonicities)}"
            )
        if self.anharmonicities[0] != 0.0 or self.anharmonicities[1] != 0.0:
            raise ConfigurationError("alpha_0 and alpha_1 must be exactly 0")
        if self.t1 is not None and self.t1 <= 0:
            raise ConfigurationError("t1 must be positive")
        if self.t2_star is not None and self.t2_star <= 0:
            raise ConfigurationError("t2_star must be positive")
        if self.t1 is not None and self.t2_star is not None:
            if self.t2_star > 2.0 * self.t1 * (1.0 + 1e-12):
                raise ConfigurationError(
                    f"t2_star={self.t2_star} exceeds 2*t1={2 * self.t1}: "
                    "negative pure-dephasing rate"
                )
        object.__setattr__(self, "anharmonicities", tuple(float(a) for a in self.anharmonicities))

    @property
    def alpha2(self) -> float:
        if self.n_levels < 3:
            return 0.0
        return self.anharmonicities[2]


@dataclass(frozen=True)
class DriveConfig:
    """Drive strength omega (rad/s, >= 0), phase phi (rad), detuning
    delta = omega_01 - omega_drive (rad/s)."""

    omega: float
    phi: float
    delta: float

    def __post_init__(self):
        if self.omega < 0:
            raise ConfigurationError(f"drive strength must be >= 0, got {self.omega}")


@dataclass(frozen=True)
class EffectiveField:
    """Two-level effective field B = (omega_x, omega_y, delta) with tilt
    angle theta = arctan(omega/|delta|) in [0, pi/2] and enclosed solid
    angle a_solid = 2*pi*(1 - cos(theta))."""

    b: tuple[float, float, float]
    theta: float
    a_solid: float

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.b))


@dataclass(frozen=True)
class HermitianOperator:
    """A dense Hermitian matrix with a construction-time hermiticity check."""

    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        scale = max(np.abs(m).max(), 1.0)
        if np.abs(m - m.conj().T).max() > HERMITICITY_RTOL * scale:
            raise ConfigurationError("matrix is not Hermitian within 1e-12 relative")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def number_operator(n_levels: int) -> np.ndarray:
    """N = diag(0, 1, ..., n-1); generates the drive-phase rotation
    H(phi) = exp(-i phi N) H(0) exp(+i phi N)."""
    return np.diag(np.arange(n_levels, dtype=float))


def hamiltonian_matrix(params: DeviceParams, drive: DriveConfig) -> np.ndarray:
    """Raw ndarray version of build_hamiltonian (hot-path helper)."""
    n = params.n_levels
    h = np.zeros((n, n), dtype=complex)
    js = np.arange(n)
    h[js, js] = js * drive.delta + np.asarray(params.anharmonicities)
    coupling = 0.5 * drive.omega * np.sqrt(js[:-1] + 1.0) * np.exp(-1j * drive.phi)
    h[js[:-1] + 1, js[:-1]] = coupling
    h[js[:-1], js[:-1] + 1] = coupling.conj()
    return h


def build_hamiltonian(params: DeviceParams, drive: DriveConfig) -> HermitianOperator:
    """Drive-frame Hamiltonian H(phi)/hbar.

    Diagonal j*delta + alpha_j; element (j+1, j) carries
    (omega/2)*sqrt(j+1)*exp(-i*phi), plus the conjugate transpose.
    """
    return HermitianOperator(hamiltonian_matrix(params, drive))


def effective_field(drive: DriveConfig) -> EffectiveField:
    """Two-level reduction of the drive: field vector, tilt and solid angle.

    Raises DegenerateFieldError when omega = delta = 0 (no quantization axis).
    """
    if drive.omega == 0.0 and drive.delta == 0.0:
        raise DegenerateFieldError("omega = delta = 0: effective field vanishes")
    b = (
        drive.omega * np.cos(drive.phi),
        drive.omega * np.sin(drive.phi),
        drive.delta,
    )
    # The tilt is measured from the z-axis with |delta|: the experiment's
    # detuning is negative, but the enclosed solid angle stays in [0, 2*pi)
    # with cos(theta) > 0; the sign of delta is carried by k = delta/alpha2.
    theta = float(np.arctan2(drive.omega, abs(drive.delta)))
    a_solid = TWO_PI * (1.0 - np.cos(theta))
    return EffectiveField(b=b, theta=theta, a_solid=float(a_solid))


def omega_for_solid_angle(a_solid: float, delta: float) -> float:
    """Drive strength whose circular sweep at fixed detuning encloses the
    requested solid angle: omega = |delta| * tan(arccos(1 - A/(2*pi)))."""
    if not 0.0 <= a_solid < TWO_PI:
        raise ConfigurationError(
            f"solid angle must lie in [0, 2*pi), got {a_solid} (2*pi needs infinite drive)"
        )
    if delta == 0.0:
        raise ConfigurationError("delta must be nonzero to set a solid angle")
    cos_theta = 1.0 - a_solid / TWO_PI
    return abs(delta) * float(np.tan(np.arccos(cos_theta)))


def split_h0_v(params: DeviceParams, drive: DriveConfig) -> tuple[HermitianOperator, HermitianOperator]:
    """Split H(0) into the qubit block H0 (diagonal + 0<->1 coupling) and
    the higher-level coupling V (all j<->j+1 terms with j >= 1)."""
    if drive.phi != 0.0:
        raise ConfigurationError("H0/V split is defined at phi = 0")
    h = hamiltonian_matrix(params, drive)
    h0 = np.zeros_like(h)
    h0[np.diag_indices_from(h)] = h.diagonal()
    h0[0, 1] = h[0, 1]
    h0[1, 0] = h[1, 0]
    v = h - h0
    return HermitianOperator(h0), HermitianOperator(v)


def charge_hamiltonian(e_j: float, e_c: float, charge_cutoff: int) -> np.ndarray:
    """Cooper-pair-box Hamiltonian 4*E_C*n^2 - E_J*cos(phi) in the charge
    basis |-N..N| (energies in the units of e_j/e_c)."""
    charges = np.arange(-charge_cutoff, charge_cutoff + 1, dtype=float)
    h = np.diag(4.0 * e_c * charges**2)
    off = -0.5 * e_j * np.ones(2 * charge_cutoff)
    h += np.diag(off, 1) + np.diag(off, -1)
    return h


def _charge_levels(e_j: float, e_c: float, n_levels: int, charge_cutoff: int) -> np.ndarray:
    evals = np.linalg.eigvalsh(charge_hamiltonian(e_j, e_c, charge_cutoff))
    return evals[:n_levels] - evals[0]


def transmon_spectrum(
    e_j: float,
    e_c: float,
    n_levels: int,
    charge_cutoff: int = 30,
) -> tuple[float, list[float]]:
    """Exact level structure from charge-basis diagonalization.

    Returns (omega_01, [alpha_j]) in angular frequency units consistent
    with e_j/e_c given in GHz*h (i.e. rad/s when multiplied by 1e9...);
    concretely: inputs in GHz give outputs in rad/s via the 2*pi*1e9 factor.
    A doubled cutoff must reproduce every level within 1e-9 relative.
    """
    if e_j <= 0 or e_c <= 0:
        raise ConfigurationError("e_j and e_c must be positive")
    if charge_cutoff < 2:
        raise ConfigurationError("charge_cutoff must be >= 2")
    if 2 * charge_cutoff + 1 <= n_levels:
        raise ConfigurationError("charge_cutoff too small for requested level count")
    levels = _charge_levels(e_j, e_c, n_levels, charge_cutoff)
    check = _charge_levels(e_j, e_c, n_levels, 2 * charge_cutoff)
    scale = np.abs(check[1:]).max()
    if np.abs(levels[1:] - check[1:]).max() > 1e-9 * scale:
        raise ConvergenceError(
            f"charge basis not converged at cutoff {charge_cutoff}: "
            f"doubling moves levels by {np.abs(levels[1:] - check[1:]).max() / scale:.2e} relative"
        )
    ghz_to_rad_s = TWO_PI * 1e9
    omega01 = levels[1] * ghz_to_rad_s
    js = np.arange(n_levels)
    alphas = levels * ghz_to_rad_s - js * omega01
    alphas[0] = 0.0
    alphas[1] = 0.0
    return float(omega01), [float(a) for a in alphas]
