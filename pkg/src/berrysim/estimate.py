"""Simulated readout: qubit tomography from population measurements, phase
extraction, maximum-likelihood state reconstruction and fidelity.

The readout observable is the excited-state population P_z = (1 - <s_z>)/2.
<s_x> and <s_y> come from two extra runs whose trailing pi/2 pulse rotates
the measurement axis; <s_z> from a run without the tomography pulse.  All
expectations are taken inside the {|0>, |1>} subspace and renormalized by
the subspace population; the residual leakage is reported alongside.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, UndefinedPhaseError, UnphysicalStateError
from .propagate import validate_density

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

SETTINGS = ("x", "y", "z")

IN_PLANE_MIN = 1e-6


@dataclass(frozen=True)
class TomographyRecord:
    """Estimated qubit expectations plus the leakage left outside the
    subspace; shots=0 marks exact expectations."""

    sx: float
    sy: float
    sz: float
    leakage: float = 0.0
    shots: int = 0
    seed: int | None = None


@dataclass(frozen=True)
class FidelityReport:
    fidelity: float
    rho: np.ndarray
    sigma_target: np.ndarray


def _rotation(axis_angle: float, angle: float, dim: int) -> np.ndarray:
    """Qubit rotation exp(-i angle/2 (cos a sx - sin a sy)) embedded in an
    identity of the given dimension (matches the drive coupling phase
    convention of the pulse sampler)."""
    gen = np.cos(axis_angle) * SIGMA_X - np.sin(axis_angle) * SIGMA_Y
    block = (
        np.cos(angle / 2.0) * np.eye(2) - 1j * np.sin(angle / 2.0) * gen
    )
    u = np.eye(dim, dtype=complex)
    u[:2, :2] = block
    return u


def tomography_rotation(setting: str, dim: int = 2) -> np.ndarray:
    """Ideal tomography pulse for a setting: 'x' rotates about x by pi/2,
    'y' about y by pi/2, 'z' is the identity (no pulse)."""
    if setting == "x":
        return _rotation(0.0, np.pi / 2.0, dim)
    if setting == "y":
        return _rotation(-np.pi / 2.0, np.pi / 2.0, dim)
    if setting == "z":
        return np.eye(dim, dtype=complex)
    raise ConfigurationError(f"unknown tomography setting {setting!r}")


def _excited_population(state: np.ndarray) -> tuple[float, float]:
    """(P_z within the renormalized subspace, leakage) of a state vector or
    density matrix."""
    arr = np.asarray(state)
    if arr.ndim == 1:
        p0 = float(np.abs(arr[0]) ** 2)
        p1 = float(np.abs(arr[1]) ** 2)
        total = float(np.vdot(arr, arr).real)
    else:
        p0 = float(arr[0, 0].real)
        p1 = float(arr[1, 1].real)
        total = float(np.trace(arr).real)
    subspace = p0 + p1
    if subspace <= 0.0:
        raise UnphysicalStateError("no population left in the computational subspace")
    return p1 / subspace, max(0.0, total - subspace)


def _expectation_from_pz(setting: str, pz: float) -> float:
    sz = 1.0 - 2.0 * pz
    if setting == "x":
        # R_x(pi/2)^dag s_z R_x(pi/2) = s_y
        return sz
    if setting == "y":
        # R_y(pi/2)^dag s_z R_y(pi/2) = -s_x
        return -sz
    return sz


def tomography(
    source: Mapping[str, np.ndarray] | np.ndarray,
    shots: int = 0,
    seed: int | None = None,
) -> TomographyRecord:
    """Reconstruct (sx, sy, sz) from three measurement settings.

    `source` is either a mapping {'x','y','z'} -> final state (already
    including the tomography pulse for 'x'/'y'), or a single pre-tomography
    state to which ideal tomography rotations are applied.  shots=0 returns
    exact expectations; shots>0 draws binomial counts from each P_z with
    the given seed.
    """
    if shots < 0:
        raise ConfigurationError("shots must be >= 0")
    if 0 < shots < 100:
        warnings.warn(f"{shots} shots gives poor statistics (< 100)", stacklevel=2)
    if isinstance(source, Mapping):
        states = dict(source)
        missing = set(SETTINGS) - states.keys()
        if missing:
            raise ConfigurationError(f"missing tomography settings: {sorted(missing)}")
    else:
        state = np.asarray(source, dtype=complex)
        dim = state.shape[0]
        states = {}
        for setting in SETTINGS:
            u = tomography_rotation(setting, dim)
            states[setting] = u @ state if state.ndim == 1 else u @ state @ u.conj().T
    rng = np.random.default_rng(seed) if shots > 0 else None
    values = {}
    leakage = 0.0
    for setting in SETTINGS:
        pz, leak = _excited_population(states[setting])
        if setting == "z":
            leakage = leak
        if rng is not None:
            counts = rng.binomial(shots, float(np.clip(pz, 0.0, 1.0)))
            pz = counts / shots
        values[setting] = _expectation_from_pz(setting, pz)
    return TomographyRecord(
        sx=values["y"],
        sy=values["x"],
        sz=values["z"],
        leakage=leakage,
        shots=shots,
        seed=seed,
    )


def extract_phase(record: TomographyRecord) -> float:
    """gamma = atan2(<s_y>, <s_x>); undefined when the in-plane Bloch
    component has collapsed."""
    if record.sx**2 + record.sy**2 <= IN_PLANE_MIN:
        raise UndefinedPhaseError(
            f"in-plane Bloch length {np.hypot(record.sx, record.sy):.2e} too small"
        )
    return float(np.arctan2(record.sy, record.sx))


def unwrap_to_reference(gamma: float, reference: float) -> float:
    """Shift gamma by the multiple of 2*pi closest to the reference branch."""
    return float(gamma + 2.0 * np.pi * np.round((reference - gamma) / (2.0 * np.pi)))


def unwrap_series(values: np.ndarray, first_reference: float, guard: float = np.pi) -> np.ndarray:
    """Nearest-branch continuation along a sweep axis; adjacent unwrapped
    values must stay within the guard or the grid is too coarse."""
    out = np.empty_like(values, dtype=float)
    ref = first_reference
    for i, v in enumerate(values):
        out[i] = unwrap_to_reference(float(v), ref)
        if i > 0 and abs(out[i] - out[i - 1]) > guard:
            warnings.warn(
                f"phase step {abs(out[i] - out[i-1]):.3f} rad exceeds the {guard:.3f} rad "
                "unwrapping guard; refine the sweep grid",
                stacklevel=2,
            )
        ref = out[i]
    return out


def bloch_length(record: TomographyRecord) -> float:
    return float(np.sqrt(record.sx**2 + record.sy**2 + record.sz**2))


def ml_reconstruct(record: TomographyRecord) -> np.ndarray:
    """Most likely physical qubit state under isotropic Gaussian noise on
    the expectation estimates: the raw Bloch vector if it is inside the
    ball, its radial projection onto the surface otherwise."""
    r = np.array([record.sx, record.sy, record.sz], dtype=float)
    length = np.linalg.norm(r)
    if length > 1.0:
        r = r / length
    rho = 0.5 * (np.eye(2, dtype=complex) + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z)
    return rho


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho))."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    validate_density(rho)
    validate_density(sigma)
    evals, evecs = np.linalg.eigh(rho)
    sqrt_rho = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
    inner = sqrt_rho @ sigma @ sqrt_rho
    lams = np.linalg.eigvalsh(inner)
    return float(np.sum(np.sqrt(np.clip(lams, 0.0, None))))


def pure_target(gamma: float) -> np.ndarray:
    """Equatorial target (|0> + e^{i gamma} |1>)/sqrt(2) as a density
    matrix (the ideal post-interferometer state)."""
    psi = np.array([1.0, np.exp(1j * gamma)], dtype=complex) / np.sqrt(2.0)
    return np.outer(psi, psi.conj())
