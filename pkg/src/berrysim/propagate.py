"""Time-domain integration of the driven multi-level qubit.

Unitary runs use a fixed-step fourth-order Magnus integrator (two-point
Gauss-Legendre nodes) with an exact matrix exponential per step, so the
norm is conserved to machine precision at the default 10 ps step.  Open
runs integrate the Lindblad equation with classical RK4; the dissipator
(lowering channel with sqrt(j) matrix elements anchored to T1, pure
dephasing proportional to the number operator calibrated so the 0-1
coherence decays at 1/T2*) is evaluated element-wise, which keeps both
trace and Hermiticity exact per step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ConfigurationError, IntegrationError, UnphysicalStateError
from .model import DeviceParams
from .sequence import ControlProgram, PulseSequence

_SQRT3_12 = np.sqrt(3.0) / 12.0
_GAUSS_LO = 0.5 - np.sqrt(3.0) / 6.0
_GAUSS_HI = 0.5 + np.sqrt(3.0) / 6.0

NORM_DRIFT_BOUND = 1e-8
TRACE_DRIFT_BOUND = 1e-8
MIN_EIGENVALUE_BOUND = -1e-8
MAX_DT_S = 20e-12


@njit(cache=True, inline="always")
def _matmul(a, b, out):
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            s = 0.0 + 0.0j
            for l in range(n):
                s += a[i, l] * b[l, j]
            out[i, j] = s


@njit(cache=True)
def _expm(m, out, term, work):
    """out = exp(m) by scaling-and-squaring Taylor (norm reduced to <=0.25,
    14 terms: remainder < 1e-20)."""
    n = m.shape[0]
    norm = 0.0
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += abs(m[i, j])
        if s > norm:
            norm = s
    squarings = 0
    while norm > 0.25:
        norm *= 0.5
        squarings += 1
    scale = 0.5**squarings
    for i in range(n):
        for j in range(n):
            term[i, j] = m[i, j] * scale
            out[i, j] = term[i, j]
        out[i, i] += 1.0
    # out = I + t; keep multiplying the running term by t/k
    t_scaled = term.copy()
    for k in range(2, 15):
        _matmul(term, t_scaled, work)
        inv_k = 1.0 / k
        for i in range(n):
            for j in range(n):
                term[i, j] = work[i, j] * inv_k
                out[i, j] += term[i, j]
    for _ in range(squarings):
        _matmul(out, out, work)
        for i in range(n):
            for j in range(n):
                out[i, j] = work[i, j]


@njit(cache=True, inline="always")
def _fill_hamiltonian(h, alphas, sqrtj, ox, oy, dd):
    n = h.shape[0]
    for i in range(n):
        for j in range(n):
            h[i, j] = 0.0
        h[i, i] = i * dd + alphas[i]
    c = 0.5 * complex(ox, -oy)
    for j in range(n - 1):
        h[j + 1, j] = sqrtj[j] * c
        h[j, j + 1] = sqrtj[j] * np.conj(c)


@njit(cache=True, nogil=True)
def _run_schrodinger(psi, alphas, sqrtj, ox1, oy1, dd1, ox2, oy2, dd2, dt, stride, snaps):
    n = psi.shape[0]
    n_steps = ox1.shape[0]
    h1 = np.zeros((n, n), np.complex128)
    h2 = np.zeros((n, n), np.complex128)
    gen = np.zeros((n, n), np.complex128)
    u = np.zeros((n, n), np.complex128)
    term = np.zeros((n, n), np.complex128)
    work = np.zeros((n, n), np.complex128)
    comm = np.zeros((n, n), np.complex128)
    new_psi = np.zeros(n, np.complex128)
    p2_max = 0.0
    snap_idx = 0
    for k in range(n_steps):
        _fill_hamiltonian(h1, alphas, sqrtj, ox1[k], oy1[k], dd1[k])
        _fill_hamiltonian(h2, alphas, sqrtj, ox2[k], oy2[k], dd2[k])
        _matmul(h1, h2, comm)
        _matmul(h2, h1, work)
        c_mag = _SQRT3_12 * dt * dt
        half_dt = 0.5 * dt
        for i in range(n):
            for j in range(n):
                gen[i, j] = -1j * half_dt * (h1[i, j] + h2[i, j]) + c_mag * (
                    comm[i, j] - work[i, j]
                )
        _expm(gen, u, term, work)
        for i in range(n):
            s = 0.0 + 0.0j
            for l in range(n):
                s += u[i, l] * psi[l]
            new_psi[i] = s
        for i in range(n):
            psi[i] = new_psi[i]
        p2 = 0.0
        for i in range(2, n):
            p2 += psi[i].real ** 2 + psi[i].imag ** 2
        if p2 > p2_max:
            p2_max = p2
        if (k + 1) % stride == 0:
            for i in range(n):
                snaps[snap_idx, i] = psi[i]
            snap_idx += 1
    return p2_max


@njit(cache=True, inline="always")
def _lindblad_rhs(rho, h, g1, gphi, sqrtj, out, work):
    n = rho.shape[0]
    _matmul(h, rho, out)
    _matmul(rho, h, work)
    for i in range(n):
        for j in range(n):
            acc = -1j * (out[i, j] - work[i, j])
            # lowering channel: sqrt(j) matrix elements, rate anchored to T1
            if i < n - 1 and j < n - 1:
                acc += g1 * sqrtj[i] * sqrtj[j] * rho[i + 1, j + 1]
            acc -= 0.5 * g1 * (i + j) * rho[i, j]
            # pure dephasing via the number operator
            acc -= gphi * (i - j) * (i - j) * rho[i, j]
            out[i, j] = acc


@njit(cache=True, nogil=True)
def _run_lindblad(rho, alphas, sqrtj, ox, oy, dd, dt, g1, gphi, stride, snaps):
    """RK4 over a half-step control grid: sample m belongs to time m*dt/2."""
    n = rho.shape[0]
    n_steps = (ox.shape[0] - 1) // 2
    h = np.zeros((n, n), np.complex128)
    k1 = np.zeros((n, n), np.complex128)
    k2 = np.zeros((n, n), np.complex128)
    k3 = np.zeros((n, n), np.complex128)
    k4 = np.zeros((n, n), np.complex128)
    stage = np.zeros((n, n), np.complex128)
    work = np.zeros((n, n), np.complex128)
    p2_max = 0.0
    snap_idx = 0
    for m in range(n_steps):
        base = 2 * m
        _fill_hamiltonian(h, alphas, sqrtj, ox[base], oy[base], dd[base])
        _lindblad_rhs(rho, h, g1, gphi, sqrtj, k1, work)
        _fill_hamiltonian(h, alphas, sqrtj, ox[base + 1], oy[base + 1], dd[base + 1])
        for i in range(n):
            for j in range(n):
                stage[i, j] = rho[i, j] + 0.5 * dt * k1[i, j]
        _lindblad_rhs(stage, h, g1, gphi, sqrtj, k2, work)
        for i in range(n):
            for j in range(n):
                stage[i, j] = rho[i, j] + 0.5 * dt * k2[i, j]
        _lindblad_rhs(stage, h, g1, gphi, sqrtj, k3, work)
        _fill_hamiltonian(h, alphas, sqrtj, ox[base + 2], oy[base + 2], dd[base + 2])
        for i in range(n):
            for j in range(n):
                stage[i, j] = rho[i, j] + dt * k3[i, j]
        _lindblad_rhs(stage, h, g1, gphi, sqrtj, k4, work)
        sixth = dt / 6.0
        for i in range(n):
            for j in range(n):
                rho[i, j] += sixth * (k1[i, j] + 2.0 * k2[i, j] + 2.0 * k3[i, j] + k4[i, j])
        p2 = 0.0
        for i in range(2, n):
            p2 += rho[i, i].real
        if p2 > p2_max:
            p2_max = p2
        if (m + 1) % stride == 0:
            for i in range(n):
                for j in range(n):
                    snaps[snap_idx, i, j] = rho[i, j]
            snap_idx += 1
    return p2_max


@dataclass
class ThreeLevelCoords:
    """Torus-times-octant coordinates of a three-level state."""

    beta1: float
    beta2: float
    chi1: float
    chi2: float
    reference_fallback: bool = False


@dataclass
class TrajectoryRecord:
    """Sampled observables along one propagation."""

    times_ns: np.ndarray
    sigma_x: np.ndarray
    sigma_y: np.ndarray
    sigma_z: np.ndarray
    p2: np.ndarray
    a_param: np.ndarray
    p2_max: float
    norm_drift: float
    coords: list[ThreeLevelCoords] | None = field(default=None, repr=False)

    def to_csv(self) -> str:
        lines = ["t_ns,sx,sy,sz,p2,a_param"]
        for k in range(self.times_ns.shape[0]):
            lines.append(
                f"{self.times_ns[k]:.6f},{self.sigma_x[k]:.9f},{self.sigma_y[k]:.9f},"
                f"{self.sigma_z[k]:.9f},{self.p2[k]:.9f},{self.a_param[k]:.9f}"
            )
        return "\n".join(lines) + "\n"


def _qubit_expectations(amplitude0, amplitude1):
    cross = np.conj(amplitude0) * amplitude1
    sx = 2.0 * cross.real
    sy = 2.0 * cross.imag
    sz = (np.abs(amplitude0) ** 2 - np.abs(amplitude1) ** 2).real
    return sx, sy, sz


def _record_from_state_snaps(times_s, snaps, program, p2_max, norm_drift, coords):
    sx, sy, sz = _qubit_expectations(snaps[:, 0], snaps[:, 1])
    p2 = np.sum(np.abs(snaps[:, 2:]) ** 2, axis=1)
    rec = TrajectoryRecord(
        times_ns=times_s * 1e9,
        sigma_x=sx,
        sigma_y=sy,
        sigma_z=sz,
        p2=p2,
        a_param=program.adiabaticity(times_s),
        p2_max=float(p2_max),
        norm_drift=float(norm_drift),
    )
    if coords and snaps.shape[1] == 3:
        rec.coords = [three_level_coords(snaps[k]) for k in range(snaps.shape[0])]
    return rec


def _resolve_steps(program: ControlProgram, dt_s: float) -> int:
    if dt_s > MAX_DT_S:
        raise ConfigurationError(
            f"dt={dt_s:g}s too coarse: must be <= {MAX_DT_S:g}s to resolve the dynamics"
        )
    n_steps = round(program.total_time / dt_s)
    if n_steps < 1 or abs(n_steps * dt_s - program.total_time) > 1e-6 * program.total_time:
        raise ConfigurationError("dt must divide the total sequence duration")
    return n_steps


def _as_program(controls: ControlProgram | PulseSequence, params: DeviceParams) -> ControlProgram:
    if isinstance(controls, PulseSequence):
        return ControlProgram(controls, alpha2=params.alpha2)
    return controls


def schrodinger_propagate(
    controls: ControlProgram | PulseSequence,
    params: DeviceParams,
    psi0: np.ndarray,
    dt_s: float = 10e-12,
    record_points: int = 512,
    compute_coords: bool = False,
) -> tuple[np.ndarray, TrajectoryRecord]:
    """Integrate i d psi/dt = H(t) psi through the control program.

    Raises IntegrationError if the final norm drifted by more than 1e-8.
    """
    program = _as_program(controls, params)
    n = params.n_levels
    psi = np.asarray(psi0, dtype=complex).copy()
    if psi.shape != (n,):
        raise ConfigurationError(f"psi0 must have shape ({n},)")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise UnphysicalStateError("psi0 is not normalized within 1e-9")
    n_steps = _resolve_steps(program, dt_s)
    base = np.arange(n_steps) * dt_s
    ox1, oy1, dd1 = program.quadratures(base + _GAUSS_LO * dt_s)
    ox2, oy2, dd2 = program.quadratures(base + _GAUSS_HI * dt_s)
    stride = max(1, n_steps // record_points)
    n_snaps = n_steps // stride
    snaps = np.zeros((n_snaps, n), dtype=complex)
    alphas = np.asarray(params.anharmonicities, dtype=float)
    sqrtj = np.sqrt(np.arange(1, n, dtype=float))
    p2_max = _run_schrodinger(psi, alphas, sqrtj, ox1, oy1, dd1, ox2, oy2, dd2, dt_s, stride, snaps)
    drift = abs(np.linalg.norm(psi) - 1.0)
    if drift > NORM_DRIFT_BOUND:
        raise IntegrationError(f"norm drifted by {drift:.2e} (> {NORM_DRIFT_BOUND:g}); reduce dt")
    times_s = (np.arange(n_snaps) + 1) * stride * dt_s
    record = _record_from_state_snaps(times_s, snaps, program, p2_max, drift, compute_coords)
    return psi, record


def lindblad_propagate(
    controls: ControlProgram | PulseSequence,
    params: DeviceParams,
    rho0: np.ndarray,
    dt_s: float = 10e-12,
    record_points: int = 512,
) -> tuple[np.ndarray, TrajectoryRecord]:
    """Integrate the Lindblad equation with the T1 lowering channel and
    number-operator dephasing (Gamma_phi = 1/T2* - 1/(2 T1))."""
    program = _as_program(controls, params)
    n = params.n_levels
    if params.t1 is None or params.t2_star is None:
        raise ConfigurationError("lindblad_propagate needs t1 and t2_star on DeviceParams")
    t1_s = params.t1 * 1e-6
    t2_s = params.t2_star * 1e-6
    gphi = 1.0 / t2_s - 0.5 / t1_s
    if gphi < -1e-12:
        raise UnphysicalStateError(f"pure-dephasing rate is negative (t2*={params.t2_star} us > 2*t1)")
    gphi = max(gphi, 0.0)
    rho = np.asarray(rho0, dtype=complex).copy()
    if rho.shape != (n, n):
        raise ConfigurationError(f"rho0 must have shape ({n},{n})")
    validate_density(rho)
    n_steps = _resolve_steps(program, dt_s)
    half_times = np.arange(2 * n_steps + 1) * (dt_s / 2.0)
    ox, oy, dd = program.quadratures(half_times)
    stride = max(1, n_steps // record_points)
    n_snaps = n_steps // stride
    snaps = np.zeros((n_snaps, n, n), dtype=complex)
    alphas = np.asarray(params.anharmonicities, dtype=float)
    sqrtj = np.sqrt(np.arange(1, n, dtype=float))
    p2_max = _run_lindblad(rho, alphas, sqrtj, ox, oy, dd, dt_s, 1.0 / t1_s, gphi, stride, snaps)
    drift = abs(np.trace(rho).real - 1.0)
    if drift > TRACE_DRIFT_BOUND:
        raise IntegrationError(f"trace drifted by {drift:.2e} (> {TRACE_DRIFT_BOUND:g})")
    _check_snapshots(snaps)
    times_s = (np.arange(n_snaps) + 1) * stride * dt_s
    sx = 2.0 * snaps[:, 0, 1].real
    sy = -2.0 * snaps[:, 0, 1].imag
    sz = (snaps[:, 0, 0] - snaps[:, 1, 1]).real
    p2 = np.einsum("kii->k", snaps[:, 2:, 2:]).real
    record = TrajectoryRecord(
        times_ns=times_s * 1e9,
        sigma_x=sx,
        sigma_y=sy,
        sigma_z=sz,
        p2=p2,
        a_param=program.adiabaticity(times_s),
        p2_max=float(p2_max),
        norm_drift=float(drift),
    )
    return rho, record


def _check_snapshots(snaps: np.ndarray) -> None:
    if snaps.shape[0] == 0:
        return
    herm = np.abs(snaps - snaps.conj().transpose(0, 2, 1)).max()
    if herm > 1e-10:
        raise IntegrationError(f"density matrix lost Hermiticity ({herm:.2e})")
    traces = np.einsum("kii->k", snaps).real
    if np.abs(traces - 1.0).max() > TRACE_DRIFT_BOUND:
        raise IntegrationError("density matrix trace drifted along the trajectory")
    eigs = np.linalg.eigvalsh(snaps)
    if eigs.min() < MIN_EIGENVALUE_BOUND:
        raise IntegrationError(f"density matrix lost positivity ({eigs.min():.2e})")


def validate_state(psi: np.ndarray, tol: float = 1e-9) -> None:
    if abs(np.linalg.norm(psi) - 1.0) > tol:
        raise UnphysicalStateError(f"state norm {np.linalg.norm(psi):.12f} not 1 within {tol:g}")


def validate_density(rho: np.ndarray, herm_tol: float = 1e-10, trace_tol: float = 1e-9,
                     eig_tol: float = -1e-9) -> None:
    if np.abs(rho - rho.conj().T).max() > herm_tol:
        raise UnphysicalStateError("density matrix is not Hermitian within 1e-10")
    if abs(np.trace(rho).real - 1.0) > trace_tol:
        raise UnphysicalStateError("density matrix trace is not 1 within 1e-9")
    if np.linalg.eigvalsh(rho).min() < eig_tol:
        raise UnphysicalStateError("density matrix has eigenvalues below -1e-9")


def leakage_population(state_or_rho: np.ndarray) -> float:
    """Total population outside the computational subspace."""
    arr = np.asarray(state_or_rho)
    if arr.ndim == 1:
        if arr.shape[0] < 3:
            raise ConfigurationError("leakage needs at least three levels")
        return float(np.sum(np.abs(arr[2:]) ** 2))
    if arr.shape[0] < 3:
        raise ConfigurationError("leakage needs at least three levels")
    return float(np.trace(arr[2:, 2:]).real)


def three_level_coords(psi: np.ndarray) -> ThreeLevelCoords:
    """Coordinates (beta1, beta2, chi1, chi2) of a three-level state:
    populations on an octant of the sphere, phases of |0> and |1> relative
    to |2> on a torus.  When the |2> amplitude vanishes the phase reference
    falls back to |0> and the record is flagged."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (3,):
        raise ConfigurationError("three_level_coords needs exactly three amplitudes")
    validate_state(psi)
    a0, a1, a2 = psi
    beta1 = float(np.arccos(np.clip(abs(a2), 0.0, 1.0)))
    beta2 = float(np.arctan2(abs(a1), abs(a0)))
    fallback = abs(a2) < 1e-12
    ref = np.angle(a0) if fallback else np.angle(a2)
    chi1 = float(np.mod(np.angle(a0) - ref, 2 * np.pi))
    chi2 = float(np.mod(np.angle(a1) - ref, 2 * np.pi))
    return ThreeLevelCoords(beta1=beta1, beta2=beta2, chi1=chi1, chi2=chi2,
                            reference_fallback=bool(fallback))


def reconstruct_three_level(coords: ThreeLevelCoords) -> np.ndarray:
    """Inverse of three_level_coords up to a global phase."""
    s1, c1 = np.sin(coords.beta1), np.cos(coords.beta1)
    s2, c2 = np.sin(coords.beta2), np.cos(coords.beta2)
    return np.array(
        [np.exp(1j * coords.chi1) * s1 * c2, np.exp(1j * coords.chi2) * s1 * s2, c1],
        dtype=complex,
    )


def adiabaticity_parameter(omega: float, delta: float, phi_dot: float) -> float:
    """a = phi_dot * sin(theta) / |B| for a drive of strength omega at
    detuning delta whose phase advances at phi_dot (rad/s)."""
    b = float(np.hypot(omega, delta))
    if b == 0.0:
        raise ConfigurationError("degenerate field: omega = delta = 0")
    sin_theta = omega / b
    return float(abs(phi_dot) * sin_theta / b)
