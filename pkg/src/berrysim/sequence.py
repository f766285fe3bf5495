"""Interferometric pulse programs: Ramsey pi/2 pulses, a central spin-echo
pi pulse, and two adiabatic phase-sweep loops with configurable contour
directions.

Timing layout (durations in ns):

    [pi/2_y] [ramp^ sweep(d1) rampv] [pad] [pi_x] [pad] [ramp^ sweep(d2) rampv] [tomo]

The echo pulse sits exactly midway between the two loops; idle padding
keeps the total duration at the configured budget so that varying the
sweep time does not move the readout instant.  All controls are expressed
in a single frame rotating at the qubit frequency: resonant pulses have a
fixed drive phase, off-resonant segments carry a drive phase that advances
linearly at the detuning rate on top of the commanded sweep, and the
accumulated frame phase is continuous across segment boundaries.

Sign conventions: the contour labels '-'/'+' are mapped to commanded-phase
sweeps of +2*pi/-2*pi respectively, which calibrates the interferometer so
that the contour pair '-+' accumulates +2A in the two-level adiabatic
limit.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import ConfigurationError
from .model import TWO_PI, omega_for_solid_angle

RAMP_UP = "ramp_up"
RAMP_DOWN = "ramp_down"
PHASE_SWEEP = "phase_sweep"
RESONANT_PULSE = "resonant_pulse"
IDLE = "idle"

ROTATIONS = {
    # rotation -> (area rad, axis phase rad); axis phase 0 drives sigma_x,
    # -pi/2 drives sigma_y (coupling term (omega/2) e^{-i phi}|j+1><j|).
    "x_half_pi": (np.pi / 2, 0.0),
    "y_half_pi": (np.pi / 2, -np.pi / 2),
    "x_pi": (np.pi, 0.0),
    "tomography_x": (np.pi / 2, 0.0),
    "tomography_y": (np.pi / 2, -np.pi / 2),
}

CONTOURS = ("-+", "+-", "++", "--")

# Truncated-Gaussian area factor: envelope exp(-u^2/2)-exp(-2) on |u|<=2
# integrates to sigma*(sqrt(2*pi)*erf(sqrt(2)) - 4*exp(-2)).
_GAUSS_AREA = float(np.sqrt(2 * np.pi) * erf(np.sqrt(2.0)) - 4.0 * np.exp(-2.0))


@dataclass(frozen=True)
class Segment:
    """One timed control segment.

    duration is in ns; omega_target in rad/s; sweep_direction is the
    contour label sign (+1 for '+', -1 for '-'); drag_coefficient is the
    dimensionless first-order DRAG weight (0 disables shaping).
    """

    kind: str
    duration_ns: float
    omega_target: float = 0.0
    sweep_direction: int = 0
    rotation: str | None = None
    drag_coefficient: float = 0.0

    def __post_init__(self):
        if self.duration_ns <= 0:
            raise ConfigurationError(f"segment duration must be positive, got {self.duration_ns}")
        if self.kind == PHASE_SWEEP and self.sweep_direction not in (-1, +1):
            raise ConfigurationError("phase_sweep needs sweep_direction +-1")
        if self.kind == RESONANT_PULSE and self.rotation not in ROTATIONS:
            raise ConfigurationError(f"unknown rotation {self.rotation!r}")


@dataclass(frozen=True)
class PulseSequence:
    """Ordered segments plus the loop parameters they were built from.

    alpha2 (rad/s) rides along because DRAG shaping and simulation both
    need it; delta is the off-resonant detuning (rad/s).
    """

    segments: tuple[Segment, ...]
    contour: str
    delta: float
    tau_sweep_ns: float
    total_duration_ns: float

    def serialize(self) -> str:
        """Human-readable one-line-per-segment form for golden-file tests."""
        lines = [
            f"# contour {self.contour}  delta_mhz {self.delta / (TWO_PI * 1e6):.6f}"
            f"  tau_ns {self.tau_sweep_ns:.3f}  total_ns {self.total_duration_ns:.3f}"
        ]
        for seg in self.segments:
            parts = [seg.kind, f"{seg.duration_ns:.3f}"]
            if seg.kind in (RAMP_UP, RAMP_DOWN, PHASE_SWEEP):
                parts.append(f"omega_mhz={seg.omega_target / (TWO_PI * 1e6):.6f}")
            if seg.kind == PHASE_SWEEP:
                parts.append(f"direction={'+' if seg.sweep_direction > 0 else '-'}")
            if seg.kind == RESONANT_PULSE:
                parts.append(f"rotation={seg.rotation}")
                parts.append(f"drag={seg.drag_coefficient:g}")
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"


def build_interferometer_sequence(
    contour: str,
    a_solid: float,
    delta: float,
    tau_ns: float,
    ramp_ns: float = 40.0,
    pi2_ns: float = 12.0,
    drag_on: bool = True,
    budget_ns: float = 700.0,
    tomography: str | None = "tomography_x",
) -> PulseSequence:
    """Assemble the echo interferometer for one contour.

    tomography selects the trailing pulse ('tomography_x', 'tomography_y'
    or None for a population-only run; None is replaced by idle so the
    readout instant is identical across settings).  Exceeding the duration
    budget downgrades the padding to zero with a warning.
    """
    if contour not in CONTOURS:
        raise ConfigurationError(f"contour must be one of {CONTOURS}, got {contour!r}")
    if not 0.0 < a_solid < TWO_PI:
        raise ConfigurationError(f"a_solid must lie in (0, 2*pi), got {a_solid}")
    if tau_ns <= 0 or ramp_ns <= 0 or pi2_ns <= 0:
        raise ConfigurationError("tau_ns, ramp_ns and pi2_ns must be positive")
    omega = omega_for_solid_angle(a_solid, delta)
    drag = 1.0 if drag_on else 0.0
    d1 = -1 if contour[0] == "-" else +1
    d2 = -1 if contour[1] == "-" else +1

    pi_ns = 2.0 * pi2_ns
    loop_ns = 2.0 * ramp_ns + tau_ns
    bare_ns = pi2_ns + loop_ns + pi_ns + loop_ns + pi2_ns
    pad_ns = (budget_ns - bare_ns) / 2.0
    if pad_ns < 0:
        warnings.warn(
            f"sequence length {bare_ns:.1f} ns exceeds the {budget_ns:.1f} ns budget; "
            "no idle padding inserted",
            stacklevel=2,
        )
        pad_ns = 0.0

    def loop(direction: int) -> list[Segment]:
        return [
            Segment(RAMP_UP, ramp_ns, omega_target=omega),
            Segment(PHASE_SWEEP, tau_ns, omega_target=omega, sweep_direction=direction),
            Segment(RAMP_DOWN, ramp_ns, omega_target=omega),
        ]

    segments: list[Segment] = [
        Segment(RESONANT_PULSE, pi2_ns, rotation="y_half_pi", drag_coefficient=drag)
    ]
    segments += loop(d1)
    if pad_ns > 0:
        segments.append(Segment(IDLE, pad_ns))
    segments.append(Segment(RESONANT_PULSE, pi_ns, rotation="x_pi", drag_coefficient=drag))
    if pad_ns > 0:
        segments.append(Segment(IDLE, pad_ns))
    segments += loop(d2)
    if tomography is None:
        segments.append(Segment(IDLE, pi2_ns))
    else:
        if tomography not in ("tomography_x", "tomography_y"):
            raise ConfigurationError(f"unknown tomography setting {tomography!r}")
        segments.append(Segment(RESONANT_PULSE, pi2_ns, rotation=tomography, drag_coefficient=drag))

    total = sum(s.duration_ns for s in segments)
    return PulseSequence(
        segments=tuple(segments),
        contour=contour,
        delta=delta,
        tau_sweep_ns=tau_ns,
        total_duration_ns=total,
    )


@dataclass(frozen=True)
class _CompiledSegment:
    t0: float  # s
    t1: float  # s
    kind: str
    omega_target: float
    phi_start: float  # commanded phase at segment entry (rad)
    winding: float  # total commanded-phase advance over the segment (rad)
    area: float = 0.0  # resonant rotation angle
    axis_phase: float = 0.0
    drag: float = 0.0


SWEEP_EDGE_FRACTION = 0.10


def _sweep_phase(t_local: np.ndarray, duration: float, winding: float):
    """Phase sweep winding by exactly `winding`: constant rate with short
    cosine-shaped rate edges (SWEEP_EDGE_FRACTION of the duration each
    side).

    An abrupt rate step at full drive strength kicks the state off the
    swept eigenbasis (a first-order-in-rate phase error); fully windowed
    sweeps instead amplify the cubic-in-rate quasi-energy shift.  Short
    edges keep both small.
    """
    f = SWEEP_EDGE_FRACTION
    x = np.asarray(t_local, dtype=float) / duration
    peak = winding / (duration * (1.0 - f))

    rate = np.full_like(x, peak)
    phi = peak * duration * (x - f / 2.0)

    lead = x < f
    xl = x[lead] / f
    rate[lead] = peak * 0.5 * (1.0 - np.cos(np.pi * xl))
    phi[lead] = peak * duration * (f / 2.0) * (xl - np.sin(np.pi * xl) / np.pi)

    trail = x > 1.0 - f
    xt = (1.0 - x[trail]) / f
    rate[trail] = peak * 0.5 * (1.0 - np.cos(np.pi * xt))
    phi[trail] = winding - peak * duration * (f / 2.0) * (xt - np.sin(np.pi * xt) / np.pi)
    return phi, rate


class ControlProgram:
    """Piecewise-analytic drive quadratures for one pulse sequence.

    Evaluation returns (omega_x, omega_y) in rad/s and the diagonal
    detuning of the simulation frame (zero: the frame rotates at the qubit
    frequency, so the off-resonant drive phase advances at -delta).
    """

    def __init__(self, seq: PulseSequence, alpha2: float):
        self.sequence = seq
        self.delta = seq.delta
        self.alpha2 = alpha2
        self.total_time = seq.total_duration_ns * 1e-9
        compiled = []
        t = 0.0
        phi_cmd = 0.0
        for seg in seq.segments:
            dur = seg.duration_ns * 1e-9
            if seg.kind == PHASE_SWEEP:
                # Contour label '-' sweeps the commanded phase upward by
                # 2*pi: this orientation makes contour '-+' read out +2A
                # in the two-level adiabatic limit.
                winding = -seg.sweep_direction * TWO_PI
            else:
                winding = 0.0
            if seg.kind == RESONANT_PULSE:
                area, axis = ROTATIONS[seg.rotation]
                compiled.append(
                    _CompiledSegment(
                        t, t + dur, seg.kind, 0.0, phi_cmd, 0.0,
                        area=area, axis_phase=axis, drag=seg.drag_coefficient,
                    )
                )
            else:
                compiled.append(
                    _CompiledSegment(t, t + dur, seg.kind, seg.omega_target, phi_cmd, winding)
                )
            phi_cmd += winding
            t += dur
        self._segments = tuple(compiled)
        self._edges = np.array([c.t0 for c in compiled] + [self.total_time])

    def _segment_index(self, times: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._edges, times, side="right") - 1
        return np.clip(idx, 0, len(self._segments) - 1)

    def envelope(self, times: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(omega(t), d omega/dt, commanded phase) per sample, resonant
        pulses excluded (their quadratures come from quadratures())."""
        times = np.asarray(times, dtype=float)
        omega = np.zeros_like(times)
        domega = np.zeros_like(times)
        phi = np.zeros_like(times)
        idx = self._segment_index(times)
        for k, seg in enumerate(self._segments):
            mask = idx == k
            if not mask.any():
                continue
            tl = times[mask] - seg.t0
            dur = seg.t1 - seg.t0
            phi[mask] = seg.phi_start
            if seg.kind == RAMP_UP:
                omega[mask] = seg.omega_target * 0.5 * (1.0 - np.cos(np.pi * tl / dur))
                domega[mask] = seg.omega_target * 0.5 * np.pi / dur * np.sin(np.pi * tl / dur)
            elif seg.kind == RAMP_DOWN:
                omega[mask] = seg.omega_target * 0.5 * (1.0 + np.cos(np.pi * tl / dur))
                domega[mask] = -seg.omega_target * 0.5 * np.pi / dur * np.sin(np.pi * tl / dur)
            elif seg.kind == PHASE_SWEEP:
                omega[mask] = seg.omega_target
                dphi, _ = _sweep_phase(tl, dur, seg.winding)
                phi[mask] = seg.phi_start + dphi
        return omega, domega, phi

    def quadratures(self, times: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Sampled (omega_x, omega_y, delta_diag) at the given times (s)."""
        times = np.asarray(times, dtype=float)
        omega, _, phi_cmd = self.envelope(times)
        # off-resonant tone: effective phase = commanded - delta * t keeps
        # the generator coherent over the full program
        phi_eff = phi_cmd - self.delta * times
        ox = omega * np.cos(phi_eff)
        oy = omega * np.sin(phi_eff)
        idx = self._segment_index(times)
        for k, seg in enumerate(self._segments):
            if seg.kind != RESONANT_PULSE:
                continue
            mask = idx == k
            if not mask.any():
                continue
            tl = times[mask] - seg.t0
            dur = seg.t1 - seg.t0
            env, denv, env_sq_int = _gaussian_pulse(tl, dur, seg.area)
            # first-order DRAG: derivative quadrature -(d omega/dt)/alpha2
            # on the orthogonal channel, plus a commanded-phase ramp that
            # tracks the net quadratic shift of the qubit transition (1-2
            # Stark shift plus the quadrature's own contribution; the 1/2
            # coefficient nulls the pulse phase error at unit drag weight)
            if seg.drag and self.alpha2 != 0.0:
                quad = -seg.drag * denv / self.alpha2
                # centred about the pulse midpoint so the effective
                # rotation axis stays on the commanded quadrature
                total_sq = _gaussian_pulse(np.array([dur]), dur, seg.area)[2][0]
                stark = 0.5 * (env_sq_int - 0.5 * total_sq) / self.alpha2
            else:
                quad = np.zeros_like(env)
                stark = np.zeros_like(env)
            # The coupling term is (omega/2) e^{-i phi}|j+1><j|, so the
            # sampled (ox, oy) pair is the conjugate of the sigma-plane
            # drive vector (omega + i*quad) e^{-i(axis + stark)}.
            c_pulse = (env - 1j * quad) * np.exp(1j * (seg.axis_phase + stark))
            ox[mask] = c_pulse.real
            oy[mask] = c_pulse.imag
        return ox, oy, np.zeros_like(times)

    def effective_phase(self, times: np.ndarray) -> np.ndarray:
        """Drive phase of the off-resonant tone (for continuity checks)."""
        times = np.asarray(times, dtype=float)
        _, _, phi_cmd = self.envelope(times)
        return phi_cmd - self.delta * times

    def adiabaticity(self, times: np.ndarray) -> np.ndarray:
        """Instantaneous sweep adiabaticity a = phi_dot * sin(theta) / |B|
        per sample (zero outside phase sweeps)."""
        times = np.asarray(times, dtype=float)
        out = np.zeros_like(times)
        idx = self._segment_index(times)
        for k, seg in enumerate(self._segments):
            if seg.kind != PHASE_SWEEP:
                continue
            mask = idx == k
            if not mask.any():
                continue
            b = np.hypot(seg.omega_target, self.delta)
            sin_theta = seg.omega_target / b
            tl = times[mask] - seg.t0
            _, rate = _sweep_phase(tl, seg.t1 - seg.t0, seg.winding)
            out[mask] = np.abs(rate) * sin_theta / b
        return out

    def ramp_adiabaticity(self, times: np.ndarray) -> np.ndarray:
        """|d theta/dt| / |B| during ramps, zero elsewhere."""
        times = np.asarray(times, dtype=float)
        omega, domega, _ = self.envelope(times)
        out = np.zeros_like(times)
        idx = self._segment_index(times)
        ramp = np.isin(idx, [k for k, s in enumerate(self._segments) if s.kind in (RAMP_UP, RAMP_DOWN)])
        b2 = omega[ramp] ** 2 + self.delta**2
        out[ramp] = np.abs(domega[ramp]) * abs(self.delta) / b2**1.5
        return out


def _gaussian_pulse(
    t_local: np.ndarray, duration: float, area: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Baseline-subtracted truncated Gaussian (sigma = duration/4) with the
    requested integral; returns (envelope, d envelope/dt, running integral
    of envelope^2 from the pulse start)."""
    sigma = duration / 4.0
    peak = area / (sigma * _GAUSS_AREA)
    u = (t_local - duration / 2.0) / sigma
    core = np.exp(-0.5 * u**2)
    base = np.exp(-2.0)
    env = peak * (core - base)
    denv = peak * core * (-u) / sigma
    sq_int = (
        peak**2
        * sigma
        * (
            np.sqrt(np.pi) / 2.0 * (erf(u) - erf(-2.0))
            - 2.0 * base * np.sqrt(np.pi / 2.0) * (erf(u / np.sqrt(2.0)) - erf(-np.sqrt(2.0)))
            + base**2 * (u + 2.0)
        )
    )
    return env, denv, sq_int


def drag_envelope(base: np.ndarray, dt: float, alpha2: float) -> tuple[np.ndarray, np.ndarray]:
    """First-order DRAG of a sampled envelope: returns (in-phase,
    derivative quadrature -d base/dt / alpha2) on the orthogonal channel."""
    if alpha2 == 0.0:
        raise ConfigurationError("alpha2 must be nonzero for DRAG shaping")
    derivative = np.gradient(np.asarray(base, dtype=float), dt)
    return np.asarray(base, dtype=float), -derivative / alpha2


def sample_controls(seq: PulseSequence, dt_s: float, alpha2: float = 0.0) -> np.ndarray:
    """Sample the program on a uniform grid (structured array with fields
    t_ns, omega_x, omega_y, delta_diag).

    dt must divide every segment duration within 0.1%.
    """
    for seg in seq.segments:
        dur = seg.duration_ns * 1e-9
        steps = max(1, round(dur / dt_s))
        if abs(steps * dt_s - dur) > 1e-3 * dur:
            raise ConfigurationError(
                f"dt={dt_s:g}s does not divide segment {seg.kind} of {seg.duration_ns} ns "
                "within 0.1%"
            )
    program = ControlProgram(seq, alpha2=alpha2)
    n = round(seq.total_duration_ns * 1e-9 / dt_s)
    times = np.arange(n + 1) * dt_s
    ox, oy, dd = program.quadratures(times)
    out = np.zeros(
        n + 1,
        dtype=[("t_ns", float), ("omega_x", float), ("omega_y", float), ("delta_diag", float)],
    )
    out["t_ns"] = times * 1e9
    out["omega_x"] = ox
    out["omega_y"] = oy
    out["delta_diag"] = dd
    return out
