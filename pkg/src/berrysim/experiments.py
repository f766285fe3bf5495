"""Experiment campaigns: single interferometer runs, parameter sweeps and
their CSV serialization.

Every sweep row carries the simulated phase alongside the exact spectral,
perturbative and two-level predictions, the Bloch-vector length at
readout, the peak leakage, the sweep adiabaticity parameter and the gate
fidelity against the ideal adiabatic target.  CSV output embeds the fully
resolved configuration as '#'-prefixed header lines so defaulted values
are always visible; identical config and seed give byte-identical files
regardless of worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .adiabatic import PredictionOrder, predicted_interferometer_phase
from .config import RunConfig
from .errors import BerrysimError, NumericalError
from .estimate import (
    TomographyRecord,
    bloch_length,
    extract_phase,
    fidelity,
    ml_reconstruct,
    pure_target,
    tomography,
    unwrap_to_reference,
)
from .model import DeviceParams, omega_for_solid_angle, transmon_spectrum
from .propagate import adiabaticity_parameter, lindblad_propagate, schrodinger_propagate
from .sequence import build_interferometer_sequence

TWO_PI = 2.0 * math.pi
MHZ = TWO_PI * 1e6

TOMOGRAPHY_SETTINGS = {"x": "tomography_x", "y": "tomography_y", "z": None}

CONTOUR_SIGN = {"-+": +1.0, "+-": -1.0, "++": 0.0, "--": 0.0}

COLUMNS = (
    "axis_value",
    "contour",
    "a_solid_sr",
    "detuning_mhz",
    "tau_ns",
    "gamma_sim_rad",
    "gamma_exact_rad",
    "gamma_pert_rad",
    "gamma_twolevel_rad",
    "bloch_length",
    "p2_max",
    "a_param",
    "fidelity",
    "reason",
)


@dataclass
class SingleRun:
    """One contour through the full pipeline (three tomography settings)."""

    record: TomographyRecord
    gamma_raw: float
    gamma: float
    bloch: float
    p2_max: float
    fidelity: float
    gamma_ideal: float


@dataclass
class SweepResult:
    axis: str
    rows: list[dict] = field(default_factory=list)
    header: list[tuple[str, str]] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = [f"# berrysim {__version__} sweep={self.axis}"]
        lines += [f"# {key} = {value}" for key, value in self.header]
        lines.append(",".join(COLUMNS))
        for row in self.rows:
            cells = []
            for col in COLUMNS:
                value = row.get(col, "")
                if isinstance(value, float):
                    cells.append("NaN" if math.isnan(value) else format(value, ".12g"))
                else:
                    cells.append(str(value))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def run_interferometer(
    params: DeviceParams,
    contour: str,
    a_solid: float,
    delta: float,
    tau_ns: float,
    *,
    ramp_ns: float = 40.0,
    pi2_ns: float = 12.0,
    drag_on: bool = True,
    budget_ns: float = 700.0,
    decoherence: bool = False,
    dt_s: float = 10e-12,
    shots: int = 0,
    seed: int | None = None,
) -> SingleRun:
    """Propagate one contour and extract phase, Bloch length and fidelity.

    The sequence is propagated once per tomography setting (x, y and a
    population-only run); decoherence switches between Lindblad and pure
    Schroedinger evolution.
    """
    n = params.n_levels
    finals: dict[str, np.ndarray] = {}
    p2_max = 0.0
    for setting, tomo in TOMOGRAPHY_SETTINGS.items():
        seq = build_interferometer_sequence(
            contour, a_solid, delta, tau_ns,
            ramp_ns=ramp_ns, pi2_ns=pi2_ns, drag_on=drag_on, budget_ns=budget_ns,
            tomography=tomo,
        )
        if decoherence:
            rho0 = np.zeros((n, n), dtype=complex)
            rho0[0, 0] = 1.0
            state, rec = lindblad_propagate(seq, params, rho0, dt_s)
        else:
            psi0 = np.zeros(n, dtype=complex)
            psi0[0] = 1.0
            state, rec = schrodinger_propagate(seq, params, psi0, dt_s)
        finals[setting] = state
        if setting == "z":
            p2_max = rec.p2_max

    record = tomography(finals, shots=shots, seed=seed)
    gamma_raw = extract_phase(record)
    sign = CONTOUR_SIGN[contour]
    order = PredictionOrder.EXACT_N if n >= 3 else PredictionOrder.TWO_LEVEL
    prediction = predicted_interferometer_phase(params, a_solid, delta, order).gamma_pred
    gamma_ideal = sign * prediction
    gamma = unwrap_to_reference(gamma_raw, sign * 2.0 * a_solid)
    fid = fidelity(ml_reconstruct(record), pure_target(gamma_ideal))
    return SingleRun(
        record=record,
        gamma_raw=gamma_raw,
        gamma=gamma,
        bloch=bloch_length(record),
        p2_max=p2_max,
        fidelity=fid,
        gamma_ideal=gamma_ideal,
    )


def _predictions(params: DeviceParams, a_solid: float, delta: float) -> dict[str, float]:
    exact = predicted_interferometer_phase(
        params, a_solid, delta,
        PredictionOrder.EXACT_N if params.n_levels >= 3 else PredictionOrder.TWO_LEVEL,
    ).gamma_pred
    try:
        pert = predicted_interferometer_phase(
            params, a_solid, delta, PredictionOrder.PERTURBATIVE
        ).gamma_pred
    except BerrysimError:
        pert = math.nan
    return {"exact": exact, "pert": pert, "twolevel": 2.0 * a_solid}


def _row_skeleton(axis_value: float, contour: str, a_solid: float, delta: float, tau_ns: float) -> dict:
    omega = omega_for_solid_angle(a_solid, delta)
    return {
        "axis_value": float(axis_value),
        "contour": contour,
        "a_solid_sr": float(a_solid),
        "detuning_mhz": delta / MHZ,
        "tau_ns": float(tau_ns),
        "gamma_sim_rad": math.nan,
        "gamma_exact_rad": math.nan,
        "gamma_pert_rad": math.nan,
        "gamma_twolevel_rad": math.nan,
        "bloch_length": math.nan,
        "p2_max": math.nan,
        "a_param": adiabaticity_parameter(omega, delta, TWO_PI / (tau_ns * 1e-9)),
        "fidelity": math.nan,
        "reason": "",
    }


def _evaluate_rows(tasks, worker, workers: int) -> list[dict]:
    """Run row tasks (possibly concurrently); assembly order is the task
    order, so results are deterministic for any worker count."""
    if workers <= 1:
        return [worker(task) for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, tasks))


def _sweep(config: RunConfig, axis: str, tasks, worker) -> SweepResult:
    result = SweepResult(axis=axis, header=config.flat_items())
    result.rows = _evaluate_rows(tasks, worker, config.workers)
    return result


def sweep_angle(config: RunConfig) -> SweepResult:
    """Phase versus solid angle at fixed detuning for the measurement
    contours plus the control contour (the Fig.-2c campaign)."""
    if config.sweep.axis != "angle":
        raise NumericalError("sweep_angle called with a non-angle sweep axis")
    params = config.device_params()
    delta = config.delta
    grid = config.sweep_grid()
    contours = ("-+", "+-", "--")
    tasks = [
        (idx, a_solid, contour)
        for idx, a_solid in enumerate(grid)
        for contour in contours
    ]

    def worker(task):
        idx, a_solid, contour = task
        row = _row_skeleton(a_solid, contour, a_solid, delta, config.drive.tau_ns)
        try:
            preds = _predictions(params, a_solid, delta)
            sign = CONTOUR_SIGN[contour]
            row["gamma_exact_rad"] = sign * preds["exact"]
            row["gamma_pert_rad"] = sign * preds["pert"]
            row["gamma_twolevel_rad"] = sign * preds["twolevel"]
            run = run_interferometer(
                params, contour, a_solid, delta, config.drive.tau_ns,
                ramp_ns=config.drive.ramp_ns, pi2_ns=config.drive.pi2_ns,
                drag_on=config.drive.drag, budget_ns=config.drive.budget_ns,
                decoherence=config.decoherence, dt_s=config.dt_s,
                shots=config.readout.shots,
                seed=config.readout.seed + 7 * idx + contours.index(contour),
            )
            row["gamma_sim_rad"] = run.gamma
            row["bloch_length"] = run.bloch
            row["p2_max"] = run.p2_max
            row["fidelity"] = run.fidelity
        except BerrysimError as exc:
            row["reason"] = type(exc).__name__
        return row

    return _sweep(config, "angle", tasks, worker)


def sweep_detuning(config: RunConfig) -> SweepResult:
    """Phase versus detuning for a set of solid angles (the Fig.-2d
    campaign); the drive strength is re-solved per (angle, detuning)."""
    if config.sweep.axis != "detuning":
        raise NumericalError("sweep_detuning called with a non-detuning sweep axis")
    params = config.device_params()
    grid = config.sweep_grid()
    tasks = [
        (idx, detuning_mhz, a_solid)
        for idx, detuning_mhz in enumerate(grid)
        for a_solid in config.sweep.angles_sr
    ]

    def worker(task):
        idx, detuning_mhz, a_solid = task
        delta = detuning_mhz * MHZ
        row = _row_skeleton(detuning_mhz, "-+", a_solid, delta, config.drive.tau_ns)
        try:
            preds = _predictions(params, a_solid, delta)
            row["gamma_exact_rad"] = preds["exact"]
            row["gamma_pert_rad"] = preds["pert"]
            row["gamma_twolevel_rad"] = preds["twolevel"]
            run = run_interferometer(
                params, "-+", a_solid, delta, config.drive.tau_ns,
                ramp_ns=config.drive.ramp_ns, pi2_ns=config.drive.pi2_ns,
                drag_on=config.drive.drag, budget_ns=config.drive.budget_ns,
                decoherence=config.decoherence, dt_s=config.dt_s,
                shots=config.readout.shots, seed=config.readout.seed + 11 * idx,
            )
            row["gamma_sim_rad"] = run.gamma
            row["bloch_length"] = run.bloch
            row["p2_max"] = run.p2_max
            row["fidelity"] = run.fidelity
        except BerrysimError as exc:
            row["reason"] = type(exc).__name__
        return row

    return _sweep(config, "detuning", tasks, worker)


def sweep_tau(config: RunConfig) -> SweepResult:
    """Phase and gate fidelity versus sweep time at fixed solid angle (the
    Fig.-3 campaign); idle padding keeps the total duration constant.

    gamma_sim_rad comes from unitary propagation (non-adiabatic physics);
    bloch/fidelity from the configured pipeline (Lindblad by default).
    """
    if config.sweep.axis != "tau":
        raise NumericalError("sweep_tau called with a non-tau sweep axis")
    params = config.device_params()
    delta = config.delta
    a_solid = config.sweep.angles_sr[0]
    grid = config.sweep_grid()
    tasks = list(enumerate(grid))

    def worker(task):
        idx, tau_ns = task
        row = _row_skeleton(tau_ns, "-+", a_solid, delta, tau_ns)
        try:
            preds = _predictions(params, a_solid, delta)
            row["gamma_exact_rad"] = preds["exact"]
            row["gamma_pert_rad"] = preds["pert"]
            row["gamma_twolevel_rad"] = preds["twolevel"]
            common = dict(
                ramp_ns=config.drive.ramp_ns, pi2_ns=config.drive.pi2_ns,
                drag_on=config.drive.drag, budget_ns=config.drive.budget_ns,
                dt_s=config.dt_s, shots=config.readout.shots,
            )
            unitary = run_interferometer(
                params, "-+", a_solid, delta, float(tau_ns),
                decoherence=False, seed=config.readout.seed + 13 * idx, **common,
            )
            row["gamma_sim_rad"] = unitary.gamma
            row["p2_max"] = unitary.p2_max
            if config.decoherence:
                open_run = run_interferometer(
                    params, "-+", a_solid, delta, float(tau_ns),
                    decoherence=True, seed=config.readout.seed + 13 * idx + 1, **common,
                )
                row["bloch_length"] = open_run.bloch
                row["fidelity"] = open_run.fidelity
            else:
                row["bloch_length"] = unitary.bloch
                row["fidelity"] = unitary.fidelity
        except BerrysimError as exc:
            row["reason"] = type(exc).__name__
        return row

    return _sweep(config, "tau", tasks, worker)


SWEEPS = {"angle": sweep_angle, "detuning": sweep_detuning, "tau": sweep_tau}


def run_sweep(config: RunConfig) -> SweepResult:
    return SWEEPS[config.sweep.axis](config)


def spectrum_report(config: RunConfig) -> dict:
    """Charge-basis level structure plus the derived dimensionless ratios
    for the configured detuning."""
    omega01, alphas = transmon_spectrum(
        config.device.ej_ghz,
        config.device.ec_ghz,
        max(config.device.n_levels, 3),
        config.numerics.charge_cutoff,
    )
    params = config.device_params()
    alpha2 = params.alpha2
    report = {
        "ej_over_ec": config.device.ej_ghz / config.device.ec_ghz,
        "omega01_ghz": omega01 / (TWO_PI * 1e9),
        "alpha_mhz_charge_basis": [a / MHZ for a in alphas],
        "alpha_mhz_effective": [a / MHZ for a in params.anharmonicities],
        "asymptotic_omega01_ghz": math.sqrt(8 * config.device.ej_ghz * config.device.ec_ghz)
        - config.device.ec_ghz,
        "detuning_mhz": config.drive.detuning_mhz,
        "k": (config.delta / alpha2) if alpha2 != 0 else math.nan,
    }
    return report


def simulate_trajectory(config: RunConfig, contour: str = "-+") -> tuple[SingleRun, str]:
    """One contour at the configured operating point with a full
    trajectory dump (CSV columns t_ns, sx, sy, sz, p2, a_param)."""
    params = config.device_params()
    a_solid = config.sweep.angles_sr[0]
    seq = build_interferometer_sequence(
        contour, a_solid, config.delta, config.drive.tau_ns,
        ramp_ns=config.drive.ramp_ns, pi2_ns=config.drive.pi2_ns,
        drag_on=config.drive.drag, budget_ns=config.drive.budget_ns,
        tomography=None,
    )
    n = params.n_levels
    if config.decoherence:
        rho0 = np.zeros((n, n), dtype=complex)
        rho0[0, 0] = 1.0
        _, record = lindblad_propagate(seq, params, rho0, config.dt_s)
    else:
        psi0 = np.zeros(n, dtype=complex)
        psi0[0] = 1.0
        _, record = schrodinger_propagate(seq, params, psi0, config.dt_s)
    run = run_interferometer(
        params, contour, a_solid, config.delta, config.drive.tau_ns,
        ramp_ns=config.drive.ramp_ns, pi2_ns=config.drive.pi2_ns,
        drag_on=config.drive.drag, budget_ns=config.drive.budget_ns,
        decoherence=config.decoherence, dt_s=config.dt_s,
        shots=config.readout.shots, seed=config.readout.seed,
    )
    header = [f"# berrysim {__version__} trajectory contour={contour}"]
    header += [f"# {k} = {v}" for k, v in config.flat_items()]
    csv_text = "\n".join(header) + "\n" + record.to_csv()
    return run, csv_text
