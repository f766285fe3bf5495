# Development probe: end-to-end interferometer runs.
import time

import numpy as np

from berrysim.adiabatic import PredictionOrder, predicted_interferometer_phase
from berrysim.estimate import extract_phase, tomography, unwrap_to_reference, bloch_length
from berrysim.model import DeviceParams, alpha_ladder
from berrysim.propagate import lindblad_propagate, schrodinger_propagate
from berrysim.sequence import ControlProgram, build_interferometer_sequence

MHZ = 2 * np.pi * 1e6
ALPHA2 = -423.0 * MHZ
P4 = DeviceParams(n_levels=4, anharmonicities=tuple(alpha_ladder(ALPHA2, 4)), t1=0.84, t2_star=1.03)

SETTING_FOR = {"x": "tomography_x", "y": "tomography_y", "z": None}


def run_unitary(contour, a_solid, delta, tau_ns, dt_s=10e-12, drag=True):
    psi0 = np.zeros(4, dtype=complex)
    psi0[0] = 1.0
    finals = {}
    rec_z = None
    for setting, tomo in SETTING_FOR.items():
        seq = build_interferometer_sequence(contour, a_solid, delta, tau_ns, drag_on=drag, tomography=tomo)
        psi, rec = schrodinger_propagate(seq, P4, psi0, dt_s)
        finals[setting] = psi
        if setting == "z":
            rec_z = rec
    rec_t = tomography(finals)
    return rec_t, rec_z


def run_lindblad(contour, a_solid, delta, tau_ns, dt_s=10e-12):
    rho0 = np.zeros((4, 4), dtype=complex)
    rho0[0, 0] = 1.0
    finals = {}
    for setting, tomo in SETTING_FOR.items():
        seq = build_interferometer_sequence(contour, a_solid, delta, tau_ns, tomography=tomo)
        rho, rec = lindblad_propagate(seq, P4, rho0, dt_s)
        finals[setting] = rho
    return tomography(finals)


t0 = time.time()
rec, rz = run_unitary("-+", np.pi / 4, -45 * MHZ, 100.0)
print(f"first unitary triple (incl numba compile): {time.time()-t0:.1f}s")
gamma = extract_phase(rec)
A = np.pi / 4
pred = predicted_interferometer_phase(P4, A, -45 * MHZ, PredictionOrder.EXACT_N).gamma_pred
print(f"C-+ A=pi/4: extracted={gamma:.5f}, unwrapped={unwrap_to_reference(gamma, 2*A):.5f}, 2A={2*A:.5f}, exact pred={pred:.5f}")
print(f"norm drift={rz.norm_drift:.2e}  p2_max={rz.p2_max:.4f}  record leak={rec.leakage:.2e}")

t0 = time.time()
rec2, _ = run_unitary("+-", np.pi / 4, -45 * MHZ, 100.0)
print(f"second triple: {time.time()-t0:.2f}s")
print(f"C+- phase: {extract_phase(rec2):.5f} (expect ~ -gamma)")

for c in ("--", "++"):
    r, _ = run_unitary(c, np.pi / 4, -45 * MHZ, 100.0)
    print(f"C{c} phase: {extract_phase(r):.6f} (expect ~0)")

# stronger loop + check against exact prediction
for A_pi, dm in [(0.75, -45), (1.25, -35)]:
    A = A_pi * np.pi
    r, z = run_unitary("-+", A, dm * MHZ, 100.0)
    g = unwrap_to_reference(extract_phase(r), 2 * A)
    pr = predicted_interferometer_phase(P4, A, dm * MHZ, PredictionOrder.EXACT_N).gamma_pred
    print(f"A={A_pi}pi d={dm}: gamma={g:.5f} exact={pr:.5f} rel={abs(g-pr)/pr:.3%} p2max={z.p2_max:.4f}")

# leakage at "strongest drive" B=110 MHz
omega110 = np.sqrt((110 * MHZ) ** 2 - (35 * MHZ) ** 2)
from berrysim.model import effective_field, DriveConfig
A110 = effective_field(DriveConfig(omega110, 0.0, -35 * MHZ)).a_solid
r, z = run_unitary("-+", A110, -35 * MHZ, 100.0)
print(f"strongest drive A={A110/np.pi:.3f}pi: p2_max={z.p2_max:.4f}")

# DRAG effect on pi pulse leakage (n=3): build a bare pi-pulse-only comparison
from berrysim.sequence import Segment, PulseSequence, RESONANT_PULSE
P3 = DeviceParams(n_levels=3, anharmonicities=tuple(alpha_ladder(ALPHA2, 3)))
for drag in (0.0, 1.0):
    seq = PulseSequence(
        segments=(Segment(RESONANT_PULSE, 16.0, rotation="x_pi", drag_coefficient=drag),),
        contour="-+", delta=-45 * MHZ, tau_sweep_ns=0.1, total_duration_ns=16.0)
    psi0 = np.zeros(3, dtype=complex); psi0[1] = 1.0  # start |1>, pi pulse to |0>, watch |2>
    psi, recd = schrodinger_propagate(seq, P3, psi0, 10e-12)
    print(f"pi pulse 16ns drag={drag}: post |2> pop = {abs(psi[2])**2:.3e}")

# Lindblad
t0 = time.time()
recL = run_lindblad("-+", np.pi / 4, -45 * MHZ, 100.0)
print(f"lindblad triple (incl compile): {time.time()-t0:.1f}s")
gL = extract_phase(recL)
print(f"lindblad gamma={unwrap_to_reference(gL, np.pi/2):.5f}  bloch={bloch_length(recL):.4f}  (unitary gamma {gamma:.5f})")

# timing per trajectory after compile
t0 = time.time()
run_unitary("-+", np.pi / 4, -45 * MHZ, 50.0)
t1 = time.time()
run_lindblad("-+", np.pi / 4, -45 * MHZ, 50.0)
t2 = time.time()
print(f"per-triple timing: unitary {t1-t0:.2f}s, lindblad {t2-t1:.2f}s")
