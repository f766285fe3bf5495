# Diagnose: (1) lindblad vs unitary in the no-decoherence limit,
# (2) which channel shifts the phase, (3) dt convergence,
# (4) contour antisymmetry vs tau and drag, (5) pi-pulse leakage vs duration.
import numpy as np

from berrysim.estimate import extract_phase, tomography, unwrap_to_reference, bloch_length
from berrysim.model import DeviceParams, alpha_ladder
from berrysim.propagate import lindblad_propagate, schrodinger_propagate
from berrysim.sequence import build_interferometer_sequence, Segment, PulseSequence, RESONANT_PULSE

MHZ = 2 * np.pi * 1e6
ALPHA2 = -423.0 * MHZ
SETTING_FOR = {"x": "tomography_x", "y": "tomography_y", "z": None}


def params(t1=None, t2=None):
    return DeviceParams(n_levels=4, anharmonicities=tuple(alpha_ladder(ALPHA2, 4)), t1=t1, t2_star=t2)


def run(contour, a_solid, delta, tau_ns, *, mode="unitary", t1=None, t2=None, dt=10e-12, drag=True):
    finals = {}
    p = params(t1, t2)
    for setting, tomo in SETTING_FOR.items():
        seq = build_interferometer_sequence(contour, a_solid, delta, tau_ns, drag_on=drag, tomography=tomo)
        if mode == "unitary":
            psi0 = np.zeros(4, complex); psi0[0] = 1
            st, _ = schrodinger_propagate(seq, p, psi0, dt)
        else:
            rho0 = np.zeros((4, 4), complex); rho0[0, 0] = 1
            st, _ = lindblad_propagate(seq, p, rho0, dt)
        finals[setting] = st
    return tomography(finals)


A = np.pi / 4
D = -45 * MHZ

g_u = extract_phase(run("-+", A, D, 100.0))
print(f"unitary gamma: {g_u:.6f}")

g_inf = extract_phase(run("-+", A, D, 100.0, mode="lindblad", t1=1e7, t2=1e7))
print(f"lindblad T->inf gamma: {g_inf:.6f}  (diff {g_inf-g_u:.2e})")

g_t1 = extract_phase(run("-+", A, D, 100.0, mode="lindblad", t1=0.84, t2=2 * 0.84))
print(f"lindblad T1-only gamma: {g_t1:.6f}  (diff {g_t1-g_u:+.4f})")

g_phi = extract_phase(run("-+", A, D, 100.0, mode="lindblad", t1=1e7, t2=1.03))
print(f"lindblad dephasing-only gamma: {g_phi:.6f}  (diff {g_phi-g_u:+.4f})")

g_full = extract_phase(run("-+", A, D, 100.0, mode="lindblad", t1=0.84, t2=1.03))
print(f"lindblad full gamma: {g_full:.6f}  (diff {g_full-g_u:+.4f})")

g_full5 = extract_phase(run("-+", A, D, 100.0, mode="lindblad", t1=0.84, t2=1.03, dt=5e-12))
print(f"lindblad full dt=5ps: {g_full5:.6f}  (diff vs 10ps {g_full5-g_full:.2e})")

print("\nantisymmetry vs tau / drag (unitary):")
for tau, drag in [(100.0, True), (100.0, False), (200.0, True), (200.0, False), (400.0, True)]:
    gp = extract_phase(run("-+", A, D, tau, drag=drag))
    gm = extract_phase(run("+-", A, D, tau, drag=drag))
    print(f"tau={tau} drag={drag}: C-+ {gp:.6f}  C+- {gm:.6f}  sum {gp+gm:+.6f}")

print("\npi-pulse leakage vs duration (n=3, start |1>):")
P3 = DeviceParams(n_levels=3, anharmonicities=tuple(alpha_ladder(ALPHA2, 3)))
for dur in (8.0, 16.0):
    for drag in (0.0, 1.0):
        seq = PulseSequence(segments=(Segment(RESONANT_PULSE, dur, rotation="x_pi", drag_coefficient=drag),),
                            contour="-+", delta=D, tau_sweep_ns=1.0, total_duration_ns=dur)
        psi0 = np.zeros(3, complex); psi0[1] = 1
        psi, _ = schrodinger_propagate(seq, P3, psi0, 10e-12)
        print(f"dur={dur} drag={drag}: |2> pop {abs(psi[2])**2:.3e}")
