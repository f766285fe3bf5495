# After the DRAG sign fix: leakage, antisymmetry, lindblad bias at spec params.
import numpy as np

from berrysim.estimate import bloch_length, extract_phase, tomography, unwrap_to_reference
from berrysim.model import DeviceParams, alpha_ladder
from berrysim.propagate import lindblad_propagate, schrodinger_propagate
from berrysim.sequence import PulseSequence, RESONANT_PULSE, Segment, build_interferometer_sequence

MHZ = 2 * np.pi * 1e6
ALPHA2 = -423.0 * MHZ
SETTING_FOR = {"x": "tomography_x", "y": "tomography_y", "z": None}


def params(t1=None, t2=None, n=4):
    return DeviceParams(n_levels=n, anharmonicities=tuple(alpha_ladder(ALPHA2, n)), t1=t1, t2_star=t2)


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


print("pi-pulse leakage vs duration (n=3, start |1>), after sign fix:")
P3 = params(n=3)
for dur in (8.0, 16.0):
    for drag in (0.0, 1.0):
        seq = PulseSequence(segments=(Segment(RESONANT_PULSE, dur, rotation="x_pi", drag_coefficient=drag),),
                            contour="-+", delta=-45 * MHZ, tau_sweep_ns=1.0, total_duration_ns=dur)
        psi0 = np.zeros(3, complex); psi0[1] = 1
        psi, _ = schrodinger_propagate(seq, P3, psi0, 10e-12)
        print(f"  dur={dur} drag={drag}: |2> pop {abs(psi[2])**2:.3e}")
print("  and max |2> pop DURING the pulse (drag 0 vs 1, dur=8):")
for drag in (0.0, 1.0):
    seq = PulseSequence(segments=(Segment(RESONANT_PULSE, 8.0, rotation="x_pi", drag_coefficient=drag),),
                        contour="-+", delta=-45 * MHZ, tau_sweep_ns=1.0, total_duration_ns=8.0)
    psi0 = np.zeros(3, complex); psi0[1] = 1
    psi, rec = schrodinger_propagate(seq, P3, psi0, 10e-12)
    print(f"  drag={drag}: p2_max during pulse {rec.p2_max:.3e}, post {abs(psi[2])**2:.3e}")

A = np.pi / 4
D35 = -35 * MHZ
print("\nantisymmetry at delta=-35, tau=100 (unitary):")
for drag in (True, False):
    gp = extract_phase(run("-+", A, D35, 100.0, drag=drag))
    gm = extract_phase(run("+-", A, D35, 100.0, drag=drag))
    print(f"  drag={drag}: C-+ {gp:.6f}  C+- {gm:.6f}  sum {gp+gm:+.6f}")

print("\ncontrol contours at delta=-35, tau=100:")
for A_pi in (0.25, 0.75):
    for c in ("++", "--"):
        g = extract_phase(run(c, A_pi * np.pi, D35, 100.0))
        print(f"  A={A_pi}pi C{c}: {g:+.6f}")

print("\nlindblad bias at delta=-35, tau=100, T1=0.84, T2*=1.03:")
for A_pi in (0.25, 0.75, 1.25):
    Ax = A_pi * np.pi
    gu = unwrap_to_reference(extract_phase(run("-+", Ax, D35, 100.0)), 2 * Ax)
    rl = run("-+", Ax, D35, 100.0, mode="lindblad", t1=0.84, t2=1.03)
    gl = unwrap_to_reference(extract_phase(rl), 2 * Ax)
    print(f"  A={A_pi}pi: unitary {gu:.5f}  lindblad {gl:.5f}  rel diff {abs(gl-gu)/abs(gu):.3%}  bloch {bloch_length(rl):.4f}")

print("\nlindblad T1-only bias, n=2 isolation (A=pi/4, delta=-45):")
D45 = -45 * MHZ


def run_n(n, contour, a_solid, delta, tau_ns, *, mode="unitary", t1=None, t2=None):
    finals = {}
    p = params(t1, t2, n=n)
    for setting, tomo in SETTING_FOR.items():
        seq = build_interferometer_sequence(contour, a_solid, delta, tau_ns, drag_on=True, tomography=tomo)
        if mode == "unitary":
            psi0 = np.zeros(n, complex); psi0[0] = 1
            st, _ = schrodinger_propagate(seq, p, psi0, 10e-12)
        else:
            rho0 = np.zeros((n, n), complex); rho0[0, 0] = 1
            st, _ = lindblad_propagate(seq, p, rho0, 10e-12)
        finals[setting] = st
    return tomography(finals)


gu2 = extract_phase(run_n(2, "-+", A, D45, 100.0))
gl2 = extract_phase(run_n(2, "-+", A, D45, 100.0, mode="lindblad", t1=0.84, t2=1.68))
print(f"  n=2: unitary {gu2:.6f}  T1-only lindblad {gl2:.6f}  diff {gl2-gu2:+.5f}")
gl4 = extract_phase(run_n(4, "-+", A, D45, 100.0, mode="lindblad", t1=0.84, t2=1.68))
gu4 = extract_phase(run_n(4, "-+", A, D45, 100.0))
print(f"  n=4: unitary {gu4:.6f}  T1-only lindblad {gl4:.6f}  diff {gl4-gu4:+.5f}")
