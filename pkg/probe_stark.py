# Verify the Stark-compensation sign: phase error of a pi/2_x DRAG pulse.
import numpy as np

from berrysim.model import DeviceParams, alpha_ladder
from berrysim.propagate import schrodinger_propagate
from berrysim.sequence import PulseSequence, RESONANT_PULSE, Segment

MHZ = 2 * np.pi * 1e6
ALPHA2 = -423.0 * MHZ
P3 = DeviceParams(n_levels=3, anharmonicities=tuple(alpha_ladder(ALPHA2, 3)))


def pulse_unitary(rotation, dur, drag):
    seq = PulseSequence(segments=(Segment(RESONANT_PULSE, dur, rotation=rotation, drag_coefficient=drag),),
                        contour="-+", delta=-45 * MHZ, tau_sweep_ns=1.0, total_duration_ns=dur)
    cols = []
    for k in range(3):
        psi0 = np.zeros(3, complex); psi0[k] = 1
        psi, _ = schrodinger_propagate(seq, P3, psi0, 5e-12)
        cols.append(psi)
    return np.array(cols).T


for drag in (0.0, 1.0):
    for dur in (8.0, 12.0):
        u = pulse_unitary("x_half_pi", dur, drag)
        # ideal R_x(pi/2) on the qubit block
        ideal = np.array([[1, -1j], [-1j, 1]]) / np.sqrt(2)
        block = u[:2, :2]
        # remove global phase, then the residual z-rotation angle is the phase error
        m = ideal.conj().T @ block
        phase_err = float(np.angle(m[1, 1] / m[0, 0]))
        gate_err = 1 - abs(np.trace(m) / 2) ** 2
        print(f"pi/2_x dur={dur} drag={drag}: z-phase error {phase_err:+.6f} rad, gate infidelity {gate_err:.2e}, |2> leak {abs(u[2,0])**2 + abs(u[2,1])**2:.2e}")
