# Map where perturbation theory exceeds 2% of the exact n=4 phase.
import numpy as np

from berrysim.adiabatic import PredictionOrder, predicted_interferometer_phase
from berrysim.model import DeviceParams, alpha_ladder

MHZ = 2 * np.pi * 1e6
ALPHA2 = -423.0 * MHZ
p4 = DeviceParams(n_levels=4, anharmonicities=tuple(alpha_ladder(ALPHA2, 4)))
p3 = DeviceParams(n_levels=3, anharmonicities=tuple(alpha_ladder(ALPHA2, 3)))

deltas = np.linspace(-60, -25, 8)
As = np.linspace(1.5 / 10, 1.5, 10) * np.pi
print("rel.dev %  (rows: delta MHz; cols: A/pi)")
print("        " + "  ".join(f"{a/np.pi:5.2f}" for a in As))
for dm in deltas:
    row = []
    for A in As:
        pe = predicted_interferometer_phase(p4, A, dm * MHZ, PredictionOrder.PERTURBATIVE)
        ex = predicted_interferometer_phase(p4, A, dm * MHZ, PredictionOrder.EXACT_N)
        row.append(100 * abs(pe.gamma_pred - ex.gamma_pred) / abs(ex.gamma_pred))
    print(f"{dm:6.1f}  " + "  ".join(f"{r:5.2f}" for r in row))

print("\nn=3 vs n=4 exact, and pert-vs-exact3, at the bad corner:")
for dm, A_pi in [(-60, 1.5), (-60, 1.25), (-45, 1.5), (-35, 1.5)]:
    A = A_pi * np.pi
    ex4 = predicted_interferometer_phase(p4, A, dm * MHZ, PredictionOrder.EXACT_N).gamma_pred
    ex3 = predicted_interferometer_phase(p3, A, dm * MHZ, PredictionOrder.EXACT_N).gamma_pred
    pe = predicted_interferometer_phase(p4, A, dm * MHZ, PredictionOrder.PERTURBATIVE).gamma_pred
    print(f"delta={dm}, A={A_pi}pi: exact4={ex4:.4f} exact3={ex3:.4f} pert={pe:.4f} 2A={2*A:.4f}")

# Paper-validated region: A in {pi/4, 3pi/4, 5pi/4} across detunings (Fig-2d-like)
print("\npaper-region check (A = pi/4, 3pi/4, 5pi/4):")
worst = 0.0
for dm in deltas:
    for A_pi in (0.25, 0.75, 1.25):
        A = A_pi * np.pi
        pe = predicted_interferometer_phase(p4, A, dm * MHZ, PredictionOrder.PERTURBATIVE)
        ex = predicted_interferometer_phase(p4, A, dm * MHZ, PredictionOrder.EXACT_N)
        worst = max(worst, abs(pe.gamma_pred - ex.gamma_pred) / abs(ex.gamma_pred))
print(f"worst rel dev in paper region: {worst:.4%}")

# And at fixed delta=-35 up to 1.5pi (Fig-2c-like)
worst = 0.0
for A in np.linspace(0.05, 1.5, 30) * np.pi:
    pe = predicted_interferometer_phase(p4, A, -35 * MHZ, PredictionOrder.PERTURBATIVE)
    ex = predicted_interferometer_phase(p4, A, -35 * MHZ, PredictionOrder.EXACT_N)
    worst = max(worst, abs(pe.gamma_pred - ex.gamma_pred) / abs(ex.gamma_pred))
print(f"worst rel dev at delta=-35, A<=1.5pi: {worst:.4%}")
