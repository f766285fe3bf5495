# Development probe: settle numerical margins before freezing tests.
import time

import numpy as np

from berrysim.adiabatic import (
    PredictionOrder,
    berry_correction_perturbative,
    berry_phase_line_integral,
    berry_phase_spectral,
    berry_phase_two_level,
    dressed_basis,
    predicted_interferometer_phase,
)
from berrysim.model import (
    DeviceParams,
    DriveConfig,
    alpha_ladder,
    effective_field,
    omega_for_solid_angle,
    transmon_spectrum,
)

MHZ = 2 * np.pi * 1e6
ALPHA2 = -423.0 * MHZ


def params_n(n):
    return DeviceParams(n_levels=n, anharmonicities=tuple(alpha_ladder(ALPHA2, n)))


print("=== charge-basis spectrum ===")
w01, alphas = transmon_spectrum(13.96, 0.36, 4, 30)
w01_ghz = w01 / (2 * np.pi * 1e9)
asym = np.sqrt(8 * 13.96 * 0.36) - 0.36
print(f"w01/2pi = {w01_ghz:.5f} GHz  (paper 5.95; asym {asym:.5f}; rel dev vs paper {abs(w01_ghz-5.95)/5.95:.4%}, vs asym {abs(w01_ghz-asym)/asym:.4%})")
print(f"alpha2/2pi = {alphas[2]/(2*np.pi*1e6):.2f} MHz (measured -423); alpha3/2pi = {alphas[3]/(2*np.pi*1e6):.2f} MHz; 3*alpha2 = {3*alphas[2]/(2*np.pi*1e6):.2f}")

print("\n=== perturbative numbers ===")
k = 35.0 / 423.0
for A_pi, lbl in [(1.25, "5pi/4"), (1.5, "3pi/2")]:
    A = A_pi * np.pi
    theta = np.arccos(1 - A / (2 * np.pi))
    dgp, dgm, dg = berry_correction_perturbative(theta, k)
    print(f"A={lbl}: dgamma={dg:.5f} rad, rel to 2A: {dg/(2*A):.4%}")

print("\n=== two-level spectral check ===")
p2 = params_n(2)
worst = 0.0
for theta in np.linspace(0.01, np.pi / 2 - 0.01, 25):
    delta = -35 * MHZ
    omega = abs(delta) * np.tan(theta)
    b = dressed_basis(p2, DriveConfig(omega, 0.0, delta))
    g1 = berry_phase_spectral(b, 1)
    g0 = berry_phase_spectral(b, 0)
    worst = max(worst, abs(g1 - berry_phase_two_level(theta, +1)), abs(g0 - berry_phase_two_level(theta, -1)))
print(f"max |spectral - closed form| over theta grid: {worst:.2e}")

print("\n=== exact_n(n=2) == 2A calibration ===")
worst = 0.0
for A in np.linspace(0.05, 1.9 * np.pi, 20):
    r = predicted_interferometer_phase(p2, A, -35 * MHZ, PredictionOrder.EXACT_N)
    worst = max(worst, abs(r.gamma_pred - 2 * A))
print(f"max |gamma_pred - 2A| (n=2): {worst:.2e}")

print("\n=== criterion 1: perturbative vs exact n=4 over grid ===")
p4 = params_n(4)
t0 = time.time()
worst = (0.0, None)
vals = []
for delta_mhz in np.linspace(-60, -25, 8):
    delta = delta_mhz * MHZ
    for A in np.linspace(0.05, 1.5, 8) * np.pi:
        pe = predicted_interferometer_phase(p4, A, delta, PredictionOrder.PERTURBATIVE)
        ex = predicted_interferometer_phase(p4, A, delta, PredictionOrder.EXACT_N)
        rel = abs(pe.gamma_pred - ex.gamma_pred) / abs(ex.gamma_pred)
        vals.append(rel)
        if rel > worst[0]:
            worst = (rel, (delta_mhz, A / np.pi))
print(f"64 grid points in {time.time()-t0:.2f}s; worst rel dev {worst[0]:.4%} at (delta={worst[1][0]:.1f} MHz, A={worst[1][1]:.3f} pi)")
print(f"median {np.median(vals):.4%}")

print("\n=== criterion 4: deviation magnitude at -35 MHz ===")
delta = -35 * MHZ
prev = -1
mono = True
for A in np.linspace(0.1, 1.5, 15) * np.pi:
    pe = predicted_interferometer_phase(p4, A, delta, PredictionOrder.PERTURBATIVE)
    d = (pe.gamma_pred - 2 * A) / (2 * A)
    if d < prev:
        mono = False
    prev = d
print(f"monotone increasing: {mono}")
for A_pi in (1.25, 1.5):
    pe = predicted_interferometer_phase(p4, A_pi * np.pi, delta, PredictionOrder.PERTURBATIVE)
    print(f"A={A_pi}pi: (gamma_pert-2A)/2A = {(pe.gamma_pred-2*A_pi*np.pi)/(2*A_pi*np.pi):.4%}")

print("\n=== criterion 3: line integral vs spectral at 2000 steps ===")
t0 = time.time()
worst = 0.0
for delta_mhz in (-60.0, -35.0, -25.0):
    delta = delta_mhz * MHZ
    for A_pi in (0.25, 0.85, 1.5):
        omega = omega_for_solid_angle(A_pi * np.pi, delta)
        dr = DriveConfig(omega, 0.0, delta)
        b = dressed_basis(p4, dr)
        for lvl in (0, 1):
            gs = berry_phase_spectral(b, lvl)
            gl = berry_phase_line_integral(p4, dr, lvl, 2000)
            worst = max(worst, abs(gs - gl))
print(f"worst |line - spectral| = {worst:.2e} ({time.time()-t0:.2f}s for 18 evals)")

print("\n=== criterion 6 precheck: adiabatic p2 at strongest drive ===")
p3 = params_n(3)
for B_mhz, delta_mhz in [(110, -35), (140, -35)]:
    delta = delta_mhz * MHZ
    omega = np.sqrt((B_mhz * MHZ) ** 2 - delta**2)
    b = dressed_basis(p4, DriveConfig(omega, 0.0, delta))
    v0 = b.branch_vector(0)
    v1 = b.branch_vector(1)
    p2_0 = np.sum(np.abs(v0[2:]) ** 2)
    p2_1 = np.sum(np.abs(v1[2:]) ** 2)
    amp_peak = (np.linalg.norm(v0[2:]) + np.linalg.norm(v1[2:])) ** 2 / 2
    print(f"B={B_mhz} MHz: p2(d0)={p2_0:.4f}, p2(d1)={p2_1:.4f}, coherent superposition peak ~{amp_peak:.4f}")

print("\n=== gauge invariance of line integral core ===")
# quick: same eval twice should be deterministic
g1 = berry_phase_line_integral(p4, DriveConfig(omega_for_solid_angle(1.25 * np.pi, -35 * MHZ), 0.0, -35 * MHZ), 1, 512)
g2 = berry_phase_line_integral(p4, DriveConfig(omega_for_solid_angle(1.25 * np.pi, -35 * MHZ), 0.0, -35 * MHZ), 1, 512)
print(f"repeatability: {abs(g1-g2):.2e}")

print("\n=== small-k limit exact coefficients ===")
for th, name in [(np.pi / 6, "pi/6"), (np.pi / 4, "pi/4"), (np.pi / 3, "pi/3")]:
    kk = 1e-3
    _, _, dg = berry_correction_perturbative(th, kk)
    lim = 2 * np.pi * kk * np.sin(th) ** 4 / np.cos(th)
    print(f"theta={name}: |dg - lim| = {abs(dg-lim):.3e}  (10 k^2 = {10*kk**2:.1e}; coef = {abs(dg-lim)/kk**2:.2f})")
