import functools
import math

import numpy as np
import pytest

from berrysim.estimate import tomography
from berrysim.model import DeviceParams, alpha_ladder
from berrysim.propagate import lindblad_propagate, schrodinger_propagate
from berrysim.sequence import build_interferometer_sequence

MHZ = 2 * math.pi * 1e6
ALPHA2_RAD_S = -423.0 * MHZ

PAPER = {
    "ej_ghz": 13.96,
    "ec_ghz": 0.36,
    "alpha2_mhz": -423.0,
    "t1_us": 0.84,
    "t2star_us": 1.03,
    "omega01_ghz": 5.95,
}


def paper_params(n_levels=4, coherent=False) -> DeviceParams:
    return DeviceParams(
        n_levels=n_levels,
        anharmonicities=tuple(alpha_ladder(ALPHA2_RAD_S, n_levels)),
        e_j=PAPER["ej_ghz"],
        e_c=PAPER["ec_ghz"],
        t1=PAPER["t1_us"] if coherent else None,
        t2_star=PAPER["t2star_us"] if coherent else None,
    )


@functools.lru_cache(maxsize=None)
def _cached_triple(contour, a_solid, delta_mhz, tau_ns, decoherence, dt_ps, drag):
    """Full interferometer (three tomography settings); cached so the
    acceptance criteria can share propagations."""
    params = paper_params(coherent=decoherence)
    delta = delta_mhz * MHZ
    finals = {}
    rec_z = None
    for setting, tomo in (("x", "tomography_x"), ("y", "tomography_y"), ("z", None)):
        seq = build_interferometer_sequence(contour, a_solid, delta, tau_ns,
                                            drag_on=drag, tomography=tomo)
        if decoherence:
            rho0 = np.zeros((4, 4), dtype=complex)
            rho0[0, 0] = 1.0
            state, rec = lindblad_propagate(seq, params, rho0, dt_ps * 1e-12)
        else:
            psi0 = np.zeros(4, dtype=complex)
            psi0[0] = 1.0
            state, rec = schrodinger_propagate(seq, params, psi0, dt_ps * 1e-12)
        finals[setting] = state
        if setting == "z":
            rec_z = rec
    return tomography(finals), rec_z


def interferometer_triple(contour, a_solid, delta_mhz, tau_ns=200.0, *,
                          decoherence=False, dt_ps=10.0, drag=True):
    return _cached_triple(contour, float(a_solid), float(delta_mhz), float(tau_ns),
                          bool(decoherence), float(dt_ps), bool(drag))


@pytest.fixture(scope="session")
def p4():
    return paper_params(4)


@pytest.fixture(scope="session")
def p3():
    return paper_params(3)


@pytest.fixture(scope="session")
def p2():
    return paper_params(2)
