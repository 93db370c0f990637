"""Shared fixtures. The heavy session fixtures (resonant spectrum, the two
continued branches, the dimer continuations) are computed once and reused by
both the unit tests and the acceptance gate."""
import numpy as np
import pytest

from bec_ratchet import (DrivingField, compute_floquet_spectrum, continue_in_g,
                         find_resonant_pair, newton_solve, params_for,
                         state_to_y)
from bec_ratchet.dimer import DimerParams, dimer_continue, linear_modes
from bec_ratchet.floquet import orbit_averages

BASE_FIELD = DrivingField(E1=3.26, E2=1.2, omega=3.0)
RESONANT_THETA = -1.6


@pytest.fixture(scope="session")
def field_res():
    return BASE_FIELD.with_theta(RESONANT_THETA)


@pytest.fixture(scope="session")
def params16(field_res):
    return params_for(field_res, mu=0.2, n_max=16, steps_per_period=1024)


@pytest.fixture(scope="session")
def params24(field_res):
    return params_for(field_res, mu=0.2, n_max=24, steps_per_period=1024)


@pytest.fixture(scope="session")
def spec24(params24, field_res):
    return compute_floquet_spectrum(params24, field_res)


@pytest.fixture(scope="session")
def pair24(spec24):
    """(chaotic_layer, transporting) indices of the resonant pair."""
    return find_resonant_pair(spec24)


@pytest.fixture(scope="session")
def pair_orbits(spec24, pair24, params24, field_res):
    """One-period orbit snapshots (centered rows) for the two pair states."""
    ic, it = pair24
    _, _, snaps = orbit_averages(spec24.vectors[:, [ic, it]], params24,
                                 field_res, keep_snapshots=True)
    orb_c = np.array([np.fft.fftshift(s[0]) for s in snaps])
    orb_t = np.array([np.fft.fftshift(s[1]) for s in snaps])
    return orb_c, orb_t


def _continued(idx, spec, params, field):
    seed = newton_solve(state_to_y(spec.state(idx, params.n_max),
                                   spec.quasienergies[idx]), params, field)
    return continue_in_g(seed, 0.005, 1e-4, params, field)


@pytest.fixture(scope="session")
def chaotic_branch(spec24, pair24, params24, field_res):
    return _continued(pair24[0], spec24, params24, field_res)


@pytest.fixture(scope="session")
def transporting_branch(spec24, pair24, params24, field_res):
    return _continued(pair24[1], spec24, params24, field_res)


@pytest.fixture(scope="session")
def dimer_pitchfork_run():
    par = DimerParams(theta=0.0)
    mode, _ = linear_modes(par)
    return dimer_continue(mode, 2.5, 0.02, par), par


@pytest.fixture(scope="session")
def dimer_saddle_run():
    par = DimerParams(theta=-1.6)
    mode, _ = linear_modes(par)
    return dimer_continue(mode, 2.5, 0.02, par), par
