import numpy as np
import pytest

import bec_ratchet.dimer as dimer_mod
from bec_ratchet.dimer import (DimerParams, conjugate_partner, dimer_continue,
                               dimer_orbit_solve, dimer_propagate, dimer_rhs,
                               drive, imbalance, linear_modes, period_map,
                               self_trapping_threshold_scan)

SADDLE = DimerParams(theta=-1.6)
SYM = DimerParams(theta=0.0)


def test_drive_values():
    assert drive(SYM, 0.0) == 0.0
    quarter = DimerParams(theta=np.pi / 2.0)
    assert drive(quarter, 0.0) == pytest.approx(1.0)


def test_rhs_in_phase_without_drive():
    par = DimerParams(f1=0.0, f2=0.0, g=0.7)
    y = np.array([0.3 + 0.4j, 0.3 + 0.4j])
    d = dimer_rhs(y, 0.23, par)[0]
    assert d[0] == pytest.approx(d[1])


def test_rhs_swap_symmetry():
    rng = np.random.default_rng(4)
    y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    par = DimerParams(theta=-1.6, g=0.5)
    neg = DimerParams(f1=-par.f1, f2=-par.f2, theta=par.theta, g=par.g)
    d = dimer_rhs(y, 0.37, par)[0]
    d_swap = dimer_rhs(y[::-1], 0.37, neg)[0]
    np.testing.assert_allclose(d_swap[::-1], d, atol=1e-14)


def test_rhs_conserves_norm_instantaneously():
    rng = np.random.default_rng(6)
    y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    d = dimer_rhs(y, 1.1, DimerParams(theta=-0.8, g=1.3))[0]
    assert abs(np.sum(np.conj(y) * d).real) < 1e-14


def test_undriven_modes_rotate_with_fixed_phase():
    par = DimerParams(f1=0.0, f2=0.0)
    t = par.period
    for sgn, seed in ((+1, [1.0, 1.0]), (-1, [1.0, -1.0])):
        y0 = np.array(seed) / np.sqrt(2.0)
        out, _ = dimer_propagate(y0, 0.0, 1.0, par)
        np.testing.assert_allclose(out, y0 * np.exp(-1j * sgn * par.C * t / par.mu),
                                   atol=1e-10)


def test_rk4_is_fourth_order(monkeypatch):
    par = DimerParams(theta=-1.6, g=1.0)
    y0 = np.array([0.8, 0.6], dtype=complex)

    def endpoint(steps):
        monkeypatch.setattr(dimer_mod, "RK4_STEPS_PER_PERIOD", steps)
        out, _ = dimer_propagate(y0, 0.0, 1.0, par)
        return out

    ref = endpoint(8192)
    err_c = np.max(np.abs(endpoint(256) - ref))
    err_f = np.max(np.abs(endpoint(512) - ref))
    assert 12.0 < err_c / err_f < 20.0


def test_period_map_preserves_norm():
    y0 = np.array([0.8, 0.6], dtype=complex)
    out = period_map(y0, DimerParams(theta=-1.6, g=1.0))
    assert abs(np.sum(np.abs(out) ** 2) - 1.0) < 1e-10


def test_propagate_squeeze_semantics():
    y0 = np.array([1.0, 0.0], dtype=complex)
    single, _ = dimer_propagate(y0, 0.0, 0.25, SYM)
    batch, _ = dimer_propagate(np.stack([y0, y0]), 0.0, 0.25, SYM)
    assert single.shape == (2,) and batch.shape == (2, 2)
    np.testing.assert_allclose(batch[0], single, atol=1e-15)


def test_conjugate_partner_involution():
    rng = np.random.default_rng(2)
    y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    np.testing.assert_array_equal(conjugate_partner(conjugate_partner(y)), y)
    n1 = abs(conjugate_partner(y)[0]) ** 2 - abs(conjugate_partner(y)[1]) ** 2
    assert n1 == pytest.approx(-(abs(y[0]) ** 2 - abs(y[1]) ** 2))


def test_symmetric_drive_orbit_is_balanced():
    par = DimerParams(theta=0.0, g=0.3)
    orb = dimer_orbit_solve(np.array([1.0, 1.0]) / np.sqrt(2.0),
                            par.C * par.period / par.mu, par)
    assert orb.residual < 1e-10
    assert abs(imbalance(orb, par)) < 1e-8


def test_broken_drive_orbits_carry_imbalance():
    in_like, out_like = linear_modes(SADDLE)
    assert imbalance(in_like, SADDLE) == pytest.approx(-1.0919783e-3, abs=1e-8)
    assert imbalance(out_like, SADDLE) == pytest.approx(+1.0919783e-3, abs=1e-8)


def test_weak_drive_eigenphase_rates():
    par = DimerParams(f1=0.01, f2=0.01, theta=0.0)
    in_like, out_like = linear_modes(par)
    rate_scale = par.C * par.period / par.mu
    assert in_like.quasienergy == pytest.approx(+rate_scale, rel=0.02)
    assert out_like.quasienergy == pytest.approx(-rate_scale, rel=0.02)


def test_self_trapping_threshold_matches_algebra():
    got = self_trapping_threshold_scan(1.0)
    assert got == pytest.approx(2.0, rel=0.01)


def test_subcritical_continuation_stays_symmetric():
    in_like, _ = linear_modes(SYM)
    res = dimer_continue(in_like, 0.2, 0.1, SYM)
    assert res.classification == "none"
    assert res.daughters == []
    assert res.g_critical is None
    assert res.primary.terminated_by == "max_g reached"
    assert max(abs(v) for v in res.primary.imbalances) < 1e-6
