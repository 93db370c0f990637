"""Nonlinear Floquet states: Newton solver, continuation in g, perturbative
quasienergy formulas, critical interaction strength.

A nonlinear Floquet state obeys e^{i eps} M_g(psi) = psi where M_g is the
one-period nonlinear map. Unknowns are the state's real/imaginary parts with
the global phase removed by pinning the largest component's imaginary part,
plus eps. The resulting 2D+1 equations in 2D unknowns are solved by damped
Gauss-Newton with a batched finite-difference Jacobian: the map is linearized
one column per state component (h = 1e-7), all perturbed states propagated in
a single batched run, while the eps column is analytic.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from .model import DrivingField, ModelParams
from .propagator import PropagationBlowup, SplitStepEngine
from .spectral import WaveFunction, from_fft_layout, to_fft_layout
from .floquet import quartic_integral_rows

FD_STEP = 1e-7
MAX_ITER = 50
MAX_BACKTRACK = 9
REPIN_FACTOR = 1.3
MIN_DG_FRACTION = 64


class NewtonError(RuntimeError):
    pass


def period_map(psi: WaveFunction, params: ModelParams, field: DrivingField,
               t0: float = 0.0) -> WaveFunction:
    """One-period nonlinear map (full g from params)."""
    eng = SplitStepEngine(params, field)
    spp = params.steps_per_period(field)
    c, _ = eng.run(to_fft_layout(psi.coeffs), t0, spp)
    return WaveFunction(from_fft_layout(c), params.n_max)


def _map_rows(rows_fft, params, field, t0, eng=None):
    eng = eng or SplitStepEngine(params, field)
    spp = params.steps_per_period(field)
    out, _ = eng.run(rows_fft, t0, spp)
    return out


def residual(y: np.ndarray, params: ModelParams, field: DrivingField,
             t0: float = 0.0) -> np.ndarray:
    """F(Y) for Y = (Re c, Im c, eps), c in centered order.

    First D entries Re(e^{i eps} M(c) - c), next D the imaginary parts, last
    the normalization defect |c|^2 - 1. The map itself conserves the norm, so
    the constraint is carried by the input state.
    """
    d = (len(y) - 1) // 2
    c = y[:d] + 1j * y[d:2 * d]
    eps = y[2 * d]
    mapped = _map_rows(to_fft_layout(c), params, field, t0)
    fp = np.exp(1j * eps) * from_fft_layout(mapped) - c
    return np.concatenate([fp.real, fp.imag,
                           [float(np.sum(np.abs(c) ** 2)) - 1.0]])


@dataclass
class NonlinearFloquetState:
    state: WaveFunction
    quasienergy: float
    g: float
    residual: float
    iterations: int = 0

    def to_y(self) -> np.ndarray:
        c = self.state.coeffs
        return np.concatenate([c.real, c.imag, [self.quasienergy]])


def state_to_y(psi: WaveFunction, eps: float) -> np.ndarray:
    return np.concatenate([psi.coeffs.real, psi.coeffs.imag, [eps]])


def newton_solve(seed_y: np.ndarray, params: ModelParams, field: DrivingField,
                 t0: float = 0.0, tol: float = 1e-9) -> NonlinearFloquetState:
    """Damped Newton for the nonlinear Floquet fixed point.

    seed_y = (Re c, Im c, eps). Raises NewtonError on non-convergence (50
    iterations) or on a blown-up trajectory.
    """
    d = (len(seed_y) - 1) // 2
    eng = SplitStepEngine(params, field)
    spp = params.steps_per_period(field)

    c = np.asarray(seed_y[:d] + 1j * seed_y[d:2 * d], dtype=complex)
    eps = float(seed_y[2 * d])
    jpin = int(np.argmax(np.abs(c)))
    # rotate the pinned component to the real axis
    ph = c[jpin] / abs(c[jpin]) if abs(c[jpin]) > 0 else 1.0
    c = c / ph

    def pack(cv, ev):
        re = cv.real
        im = np.delete(cv.imag, jpin)
        return np.concatenate([re, im, [ev]])

    def unpack(u):
        re = u[:d]
        im = np.insert(u[d:2 * d - 1], jpin, 0.0)
        return re + 1j * im, float(u[2 * d - 1])

    def full_residual(cv, ev):
        mapped = _map_rows(to_fft_layout(cv), params, field, t0, eng)
        mc = from_fft_layout(mapped)
        fp = np.exp(1j * ev) * mc - cv
        f = np.concatenate([fp.real, fp.imag,
                            [float(np.sum(np.abs(cv) ** 2)) - 1.0]])
        return f, mc

    f, mc = full_residual(c, eps)
    fnorm = np.max(np.abs(f))
    it = 0
    while fnorm > tol and it < MAX_ITER:
        it += 1
        u = pack(c, eps)
        nunk = len(u)
        # batched FD Jacobian over the 2D-1 state components
        pert = np.tile(c, (nunk - 1, 1))
        for col in range(nunk - 1):
            cv, _ = unpack(u + FD_STEP * np.eye(nunk)[col])
            pert[col] = cv
        mapped = _map_rows(to_fft_layout(np.vstack([pert])), params, field, t0, eng)
        mapped = from_fft_layout(mapped)
        jac = np.empty((2 * d + 1, nunk))
        phase = np.exp(1j * eps)
        for col in range(nunk - 1):
            cv = pert[col]
            fp = phase * mapped[col] - cv
            fcol = np.concatenate([fp.real, fp.imag,
                                   [float(np.sum(np.abs(cv) ** 2)) - 1.0]])
            jac[:, col] = (fcol - f) / FD_STEP
        deps_col = 1j * phase * mc     # analytic d/d eps of e^{i eps} M(c)
        jac[:, nunk - 1] = np.concatenate([deps_col.real, deps_col.imag, [0.0]])

        du, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        lam = 1.0
        for _ in range(MAX_BACKTRACK + 1):
            c_try, eps_try = unpack(u + lam * du)
            try:
                f_try, mc_try = full_residual(c_try, eps_try)
            except PropagationBlowup:
                lam *= 0.5
                continue
            if np.max(np.abs(f_try)) < fnorm:
                break
            lam *= 0.5
        else:
            raise NewtonError(f"line search stalled at iteration {it}, "
                              f"residual {fnorm:.3e}")
        c, eps, f, mc = c_try, eps_try, f_try, mc_try
        fnorm = np.max(np.abs(f))
        # re-pin if the mass moved to another component
        amax = int(np.argmax(np.abs(c)))
        if amax != jpin and np.abs(c[amax]) > REPIN_FACTOR * np.abs(c[jpin]):
            jpin = amax
            ph = c[jpin] / abs(c[jpin])
            c = c / ph
            f, mc = full_residual(c, eps)
            fnorm = np.max(np.abs(f))
    if fnorm > tol:
        raise NewtonError(f"no convergence after {MAX_ITER} iterations "
                          f"(residual {fnorm:.3e})")
    if c[jpin].real < 0:
        c = -c
    eps = float(np.angle(np.exp(1j * eps)))
    return NonlinearFloquetState(WaveFunction(c, params.n_max), eps,
                                 params.g, float(fnorm), it)


@dataclass
class Branch:
    points: list = dfield(default_factory=list)     # NonlinearFloquetState
    momenta: list = dfield(default_factory=list)    # one-period <p>
    quartic: list = dfield(default_factory=list)    # int dt int |phi|^4 dx
    overlaps: list = dfield(default_factory=list)   # |<prev|next>|
    terminated_by: str = "max_g reached"

    @property
    def g(self) -> np.ndarray:
        return np.array([pt.g for pt in self.points])

    @property
    def quasienergies(self) -> np.ndarray:
        return np.array([pt.quasienergy for pt in self.points])


def orbit_of(state: NonlinearFloquetState, params: ModelParams,
             field: DrivingField, t0: float = 0.0, n_samples: int = 128):
    """(momentum average, quartic time integral) along the state's orbit."""
    eng = SplitStepEngine(params.with_g(state.g), field)
    spp = params.steps_per_period(field)
    if spp % n_samples:
        raise ValueError("n_samples must divide steps per period")
    got = []
    eng.run(to_fft_layout(state.state.coeffs), t0, spp,
            sample_every=spp // n_samples,
            sampler=lambda c, t: got.append(
                (eng.momentum(c)[0], quartic_integral_rows(c)[0])))
    pbar = float(np.mean([x[0] for x in got]))
    quart = float(field.period * np.mean([x[1] for x in got]))
    return pbar, quart


def continue_in_g(start: NonlinearFloquetState, g_max: float, dg: float,
                  params: ModelParams, field: DrivingField,
                  t0: float = 0.0, tol: float = 1e-9) -> Branch:
    """March the branch from start.g toward g_max in steps of dg.

    Newton reseeds from the previous point. A failed or sheet-jumped step
    (overlap <= 0.5) halves dg, down to dg/64; persistent failure terminates
    the branch, classified as a fold when the quasienergy slope has reversed,
    otherwise as a convergence failure.
    """
    br = Branch()
    sgn = 1.0 if g_max >= start.g else -1.0
    dg = abs(dg)
    p0, q0 = orbit_of(start, params, field, t0)
    br.points.append(start)
    br.momenta.append(p0)
    br.quartic.append(q0)
    br.overlaps.append(1.0)
    if g_max == start.g:
        return br
    step = dg
    cur = start
    while sgn * (g_max - cur.g) > 1e-15:
        gn = cur.g + sgn * min(step, sgn * (g_max - cur.g))
        pn = params.with_g(gn)
        try:
            nxt = newton_solve(cur.to_y(), pn, field, t0, tol)
            ovl = abs(np.vdot(cur.state.coeffs, nxt.state.coeffs))
            ok = ovl > 0.5
        except (NewtonError, PropagationBlowup):
            nxt, ovl, ok = None, 0.0, False
        if ok:
            pb, qu = orbit_of(nxt, pn, field, t0)
            br.points.append(nxt)
            br.momenta.append(pb)
            br.quartic.append(qu)
            br.overlaps.append(ovl)
            cur = nxt
            step = min(step * 2.0, dg)     # recover toward the nominal step
            continue
        if step > dg / MIN_DG_FRACTION:
            step *= 0.5
            continue
        eps_arr = br.quasienergies
        reversed_slope = (len(eps_arr) >= 3 and
                          (eps_arr[-1] - eps_arr[-2]) * (eps_arr[-2] - eps_arr[-3]) < 0)
        br.terminated_by = "fold detected" if reversed_slope else "convergence failure"
        return br
    br.terminated_by = "max_g reached"
    return br


def locate_crossover(branch: Branch) -> float:
    """g at the sharpest quasienergy knee: peak of |d2 eps / dg2|.

    Operational bifurcation locator for branches that turn over smoothly
    instead of folding; on a hard fold continue_in_g terminates first.
    """
    g = branch.g
    eps = branch.quasienergies
    if len(g) < 5:
        raise ValueError("branch too short to locate a crossover")
    d1 = np.gradient(eps, g)
    d2 = np.gradient(d1, g)
    k = 1 + int(np.argmax(np.abs(d2[1:-1])))
    return float(g[k])


# --- perturbative formulas -------------------------------------------------

def orbit_time_integral(orbit_rows: np.ndarray, period: float) -> float:
    """int_0^T dt int |phi|^4 dx from uniform orbit samples (centered rows)."""
    rows = np.atleast_2d(orbit_rows)
    vals = quartic_integral_rows(to_fft_layout(rows))
    return float(period * np.mean(vals))


def quasienergy_perturbative(phi_orbit: np.ndarray, g: float, mu: float,
                             base_eps: float, period: float) -> float:
    """eps = base_eps + (g/mu) * int_0^T dt int |phi|^4 dx (first order in g)."""
    return base_eps + (g / mu) * orbit_time_integral(phi_orbit, period)


def project_two_state(phi_j: WaveFunction, phi1_lin: WaveFunction,
                      phi2_lin: WaveFunction):
    """Two-state weights at t = t0: (|a|^2, |b|^2, excess outside the pair)."""
    a2 = float(np.abs(np.vdot(phi1_lin.coeffs, phi_j.coeffs)) ** 2)
    c2 = float(np.abs(np.vdot(phi2_lin.coeffs, phi_j.coeffs)) ** 2)
    return a2, 1.0 - a2, max(0.0, 1.0 - a2 - c2)


def quasienergy_two_state(weights, eps1: float, eps2: float,
                          orbit_integral: float, g: float, mu: float) -> float:
    """eps_j = |a|^2 eps1 + |b|^2 eps2 + (g/mu) * orbit quartic integral."""
    a2, b2 = weights[0], weights[1]
    return a2 * eps1 + b2 * eps2 + (g / mu) * orbit_integral


def critical_g(phi1_orbit: np.ndarray, phi2_orbit: np.ndarray,
               eps1: float, eps2: float, mu: float, period: float) -> float:
    """Interaction strength where the two dressed quasienergies cross:
    g* = mu (eps2 - eps1) / (I1 - I2), I_j the orbit quartic time integrals."""
    i1 = orbit_time_integral(phi1_orbit, period)
    i2 = orbit_time_integral(phi2_orbit, period)
    den = i1 - i2
    if abs(den) < 1e-12:
        raise ZeroDivisionError("degenerate pair: equal orbit integrals")
    return mu * (eps2 - eps1) / den
