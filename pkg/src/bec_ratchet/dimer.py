"""Driven two-mode model: periodic orbits, continuation, bifurcations.

    i mu d psi1/dt = C psi2 + g |psi1|^2 psi1 + psi1 f(t)
    i mu d psi2/dt = C psi1 + g |psi2|^2 psi2 - psi2 f(t)
with f(t) = f1 sin(w t) + f2 sin(2 w t + theta). Fixed-step RK4 keeps the
period map exactly commensurate. The permutation-conjugation map
(psi1, psi2) -> (conj(psi2), conj(psi1)) sends orbits to orbits with the
imbalance negated; it supplies pitchfork partners and fold-side seeds.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

RK4_STEPS_PER_PERIOD = 2048
NEWTON_TOL = 1e-10
NEWTON_MAXIT = 60
FD_STEP = 1e-8


@dataclass(frozen=True)
class DimerParams:
    C: float = 1.0
    mu: float = 1.0
    omega: float = 2.0 * np.pi
    f1: float = 1.0
    f2: float = 1.0
    theta: float = 0.0
    g: float = 0.0

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega


def drive(par: DimerParams, t):
    return (par.f1 * np.sin(par.omega * t)
            + par.f2 * np.sin(2.0 * par.omega * t + par.theta))


def dimer_rhs(y: np.ndarray, t: float, par: DimerParams) -> np.ndarray:
    """y rows = (psi1, psi2)."""
    y = np.atleast_2d(y)
    p1, p2 = y[:, 0], y[:, 1]
    ft = drive(par, t)
    d1 = (par.C * p2 + par.g * np.abs(p1) ** 2 * p1 + p1 * ft) / (1j * par.mu)
    d2 = (par.C * p1 + par.g * np.abs(p2) ** 2 * p2 - p2 * ft) / (1j * par.mu)
    return np.stack([d1, d2], axis=1)


def dimer_propagate(y0: np.ndarray, t_start: float, n_periods: float,
                    par: DimerParams, sample_every: int = 0, sampler=None):
    """RK4 with RK4_STEPS_PER_PERIOD steps per period; batched over rows."""
    y = np.atleast_2d(np.asarray(y0, dtype=complex)).copy()
    squeeze = np.asarray(y0).ndim == 1
    h = par.period / RK4_STEPS_PER_PERIOD
    n_steps = int(round(n_periods * RK4_STEPS_PER_PERIOD))
    t = t_start
    samples = []
    for k in range(n_steps):
        k1 = dimer_rhs(y, t, par)
        k2 = dimer_rhs(y + 0.5 * h * k1, t + 0.5 * h, par)
        k3 = dimer_rhs(y + 0.5 * h * k2, t + 0.5 * h, par)
        k4 = dimer_rhs(y + h * k3, t + h, par)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t_start + (k + 1) * h
        if sample_every and (k + 1) % sample_every == 0:
            samples.append(sampler(y, t))
    return (y[0] if squeeze else y), samples


def period_map(y0: np.ndarray, par: DimerParams) -> np.ndarray:
    out, _ = dimer_propagate(y0, 0.0, 1.0, par)
    return out


@dataclass
class DimerOrbit:
    y: np.ndarray            # (psi1, psi2) at t = 0
    quasienergy: float
    g: float
    residual: float

    @property
    def populations(self):
        return float(np.abs(self.y[0]) ** 2), float(np.abs(self.y[1]) ** 2)


def conjugate_partner(y: np.ndarray) -> np.ndarray:
    """Exact orbit-to-orbit map with negated imbalance."""
    return np.array([np.conj(y[1]), np.conj(y[0])])


def _pack(y, eps, jpin):
    re = y.real
    im = np.delete(y.imag, jpin)
    return np.concatenate([re, im, [eps]])


def _unpack(u, jpin):
    re = u[:2]
    im = np.insert(u[2:3], jpin, 0.0)
    return re + 1j * im, float(u[3])


def _residual(y, eps, par):
    fp = np.exp(1j * eps) * period_map(y, par) - y
    return np.concatenate([fp.real, fp.imag,
                           [float(np.sum(np.abs(y) ** 2)) - 1.0]])


def _jacobian(y, eps, f, jpin, par):
    """FD Jacobian; the three state columns share one batched propagation."""
    u = _pack(y, eps, jpin)
    rows = np.empty((3, 2), dtype=complex)
    for col in range(3):
        rows[col], _ = _unpack(u + FD_STEP * np.eye(4)[col], jpin)
    mapped = period_map(rows, par)
    jac = np.empty((5, 4))
    phase = np.exp(1j * eps)
    for col in range(3):
        fp = phase * mapped[col] - rows[col]
        fcol = np.concatenate([fp.real, fp.imag,
                               [float(np.sum(np.abs(rows[col]) ** 2)) - 1.0]])
        jac[:, col] = (fcol - f) / FD_STEP
    # analytic eps column: d/d eps of e^{i eps} M(y) = i (fp + y)
    fp = f[0:2] + 1j * f[2:4]
    dcol = 1j * (fp + y)
    jac[:, 3] = np.concatenate([dcol.real, dcol.imag, [0.0]])
    return jac


def dimer_orbit_solve(seed: np.ndarray, eps_seed: float, par: DimerParams,
                      tol: float = NEWTON_TOL) -> DimerOrbit:
    """Newton on the 4-unknown pinned system (3 state reals + eps)."""
    y = np.asarray(seed, dtype=complex).copy()
    jpin = int(np.argmax(np.abs(y)))
    if abs(y[jpin]) > 0:
        y = y / (y[jpin] / abs(y[jpin]))
    eps = float(eps_seed)
    f = _residual(y, eps, par)
    fn = np.max(np.abs(f))
    for it in range(NEWTON_MAXIT):
        if fn < tol:
            break
        u = _pack(y, eps, jpin)
        jac = _jacobian(y, eps, f, jpin, par)
        du, *_ = np.linalg.lstsq(jac, -f, rcond=None)
        lam = 1.0
        for _ in range(10):
            yv, ev = _unpack(u + lam * du, jpin)
            f_try = _residual(yv, ev, par)
            if np.max(np.abs(f_try)) < fn:
                break
            lam *= 0.5
        else:
            raise RuntimeError(f"dimer Newton stalled (residual {fn:.2e})")
        y, eps, f = yv, ev, f_try
        fn = np.max(np.abs(f))
    if fn > tol:
        raise RuntimeError(f"dimer Newton: no convergence (residual {fn:.2e})")
    if y[jpin].real < 0:
        y = -y
    return DimerOrbit(y, float(np.angle(np.exp(1j * eps))), par.g, float(fn))


def orbit_sigma_min(orbit: DimerOrbit, par: DimerParams) -> float:
    """Smallest singular value of the pinned Jacobian at the orbit; dips to
    ~0 at a symmetry-breaking bifurcation."""
    y, eps = orbit.y, orbit.quasienergy
    jpin = int(np.argmax(np.abs(y)))
    f = _residual(y, eps, par)
    jac = _jacobian(y, eps, f, jpin, par)
    return float(np.linalg.svd(jac, compute_uv=False)[-1])


def imbalance(orbit: DimerOrbit, par: DimerParams, n_samples: int = 128) -> float:
    """Period average of N1 - N2 along the orbit (trapezoid on 128 samples)."""
    vals = [float(np.abs(orbit.y[0]) ** 2 - np.abs(orbit.y[1]) ** 2)]
    every = RK4_STEPS_PER_PERIOD // n_samples
    _, got = dimer_propagate(orbit.y, 0.0, 1.0, par, sample_every=every,
                             sampler=lambda y, t: float(np.abs(y[0, 0]) ** 2
                                                        - np.abs(y[0, 1]) ** 2))
    # uniform samples of a periodic function: drop the duplicate endpoint
    return float(np.mean([vals[0]] + got[:-1]))


def linear_modes(par: DimerParams):
    """Floquet orbits continued from the undriven in/out-of-phase modes at g=0.

    Returns (in_phase_like, out_phase_like) DimerOrbits; the in-phase mode has
    the larger eigenphase (eps = +C T/mu undriven).
    """
    par0 = DimerParams(par.C, par.mu, par.omega, par.f1, par.f2, par.theta, 0.0)
    t = par0.period
    cands = []
    for sgn, seed in ((+1, np.array([1.0, 1.0]) / np.sqrt(2)),
                      (-1, np.array([1.0, -1.0]) / np.sqrt(2))):
        orb = dimer_orbit_solve(seed, sgn * par0.C * t / par0.mu, par0)
        cands.append(orb)
    cands.sort(key=lambda o: -o.quasienergy)
    return cands[0], cands[1]


@dataclass
class DimerBranch:
    orbits: list = dfield(default_factory=list)
    imbalances: list = dfield(default_factory=list)
    sigma_mins: list = dfield(default_factory=list)
    terminated_by: str = "max_g reached"

    @property
    def g(self) -> np.ndarray:
        return np.array([o.g for o in self.orbits])

    @property
    def quasienergies(self) -> np.ndarray:
        return np.array([o.quasienergy for o in self.orbits])


def _march(orbit: DimerOrbit, g_max: float, dg: float, par: DimerParams,
           overlap_floor: float = 0.8, track_sigma: bool = False) -> DimerBranch:
    br = DimerBranch()
    parc = DimerParams(par.C, par.mu, par.omega, par.f1, par.f2, par.theta, orbit.g)
    br.orbits.append(orbit)
    br.imbalances.append(imbalance(orbit, parc))
    br.sigma_mins.append(orbit_sigma_min(orbit, parc) if track_sigma else np.nan)
    sgn = 1.0 if g_max >= orbit.g else -1.0
    step = abs(dg)
    cur = orbit
    while sgn * (g_max - cur.g) > 1e-12:
        gn = cur.g + sgn * min(step, sgn * (g_max - cur.g))
        parn = DimerParams(par.C, par.mu, par.omega, par.f1, par.f2, par.theta, gn)
        try:
            nxt = dimer_orbit_solve(cur.y, cur.quasienergy, parn)
            ovl = abs(np.vdot(cur.y, nxt.y))
            ok = ovl > overlap_floor
        except RuntimeError:
            nxt, ok = None, False
        if ok:
            br.orbits.append(nxt)
            br.imbalances.append(imbalance(nxt, parn))
            br.sigma_mins.append(orbit_sigma_min(nxt, parn) if track_sigma else np.nan)
            cur = nxt
            step = min(step * 2.0, abs(dg))
            continue
        if step > abs(dg) / 64.0:
            step *= 0.5
            continue
        # a fold shows up either as a quasienergy slope reversal (marched
        # around the turning point) or, when Newton dies right at the
        # vertical tangent, as the pinned Jacobian going singular there
        eps = br.quasienergies
        rev = len(eps) >= 3 and (eps[-1] - eps[-2]) * (eps[-2] - eps[-3]) < 0
        sig = np.asarray(br.sigma_mins, dtype=float)
        pinched = (len(sig) >= 3 and bool(np.all(np.isfinite(sig)))
                   and sig[-1] < 0.2 * float(np.median(sig)))
        br.terminated_by = ("fold detected" if (rev or pinched)
                            else "convergence failure")
        return br
    return br


@dataclass
class DimerContinuation:
    primary: DimerBranch
    daughters: list
    classification: str          # pitchfork | saddle-node | none
    g_critical: float | None


KICK_LADDER = (1e-3, 1e-2, 5e-2, 0.1, 0.3)


def dimer_continue(orbit: DimerOrbit, g_max: float, dg: float,
                   par: DimerParams) -> DimerContinuation:
    """Continue the orbit in g and classify the bifurcation scenario.

    Symmetric drive (sin theta = 0): a pitchfork is detected by a dip in the
    Jacobian's smallest singular value along the symmetric branch; daughters
    are captured by imbalance-kicked Newton solves (escalating kicks: the
    nominal 1e-3 kick falls back to the symmetric parent, whose Newton basin
    stays wide past the bifurcation) and completed by the exact conjugacy
    partner. Nonsymmetric drive: the continued branch stays smooth; the
    disconnected strong-imbalance family is seeded by the conjugacy map from
    the branch end and continued downward in g until its fold, giving the
    saddle-node classification.
    """
    symmetric = abs(np.sin(par.theta)) < 1e-12
    primary = _march(orbit, g_max, dg, par, track_sigma=symmetric)
    daughters: list = []
    classification = "none"
    g_crit = None
    if symmetric:
        sig = np.array(primary.sigma_mins)
        if len(sig) >= 3:
            k = int(np.argmin(sig))
            interior = 0 < k < len(sig) - 1
            dipped = sig[k] < 0.2 * np.median(sig)
            if interior and dipped:
                g_crit = float(primary.g[k])
                # capture a daughter just past the dip
                for idx in range(k, len(primary.orbits)):
                    parent = primary.orbits[idx]
                    parn = DimerParams(par.C, par.mu, par.omega, par.f1,
                                       par.f2, par.theta, parent.g)
                    got = None
                    for delta in KICK_LADDER:
                        y_kick = parent.y + np.array([delta, -delta])
                        y_kick = y_kick / np.linalg.norm(y_kick)
                        try:
                            cand = dimer_orbit_solve(y_kick, parent.quasienergy, parn)
                        except RuntimeError:
                            continue
                        if abs(imbalance(cand, parn)
                               - imbalance(parent, parn)) > 0.02:
                            got = cand
                            break
                    if got is not None:
                        partner = dimer_orbit_solve(conjugate_partner(got.y),
                                                    got.quasienergy, parn)
                        daughters = [got, partner]
                        classification = "pitchfork"
                        break
    else:
        end = primary.orbits[-1]
        parn = DimerParams(par.C, par.mu, par.omega, par.f1, par.f2,
                           par.theta, end.g)
        try:
            flipped = dimer_orbit_solve(conjugate_partner(end.y),
                                        end.quasienergy, parn)
            down = _march(flipped, orbit.g, dg, par, track_sigma=True)
            daughters = [flipped]
            if down.terminated_by == "fold detected":
                classification = "saddle-node"
                g_crit = float(down.g[-1])
                daughters = [flipped, down.orbits[-1]]
        except RuntimeError:
            pass
    return DimerContinuation(primary, daughters, classification, g_crit)


def self_trapping_threshold_scan(C: float, g_lo: float = 1.5,
                                 g_hi: float = 2.5, dg: float = 0.005) -> float:
    """Brute-force undriven (f=0) self-trapping threshold on a dense g grid.

    Stationary states solve E a = C b + g a^3, E b = C a + g b^3, a^2+b^2=1
    (real amplitudes suffice). Returns the smallest g where an imbalanced
    root exists. Analytic answer for unit norm: g = 2C.
    """
    def imbalanced_root(g):
        for imb0 in (0.2, 0.5, 0.8):
            a = np.sqrt((1 + imb0) / 2)
            b = np.sqrt((1 - imb0) / 2)
            v = np.array([a, b, C + g / 2])     # (a, b, E)
            for _ in range(60):
                a, b, e = v
                f = np.array([e * a - C * b - g * a**3,
                              e * b - C * a - g * b**3,
                              a * a + b * b - 1.0])
                if np.max(np.abs(f)) < 1e-12:
                    break
                jac = np.array([[e - 3 * g * a**2, -C, a],
                                [-C, e - 3 * g * b**2, b],
                                [2 * a, 2 * b, 0.0]])
                try:
                    v = v - np.linalg.solve(jac, f)
                except np.linalg.LinAlgError:
                    break
            a, b, e = v
            res = max(abs(e * a - C * b - g * a**3),
                      abs(e * b - C * a - g * b**3),
                      abs(a * a + b * b - 1.0))
            if res < 1e-10 and abs(a * a - b * b) > 1e-3:
                return True
        return False

    for g in np.arange(g_lo, g_hi + dg / 2, dg):
        if imbalanced_root(float(g)):
            return float(g)
    raise RuntimeError("no self-trapping threshold found in the scanned range")
