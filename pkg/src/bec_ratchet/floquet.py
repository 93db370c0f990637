"""Linear Floquet analysis: one-period operator, spectrum, bands, currents.

Eigenphases come from the pair C = (U+U')/2, S = (U-U')/(2i): eigh on C,
clustering of near-degenerate cosine eigenvalues (the cosine is two-to-one,
so +/-eps partners always collide there), then eigh of S projected into each
cluster. The Rayleigh quotient of U on the resulting vectors gives the phase.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DrivingField, ModelParams
from .propagator import SplitStepEngine
from .spectral import WaveFunction, from_fft_layout, to_fft_layout

COS_CLUSTER_TOL = 1e-7
UNITARITY_REJECT = 1e-6
QUARTIC_GRID = 512
ORBIT_SAMPLES = 128


def build_floquet_operator(params: ModelParams, field: DrivingField,
                           t0: float = 0.0) -> np.ndarray:
    """U(T, t0) in the centered plane-wave basis; column a = evolved |a>."""
    if params.g != 0.0:
        raise ValueError("Floquet operator is defined for g = 0")
    eng = SplitStepEngine(params, field)
    spp = params.steps_per_period(field)
    rows, _ = eng.run(np.eye(eng.dim, dtype=complex), t0, spp)
    u = rows.T   # row basis states become columns
    u = np.fft.fftshift(np.fft.fftshift(u, axes=0), axes=1)
    defect = np.max(np.abs(u.conj().T @ u - np.eye(eng.dim)))
    if defect > UNITARITY_REJECT:
        raise RuntimeError(f"under-resolved propagation: unitarity defect {defect:.2e}")
    return u


def codiagonal_transpose(u: np.ndarray) -> np.ndarray:
    """Transposition along the codiagonal: (U^x)_{nm} = U_{-m,-n} (centered)."""
    return u[::-1, ::-1].T


def diagonalize_unitary(u: np.ndarray):
    """Eigenphases in (-pi, pi] and orthonormal eigenvectors of a unitary u.

    Returns (quasienergies, vectors) with vectors[:, a] the a-th eigenvector,
    sorted by quasienergy.
    """
    d = u.shape[0]
    defect = np.max(np.abs(u.conj().T @ u - np.eye(d)))
    if defect > UNITARITY_REJECT:
        raise ValueError(f"matrix is not unitary (defect {defect:.2e})")
    cpart = (u + u.conj().T) / 2.0
    spart = (u - u.conj().T) / 2.0j
    evc, vc = np.linalg.eigh(cpart)
    order = np.argsort(evc)
    evc, vc = evc[order], vc[:, order]
    lam = np.empty(d, dtype=complex)
    vecs = np.empty_like(vc)
    i = 0
    while i < d:
        j = i
        while j + 1 < d and evc[j + 1] - evc[j] < COS_CLUSTER_TOL:
            j += 1
        blk = vc[:, i:j + 1]
        _, w = np.linalg.eigh(blk.conj().T @ spart @ blk)
        sub = blk @ w
        for k in range(j - i + 1):
            v = sub[:, k]
            lam[i + k] = v.conj() @ u @ v
            vecs[:, i + k] = v
        i = j + 1
    eps = -np.angle(lam)
    eps[eps <= -np.pi] += 2.0 * np.pi
    order = np.argsort(eps)
    return eps[order], vecs[:, order]


@dataclass
class FloquetSpectrum:
    quasienergies: np.ndarray     # (D,), in (-pi, pi], ascending
    vectors: np.ndarray           # (D, D) centered layout, column per state
    momenta: np.ndarray           # one-period-averaged <p> per state
    quartic: np.ndarray           # int_0^T dt int |phi|^4 dx per state
    theta: float
    t0: float

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def state(self, a: int, n_max: int) -> WaveFunction:
        return WaveFunction(self.vectors[:, a].copy(), n_max)

    @property
    def states(self):
        n_max = (self.dim - 1) // 2
        return [self.state(a, n_max) for a in range(self.dim)]


def quartic_integral_rows(c_fft: np.ndarray, m_points: int = QUARTIC_GRID) -> np.ndarray:
    """int |psi|^4 dx per FFT-layout row, on a zero-padded position grid."""
    c_fft = np.atleast_2d(c_fft)
    d = c_fft.shape[-1]
    nf = np.rint(np.fft.fftfreq(d, 1.0 / d)).astype(int)
    pad = np.zeros(c_fft.shape[:-1] + (m_points,), dtype=complex)
    pad[..., nf % m_points] = c_fft
    b = np.fft.ifft(pad, axis=-1)
    return m_points**3 / (2.0 * np.pi) * np.sum(np.abs(b) ** 4, axis=-1)


def orbit_averages(vectors: np.ndarray, params: ModelParams, field: DrivingField,
                   t0: float = 0.0, n_samples: int = ORBIT_SAMPLES,
                   keep_snapshots: bool = False):
    """One-period averages along the orbits of the given states (columns).

    Returns (momenta, quartic_T_integrals, snapshots); snapshots is the list
    of FFT-layout (K, D) arrays at the n_samples interior times when asked.
    Uniform samples of a T-periodic integrand: the mean is the trapezoid rule.
    """
    eng = SplitStepEngine(params, field)
    spp = params.steps_per_period(field)
    if spp % n_samples:
        raise ValueError("n_samples must divide steps per period")
    rows = to_fft_layout(vectors.T)
    collected = []

    def sampler(c, t):
        item = [eng.momentum(c), quartic_integral_rows(c)]
        if keep_snapshots:
            item.append(c.copy())
        collected.append(item)

    eng.run(rows, t0, spp, sample_every=spp // n_samples, sampler=sampler)
    momenta = np.mean([it[0] for it in collected], axis=0)
    quartic = field.period * np.mean([it[1] for it in collected], axis=0)
    snaps = [it[2] for it in collected] if keep_snapshots else None
    return momenta, quartic, snaps


def compute_floquet_spectrum(params: ModelParams, field: DrivingField,
                             t0: float = 0.0) -> FloquetSpectrum:
    u = build_floquet_operator(params, field, t0)
    eps, vecs = diagonalize_unitary(u)
    momenta, quartic, _ = orbit_averages(vecs, params, field, t0)
    return FloquetSpectrum(eps, vecs, momenta, quartic, field.theta, t0)


def asymptotic_current_linear(initial: WaveFunction, spectrum: FloquetSpectrum):
    """J(t0) = sum_a <p>_a |C_a|^2 for the given initial state.

    Returns (J, occupations |C_a|^2).
    """
    c = spectrum.vectors.conj().T @ initial.coeffs
    occ = np.abs(c) ** 2
    defect = abs(float(np.sum(occ)) - initial.norm_sq())
    if defect > 1e-6:
        raise ValueError(f"incomplete Floquet expansion (defect {defect:.2e})")
    return float(np.sum(spectrum.momenta * occ)), occ


def current_vs_t0(initial: WaveFunction, params: ModelParams, field: DrivingField,
                  n_samples: int = 16, spectrum: FloquetSpectrum | None = None):
    """J(t0) on n_samples equispaced t0 in [t0_base, t0_base + T).

    Uses one diagonalization: the Floquet states at epoch t0 are the
    time-evolved states at the base epoch, and <p>_a does not depend on the
    epoch, so J(t0_k) needs only the evolved eigenvector overlaps.
    """
    if spectrum is None:
        spectrum = compute_floquet_spectrum(params, field, field.t0)
    _, _, snaps = orbit_averages(spectrum.vectors, params, field, spectrum.t0,
                                 n_samples=n_samples, keep_snapshots=True)
    c0 = to_fft_layout(initial.coeffs)
    grid = [to_fft_layout(spectrum.vectors.T)] + snaps[:-1]
    t0s = spectrum.t0 + np.arange(n_samples) * field.period / n_samples
    js = np.empty(n_samples)
    for k, vecs_rows in enumerate(grid):
        occ = np.abs(vecs_rows.conj() @ c0) ** 2
        js[k] = float(np.sum(spectrum.momenta * occ))
    return t0s, js


def t0_average_current(theta: float, params: ModelParams,
                       field_template: DrivingField, n_samples: int = 16) -> float:
    """Mean of J(t0) over the t0 grid for the |0> initial state."""
    if n_samples < 8:
        raise ValueError("need at least 8 t0 samples")
    from .spectral import plane_wave_state
    field = field_template.with_theta(theta)
    initial = plane_wave_state(0, params.n_max)
    _, js = current_vs_t0(initial, params, field, n_samples=n_samples)
    return float(np.mean(js))


# --- band tracking ---------------------------------------------------------

@dataclass
class BandSet:
    theta_grid: np.ndarray
    quasienergies: np.ndarray    # (n_theta, D), band-ordered
    momenta: np.ndarray          # (n_theta, D)
    min_overlaps: np.ndarray     # (n_theta-1,) worst matching overlap per step


def track_bands(theta_grid, params: ModelParams, field_template: DrivingField,
                t0: float = 0.0) -> BandSet:
    """Follow all bands across theta by greedy maximal-overlap matching."""
    theta_grid = np.asarray(theta_grid, dtype=float)
    eps_rows, p_rows, min_ovl = [], [], []
    prev_vecs = None
    for theta in theta_grid:
        field = field_template.with_theta(theta)
        spec = compute_floquet_spectrum(params, field, t0)
        eps, vecs, mom = spec.quasienergies, spec.vectors, spec.momenta
        if prev_vecs is not None:
            ovl = np.abs(prev_vecs.conj().T @ vecs)
            perm = np.full(spec.dim, -1)
            used = np.zeros(spec.dim, dtype=bool)
            worst = 1.0
            # strongest matches claimed first
            order = np.argsort(ovl, axis=None)[::-1]
            assigned = 0
            for flat in order:
                i, j = divmod(int(flat), spec.dim)
                if perm[i] < 0 and not used[j]:
                    perm[i] = j
                    used[j] = True
                    worst = min(worst, ovl[i, j])
                    assigned += 1
                    if assigned == spec.dim:
                        break
            if worst < 0.5:
                raise RuntimeError(
                    f"band matching lost continuity at theta={theta:.4f} "
                    f"(overlap {worst:.3f}); refine the grid")
            eps, mom, vecs = eps[perm], mom[perm], vecs[:, perm]
            min_ovl.append(worst)
        eps_rows.append(eps)
        p_rows.append(mom)
        prev_vecs = vecs
    return BandSet(theta_grid, np.array(eps_rows), np.array(p_rows),
                   np.array(min_ovl))


def circular_gap(e1, e2) -> np.ndarray:
    """Distance between eigenphases on the circle."""
    return np.abs(np.angle(np.exp(1j * (np.asarray(e1) - np.asarray(e2)))))


def find_resonant_pair(spectrum: FloquetSpectrum):
    """Indices (chaotic_layer, transporting) of the resonant state pair.

    Transporting candidates carry near-integer momentum and a concentrated
    orbit (quartic integral > 0.5); chaotic-layer candidates sit near zero
    momentum with intermediate concentration. Among all cross pairs the one
    with the smallest circular quasienergy distance wins.
    """
    i_raw = spectrum.quartic
    p = spectrum.momenta
    transp = [a for a in range(spectrum.dim) if i_raw[a] > 0.5 and p[a] > 2.0]
    chaotic = [a for a in range(spectrum.dim)
               if abs(p[a]) < 0.5 and 0.4 < i_raw[a] < 1.0]
    if not transp or not chaotic:
        raise RuntimeError("no resonant pair candidates at this theta")
    best = None
    for a in chaotic:
        for b in transp:
            gap = float(circular_gap(spectrum.quasienergies[a],
                                     spectrum.quasienergies[b]))
            if best is None or gap < best[0]:
                best = (gap, a, b)
    return best[1], best[2]


def track_pair(specs, i_ref: int, pair) -> np.ndarray:
    """Follow two bands across a sequence of spectra by eigenvector overlap.

    `pair` gives the two column indices in specs[i_ref]; the walk proceeds
    outward in both directions, matching each band to the column of largest
    overlap at the neighboring point. Near an avoided crossing both bands can
    claim the same column; the tie goes to the larger combined overlap and
    the partner takes the runner-up. Returns an (n, 2) integer index array.
    """
    n = len(specs)
    if not 0 <= i_ref < n:
        raise IndexError(f"i_ref {i_ref} outside 0..{n - 1}")
    out = np.empty((n, 2), dtype=int)
    out[i_ref] = pair
    for direction in (+1, -1):
        i = i_ref
        while 0 <= i + direction < n:
            j = i + direction
            va = specs[i].vectors[:, out[i, 0]]
            vb = specs[i].vectors[:, out[i, 1]]
            oa = np.abs(specs[j].vectors.conj().T @ va)
            ob = np.abs(specs[j].vectors.conj().T @ vb)
            ja, jb = int(np.argmax(oa)), int(np.argmax(ob))
            if ja == jb:
                top = np.argsort(oa + ob)[-2:]
                ja, jb = int(top[1]), int(top[0])
            out[j] = ja, jb
            i = j
    return out
