"""Direct-simulation transport: running average momentum and scans.

The running average P(t) = (1/(t-t0)) int_{t0}^t pbar dt' is accumulated by
per-step trapezoid. Convergence is judged on dyadic windows: the estimate is
converged when the last doubling changed P by less than
plateau_tol * max(|P|, 0.01). t0 scans share one batched time loop (per-row
drive-time offsets), which is exactly equivalent to separate runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from .model import DrivingField, ModelParams
from .propagator import PropagationBlowup, SplitStepEngine
from .spectral import WaveFunction, to_fft_layout

PLATEAU_TOL = 0.05
PLATEAU_FLOOR = 0.01
DEFAULT_N_PERIODS = 4096


@dataclass
class CurrentEstimate:
    value: float
    window_values: list = dfield(default_factory=list)  # (periods, P) pairs
    converged: bool = False
    total_periods: int = 0
    failed: bool = False


def _plateau(windows, plateau_tol) -> bool:
    if len(windows) < 2:
        return False
    (_, p_half), (_, p_end) = windows[-2], windows[-1]
    return abs(p_end - p_half) < plateau_tol * max(abs(p_end), PLATEAU_FLOOR)


def running_average_momentum(initial: WaveFunction, t0: float, n_periods: int,
                             params: ModelParams, field: DrivingField,
                             plateau_tol: float = PLATEAU_TOL) -> CurrentEstimate:
    if n_periods < 64:
        raise ValueError("n_periods must be >= 64")
    if abs(initial.norm_sq() - 1.0) > 1e-8:
        raise ValueError("initial state must be normalized")
    eng = SplitStepEngine(params, field)
    spp = params.steps_per_period(field)
    dt = params.dt
    c = to_fft_layout(initial.coeffs)

    checkpoints = {n_periods, max(1, n_periods // 2)}
    k = 1
    while k <= n_periods:
        checkpoints.add(k)
        k *= 2

    acc = 0.0
    p_prev = float(eng.momentum(c[None, :])[0])
    windows = []
    state = {"acc": acc, "p_prev": p_prev, "k": 0}

    def stepper(cmat, t):
        p_cur = float(eng.momentum(cmat)[0])
        state["acc"] += 0.5 * (state["p_prev"] + p_cur) * dt
        state["p_prev"] = p_cur
        state["k"] += 1
        if state["k"] % spp == 0:
            per = state["k"] // spp
            if per in checkpoints:
                windows.append((per, state["acc"] / (per * spp * dt)))

    try:
        eng.run(c, t0, n_periods * spp, sample_every=1, sampler=stepper)
    except PropagationBlowup:
        est = CurrentEstimate(np.nan, windows, False, state["k"] // spp, True)
        return est
    dy = sorted(w for w in windows if w[0] in (n_periods // 2, n_periods))
    value = windows[-1][1]
    return CurrentEstimate(value, windows, _plateau(dy, plateau_tol),
                           n_periods, False)


def t0_scan(initial: WaveFunction, t0_grid, n_periods: int,
            params: ModelParams, field: DrivingField, g_values=None,
            plateau_tol: float = PLATEAU_TOL):
    """Batched t0 scan; optionally a parallel per-row g array.

    Returns a list of CurrentEstimate, one per (t0, g) row.
    """
    t0_grid = np.asarray(t0_grid, dtype=float)
    nrow = len(t0_grid)
    g_rows = np.full(nrow, params.g) if g_values is None else np.asarray(g_values)
    eng = SplitStepEngine(params, field)
    spp = params.steps_per_period(field)
    dt = params.dt
    rows = np.tile(to_fft_layout(initial.coeffs), (nrow, 1))

    checkpoints = {n_periods, max(1, n_periods // 2)}
    k = 1
    while k <= n_periods:
        checkpoints.add(k)
        k *= 2

    acc = np.zeros(nrow)
    p_prev = eng.momentum(rows).copy()
    windows = {n: [] for n in range(nrow)}
    kstep = [0]

    def stepper(cmat, t):
        p_cur = eng.momentum(cmat)
        acc[:] += 0.5 * (p_prev + p_cur) * dt
        p_prev[:] = p_cur
        kstep[0] += 1
        if kstep[0] % spp == 0:
            per = kstep[0] // spp
            if per in checkpoints:
                pvals = acc / (per * spp * dt)
                for n in range(nrow):
                    windows[n].append((per, float(pvals[n])))

    try:
        eng.run(rows, 0.0, n_periods * spp, g=g_rows, t_offsets=t0_grid,
                sample_every=1, sampler=stepper)
    except PropagationBlowup:
        return [CurrentEstimate(np.nan, windows[n], False, 0, True)
                for n in range(nrow)]
    out = []
    for n in range(nrow):
        dy = sorted(w for w in windows[n] if w[0] in (n_periods // 2, n_periods))
        out.append(CurrentEstimate(windows[n][-1][1], windows[n],
                                   _plateau(dy, plateau_tol), n_periods, False))
    return out


def scan(axis: str, grid, params: ModelParams, field: DrivingField,
         initial: WaveFunction, t0: float = 0.0,
         n_periods: int = DEFAULT_N_PERIODS,
         plateau_tol: float = PLATEAU_TOL):
    """Scan over theta, g or t0. Yields (grid value, CurrentEstimate) rows."""
    grid = np.asarray(grid, dtype=float)
    if axis == "t0":
        for val, est in zip(grid, t0_scan(initial, grid, n_periods, params,
                                          field, plateau_tol=plateau_tol)):
            yield float(val), est
        return
    for val in grid:
        if axis == "theta":
            p, f = params, field.with_theta(float(val))
        elif axis == "g":
            p, f = params.with_g(float(val)), field
        else:
            raise ValueError(f"unknown scan axis: {axis}")
        yield float(val), running_average_momentum(initial, t0, n_periods,
                                                   p, f, plateau_tol)
