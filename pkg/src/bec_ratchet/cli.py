"""Command-line driver: configs in, CSV datasets + manifest out.

Subcommands: floquet-spectrum, continue, current-scan, dimer, husimi.
Exit codes: 0 success, 2 partial (some scan points failed), 1 fatal.
"""
from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, config_hash, grid_from, load_config, resolve
from .dimer import DimerParams, dimer_continue, linear_modes
from .floquet import (compute_floquet_spectrum, find_resonant_pair,
                      orbit_averages, track_bands)
from .husimi import ClassifyThresholds, classify_state, husimi
from .nonlinear import (continue_in_g, critical_g, newton_solve,
                        project_two_state, quasienergy_two_state, state_to_y)
from .spectral import load_state, plane_wave_state, save_state
from .tables import (RunManifest, Stopwatch, append_rows, count_data_rows,
                     emit_table)
from .transport import DEFAULT_N_PERIODS, PLATEAU_TOL, scan


def _manifest(cmd, cfg, outputs, watch, out_dir) -> None:
    RunManifest(cmd, config_hash(cfg), [str(o) for o in outputs],
                watch.elapsed(), __version__).write(out_dir / "manifest.json")


def cmd_floquet_spectrum(cfg: dict, out: Path, workers: int = 1,
                         seed_state=None) -> int:
    watch = Stopwatch()
    errors: list = []
    field, params = resolve(cfg)
    sec = cfg.get("spectrum", {})
    grid = grid_from(sec, "theta_grid", errors)
    if errors:
        raise ConfigError(errors)
    t0 = float(sec.get("t0", field.t0))
    bands = track_bands(grid, params, field, t0)
    rows = []
    for i, th in enumerate(bands.theta_grid):
        for b in range(bands.quasienergies.shape[1]):
            rows.append((float(th), b, bands.quasienergies[i, b],
                         bands.momenta[i, b]))
    outputs = [emit_table(rows, ("theta", "band", "quasienergy", "mean_momentum"),
                          out / "bands.csv")]
    dump_theta = sec.get("dump_theta")
    if dump_theta is not None:
        spec = compute_floquet_spectrum(params, field.with_theta(float(dump_theta)), t0)
        srows = []
        thr = ClassifyThresholds(
            momentum_floor=float(sec.get("momentum_floor", 0.5)),
            ipr_factor=float(sec.get("ipr_factor", 8.0)))
        for a in range(spec.dim):
            st = spec.state(a, params.n_max)
            label = classify_state(spec.momenta[a], husimi(st, params.mu), thr)
            srows.append((a, spec.quasienergies[a], spec.momenta[a],
                          spec.quartic[a], label))
            save_state(out / f"state_{a:03d}.bin", st, params.mu, t0)
        outputs.append(emit_table(
            srows, ("band", "quasienergy", "mean_momentum", "quartic", "class"),
            out / "spectrum.csv"))
        outputs += sorted(out.glob("state_*.bin"))
    _manifest("floquet-spectrum", cfg, outputs, watch, out)
    return 0


def cmd_continue(cfg: dict, out: Path, workers: int = 1, seed_state=None) -> int:
    watch = Stopwatch()
    field, params = resolve(cfg)
    sec = cfg.get("continuation", {})
    t0 = float(sec.get("t0", field.t0))
    g_max = float(sec.get("g_max", 0.005))
    dg = float(sec.get("dg", 1e-4))
    spec = compute_floquet_spectrum(params.with_g(0.0), field, t0)
    ia, ib = find_resonant_pair(spec)
    _, _, snaps = orbit_averages(spec.vectors[:, [ia, ib]], params.with_g(0.0),
                                 field, t0, keep_snapshots=True)
    orb1 = np.array([np.fft.fftshift(s[0]) for s in snaps])
    orb2 = np.array([np.fft.fftshift(s[1]) for s in snaps])
    eps1, eps2 = spec.quasienergies[ia], spec.quasienergies[ib]
    g_star = critical_g(orb1, orb2, eps1, eps2, params.mu, field.period)

    if seed_state is not None:
        psi0, _, _ = load_state(seed_state)
        seed_idx = None
    else:
        seed_idx = int(sec.get("seed_band", ia))
        psi0 = spec.state(seed_idx, params.n_max)
    eps0 = spec.quasienergies[seed_idx] if seed_idx is not None else float(
        sec.get("seed_quasienergy", 0.0))
    start = newton_solve(state_to_y(psi0, eps0), params.with_g(0.0), field, t0)
    branch = continue_in_g(start, g_max, dg, params, field, t0)

    phi1 = spec.state(ia, params.n_max)
    phi2 = spec.state(ib, params.n_max)
    rows = []
    for k, pt in enumerate(branch.points):
        a2, b2, excess = project_two_state(pt.state, phi1, phi2)
        eps_pred = quasienergy_two_state((a2, b2), eps1, eps2,
                                         branch.quartic[k], pt.g, params.mu)
        rows.append((pt.g, pt.quasienergy, branch.momenta[k], pt.residual,
                     a2, b2, eps_pred, g_star))
    outputs = [emit_table(rows, ("g", "quasienergy", "mean_momentum", "residual",
                                 "weight_1", "weight_2", "quasienergy_two_state",
                                 "g_critical"), out / "branch.csv")]
    _manifest("continue", cfg, outputs, watch, out)
    return 0


def cmd_current_scan(cfg: dict, out: Path, workers: int = 1, seed_state=None) -> int:
    watch = Stopwatch()
    errors: list = []
    field, params = resolve(cfg)
    sec = cfg.get("scan", {})
    axis = sec.get("axis")
    if axis not in ("theta", "g", "t0"):
        errors.append("scan.axis must be one of theta/g/t0")
    grid = grid_from(sec, "grid", errors)
    if errors:
        raise ConfigError(errors)
    n_periods = int(sec.get("n_periods", DEFAULT_N_PERIODS))
    plateau_tol = float(sec.get("plateau_tol", PLATEAU_TOL))
    t0 = float(sec.get("t0", field.t0))
    if seed_state is not None:
        initial, _, _ = load_state(seed_state)
    else:
        initial = plane_wave_state(int(sec.get("initial_n", 0)), params.n_max)
    schema = (axis, "J", "converged", "total_periods", "wall_time")
    dest = out / "scan.csv"
    done = count_data_rows(dest)
    failures = 0
    for i, (val, est) in enumerate(scan(axis, grid, params, field, initial,
                                        t0=t0, n_periods=n_periods,
                                        plateau_tol=plateau_tol)):
        if i < done:
            continue                      # resuming a partial scan
        if est.failed:
            failures += 1
        append_rows([(val, est.value, est.converged, est.total_periods,
                      watch.elapsed())], schema, dest)
    _manifest("current-scan", cfg, [dest], watch, out)
    return 2 if failures else 0


def cmd_dimer(cfg: dict, out: Path, workers: int = 1, seed_state=None) -> int:
    watch = Stopwatch()
    sec = cfg.get("dimer", {})
    par = DimerParams(C=float(sec.get("C", 1.0)), mu=float(sec.get("mu", 1.0)),
                      omega=float(sec.get("omega", 2.0 * np.pi)),
                      f1=float(sec.get("f1", 1.0)), f2=float(sec.get("f2", 1.0)),
                      theta=float(sec.get("theta", 0.0)))
    g_max = float(sec.get("g_max", 2.5))
    dg = float(sec.get("dg", 0.02))
    mode, _ = linear_modes(par)
    result = dimer_continue(mode, g_max, dg, par)
    rows = [(par.theta, o.g, o.quasienergy, result.primary.imbalances[k],
             result.classification)
            for k, o in enumerate(result.primary.orbits)]
    outputs = [emit_table(rows, ("theta", "g", "quasienergy", "imbalance",
                                 "classification"), out / "dimer_branch.csv")]
    if result.daughters:
        drows = [(par.theta, o.g, o.quasienergy,
                  _dimer_imbalance(o, par), result.classification)
                 for o in result.daughters]
        outputs.append(emit_table(drows, ("theta", "g", "quasienergy",
                                          "imbalance", "classification"),
                                  out / "dimer_daughters.csv"))
    _manifest("dimer", cfg, outputs, watch, out)
    return 0


def _dimer_imbalance(orbit, par):
    from .dimer import imbalance
    return imbalance(orbit, DimerParams(par.C, par.mu, par.omega, par.f1,
                                        par.f2, par.theta, orbit.g))


def cmd_husimi(cfg: dict, out: Path, workers: int = 1, seed_state=None) -> int:
    watch = Stopwatch()
    if seed_state is None:
        raise ConfigError(["husimi needs --seed-state"])
    psi, mu, _ = load_state(seed_state)
    sec = cfg.get("husimi", {})
    grid = husimi(psi, mu, nx=int(sec.get("nx", 64)),
                  np_pts=int(sec.get("np", 64)),
                  p_min=float(sec.get("p_min", -3.0)),
                  p_max=float(sec.get("p_max", 3.0)))
    rows = [(float(x), float(p), float(grid.values[i, j]))
            for i, x in enumerate(grid.x_grid)
            for j, p in enumerate(grid.p_grid)]
    outputs = [emit_table(rows, ("x", "p", "H"), out / "husimi.csv")]
    import json
    side = out / "husimi_meta.json"
    with open(side, "w") as fh:
        json.dump({"nx": len(grid.x_grid), "np": len(grid.p_grid),
                   "p_min": float(grid.p_grid[0]), "p_max": float(grid.p_grid[-1]),
                   "sigma_x": grid.sigma_x, "mu": grid.mu,
                   "norm_defect": grid.norm_defect()}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs.append(side)
    _manifest("husimi", cfg, outputs, watch, out)
    return 0


COMMANDS = {
    "floquet-spectrum": cmd_floquet_spectrum,
    "continue": cmd_continue,
    "current-scan": cmd_current_scan,
    "dimer": cmd_dimer,
    "husimi": cmd_husimi,
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="bec-ratchet")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, type=Path)
    ap.add_argument("--out", required=True, type=Path)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--seed-state", type=Path, default=None)
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](cfg, args.out, args.workers,
                                      args.seed_state)
    except ConfigError as exc:
        for e in exc.errors:
            print(f"config error: {e}", file=sys.stderr)
        return 1
    except Exception as exc:           # noqa: BLE001 - CLI boundary
        print(f"fatal: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
