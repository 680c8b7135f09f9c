"""Experiment drivers behind the command-line front end.

Each driver writes its CSV outputs into ``out_dir`` and returns a
:class:`RunResult`; :func:`write_manifest` records what was produced.
"""
from __future__ import annotations

import csv
import json
import os
import platform
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.integrate import simpson

from .errors import InvalidInputError
from .functionals import LEDGER_SCHEMA_VERSION, FunctionalLedger
from .grid import FourierGrid
from .identities import run_identity_battery
from .semigroup import (REGIONS, balanced_error, envelope_arrays, kernel_decay_profile,
                        lattice, loglog_slope, oracle_arrays, propagator_arrays,
                        region_codes)
from .snapshot import write_snapshot
from .solver import InitialDataSpec, SolverConfig, generate_initial, simulate
from .state import FlowState

__all__ = [
    "RunResult", "write_csv", "write_manifest", "run_simulation", "run_sweep",
    "linear_evolve", "run_decay", "kernel_table", "run_kernels", "run_identities",
    "energy_balance", "ORACLE_TOL",
]

ORACLE_TOL = 1e-9


@dataclass
class RunResult:
    status: str = "completed"
    outputs: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                        for v in row])


def write_manifest(out_dir, command: str, config: dict, seed, started: float,
                   finished: float, result: RunResult) -> str:
    from . import __version__
    doc = {
        "command": command,
        "version": __version__,
        "config": config,
        "seed": seed,
        "wall_time_start": started,
        "wall_time_end": finished,
        "wall_seconds": finished - started,
        "outputs": result.outputs,
        "status": result.status,
        "csv_schema_version": LEDGER_SCHEMA_VERSION,
        "summary": result.summary,
        "python": platform.python_version(),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    return path


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, tuple):
        return list(v)
    raise TypeError(type(v).__name__)


def energy_balance(ledger: FunctionalLedger) -> float:
    """Relative residual of ``d/dt (|u|^2 + |theta|^2)/2 = -(nu |u|^2 + eta |theta|^2)``.

    Integrates the dissipation with Simpson's rule over the recorded rows, so
    the ledger should be recorded at every step.
    """
    t = ledger.column("time")
    kin = ledger.column("kinetic_L2sq")
    th = ledger.column("theta_L2sq")
    if t.size < 3:
        raise InvalidInputError("energy balance needs at least three ledger rows")
    total = kin + th
    diss = simpson(ledger.nu * kin + ledger.eta * th, x=t)
    ref = 0.5 * total[0]
    return float(abs(0.5 * (total[-1] - total[0]) + diss) / ref) if ref > 0 else 0.0


# --- simulate / sweep ----------------------------------------------------------

def run_simulation(config: SolverConfig, init: InitialDataSpec | FlowState, out_dir,
                   snapshot_every: int = 0) -> tuple[RunResult, FunctionalLedger]:
    os.makedirs(out_dir, exist_ok=True)
    grid = config.grid
    outputs = []
    counter = {"steps": 0}

    def on_step(t, w, th):
        counter["steps"] += 1
        if snapshot_every and counter["steps"] % snapshot_every == 0:
            name = f"snapshot_{counter['steps']:07d}.bdsf"
            write_snapshot(os.path.join(out_dir, name), grid, [w, th])
            outputs.append(name)

    state0 = init if isinstance(init, FlowState) else generate_initial(init, grid, config.sobolev_s)
    write_snapshot(os.path.join(out_dir, "initial.bdsf"), grid, [state0.omega, state0.theta])
    final, ledger = simulate(config, state0, on_step=on_step)
    write_snapshot(os.path.join(out_dir, "final.bdsf"), grid, [final.omega, final.theta])
    ledger.to_csv(os.path.join(out_dir, "ledger.csv"))
    outputs = ["initial.bdsf", *outputs, "final.bdsf", "ledger.csv"]
    last = ledger.rows[-1]
    summary = {"A0": ledger.rows[0]["A"], "A_sup": last["A_sup"], "A1_T": last["A1_running"],
               "E_sup": last["E_sup"], "final_time": final.time, "steps": counter["steps"],
               "failure_time": ledger.failure_time}
    return RunResult(ledger.status, outputs, summary), ledger


SWEEP_COLUMNS = ("amplitude", "A0", "A_sup", "A_sup_ratio", "A1_T", "u2_43_T", "status")


def run_sweep(config: SolverConfig, init: InitialDataSpec, amplitudes, out_dir) -> RunResult:
    """One simulation per amplitude, each in its own subdirectory, plus ``sweep.csv``."""
    amplitudes = [float(a) for a in amplitudes]
    if not amplitudes:
        raise InvalidInputError("sweep needs at least one amplitude")
    os.makedirs(out_dir, exist_ok=True)
    rows, outputs, statuses = [], [], []
    for i, amp in enumerate(amplitudes):
        sub = f"run_{i:03d}"
        res, ledger = run_simulation(config, replace(init, amplitude=amp),
                                     os.path.join(out_dir, sub))
        last = ledger.rows[-1]
        a0 = ledger.rows[0]["A"]
        rows.append((amp, a0, last["A_sup"], last["A_sup"] / a0 if a0 > 0 else 0.0,
                     last["A1_running"], last["u2_linf_43_running"], res.status))
        outputs.extend(f"{sub}/{o}" for o in res.outputs)
        statuses.append(res.status)
    write_csv(os.path.join(out_dir, "sweep.csv"), SWEEP_COLUMNS, rows)
    outputs.append("sweep.csv")
    status = "integration_failure" if "integration_failure" in statuses else (
        "resolution_flagged" if "resolution_flagged" in statuses else "completed")
    return RunResult(status, outputs, {"runs": len(rows)})


# --- linear decay study --------------------------------------------------------

def linear_evolve(state: FlowState, t: float, nu: float = 1.0, eta: float = 0.0) -> FlowState:
    """Apply the exact linear solution operator mode by mode."""
    g = state.grid
    m1, m2, m3, m4 = propagator_arrays(g.k1, g.k2, t, nu, eta)
    w, th = state.omega.coeffs, state.theta.coeffs
    return FlowState.from_arrays(g, m1 * w + m2 * th, m3 * w + m4 * th, state.time + t)


def _u2_hat(grid: FourierGrid, w):
    return -1j * grid.k1 * grid.inv_ksq * w


DECAY_COLUMNS = ("time", "u2_linf_proxy", "envelope", "ratio")


def run_decay(config: SolverConfig, init: InitialDataSpec, out_dir, samples: int = 101,
              lattice_bound: int | None = None) -> RunResult:
    """Linear evolution of region-localized data against the region envelopes.

    The ``u2`` proxy ``sum |u2_hat|`` is compared with
    ``sum |xi1|/|xi|^2 (e1 |omega_hat(0)| + e2 |theta_hat(0)|)``, built from the
    per-mode envelopes, and the fitted constant is the largest ratio. For D1
    data the algebraic slope of the proxy and of the lattice kernel sups on
    ``[1, t_end]`` are also reported.
    """
    if samples < 2:
        raise InvalidInputError("decay study needs at least two samples")
    os.makedirs(out_dir, exist_ok=True)
    grid = config.grid
    st0 = generate_initial(init, grid, config.sobolev_s)
    times = np.linspace(0.0, config.t_end, samples)
    w0, th0 = np.abs(st0.omega.coeffs), np.abs(st0.theta.coeffs)
    weight = np.abs(grid.k1) * grid.inv_ksq
    rows = []
    for t in times:
        st = linear_evolve(st0, t, config.nu, config.eta)
        proxy = float(np.abs(_u2_hat(grid, st.omega.coeffs)).sum())
        e1, e2 = envelope_arrays(grid.k1, grid.k2, t)
        env_modes = weight * (np.nan_to_num(e1) * w0 + np.nan_to_num(e2) * th0)
        env = float(env_modes.sum())
        ratio = proxy / env if env > 0 else (0.0 if proxy == 0 else float("inf"))
        rows.append((float(t), proxy, env, ratio))
    write_csv(os.path.join(out_dir, "decay.csv"), DECAY_COLUMNS, rows)
    arr = np.array([r[:3] for r in rows])
    summary = {"region": init.region, "fitted_constant": max(r[3] for r in rows),
               "proxy_initial": float(arr[0, 1]), "proxy_final": float(arr[-1, 1])}
    late = (times >= 1.0) & (arr[:, 1] > 0)
    if late.sum() >= 2:
        summary["proxy_slope"] = loglog_slope(times[late], arr[late, 1])
    if init.region == "D1" and config.t_end > 1:
        bound = lattice_bound or grid.mask_cutoff
        tk = np.geomspace(1.0, config.t_end, 25)
        s1, s2 = kernel_decay_profile(bound, tk, "D1")
        summary["kernel_slope_m1"] = loglog_slope(tk, s1)
        summary["kernel_slope_m2"] = loglog_slope(tk, s2)
    return RunResult("completed", ["decay.csv"], summary)


# --- kernel tables -------------------------------------------------------------

KERNEL_COLUMNS = ("xi1", "xi2", "region", "t",
                  "re_m1", "im_m1", "re_m2", "im_m2", "re_m3", "im_m3", "re_m4", "im_m4",
                  "envelope_m1", "envelope_m2", "ratio_m1", "ratio_m2")

FAULTS = ("m2_sign",)


def kernel_table(lattice_bound: int, times, fault: str | None = None):
    """Tabulate the propagator on the lattice and check it against the oracle.

    ``fault="m2_sign"`` flips the sign of ``M2`` before the check; it exists so
    the oracle comparison can be shown to catch a wrong kernel.
    Returns ``(rows, max_oracle_error)``.
    """
    if lattice_bound < 1:
        raise InvalidInputError("lattice must be nonempty")
    times = [float(t) for t in times]
    if not times:
        raise InvalidInputError("need at least one time")
    if any(t < 0 for t in times):
        raise InvalidInputError("times must be nonnegative")
    if fault is not None and fault not in FAULTS:
        raise InvalidInputError(f"unknown fault {fault!r}")
    xi1, xi2 = lattice(lattice_bound)
    codes = region_codes(xi1, xi2)
    rows, worst = [], 0.0
    for t in times:
        m = list(propagator_arrays(xi1, xi2, t))
        if fault == "m2_sign":
            m[1] = -m[1]
        ref = oracle_arrays(xi1, xi2, t)
        worst = max(worst, float(np.max(balanced_error(xi1, xi2, m, ref))))
        e1, e2 = envelope_arrays(xi1, xi2, t)
        r1 = np.abs(m[0]) / np.where(e1 > 0, e1, np.inf)
        r2 = np.abs(m[1]) / np.where(e2 > 0, e2, np.inf)
        for j in range(xi1.size):
            rows.append((float(xi1[j]), float(xi2[j]), REGIONS[codes[j]], t,
                         *(float(v) for k in range(4) for v in (m[k][j].real, m[k][j].imag)),
                         float(e1[j]), float(e2[j]), float(r1[j]), float(r2[j])))
    return rows, worst


def run_kernels(lattice_bound: int, times, out_dir, fault: str | None = None) -> RunResult:
    os.makedirs(out_dir, exist_ok=True)
    rows, worst = kernel_table(lattice_bound, times, fault)
    write_csv(os.path.join(out_dir, "kernels.csv"), KERNEL_COLUMNS, rows)
    status = "completed" if worst <= ORACLE_TOL else "oracle_mismatch"
    return RunResult(status, ["kernels.csv"], {"max_oracle_error": worst, "rows": len(rows)})


# --- identity battery ----------------------------------------------------------

IDENTITY_COLUMNS = ("identity", "seed", "n", "residual", "scale", "relative", "passed")


def run_identities(seeds, sizes, out_dir, s: int = 5) -> RunResult:
    os.makedirs(out_dir, exist_ok=True)
    rows = run_identity_battery(seeds, sizes, s)
    out = [(name, seed, n, res, sc, res / sc if sc > 0 else 0.0, int(ok))
           for name, seed, n, res, sc, ok in rows]
    write_csv(os.path.join(out_dir, "identities.csv"), IDENTITY_COLUMNS, out)
    failed = sum(1 for r in out if not r[-1])
    worst = {}
    for name, _, _, _, _, rel, _ in out:
        worst[name] = max(worst.get(name, 0.0), rel)
    status = "completed" if failed == 0 else "identity_failure"
    return RunResult(status, ["identities.csv"], {"failed": failed, "worst_relative": worst})


def config_snapshot(config: SolverConfig, init: InitialDataSpec | None = None) -> dict:
    doc = {"solver": asdict(config)}
    if init is not None:
        doc["init"] = asdict(init)
    return doc
