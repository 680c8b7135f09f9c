"""Energy functionals along a trajectory and the ledger that records them."""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ResolutionWarning
from .grid import SpectralField
from .norms import l2_norm, linf_proxy, sobolev_seminorm_sq
from .operators import biot_savart, derivative, integrate_product
from .state import FlowState

__all__ = [
    "functional_I1", "functional_K_integrand", "resolution_limited", "instantaneous",
    "FunctionalLedger", "LEDGER_COLUMNS", "LEDGER_SCHEMA_VERSION", "derived_M", "derived_frakM",
]

LEDGER_SCHEMA_VERSION = "1"
LEDGER_COLUMNS = (
    "time", "E", "E_sup", "E1_running", "E2_running", "A", "A_sup", "A1_running",
    "I1", "I1_running", "K_integrand", "K_running", "u2_linf_proxy", "u2_linf_43_running",
    "omega_Hneg2", "theta_Hneg1", "kinetic_L2sq", "theta_L2sq", "dissipation_running",
    "M", "frakM", "resolution_flag",
)

RESOLUTION_TAIL = 1e-8


def _d2(f: SpectralField, times: int) -> SpectralField:
    return f.like(f.coeffs * (1j * f.grid.k2) ** times, is_mean_zero=True)


def resolution_limited(theta: SpectralField, s: int) -> bool:
    """True when more than 1e-8 of theta's H^{s+1} mass sits outside the 2/3 mask."""
    w = theta.grid.ksq ** (s + 1) * np.abs(theta.coeffs) ** 2
    total = w.sum()
    if total == 0:
        return False
    return bool(w[~theta.grid.dealias_mask].sum() > RESOLUTION_TAIL * total)


def _warn_resolution(state: FlowState, s: int) -> None:
    if resolution_limited(state.theta, s):
        warnings.warn(f"theta under-resolved for {s + 1} derivatives at t={state.time:.4g}",
                      ResolutionWarning, stacklevel=3)


def functional_I1(state: FlowState, s: int) -> float:
    """``int d2 u2 (d2^{s+1} theta)^2 dx``."""
    _warn_resolution(state, s)
    _, u2 = biot_savart(state.omega)
    top = _d2(state.theta, s + 1)
    return integrate_product(derivative(u2, 2), top, top)


def functional_K_integrand(state: FlowState, s: int) -> float:
    """``int u2 d2^2 theta (d2^{s+1} theta)^2 dx`` (time-integrated in the ledger)."""
    _warn_resolution(state, s)
    _, u2 = biot_savart(state.omega)
    top = _d2(state.theta, s + 1)
    return integrate_product(u2, _d2(state.theta, 2), top, top)


def _inhom_sq(f: SpectralField, sigma: float) -> float:
    # ||f||_{H^sigma} = ||f||_{L^2} + ||Lambda^sigma f||_{L^2}
    return (l2_norm(f) + math.sqrt(sobolev_seminorm_sq(f, sigma))) ** 2


def instantaneous(state: FlowState, s: int = 5, nu: float = 1.0, eta: float = 0.0,
                  e2_index: float = -2.0, with_quartic: bool = True) -> dict:
    """All pointwise-in-time quantities entering the functionals."""
    w, th = state.omega, state.theta
    d1th = derivative(th, 1)
    w_m1 = sobolev_seminorm_sq(w, -1)
    w_m2 = sobolev_seminorm_sq(w, -2)
    w_s = sobolev_seminorm_sq(w, s)
    th_m1 = sobolev_seminorm_sq(th, -1)
    th_s1 = sobolev_seminorm_sq(th, s + 1)
    d1_m2 = sobolev_seminorm_sq(d1th, -2)
    d1_s = sobolev_seminorm_sq(d1th, s)
    _, u2 = biot_savart(w)
    out = {
        "E": w_m1 + w_s + _inhom_sq(th, s + 1),
        "E1_integrand": w_m1 + w_s + _inhom_sq(d1th, s),
        "E2_integrand": sobolev_seminorm_sq(w, e2_index),
        "A": w_m2 + w_s + th_m1 + th_s1,
        "A1_integrand": w_m2 + w_s + d1_m2 + d1_s,
        "u2_linf_proxy": linf_proxy(u2),
        "omega_Hneg2": math.sqrt(w_m2),
        "theta_Hneg1": math.sqrt(th_m1),
        "kinetic_L2sq": w_m1,
        "theta_L2sq": sobolev_seminorm_sq(th, 0),
    }
    out["dissipation_integrand"] = nu * w_m1 + eta * out["theta_L2sq"]
    if with_quartic:
        flag = resolution_limited(th, s)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResolutionWarning)
            out["I1"] = functional_I1(state, s)
            out["K_integrand"] = functional_K_integrand(state, s)
        out["resolution_flag"] = int(flag)
    else:
        out["I1"] = float("nan")
        out["K_integrand"] = float("nan")
        out["resolution_flag"] = 0
    return out


def derived_M(E: float, E1: float) -> float:
    """``E^{1/2} (E + E1 + E^{3/2} + E E1)`` with unit constants."""
    return math.sqrt(E) * (E + E1 + E ** 1.5 + E * E1)


def derived_frakM(E: float, E1: float, E2: float) -> float:
    """The bound for the time integral of ``||u2||_inf^{4/3}`` with unit constants."""
    a = math.sqrt(E1) + math.sqrt(E2)
    return math.sqrt(E) + E1 + a * math.sqrt(E1) + a * E ** 0.25 * E1 ** 0.25


_RUNNING = {
    "E1_running": "E1_integrand",
    "E2_running": "E2_integrand",
    "A1_running": "A1_integrand",
    "I1_running": "I1",
    "K_running": "K_integrand",
    "dissipation_running": "dissipation_integrand",
}


@dataclass
class FunctionalLedger:
    """Time series of the functionals with trapezoidal running integrals."""

    s: int = 5
    nu: float = 1.0
    eta: float = 0.0
    e2_index: float = -2.0
    with_quartic: bool = True
    rows: list = field(default_factory=list)
    failure_time: float | None = None
    _last: dict | None = None

    def record(self, state: FlowState) -> dict:
        q = instantaneous(state, self.s, self.nu, self.eta, self.e2_index, self.with_quartic)
        t = float(state.time)
        q["u2_43"] = q["u2_linf_proxy"] ** (4.0 / 3.0)
        row = {"time": t, "E": q["E"], "A": q["A"], "I1": q["I1"],
               "K_integrand": q["K_integrand"], "u2_linf_proxy": q["u2_linf_proxy"],
               "omega_Hneg2": q["omega_Hneg2"], "theta_Hneg1": q["theta_Hneg1"],
               "kinetic_L2sq": q["kinetic_L2sq"], "theta_L2sq": q["theta_L2sq"],
               "resolution_flag": q["resolution_flag"]}
        prev = self.rows[-1] if self.rows else None
        last = self._last
        dt = t - prev["time"] if prev else 0.0
        for col, key in _RUNNING.items():
            row[col] = (prev[col] + 0.5 * dt * (last[key] + q[key])) if prev else 0.0
        row["u2_linf_43_running"] = (
            prev["u2_linf_43_running"] + 0.5 * dt * (last["u2_43"] + q["u2_43"]) if prev else 0.0)
        row["E_sup"] = max(q["E"], prev["E_sup"]) if prev else q["E"]
        row["A_sup"] = max(q["A"], prev["A_sup"]) if prev else q["A"]
        row["M"] = derived_M(row["E_sup"], row["E1_running"])
        row["frakM"] = derived_frakM(row["E_sup"], row["E1_running"], row["E2_running"])
        self.rows.append(row)
        self._last = q
        return row

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=float)

    @property
    def status(self) -> str:
        if self.failure_time is not None:
            return "integration_failure"
        if any(r["resolution_flag"] for r in self.rows):
            return "resolution_flagged"
        return "completed"

    def K_total(self) -> float:
        """``|int_0^T K_integrand dt|`` at the last row."""
        return abs(self.rows[-1]["K_running"]) if self.rows else 0.0

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(LEDGER_COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r[c]) for c in LEDGER_COLUMNS])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))
