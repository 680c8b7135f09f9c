"""Integrating-factor Runge-Kutta integration of the damped Boussinesq system.

The buoyancy coupling ``d1 theta``, the back-reaction ``-u2`` and the damping
all sit in the per-mode linear operator, which is applied exactly through
:func:`bdsim.semigroup.propagator_arrays`. Only the transport terms
``G = -u.grad omega`` and ``H = -u.grad theta`` are integrated numerically.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationFailure, InvalidInputError
from .functionals import FunctionalLedger
from .grid import FourierGrid, SpectralField, fft2, ifft2, resample_coeffs
from .norms import sobolev_seminorm_sq
from .semigroup import region_codes, REGIONS, propagator_arrays
from .state import FlowState

__all__ = ["SolverConfig", "InitialDataSpec", "Stepper", "nonlinear_rhs", "step",
           "simulate", "generate_initial", "initial_A"]

log = logging.getLogger(__name__)

INTEGRATORS = ("IFRK2", "IFRK4")


@dataclass(frozen=True)
class SolverConfig:
    n: int = 64
    period: float = 2 * np.pi
    dt: float | None = 1e-2
    cfl: float | None = None
    t_end: float = 1.0
    nu: float = 1.0
    eta: float = 0.0
    sobolev_s: int = 5
    integrator: str = "IFRK4"
    dealias: str = "masked"
    diagnostics_stride: int = 1
    nonlinear: bool = True
    e2_index: float = -2.0
    quartic_diagnostics: bool = True

    def __post_init__(self):
        if self.dt is None and self.cfl is None:
            raise InvalidInputError("one of dt or cfl is required")
        if self.dt is not None and not self.dt > 0:
            raise InvalidInputError("dt must be positive")
        if self.cfl is not None and not 0 < self.cfl <= 1:
            raise InvalidInputError("cfl must lie in (0, 1]")
        if self.t_end < 0:
            raise InvalidInputError("t_end must be nonnegative")
        if not self.nu > 0:
            raise InvalidInputError("nu must be positive")
        if self.eta < 0:
            raise InvalidInputError("eta must be nonnegative")
        if int(self.sobolev_s) != self.sobolev_s or self.sobolev_s < 5:
            raise InvalidInputError("sobolev_s must be an integer >= 5")
        if self.integrator not in INTEGRATORS:
            raise InvalidInputError(f"integrator must be one of {INTEGRATORS}")
        if self.dealias not in ("masked", "padded"):
            raise InvalidInputError("dealias must be 'masked' or 'padded'")
        if int(self.diagnostics_stride) != self.diagnostics_stride or self.diagnostics_stride < 1:
            raise InvalidInputError("diagnostics_stride must be a positive integer")

    @property
    def grid(self) -> FourierGrid:
        return FourierGrid(self.n, self.period)


@dataclass(frozen=True)
class InitialDataSpec:
    kind: str = "random_band"
    amplitude: float = 1e-3
    seed: int = 0
    band: tuple = (1, 4)
    spectral_decay: float = 0.0
    mode: tuple = (1, 1)
    region: str | None = None  # D1 | D2 | D3 | xi1_zero
    path: str | None = None

    def __post_init__(self):
        if self.kind not in ("single_mode", "random_band", "file"):
            raise InvalidInputError(f"unknown initial data kind {self.kind!r}")
        if self.amplitude < 0:
            raise InvalidInputError("amplitude must be nonnegative")
        if self.kind == "file" and not self.path:
            raise InvalidInputError("file initial data needs a path")
        if self.region not in (None, "D1", "D2", "D3", "xi1_zero"):
            raise InvalidInputError(f"unknown region {self.region!r}")


def initial_A(state: FlowState, s: int) -> float:
    """``||omega||^2_{bbH^s} + ||theta||^2_{calH^{s+1}}``."""
    w, th = state.omega, state.theta
    return (sobolev_seminorm_sq(w, -2) + sobolev_seminorm_sq(w, s)
            + sobolev_seminorm_sq(th, -1) + sobolev_seminorm_sq(th, s + 1))


def _region_select(grid: FourierGrid, region: str | None) -> np.ndarray:
    if region is None:
        return np.ones((grid.n, grid.n), bool)
    if region == "xi1_zero":
        return grid.m1 == 0
    return region_codes(grid.k1, grid.k2) == REGIONS.index(region)


def generate_initial(spec: InitialDataSpec, grid: FourierGrid, s: int = 5) -> FlowState:
    """Deterministic, mean-zero, Hermitian, band-limited data with ``A(0) = amplitude^2``."""
    if spec.kind == "file":
        from .snapshot import read_snapshot
        snap_grid, fields, _ = read_snapshot(spec.path)
        if snap_grid != grid:
            raise InvalidInputError("snapshot grid does not match the configured grid")
        if len(fields) < 2:
            raise InvalidInputError("snapshot must hold omega and theta")
        st = FlowState.from_arrays(grid, fields[0], fields[1])
        return _project(st)
    mabs = np.hypot(grid.m1, grid.m2)
    if spec.kind == "single_mode":
        a, b = (int(v) for v in spec.mode)
        if a == 0 and b == 0:
            raise InvalidInputError("single mode must be nonzero")
        sel = (((grid.m1 == a) & (grid.m2 == b)) | ((grid.m1 == -a) & (grid.m2 == -b)))
        if not np.any(sel & grid.dealias_mask):
            raise InvalidInputError("single mode outside the resolved band")
        w = np.where(sel, 0.5, 0.0).astype(complex)
        th = w.copy()
    else:
        lo, hi = spec.band
        sel = (mabs >= lo) & (mabs <= hi) & grid.dealias_mask & _region_select(grid, spec.region)
        sel[0, 0] = False
        if not np.any(sel):
            raise InvalidInputError(f"band {spec.band} selects no resolved modes")
        rng = np.random.default_rng(spec.seed)
        shape = (2, grid.n, grid.n)
        raw = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        raw *= np.exp(-spec.spectral_decay * mabs)
        raw = np.where(sel, raw, 0.0)
        w, th = raw[0], raw[1]
    state = _project(FlowState.from_arrays(grid, w, th))
    a0 = initial_A(state, s)
    if spec.amplitude == 0:
        return FlowState.zeros(grid)
    scale = spec.amplitude / np.sqrt(a0)
    return FlowState.from_arrays(grid, state.omega.coeffs * scale, state.theta.coeffs * scale)


def _project(state: FlowState) -> FlowState:
    w = state.omega.project_hermitian().project_mean_zero()
    th = state.theta.project_hermitian().project_mean_zero()
    return FlowState(w, th, state.time)


class Stepper:
    """Holds per-grid constants and cached propagator tables for one config."""

    def __init__(self, config: SolverConfig):
        self.config = config
        self.grid = g = config.grid
        self.mask = g.dealias_mask
        self.ik1 = 1j * g.k1
        self.ik2 = 1j * g.k2
        self.inv_ksq = g.inv_ksq
        self.flip = g.conj_index
        self._tables: dict[float, tuple] = {}
        self.rhs_evaluations = 0

    # -- transforms -------------------------------------------------------
    def _phys(self, c):
        if self.config.dealias == "masked":
            return ifft2(np.where(self.mask, c, 0.0))
        return ifft2(resample_coeffs(c, self.grid.padded_size))

    def _spec(self, v):
        if self.config.dealias == "masked":
            return np.where(self.mask, fft2(v), 0.0)
        return resample_coeffs(fft2(v), self.grid.n)

    def nonlinear(self, w, th):
        """``(G_hat, H_hat) = -(u.grad omega, u.grad theta)``."""
        self.rhs_evaluations += 1
        if not self.config.nonlinear:
            return np.zeros_like(w), np.zeros_like(th)
        psi = w * self.inv_ksq
        u1 = self._phys(self.ik2 * psi)
        u2 = self._phys(-self.ik1 * psi)
        gw = u1 * self._phys(self.ik1 * w) + u2 * self._phys(self.ik2 * w)
        gt = u1 * self._phys(self.ik1 * th) + u2 * self._phys(self.ik2 * th)
        G = -self._spec(gw)
        H = -self._spec(gt)
        G[0, 0] = 0.0
        H[0, 0] = 0.0
        return G, H

    # -- linear propagation --------------------------------------------------
    def table(self, h: float):
        key = float(h)
        tab = self._tables.get(key)
        if tab is None:
            if len(self._tables) > 8:
                self._tables.clear()
            g = self.grid
            tab = propagator_arrays(g.k1, g.k2, h, self.config.nu, self.config.eta)
            self._tables[key] = tab
        return tab

    @staticmethod
    def apply(tab, w, th):
        m1, m2, m3, m4 = tab
        return m1 * w + m2 * th, m3 * w + m4 * th

    def project(self, w, th):
        f = self.flip
        w = 0.5 * (w + np.conj(w[f][:, f]))
        th = 0.5 * (th + np.conj(th[f][:, f]))
        w[0, 0] = 0.0
        th[0, 0] = 0.0
        return w, th

    def advance(self, w, th, h: float):
        E = self.table(h)
        N = self.nonlinear
        if self.config.integrator == "IFRK2":
            G1, H1 = N(w, th)
            aw, at = self.apply(E, w + h * G1, th + h * H1)
            G2, H2 = N(aw, at)
            bw, bt = self.apply(E, w + 0.5 * h * G1, th + 0.5 * h * H1)
            nw, nt = bw + 0.5 * h * G2, bt + 0.5 * h * H2
        else:
            Eh = self.table(0.5 * h)
            G1, H1 = N(w, th)
            ew, et = self.apply(Eh, w, th)
            a = self.apply(Eh, w + 0.5 * h * G1, th + 0.5 * h * H1)
            G2, H2 = N(*a)
            b = (ew + 0.5 * h * G2, et + 0.5 * h * H2)
            G3, H3 = N(*b)
            k3w, k3t = self.apply(Eh, G3, H3)
            fw, ft = self.apply(E, w, th)
            c = (fw + h * k3w, ft + h * k3t)
            G4, H4 = N(*c)
            e1w, e1t = self.apply(E, G1, H1)
            e23w, e23t = self.apply(Eh, G2 + G3, H2 + H3)
            nw = fw + h / 6 * (e1w + 2 * e23w + G4)
            nt = ft + h / 6 * (e1t + 2 * e23t + H4)
        return self.project(nw, nt)

    def cfl_dt(self, w) -> float:
        psi = w * self.inv_ksq
        speed = max(np.abs(self.ik2 * psi).sum(), np.abs(self.ik1 * psi).sum())
        return self.config.cfl * self.grid.dx / max(1.0, speed)


def nonlinear_rhs(state: FlowState, dealias: str = "padded") -> tuple[SpectralField, SpectralField]:
    """Transport terms ``G = -u.grad omega`` and ``H = -u.grad theta``."""
    cfg = SolverConfig(n=state.grid.n, period=state.grid.period, dealias=dealias)
    G, H = Stepper(cfg).nonlinear(state.omega.coeffs, state.theta.coeffs)
    grid = state.grid
    return SpectralField(grid, G, True, True), SpectralField(grid, H, True, True)


def _check_finite(w, th, t):
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(th))):
        raise IntegrationFailure(t)


def step(state: FlowState, dt: float, config: SolverConfig, stepper: Stepper | None = None) -> FlowState:
    """Advance one integrating-factor RK step of size ``dt``."""
    if not dt > 0:
        raise InvalidInputError("dt must be positive")
    _check_finite(state.omega.coeffs, state.theta.coeffs, state.time)
    stepper = stepper or Stepper(config)
    with np.errstate(over="ignore", invalid="ignore"):
        w, th = stepper.advance(state.omega.coeffs, state.theta.coeffs, dt)
    _check_finite(w, th, state.time + dt)
    return FlowState.from_arrays(state.grid, w, th, state.time + dt)


def simulate(config: SolverConfig, init: InitialDataSpec | FlowState, on_step=None):
    """Integrate from ``t = 0`` to ``config.t_end`` and record the ledger.

    Returns ``(final_state, ledger)``. On non-finite values the last finite
    state is returned and ``ledger.failure_time`` is set.
    """
    grid = config.grid
    state = init if isinstance(init, FlowState) else generate_initial(init, grid, config.sobolev_s)
    if state.grid != grid:
        raise InvalidInputError("initial state grid does not match config")
    ledger = FunctionalLedger(config.sobolev_s, config.nu, config.eta, config.e2_index,
                              config.quartic_diagnostics)
    ledger.record(state)
    stepper = Stepper(config)
    w, th = state.omega.coeffs.copy(), state.theta.coeffs.copy()
    t = float(state.time)
    t_end = float(config.t_end)
    nsteps = 0
    recorded = True
    eps = 1e-12 * max(1.0, t_end)
    while t < t_end - eps:
        h = config.dt if config.cfl is None else stepper.cfl_dt(w)
        if config.dt is not None and config.cfl is not None:
            h = min(h, config.dt)
        h = min(h, t_end - t)
        with np.errstate(over="ignore", invalid="ignore"):
            nw, nt = stepper.advance(w, th, h)
        if not (np.all(np.isfinite(nw)) and np.all(np.isfinite(nt))):
            ledger.failure_time = t + h
            log.warning("integration failure at t=%.6g", t + h)
            break
        w, th = nw, nt
        t = t + h if abs(t + h - t_end) > eps else t_end
        nsteps += 1
        recorded = False
        if nsteps % config.diagnostics_stride == 0:
            ledger.record(FlowState.from_arrays(grid, w, th, t))
            recorded = True
        if on_step is not None:
            on_step(t, w, th)
    final = FlowState.from_arrays(grid, w, th, t)
    if not recorded:
        ledger.record(final)
    return final, ledger
