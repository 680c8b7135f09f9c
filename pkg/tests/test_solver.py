import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bdsim.errors import IntegrationFailure, InvalidInputError
from bdsim.experiments import linear_evolve
from bdsim.grid import FourierGrid, SpectralField
from bdsim.solver import (InitialDataSpec, SolverConfig, Stepper, generate_initial, initial_A,
                          nonlinear_rhs, simulate, step)
from bdsim.state import FlowState


def quiet(**kw):
    base = dict(n=32, dt=0.05, t_end=0.5, quartic_diagnostics=False)
    base.update(kw)
    return SolverConfig(**base)


@pytest.mark.parametrize("kw", [
    dict(dt=None, cfl=None), dict(dt=-1.0), dict(cfl=2.0), dict(t_end=-1.0), dict(nu=0.0),
    dict(eta=-0.1), dict(sobolev_s=4), dict(integrator="RK4"), dict(dealias="none"),
    dict(diagnostics_stride=0), dict(n=31),
])
def test_config_validation(kw):
    with pytest.raises(InvalidInputError):
        quiet(**kw).grid


def test_initial_data_properties():
    g = FourierGrid(32)
    st0 = generate_initial(InitialDataSpec(amplitude=1e-3, seed=4), g)
    assert initial_A(st0, 5) == pytest.approx(1e-6, rel=1e-12)
    assert st0.omega.hermitian_defect() < 1e-15 and st0.omega.coeffs[0, 0] == 0
    mabs = np.hypot(g.m1, g.m2)
    support = (np.abs(st0.omega.coeffs) > 0) | (np.abs(st0.theta.coeffs) > 0)
    assert mabs[support].max() <= 4 and mabs[support].min() >= 1
    again = generate_initial(InitialDataSpec(amplitude=1e-3, seed=4), g)
    assert again.distance(st0) == 0.0
    other = generate_initial(InitialDataSpec(amplitude=1e-3, seed=5), g)
    assert other.distance(st0) > 0


@pytest.mark.parametrize("region,code", [("D1", 0), ("D2", 1), ("D3", 2)])
def test_region_localized_data(region, code):
    from bdsim.semigroup import region_codes
    g = FourierGrid(64)
    st0 = generate_initial(InitialDataSpec(region=region, band=(1, 20)), g)
    nz = np.abs(st0.omega.coeffs) > 0
    assert np.all(region_codes(g.k1[nz], g.k2[nz]) == code)


def test_initial_data_errors():
    g = FourierGrid(16)
    with pytest.raises(InvalidInputError):
        generate_initial(InitialDataSpec(band=(30, 40)), g)
    with pytest.raises(InvalidInputError):
        generate_initial(InitialDataSpec(kind="single_mode", mode=(0, 0)), g)
    with pytest.raises(InvalidInputError):
        InitialDataSpec(kind="file")
    with pytest.raises(InvalidInputError):
        InitialDataSpec(region="D4")


def test_linear_solver_is_exact():
    cfg = quiet(nonlinear=False, dt=0.1, t_end=2.0)
    st0 = generate_initial(InitialDataSpec(amplitude=1.0, seed=2), cfg.grid)
    final, _ = simulate(cfg, st0)
    ref = linear_evolve(st0, 2.0)
    assert final.distance(ref) <= 1e-12 * np.abs(st0.omega.coeffs).max()


def test_shear_equilibrium_family():
    # x2-only data: transport vanishes, omega decays at rate nu, theta is frozen
    g = FourierGrid(32)
    w = SpectralField.from_function(g, lambda x, y: np.cos(y) + 0.3 * np.sin(2 * y), True)
    th = SpectralField.from_function(g, lambda x, y: 0.5 * np.cos(3 * y), True)
    st0 = FlowState(w, th)
    final, _ = simulate(quiet(dt=0.1, t_end=1.0), st0)
    assert np.allclose(final.omega.coeffs, w.coeffs * math.exp(-1.0), atol=1e-10)
    assert np.allclose(final.theta.coeffs, th.coeffs, atol=1e-10)


def test_nonlinear_rhs_modes_agree():
    g = FourierGrid(32)
    st0 = generate_initial(InitialDataSpec(amplitude=1.0, seed=1, band=(1, 8)), g)
    Gp, Hp = nonlinear_rhs(st0, "padded")
    Gm, Hm = nonlinear_rhs(st0, "masked")
    mask = g.dealias_mask
    assert np.abs(Gp.coeffs - Gm.coeffs)[mask].max() < 1e-12 * np.abs(Gp.coeffs).max()
    assert np.abs(Hp.coeffs - Hm.coeffs)[mask].max() < 1e-12 * np.abs(Hp.coeffs).max()


def test_padded_and_masked_runs_agree():
    init = InitialDataSpec(amplitude=1e-2, seed=7)
    a, _ = simulate(quiet(dealias="padded"), init)
    b, _ = simulate(quiet(dealias="masked"), init)
    assert a.distance(b) < 1e-8 * np.abs(a.omega.coeffs).max()


def test_step_matches_simulate():
    cfg = quiet(dt=0.05, t_end=0.05)
    st0 = generate_initial(InitialDataSpec(seed=3), cfg.grid)
    one = step(st0, 0.05, cfg)
    final, _ = simulate(cfg, st0)
    assert one.distance(final) == 0.0
    assert one.time == pytest.approx(0.05)
    with pytest.raises(InvalidInputError):
        step(st0, 0.0, cfg)


def test_step_rejects_nonfinite_state():
    cfg = quiet()
    bad = FlowState.zeros(cfg.grid)
    bad.omega.coeffs[1, 1] = np.nan
    with pytest.raises(IntegrationFailure):
        step(bad, 0.1, cfg)


def test_blowup_reports_failure_time():
    cfg = quiet(dt=0.5, t_end=5.0)
    final, ledger = simulate(cfg, InitialDataSpec(amplitude=1e6))
    assert ledger.status == "integration_failure"
    assert ledger.failure_time is not None and final.is_finite()
    assert final.time < ledger.failure_time


def test_cfl_stepping_reaches_end():
    cfg = SolverConfig(n=32, dt=None, cfl=0.5, t_end=0.3, quartic_diagnostics=False)
    final, ledger = simulate(cfg, InitialDataSpec(amplitude=1e-2))
    assert final.time == pytest.approx(0.3)
    assert ledger.rows[-1]["time"] == pytest.approx(0.3)


def test_diagnostics_stride_and_final_row():
    cfg = quiet(dt=0.1, t_end=0.45, diagnostics_stride=2)
    _, ledger = simulate(cfg, InitialDataSpec())
    times = ledger.column("time")
    assert times[0] == 0.0 and times[-1] == pytest.approx(0.45)
    assert len(times) == 4  # t = 0, 0.2, 0.4, 0.45


def test_propagator_tables_are_cached():
    stp = Stepper(quiet())
    assert stp.table(0.1) is stp.table(0.1)


def test_zero_amplitude_stays_zero():
    final, ledger = simulate(quiet(), InitialDataSpec(amplitude=0.0))
    assert np.all(final.omega.coeffs == 0) and ledger.rows[-1]["A"] == 0.0


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_real_mean_zero_preserved(seed):
    cfg = quiet(n=16, dt=0.1, t_end=0.3)
    final, _ = simulate(cfg, InitialDataSpec(amplitude=0.5, seed=seed, band=(1, 5)))
    assert final.omega.hermitian_defect() < 1e-14
    assert final.omega.coeffs[0, 0] == 0 and final.theta.coeffs[0, 0] == 0
