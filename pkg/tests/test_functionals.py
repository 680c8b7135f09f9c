import csv
import io
import math

import numpy as np
import pytest

from bdsim.errors import ResolutionWarning
from bdsim.functionals import (LEDGER_COLUMNS, FunctionalLedger, derived_frakM, derived_M,
                               functional_I1, functional_K_integrand, instantaneous,
                               resolution_limited)
from bdsim.grid import FourierGrid, SpectralField
from bdsim.state import FlowState

PI2 = math.pi ** 2


def trig_state(n, w_func, th_func):
    g = FourierGrid(n)
    return FlowState(SpectralField.from_function(g, w_func, True),
                     SpectralField.from_function(g, th_func, True))


# y = x1 + x2.
# omega = cos 2y, theta = cos y: u2 = sin(2y)/4, d2 u2 = cos(2y)/2, (d2^6 theta)^2 = cos^2 y
#   -> I1 = int cos(2y) cos^2(y) / 2 = pi^2 / 2, K = int u2 (-cos y) cos^2 y = 0
# omega = sin y, theta = cos y: u2 = -cos(y)/2
#   -> I1 = int sin(y) cos^2(y) / 2 = 0, K = int cos^4(y) / 2 = 3 pi^2 / 4

def test_I1_trig_oracle():
    st = trig_state(32, lambda x, y: np.cos(2 * (x + y)), lambda x, y: np.cos(x + y))
    assert functional_I1(st, 5) == pytest.approx(PI2 / 2, rel=1e-12)
    assert abs(functional_K_integrand(st, 5)) < 1e-12


def test_K_trig_oracle():
    st = trig_state(32, lambda x, y: np.sin(x + y), lambda x, y: np.cos(x + y))
    assert functional_K_integrand(st, 5) == pytest.approx(3 * PI2 / 4, rel=1e-12)
    assert abs(functional_I1(st, 5)) < 1e-12


def test_I1_odd_power_sign():
    # s = 6: (d2^7 cos y)^2 = sin^2 y -> I1 = int cos(2y) sin^2(y) / 2 = -pi^2 / 2
    st = trig_state(32, lambda x, y: np.cos(2 * (x + y)), lambda x, y: np.cos(x + y))
    assert functional_I1(st, 6) == pytest.approx(-PI2 / 2, rel=1e-12)


def test_resolution_flag_and_warning():
    g = FourierGrid(16)
    c = np.zeros((16, 16), complex)
    c[7, 0] = c[-7, 0] = 0.5  # outside the 2/3 mask
    th = SpectralField(g, c, True, True)
    st = FlowState(SpectralField.from_function(g, lambda x, y: np.cos(x), True), th)
    assert resolution_limited(th, 5)
    with pytest.warns(ResolutionWarning):
        functional_I1(st, 5)
    ok = trig_state(16, lambda x, y: np.cos(x), lambda x, y: np.cos(y))
    assert not resolution_limited(ok.theta, 5)


def test_instantaneous_single_mode_values():
    st = trig_state(16, lambda x, y: np.cos(x), lambda x, y: np.cos(y))
    L2 = (2 * math.pi) ** 2
    q = instantaneous(st, s=5)
    # ||cos||^2 = L^2/2 with |k| = 1 so every seminorm equals L^2/2
    assert q["A"] == pytest.approx(4 * L2 / 2)
    assert q["kinetic_L2sq"] == pytest.approx(L2 / 2)
    # theta = cos y has no x1 dependence: d1 theta = 0
    assert q["A1_integrand"] == pytest.approx(2 * L2 / 2)
    assert q["u2_linf_proxy"] == pytest.approx(1.0)
    assert q["resolution_flag"] == 0
    q2 = instantaneous(st, s=5, with_quartic=False)
    assert math.isnan(q2["I1"])


def test_derived_quantities():
    assert derived_M(1.0, 2.0) == pytest.approx(1 * (1 + 2 + 1 + 2))
    assert derived_M(0.0, 5.0) == 0.0
    assert derived_frakM(1.0, 1.0, 1.0) == pytest.approx(1 + 1 + 2 + 2)


def test_ledger_running_integrals_and_csv():
    g = FourierGrid(16)
    led = FunctionalLedger(s=5)
    w = SpectralField.from_function(g, lambda x, y: np.cos(x), True)
    th = SpectralField.from_function(g, lambda x, y: np.cos(y), True)
    for t in (0.0, 0.5, 1.0):
        scale = math.exp(-t)
        led.record(FlowState(w * scale, th, t))
    A1 = led.column("A1_running")
    assert A1[0] == 0.0
    integrand = [instantaneous(FlowState(w * math.exp(-t), th, t))["A1_integrand"]
                 for t in (0.0, 0.5, 1.0)]
    assert A1[-1] == pytest.approx(0.25 * (integrand[0] + 2 * integrand[1] + integrand[2]))
    assert led.status == "completed"
    text = led.to_csv()
    assert text.count("\r\n") == 4
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == LEDGER_COLUMNS
    assert float(rows[2][0]) == 0.5
    led.failure_time = 1.2
    assert led.status == "integration_failure"
    assert np.all(np.diff(led.column("A_sup")) >= 0)
