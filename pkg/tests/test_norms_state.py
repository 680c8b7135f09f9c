import math

import numpy as np
import pytest

from bdsim.errors import InvalidInputError
from bdsim.grid import FourierGrid, SpectralField
from bdsim.norms import (NormSpec, hs_inner, l2_norm, linf_proxy, sobolev_norm,
                         sobolev_seminorm_sq, space_norm)
from bdsim.state import FlowState

L2 = (2 * math.pi) ** 2


@pytest.fixture
def wave():
    g = FourierGrid(32)
    # cos(3x + 4y): |k| = 5, ||f||^2 = L^2 / 2
    return SpectralField.from_function(g, lambda x, y: np.cos(3 * x + 4 * y), mean_zero=True)


def test_seminorms_of_single_wave(wave):
    assert sobolev_seminorm_sq(wave, 0) == pytest.approx(L2 / 2)
    assert sobolev_seminorm_sq(wave, 2) == pytest.approx(625 * L2 / 2)
    assert sobolev_seminorm_sq(wave, -1) == pytest.approx(L2 / 50)
    assert sobolev_seminorm_sq(wave, 1, "partial_x1") == pytest.approx(9 * 25 * L2 / 2)


def test_homogeneous_and_inhomogeneous(wave):
    base = math.sqrt(L2 / 2)
    assert sobolev_norm(wave, 1.0) == pytest.approx(5 * base)
    assert sobolev_norm(wave, NormSpec(1.0, homogeneous=False)) == pytest.approx(6 * base)
    assert space_norm(wave, "calH", 2) == pytest.approx(base * math.sqrt(1 / 25 + 625))
    assert space_norm(wave, "bbH", 2) == pytest.approx(base * math.sqrt(1 / 625 + 625))
    with pytest.raises(InvalidInputError):
        space_norm(wave, "bogus", 1)
    with pytest.raises(InvalidInputError):
        NormSpec(1.0, variant="x2")


def test_negative_order_needs_mean_zero():
    g = FourierGrid(16)
    f = SpectralField.from_function(g, lambda x, y: 1.0 + np.cos(x))
    with pytest.raises(InvalidInputError):
        sobolev_seminorm_sq(f, -1)
    assert sobolev_seminorm_sq(f.project_mean_zero(), -1) == pytest.approx(L2 / 2)


def test_linf_proxy_bounds_max(rng):
    g = FourierGrid(32)
    c = rng.standard_normal((32, 32)) + 1j * rng.standard_normal((32, 32))
    f = SpectralField(g, c).project_hermitian()
    assert np.abs(f.to_real()).max() <= linf_proxy(f) * (1 + 1e-12)


def test_hs_inner_symmetric(rng, wave):
    other = SpectralField.from_function(wave.grid, lambda x, y: np.cos(3 * x + 4 * y) + np.sin(x), True)
    assert hs_inner(wave, other, 1.5) == pytest.approx(hs_inner(other, wave, 1.5))
    assert hs_inner(wave, wave, 1.0) == pytest.approx(sobolev_seminorm_sq(wave, 1.0))
    assert l2_norm(wave) ** 2 == pytest.approx(hs_inner(wave, wave, 0.0))


def test_flow_state_basics():
    g = FourierGrid(16)
    st = FlowState.zeros(g)
    assert st.is_finite() and st.distance(st.copy()) == 0
    x1, x2 = g.points()
    assert np.allclose(st.temperature(), x2)
    with pytest.raises(InvalidInputError):
        FlowState(SpectralField.zeros(g), SpectralField.zeros(FourierGrid(32)))
    with pytest.raises(InvalidInputError):
        FlowState(SpectralField.zeros(g), SpectralField.zeros(g), time=-1.0)
