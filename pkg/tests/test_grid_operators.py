import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bdsim.errors import InvalidInputError
from bdsim.grid import FourierGrid, SpectralField, resample_coeffs
from bdsim.norms import l2_norm
from bdsim.operators import (advection, apply_fractional_laplacian, biot_savart,
                             dealiased_product, derivative, inner, integrate_product,
                             multiplier_power)


def random_masked(grid, rng, decay=0.0):
    c = rng.standard_normal((grid.n, grid.n)) + 1j * rng.standard_normal((grid.n, grid.n))
    c *= np.exp(-decay * np.hypot(grid.m1, grid.m2))
    c = np.where(grid.dealias_mask, c, 0.0)
    c[0, 0] = 0.0
    f = SpectralField(grid, c, True, True).project_hermitian()
    return f


def direct_product(f, g):
    """O(N^4) convolution over integer wavenumbers, no aliasing."""
    n = f.grid.n
    m = f.grid.m1d.astype(int)
    out = {}
    nz_f = [(i, j) for i in range(n) for j in range(n) if f.coeffs[i, j] != 0]
    nz_g = [(i, j) for i in range(n) for j in range(n) if g.coeffs[i, j] != 0]
    for i, j in nz_f:
        for a, b in nz_g:
            key = (m[i] + m[a], m[j] + m[b])
            out[key] = out.get(key, 0.0) + f.coeffs[i, j] * g.coeffs[a, b]
    return out


# --- grid ---------------------------------------------------------------------

def test_grid_rejects_bad_sizes():
    for n in (4, 7, 33):
        with pytest.raises(InvalidInputError):
            FourierGrid(n)


def test_mask_cutoff_strict_rule():
    for n in (8, 10, 12, 32, 48, 64):
        g = FourierGrid(n)
        k = g.mask_cutoff
        assert 3 * k < n <= 3 * (k + 1)
        kept = np.abs(g.m1[g.dealias_mask]).max()
        assert kept == k


def test_roundtrip_and_parseval(grid, rng):
    v = rng.standard_normal((grid.n, grid.n))
    f = SpectralField.from_real(grid, v)
    assert np.allclose(f.to_real(), v, atol=1e-13)
    assert np.isclose(l2_norm(f) ** 2, np.sum(v ** 2) * grid.dx ** 2, rtol=1e-12)


def test_resample_roundtrip(rng):
    g = FourierGrid(16)
    f = random_masked(g, rng)
    up = resample_coeffs(f.coeffs, 40)
    assert np.allclose(resample_coeffs(up, 16), f.coeffs, atol=1e-15)


def test_resample_nyquist_split_keeps_real():
    g = FourierGrid(8)
    x1, x2 = g.points()
    f = SpectralField.from_real(g, np.cos(4 * x1))
    up = resample_coeffs(f.coeffs, 16)
    fine = FourierGrid(16)
    val = SpectralField(fine, up).to_real()
    y1, _ = fine.points()
    assert np.allclose(val, np.cos(4 * y1), atol=1e-13)


# --- operators ----------------------------------------------------------------

def test_derivative_of_trig(grid):
    f = SpectralField.from_function(grid, lambda x, y: np.sin(2 * x) * np.cos(3 * y))
    x, y = grid.points()
    assert np.allclose(derivative(f, 1).to_real(), 2 * np.cos(2 * x) * np.cos(3 * y), atol=1e-12)
    assert np.allclose(derivative(f, 2).to_real(), -3 * np.sin(2 * x) * np.sin(3 * y), atol=1e-12)
    with pytest.raises(InvalidInputError):
        derivative(f, 3)


def test_large_period_wavenumbers():
    g = FourierGrid(16, period=20.0)
    f = SpectralField.from_function(g, lambda x, y: np.sin(2 * np.pi * x / 20.0))
    x, _ = g.points()
    assert np.allclose(derivative(f, 1).to_real(), 2 * np.pi / 20 * np.cos(2 * np.pi * x / 20), atol=1e-12)


def test_fractional_laplacian(grid):
    f = SpectralField.from_function(grid, lambda x, y: np.cos(3 * x + 4 * y), mean_zero=True)
    assert np.allclose(apply_fractional_laplacian(f, 1.0).to_real(), 5 * f.to_real(), atol=1e-12)
    back = apply_fractional_laplacian(apply_fractional_laplacian(f, 2.5), -2.5)
    assert np.allclose(back.coeffs, f.coeffs, atol=1e-15)
    with pytest.raises(InvalidInputError):
        apply_fractional_laplacian(SpectralField.from_function(grid, lambda x, y: 1 + x * 0), -1)
    assert multiplier_power(grid, 0.0)[0, 0] == 1.0
    assert multiplier_power(grid, 1.0)[0, 0] == 0.0


def test_biot_savart_divergence_free_and_curl(rng):
    g = FourierGrid(32)
    w = random_masked(g, rng)
    u1, u2 = biot_savart(w)
    div = derivative(u1, 1) + derivative(u2, 2)
    curl = derivative(u2, 1) - derivative(u1, 2)
    assert np.abs(div.coeffs).max() < 1e-14
    assert np.allclose(curl.coeffs, w.coeffs, atol=1e-14)


def test_biot_savart_orientation():
    g = FourierGrid(16)
    # omega = cos x1 -> psi = Lambda^-2 omega = cos x1, u = (d2 psi, -d1 psi) = (0, sin x1)
    w = SpectralField.from_function(g, lambda x, y: np.cos(x), mean_zero=True)
    u1, u2 = biot_savart(w)
    x, _ = g.points()
    assert np.abs(u1.to_real()).max() < 1e-14
    assert np.allclose(u2.to_real(), np.sin(x), atol=1e-14)


@pytest.mark.parametrize("n", [8, 12, 16])
def test_padded_product_matches_direct_convolution(n, rng):
    g = FourierGrid(n)
    f, h = random_masked(g, rng), random_masked(g, rng)
    got = dealiased_product(f, h, "padded").coeffs
    ref = direct_product(f, h)
    m = g.m1d.astype(int)
    for i in range(n):
        for j in range(n):
            if abs(m[i]) == n // 2 or abs(m[j]) == n // 2:
                continue
            assert abs(got[i, j] - ref.get((m[i], m[j]), 0.0)) < 1e-13


def test_masked_equals_padded_on_retained_modes(rng):
    g = FourierGrid(32)
    f, h = random_masked(g, rng), random_masked(g, rng)
    a = dealiased_product(f, h, "padded").coeffs
    b = dealiased_product(f, h, "masked").coeffs
    mask = g.dealias_mask
    assert np.abs(a - b)[mask].max() < 1e-14 * np.abs(a).max()
    assert np.all(b[~mask] == 0)


def test_masked_vs_padded_with_decaying_spectrum(rng):
    g = FourierGrid(64)
    c = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
    c *= np.exp(-np.hypot(g.m1, g.m2))
    f = SpectralField(g, c, True, False).project_hermitian()
    a = dealiased_product(f, f, "padded")
    b = dealiased_product(f, f, "masked")
    assert l2_norm(a - b) / l2_norm(a) < 1e-3


def test_dealias_mode_validation(rng):
    g = FourierGrid(16)
    f = random_masked(g, rng)
    with pytest.raises(InvalidInputError):
        dealiased_product(f, f, "bogus")
    with pytest.raises(InvalidInputError):
        dealiased_product(f, random_masked(FourierGrid(32), rng))


def test_advection_of_own_stream_function_vanishes(rng):
    g = FourierGrid(32)
    w = random_masked(g, rng)
    u1, u2 = biot_savart(w)
    psi = apply_fractional_laplacian(w, -2)
    assert np.abs(advection(u1, u2, psi).coeffs).max() < 1e-13 * max(1.0, np.abs(w.coeffs).max())


def test_integrate_product_trig():
    g = FourierGrid(16)
    c = SpectralField.from_function(g, lambda x, y: np.cos(x + y))
    # int cos^4 over the torus = (3/8) (2 pi)^2
    assert np.isclose(integrate_product(c, c, c, c), 3 / 8 * (2 * np.pi) ** 2, rtol=1e-13)
    assert np.isclose(integrate_product(c, c), inner(c, c), rtol=1e-13)


def test_integrate_product_exact_at_top_modes(rng):
    g = FourierGrid(16)
    fields = [random_masked(g, rng) for _ in range(3)]
    direct = direct_product(fields[0], fields[1])
    m = g.m1d.astype(int)
    # int f g h = L^2 sum_k (fg)_k h_{-k}
    total = 0.0
    for i in range(16):
        for j in range(16):
            total += direct.get((-m[i], -m[j]), 0.0) * fields[2].coeffs[i, j]
    assert np.isclose(integrate_product(*fields), (2 * np.pi) ** 2 * total.real, rtol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.sampled_from([8, 16, 24]))
def test_product_commutes_and_is_real(seed, n):
    rng = np.random.default_rng(seed)
    g = FourierGrid(n)
    f, h = random_masked(g, rng), random_masked(g, rng)
    a = dealiased_product(f, h).coeffs
    b = dealiased_product(h, f).coeffs
    assert np.allclose(a, b, atol=1e-14)
    assert SpectralField(g, a).hermitian_defect() < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_transport_is_skew(seed):
    rng = np.random.default_rng(seed)
    g = FourierGrid(16)
    w, f = random_masked(g, rng), random_masked(g, rng)
    u1, u2 = biot_savart(w)
    val = integrate_product(u1, derivative(f, 1), f) + integrate_product(u2, derivative(f, 2), f)
    scale = l2_norm(u1) * l2_norm(derivative(f, 1)) * l2_norm(f) + 1e-300
    assert abs(val) / scale < 1e-12
