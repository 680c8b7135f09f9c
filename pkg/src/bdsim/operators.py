"""Fourier multipliers, Biot-Savart inversion and dealiased products."""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .grid import FourierGrid, SpectralField, fft2, ifft2, resample_coeffs

__all__ = [
    "apply_fractional_laplacian", "derivative", "biot_savart", "dealiased_product",
    "advection", "integrate_product", "inner", "multiplier_power",
]


def multiplier_power(grid: FourierGrid, alpha: float) -> np.ndarray:
    """``|k|^alpha`` with the zero mode set to 0 (and to 1 when alpha == 0)."""
    if alpha == 0:
        return np.ones_like(grid.ksq)
    out = np.zeros_like(grid.ksq)
    nz = grid.ksq > 0
    out[nz] = grid.kabs[nz] ** alpha
    return out


def apply_fractional_laplacian(f: SpectralField, alpha: float) -> SpectralField:
    """Apply ``Lambda^alpha``: multiply each coefficient by ``|k|^alpha``.

    The zero mode is annihilated for every ``alpha != 0``. Negative orders
    require a mean-zero field.
    """
    if alpha < 0 and not f.is_mean_zero:
        raise InvalidInputError("negative-order Lambda needs a mean-zero field")
    if alpha == 0:
        return f.copy()
    return f.like(f.coeffs * multiplier_power(f.grid, alpha), is_mean_zero=True)


def derivative(f: SpectralField, axis: int) -> SpectralField:
    """Spectral partial derivative along ``axis`` (1 or 2)."""
    if axis not in (1, 2):
        raise InvalidInputError(f"axis must be 1 or 2, got {axis}")
    k = f.grid.k1 if axis == 1 else f.grid.k2
    return f.like(1j * k * f.coeffs, is_mean_zero=True)


def biot_savart(omega: SpectralField) -> tuple[SpectralField, SpectralField]:
    """Velocity ``u = grad^perp Lambda^{-2} omega`` with ``grad^perp = (d2, -d1)``."""
    if not omega.is_mean_zero:
        raise InvalidInputError("Biot-Savart inversion needs a mean-zero vorticity")
    g = omega.grid
    psi = omega.coeffs * g.inv_ksq
    u1 = omega.like(1j * g.k2 * psi, is_mean_zero=True)
    u2 = omega.like(-1j * g.k1 * psi, is_mean_zero=True)
    return u1, u2


def _padded_product_coeffs(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    n = a.shape[0]
    pa = ifft2(resample_coeffs(a, m))
    pb = ifft2(resample_coeffs(b, m))
    return resample_coeffs(fft2(pa * pb), n)


def _masked_product_coeffs(a: np.ndarray, b: np.ndarray, mask: np.ndarray) -> np.ndarray:
    prod = fft2(ifft2(np.where(mask, a, 0.0)) * ifft2(np.where(mask, b, 0.0)))
    return np.where(mask, prod, 0.0)


def dealiased_product(f: SpectralField, g: SpectralField, mode: str = "padded") -> SpectralField:
    """Pointwise product ``f g`` returned on the native grid.

    ``padded`` evaluates on a ``3N/2`` grid and truncates, which is exact for
    inputs supported on the two-thirds mask. ``masked`` masks both inputs,
    multiplies on the native grid and masks the result.
    """
    if f.grid != g.grid:
        raise InvalidInputError("fields live on different grids")
    if mode == "padded":
        c = _padded_product_coeffs(f.coeffs, g.coeffs, f.grid.padded_size)
    elif mode == "masked":
        c = _masked_product_coeffs(f.coeffs, g.coeffs, f.grid.dealias_mask)
    else:
        raise InvalidInputError(f"unknown dealias mode {mode!r}")
    return SpectralField(f.grid, c, f.is_real and g.is_real, False)


def advection(u1: SpectralField, u2: SpectralField, f: SpectralField,
              mode: str = "padded") -> SpectralField:
    """Coefficients of ``u1 d1 f + u2 d2 f``."""
    if not (u1.grid == u2.grid == f.grid):
        raise InvalidInputError("fields live on different grids")
    out = (dealiased_product(u1, derivative(f, 1), mode)
           + dealiased_product(u2, derivative(f, 2), mode))
    return out


def inner(f: SpectralField, g: SpectralField) -> float:
    """L^2 inner product ``(f|g)`` of two real fields via Parseval."""
    if f.grid != g.grid:
        raise InvalidInputError("fields live on different grids")
    return float(f.grid.period ** 2 * np.real(np.vdot(g.coeffs, f.coeffs)))


def integrate_product(*fields: SpectralField) -> float:
    """Exact ``int f_1 ... f_p dx`` for real trigonometric polynomials.

    Each factor is zero-padded to a grid fine enough that the sample mean of
    the product equals its zero-mode coefficient.
    """
    if not fields:
        raise InvalidInputError("need at least one field")
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise InvalidInputError("fields live on different grids")
    p = len(fields)
    m = p * (grid.n // 2) + 2
    m += m % 2
    prod = np.ones((m, m))
    for f in fields:
        prod = prod * ifft2(resample_coeffs(f.coeffs, m))
    return float(grid.period ** 2 * prod.mean())
