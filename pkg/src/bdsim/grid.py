"""Periodic Fourier lattice and spectral fields.

Coefficients are those of the Fourier series ``f(x) = sum_k f_hat(k) exp(i k.x)``
on the torus ``[0, L)^2``, so ``||f||_{L^2}^2 = L^2 sum_k |f_hat(k)|^2``.
Arrays are indexed ``[i1, i2]`` with axis 0 carrying ``x1``/``k1`` and axis 1
carrying ``x2``/``k2``, in the usual FFT ordering.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import InvalidInputError

__all__ = ["FourierGrid", "SpectralField", "set_fft_workers", "fft2", "ifft2",
           "resample_coeffs"]

_FFT_WORKERS = 1


def set_fft_workers(n: int) -> None:
    """Set the thread count used by every FFT in the package."""
    global _FFT_WORKERS
    _FFT_WORKERS = max(1, int(n))


def fft2(values: np.ndarray) -> np.ndarray:
    """Real-space samples -> Fourier-series coefficients."""
    n = values.shape[0]
    return sfft.fft2(values, workers=_FFT_WORKERS) / (n * n)


def ifft2(coeffs: np.ndarray) -> np.ndarray:
    """Fourier-series coefficients -> real-space samples (real part)."""
    n = coeffs.shape[0]
    return sfft.ifft2(coeffs, workers=_FFT_WORKERS).real * (n * n)


def _resample_axis(c: np.ndarray, m: int, axis: int) -> np.ndarray:
    n = c.shape[axis]
    if m == n:
        return c
    h = n // 2
    shape = list(c.shape)
    shape[axis] = m
    out = np.zeros(shape, dtype=complex)

    def sl(a, b):
        s = [slice(None)] * c.ndim
        s[axis] = slice(a, b)
        return tuple(s)

    def ix(i):
        s = [slice(None)] * c.ndim
        s[axis] = i
        return tuple(s)

    if m > n:
        # Nyquist row of the source is split evenly between +n/2 and -n/2.
        out[sl(0, h)] = c[sl(0, h)]
        out[sl(m - h + 1, m)] = c[sl(h + 1, n)]
        out[ix(h)] = 0.5 * c[ix(h)]
        out[ix(m - h)] = 0.5 * c[ix(h)]
    else:
        g = m // 2
        out[sl(0, g)] = c[sl(0, g)]
        out[sl(g + 1, m)] = c[sl(n - g + 1, n)]
        out[ix(g)] = c[ix(g)] + c[ix(n - g)]
    return out


def resample_coeffs(coeffs: np.ndarray, m: int) -> np.ndarray:
    """Zero-pad (m > N) or truncate (m < N) an N x N coefficient array.

    Padding splits the Nyquist coefficient so that the padded array represents
    the same real trigonometric interpolant; truncation folds the +-m/2 pair
    back together, so ``resample(resample(c, M), N) == c``.
    """
    if m % 2:
        raise InvalidInputError("resampled size must be even")
    out = _resample_axis(coeffs, m, 0)
    return _resample_axis(out, m, 1)


@dataclass(frozen=True)
class FourierGrid:
    """Square periodic lattice with ``n`` modes per axis on a torus of side ``period``."""

    n: int
    period: float = 2 * np.pi

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 8 or self.n % 2:
            raise InvalidInputError(f"modes_per_axis must be an even integer >= 8, got {self.n}")
        if not self.period > 0:
            raise InvalidInputError(f"period must be positive, got {self.period}")

    @property
    def modes_per_axis(self) -> int:
        return self.n

    @property
    def dx(self) -> float:
        return self.period / self.n

    @property
    def padded_size(self) -> int:
        return 3 * self.n // 2

    @property
    def mask_cutoff(self) -> int:
        """Largest retained |m| under the two-thirds rule (3*cutoff < n)."""
        return (self.n - 1) // 3

    @cached_property
    def m1d(self) -> np.ndarray:
        return np.fft.fftfreq(self.n, 1.0 / self.n).astype(int)

    @cached_property
    def m1(self) -> np.ndarray:
        return np.broadcast_to(self.m1d[:, None], (self.n, self.n))

    @cached_property
    def m2(self) -> np.ndarray:
        return np.broadcast_to(self.m1d[None, :], (self.n, self.n))

    def wavenumber(self, m):
        return 2 * np.pi / self.period * np.asarray(m)

    @cached_property
    def k1(self) -> np.ndarray:
        return self.wavenumber(self.m1)

    @cached_property
    def k2(self) -> np.ndarray:
        return self.wavenumber(self.m2)

    @cached_property
    def ksq(self) -> np.ndarray:
        return self.k1 ** 2 + self.k2 ** 2

    @cached_property
    def kabs(self) -> np.ndarray:
        return np.sqrt(self.ksq)

    @cached_property
    def inv_ksq(self) -> np.ndarray:
        """``1/|k|^2`` with the zero mode mapped to 0."""
        out = np.zeros_like(self.ksq)
        nz = self.ksq > 0
        out[nz] = 1.0 / self.ksq[nz]
        return out

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        c = self.mask_cutoff
        return (np.abs(self.m1) <= c) & (np.abs(self.m2) <= c)

    @cached_property
    def conj_index(self) -> np.ndarray:
        """Index map k -> -k along one axis."""
        return (-np.arange(self.n)) % self.n

    def flip(self, coeffs: np.ndarray) -> np.ndarray:
        """Return ``c(-k)`` for every lattice mode."""
        j = self.conj_index
        return coeffs[j][:, j]

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.n) * self.dx
        return np.meshgrid(x, x, indexing="ij")

    def with_size(self, n: int) -> "FourierGrid":
        return FourierGrid(n, self.period)


@dataclass
class SpectralField:
    """Fourier coefficients of one scalar field on a :class:`FourierGrid`."""

    grid: FourierGrid
    coeffs: np.ndarray
    is_real: bool = True
    is_mean_zero: bool = False

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (self.grid.n, self.grid.n):
            raise InvalidInputError(
                f"coefficient shape {self.coeffs.shape} does not match grid n={self.grid.n}")
        if self.is_mean_zero:
            self.coeffs[0, 0] = 0.0

    @classmethod
    def zeros(cls, grid: FourierGrid) -> "SpectralField":
        return cls(grid, np.zeros((grid.n, grid.n), complex), True, True)

    @classmethod
    def from_real(cls, grid: FourierGrid, values, mean_zero: bool = False) -> "SpectralField":
        values = np.broadcast_to(np.asarray(values, dtype=float), (grid.n, grid.n))
        return cls(grid, fft2(values), True, mean_zero)

    @classmethod
    def from_function(cls, grid: FourierGrid, func, mean_zero: bool = False) -> "SpectralField":
        x1, x2 = grid.points()
        return cls.from_real(grid, func(x1, x2), mean_zero)

    def to_real(self) -> np.ndarray:
        return ifft2(self.coeffs)

    def copy(self) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs.copy(), self.is_real, self.is_mean_zero)

    def like(self, coeffs, is_real=None, is_mean_zero=None) -> "SpectralField":
        return SpectralField(
            self.grid, coeffs,
            self.is_real if is_real is None else is_real,
            self.is_mean_zero if is_mean_zero is None else is_mean_zero,
        )

    def mean(self) -> complex:
        return self.coeffs[0, 0]

    def project_mean_zero(self) -> "SpectralField":
        c = self.coeffs.copy()
        c[0, 0] = 0.0
        return self.like(c, is_mean_zero=True)

    def project_hermitian(self) -> "SpectralField":
        c = 0.5 * (self.coeffs + np.conj(self.grid.flip(self.coeffs)))
        return self.like(c, is_real=True)

    def hermitian_defect(self) -> float:
        """Max |f(k) - conj f(-k)| relative to max |f|."""
        scale = np.abs(self.coeffs).max()
        if scale == 0:
            return 0.0
        return float(np.abs(self.coeffs - np.conj(self.grid.flip(self.coeffs))).max() / scale)

    def masked(self) -> "SpectralField":
        return self.like(np.where(self.grid.dealias_mask, self.coeffs, 0.0))

    def _check(self, other: "SpectralField") -> None:
        if other.grid != self.grid:
            raise InvalidInputError("fields live on different grids")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs,
                             self.is_real and other.is_real,
                             self.is_mean_zero and other.is_mean_zero)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs,
                             self.is_real and other.is_real,
                             self.is_mean_zero and other.is_mean_zero)

    def __neg__(self) -> "SpectralField":
        return self.like(-self.coeffs)

    def __mul__(self, a) -> "SpectralField":
        if isinstance(a, SpectralField):
            raise TypeError("use dealiased_product for pointwise products")
        a = complex(a)
        return self.like(self.coeffs * a, is_real=self.is_real and a.imag == 0)

    __rmul__ = __mul__
