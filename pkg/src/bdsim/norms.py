"""Sobolev-type norms evaluated by Parseval on the torus."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .grid import SpectralField
from .operators import multiplier_power

__all__ = ["NormSpec", "sobolev_norm", "sobolev_seminorm_sq", "space_norm", "linf_proxy",
           "l2_norm", "hs_inner"]


@dataclass(frozen=True)
class NormSpec:
    order: float
    homogeneous: bool = True
    variant: str = "full"  # or "partial_x1"

    def __post_init__(self):
        if self.variant not in ("full", "partial_x1"):
            raise InvalidInputError(f"unknown norm variant {self.variant!r}")


def _weights(f: SpectralField, sigma: float, variant: str) -> np.ndarray:
    w = multiplier_power(f.grid, 2 * sigma)
    if variant == "partial_x1":
        w = w * f.grid.k1 ** 2
    return w


def sobolev_seminorm_sq(f: SpectralField, sigma: float, variant: str = "full") -> float:
    """``||Lambda^sigma f||_{L^2}^2`` (optionally of ``d1 f``)."""
    if sigma < 0 and not (f.is_mean_zero or f.coeffs[0, 0] == 0):
        raise InvalidInputError("negative homogeneous order needs a mean-zero field")
    w = _weights(f, sigma, variant)
    return float(f.grid.period ** 2 * np.sum(w * np.abs(f.coeffs) ** 2))


def l2_norm(f: SpectralField, variant: str = "full") -> float:
    return float(np.sqrt(sobolev_seminorm_sq(f, 0.0, variant)))


def sobolev_norm(f: SpectralField, spec: NormSpec | float) -> float:
    """Homogeneous ``||Lambda^s f||`` or inhomogeneous ``||f|| + ||Lambda^s f||``."""
    if not isinstance(spec, NormSpec):
        spec = NormSpec(float(spec))
    hom = float(np.sqrt(sobolev_seminorm_sq(f, spec.order, spec.variant)))
    if spec.homogeneous:
        return hom
    return l2_norm(f, spec.variant) + hom


def space_norm(f: SpectralField, space: str, s: float, variant: str = "full") -> float:
    """Root-sum-square norm on ``calH^s`` (with H^-1) or ``bbH^s`` (with H^-2)."""
    low = {"calH": -1.0, "bbH": -2.0}.get(space)
    if low is None:
        raise InvalidInputError(f"space must be 'calH' or 'bbH', got {space!r}")
    return float(np.sqrt(sobolev_seminorm_sq(f, low, variant) + sobolev_seminorm_sq(f, s, variant)))


def linf_proxy(f: SpectralField) -> float:
    """``sum_k |f_hat(k)|``, an upper bound for ``max_x |f(x)|``."""
    return float(np.abs(f.coeffs).sum())


def hs_inner(f: SpectralField, g: SpectralField, sigma: float) -> float:
    """``(f|g)_{H-dot^sigma} = (Lambda^sigma f | Lambda^sigma g)``."""
    if f.grid != g.grid:
        raise InvalidInputError("fields live on different grids")
    w = multiplier_power(f.grid, 2 * sigma)
    return float(f.grid.period ** 2 * np.real(np.sum(w * f.coeffs * np.conj(g.coeffs))))
