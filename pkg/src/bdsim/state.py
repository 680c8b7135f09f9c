"""The unknowns (vorticity, temperature perturbation) at one instant."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .grid import FourierGrid, SpectralField
from .operators import biot_savart

__all__ = ["FlowState"]


@dataclass
class FlowState:
    """Vorticity ``omega`` and temperature perturbation ``theta = Psi - x2``."""

    omega: SpectralField
    theta: SpectralField
    time: float = 0.0

    def __post_init__(self):
        if self.omega.grid != self.theta.grid:
            raise InvalidInputError("omega and theta must share one grid")
        if self.time < 0:
            raise InvalidInputError("time must be nonnegative")

    @property
    def grid(self) -> FourierGrid:
        return self.omega.grid

    @classmethod
    def from_arrays(cls, grid: FourierGrid, omega_hat, theta_hat, time: float = 0.0) -> "FlowState":
        return cls(SpectralField(grid, omega_hat, True, True),
                   SpectralField(grid, theta_hat, True, True), time)

    @classmethod
    def zeros(cls, grid: FourierGrid) -> "FlowState":
        return cls(SpectralField.zeros(grid), SpectralField.zeros(grid), 0.0)

    def velocity(self):
        return biot_savart(self.omega)

    def copy(self) -> "FlowState":
        return FlowState(self.omega.copy(), self.theta.copy(), self.time)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.omega.coeffs)) and np.all(np.isfinite(self.theta.coeffs)))

    def distance(self, other: "FlowState") -> float:
        """Max coefficient difference over both fields."""
        return float(max(np.abs(self.omega.coeffs - other.omega.coeffs).max(),
                         np.abs(self.theta.coeffs - other.theta.coeffs).max()))

    def temperature(self) -> np.ndarray:
        """Full temperature ``Psi = theta + x2`` sampled on the grid."""
        _, x2 = self.grid.points()
        return self.theta.to_real() + x2
