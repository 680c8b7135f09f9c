"""Fields on the periodic grid: transforms, derivatives, dealiased products, velocity."""
import numpy as np

from bdsim.grid import FourierGrid, SpectralField
from bdsim.norms import l2_norm, sobolev_norm
from bdsim.operators import biot_savart, dealiased_product, derivative, integrate_product

grid = FourierGrid(32)
print("grid", grid.n, "padded size", grid.padded_size, "mask cutoff", grid.mask_cutoff)

# A vorticity made of two waves. Coefficients are Fourier-series coefficients,
# so cos(x1) contributes 1/2 at m = (+-1, 0).
omega = SpectralField.from_function(grid, lambda x, y: np.cos(x) + 0.5 * np.sin(2 * x + y),
                                    mean_zero=True)
print("omega_hat at (1, 0):", omega.coeffs[1, 0])

# Spectral derivatives are exact for trigonometric polynomials.
x, y = grid.points()
d1 = derivative(omega, 1).to_real()
print("max |d1 omega - exact|:", np.abs(d1 - (-np.sin(x) + np.cos(2 * x + y))).max())

# Velocity from vorticity: u = (d2, -d1) Lambda^-2 omega. It is divergence free.
u1, u2 = biot_savart(omega)
div = derivative(u1, 1) + derivative(u2, 2)
print("max |div u| coefficient:", np.abs(div.coeffs).max())

# Products: the padded product is exact for inputs on the two-thirds mask;
# integrate_product evaluates triple and quadruple integrals exactly.
prod = dealiased_product(omega, omega)
print("||omega^2||:", l2_norm(prod))
print("int u.grad(omega) omega:",
      integrate_product(u1, derivative(omega, 1), omega)
      + integrate_product(u2, derivative(omega, 2), omega))
print("||Lambda^3 omega||:", sobolev_norm(omega, 3.0))
