"""The per-mode linear solution operator, its regimes, and the decay envelopes."""
import math

import numpy as np

from bdsim.semigroup import (certify_envelopes, classify, eigenvalues, kernel_decay_profile,
                             loglog_slope, propagator, propagator_oracle)

# Three frequencies, one per region of the |xi1|/|xi| partition.
for xi in [(1.0, 5.0), (1.0, 2.0), (2.0, 1.0)]:
    ep = eigenvalues(xi)
    print(xi, classify(xi), ep.regime, "lambda+ =", np.round(ep.lambda_plus, 4))

# At |xi| = 2|xi1| the two eigenvalues merge. The closed form stays smooth there.
xi = (1.0, math.sqrt(3.0))
p, q = propagator(xi, 2.0), propagator_oracle(xi, 2.0)
print("double eigenvalue, t = 2:", np.round(p.as_array(), 12))
print("difference to the scaling-and-squaring oracle:", np.abs(p.as_array() - q.as_array()).max())

# Fitted envelope constants on the integer lattice |m_i| <= 32.
rep = certify_envelopes(32, np.linspace(0, 50, 101))
for region, m1, m2, count in rep.as_rows():
    print(f"{region}: C(m1) = {m1:.3f}, C(m2) = {m2:.3f} over {count} modes")

# In the slow region the weighted kernels decay algebraically.
t = np.geomspace(1, 100, 25)
s1, s2 = kernel_decay_profile(64, t)
print("log-log slopes:", round(loglog_slope(t, s1), 3), round(loglog_slope(t, s2), 3))
