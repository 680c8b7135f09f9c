"""Exact cancellations of the transport and coupling terms, checked to roundoff."""
from bdsim.grid import FourierGrid
from bdsim.identities import (cancellation_suite, commutator_probe, product_rule_identity,
                              random_state)

state = random_state(FourierGrid(64), seed=5)
for res in cancellation_suite(state, s=5):
    print(f"{res.name:20s} residual/scale = {res.relative:.2e}")

# The product identity holds with -i xi1 in front of the first term; flipping
# the sign leaves an O(1) residual.
for sign in (-1, +1):
    r, scale = product_rule_identity(state, sign=sign)
    print(f"product identity with sign {sign:+d}: residual/scale = {r / scale:.2e}")

probe = commutator_probe(state.omega, state.theta, s=1.5)
print(f"Leibniz ratio {probe.ratio_kp:.3f}, commutator ratio {probe.ratio_kpv:.3f}")
