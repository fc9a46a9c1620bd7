# Strengthened Hoelder-pair regions from exponent surfaces
#
# A pair of exponents (1/p, 1/q) is "admissible" for a joint table exactly
# when the plane E1/p + E2/q stays on the right side of the cone generated by
# the anchored exponent surface near the origin.  For the symmetric binary
# pair the admissible set is known in closed form -- the ribbon
# (p-1)(q-1) >= rho^2 and its reverse-sign mirror -- which makes it the ideal
# test bed: the cone built numerically from surface samples must reproduce
# the ribbon boundary.
#
# Run with:  python3 demos/04_hypercontractive_regions.py

import numpy as np

from typeflow import dsbs
from typeflow.coupling import surface_from_function
from typeflow.hyper import (
    ConeModel,
    HolderPair,
    lambda_lower,
    lambda_upper,
    region_member,
    ribbon_optimum,
)

rho = 0.7
params = dsbs.DsbsParams(rho)

# The cone is the radial limit of the surface, so the sample grid must reach
# tiny radii: chord slopes converge only linearly in the radius.
g = np.concatenate([[0.0], np.geomspace(1e-6, 1.0, 100)])
phis = surface_from_function(
    lambda s, t: dsbs.phi_psi_dsbs(params, s, t)[0], g, g, "phi")
psis = surface_from_function(
    lambda s, t: dsbs.phi_psi_dsbs(params, s, t)[1], g, g, "psi")
cone_f = ConeModel(phis, "lower")
cone_r = ConeModel(psis, "upper")

print("cone value in the diagonal direction:",
      round(cone_f.direction_value(0.5, 0.5), 4), "(forward)",
      round(cone_r.direction_value(0.5, 0.5), 4), "(reverse)")
print("closed-form ribbon optimum, same direction:",
      round(ribbon_optimum(rho, 0.5, 0.5, "forward"), 4),
      round(ribbon_optimum(rho, 0.5, 0.5, "reverse"), 4))

# Classify pairs around the forward boundary (p-1)(q-1) = rho^2.
print("\nforward region, pairs with p = q:")
for f in (0.90, 1.00, 1.10):
    p = 1 + rho * np.sqrt(f)
    member = region_member(HolderPair(p, p), "forward", cone_f)
    print(f"  (p-1)(q-1)/rho^2 = {f:.2f}: member = {member}")

print("reverse region, pairs with p = q < 1:")
for f in (0.90, 1.00, 1.10):
    p = 1 - rho * np.sqrt(f)
    member = region_member(HolderPair(p, p), "reverse", cone_r)
    print(f"  (1-p)(1-q)/rho^2 = {f:.2f}: member = {member}")

# The gap functionals are nonnegative exactly on the admissible side.
inside = HolderPair(1 + 1.1 * rho, 1 + 1.1 * rho)
outside = HolderPair(1 + 0.5 * rho, 1 + 0.5 * rho)
print("\ngap functional, forward:",
      round(lambda_lower(phis, inside, 0.0, 0.0), 6), "(inside, >= 0)",
      round(lambda_lower(phis, outside, 0.0, 0.0), 6), "(outside, < 0)")
inside_r = HolderPair(0.12, 0.12)
print("gap functional, reverse:",
      round(lambda_upper(psis, inside_r, 0.0, 0.0), 6), "(inside, >= 0)")
