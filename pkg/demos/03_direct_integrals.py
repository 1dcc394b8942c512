"""Direct integrals of quantized domains over an atomic measure space.

Run: python demos/03_direct_integrals.py
"""

import numpy as np

from locint import direct_integral as di
from locint import instances
from locint.poset import chain

d8 = instances.dim8_instance()
print("atoms:", d8.atoms, " measure weights:", d8.measure.weights)
print("assembled level dims:", d8.assembled.dims)

# Counting measure: the integral is literally the direct sum.
rep = di.direct_sum_check(d8)
print("direct sum check:", rep.status, rep.residuals)
print("interchange check:", di.interchange_check(d8).status)

# Weighted atoms scale the inner product by the atom masses.
rng = np.random.default_rng(2)
w = instances.random_dint(rng, max_atoms=3, poset=chain([1, 2, 3]), counting=False)
x = instances.random_field(rng, w, 2)
print("\nweighted measure:", {p: round(v, 3) for p, v in w.measure.weights.items()})
print("||x||^2 via the integral:", round(float(di.inner_product(w, x, x).real), 6))

# Density: a field at level 2 is approximated with a shrinking defect along
# the chain and is captured exactly once the chain reaches its own level.
prof = di.projection_defect_profile(w, x, [1, 2, 3])
print("defect profile along 1 < 2 < 3:", prof)
