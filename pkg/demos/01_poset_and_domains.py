"""Directed posets and the quantized domains built over them.

Run: python demos/01_poset_and_domains.py
"""

import numpy as np

from locint import domain as qd
from locint import poset as P

# A diamond: two incomparable middle levels below a common top.
d = P.diamond()
print("diamond elements:", d.elements, "top:", d.top)
print("maximal chains:", d.maximal_chains())
print("upper bound of a and b:", P.upper_bound(d, "a", "b"))
print("branch below a:", P.branch(d, "a").elements)

# Levels are nested subspaces of one ambient space.  Random side planes
# make the two middle levels genuinely different.
rng = np.random.default_rng(0)
seeds = {"bot": np.eye(3)[:, :1] + 0j,
         "a": np.column_stack([np.eye(3)[:, 0], rng.standard_normal(3)]) + 0j,
         "b": np.column_stack([np.eye(3)[:, 0], rng.standard_normal(3)]) + 0j}
dom = qd.build_domain(d, 3, {"bot": 1, "a": 2, "b": 2, "top": 3}, seeds)
rep = qd.validate(dom)
print("\ndiamond domain dims:", rep.dims)
print("validation:", "PASS" if rep.ok else "FAIL")
print("worst inclusion residual: %.1e" % max(rep.inclusion_residuals.values()))

# The level containing a vector: the smallest one, when unique.
x = dom.basis("a")[:, 1]
print("smallest level containing a vector of H_a:", dom.smallest_level_containing(x))

# The standard flag C^1 < C^2 < C^3 is the simplest chain domain.
flag = qd.standard_flag([1, 2, 3])
print("\nstandard flag dims:", flag.dims)
print("projection onto level 2:\n", qd.projection(flag, 2).real)
