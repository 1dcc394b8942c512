"""Locally bounded operators, their seminorms, and the lazy chain S e_k = k e_k.

Run: python demos/02_local_operators_lazy_chain.py
"""

import numpy as np

from locint import commutant as comm
from locint import instances
from locint import operators as ops
from locint.domain import standard_flag
from locint.errors import NotLocallyBounded

flag = standard_flag([1, 2, 4])

# The algebra of locally bounded operators: every level reduces the operator.
amb = comm.ambient_basis(flag)
print("dimension of the locally bounded algebra on C^1 < C^2 < C^4:", amb.dim, "(1 + 1 + 4)")

# Something that mixes levels is rejected.
shift = np.diag(np.ones(3), 1)
try:
    ops.from_top(flag, shift)
except NotLocallyBounded as e:
    print("shift operator rejected:", type(e).__name__)

# Uniform seminorms p_alpha(T) = ||T restricted to H_alpha||, one per level.
rng = np.random.default_rng(1)
t = instances.random_local_operator(rng, flag)
print("\nseminorm profile:", {a: round(v, 4) for a, v in ops.seminorm_profile(t).items()})
tt = t.adjoint() @ t
for a in flag.poset:
    p = ops.uniform_seminorm(t, a)
    print(f"  level {a}: p(T*T) = {ops.uniform_seminorm(tt, a):.12f}   p(T)^2 = {p * p:.12f}")

# The unbounded diagonal operator on the N-chain, truncated level by level.
lazy = ops.lazy_rule("diag_n", 32)
profile = [ops.uniform_seminorm(ops.lazy_truncate(lazy, n), n) for n in (1, 2, 8, 32)]
print("\nS e_k = k e_k: p_n for n = 1, 2, 8, 32:", profile)
print("every level is bounded, yet the profile grows without bound.")
