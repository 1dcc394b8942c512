"""Named and random problem instances.

Random complex entries are drawn uniformly from the unit square
``[0, 1) x [0, 1)`` with numpy's PCG64 generator; every random object is
then pushed through the usual validating constructors.
"""

import numpy as np

from . import operators as ops
from .commutant import ambient_basis
from .decomposable import decomposable_from_fibers
from .direct_integral import AtomicMeasureSpace, DirectIntegralDomain, FiberField
from .domain import build_domain, standard_flag
from .linalg import orthonormalize
from .poset import chain, diamond

PRNG_NAME = "numpy.random.PCG64"


def unit_square(rng, shape):
    return rng.random(shape) + 1j * rng.random(shape)


def dim8_instance():
    """Two atoms, counting measure, 2-chain, fibre dims (1, 2) at each atom.

    The assembled domain has dimension 4 and its locally bounded algebra has
    dimension 8.
    """
    fib = {p: standard_flag([1, 2]) for p in (1, 2)}
    return DirectIntegralDomain(AtomicMeasureSpace.counting((1, 2)), fib)


def random_poset(rng, kinds=("chain", "diamond"), max_chain=3):
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "diamond":
        return diamond()
    length = int(rng.integers(1, max_chain + 1))
    return chain(list(range(1, length + 1)))


def random_dims(rng, poset, max_dim):
    """Monotone level dimensions with a top of at least 1."""
    n = int(rng.integers(1, max_dim + 1))
    dims = {}
    for a in reversed(poset.linear_extension()):
        ups = [dims[b] for b in poset.above(a, strict=True)]
        dims[a] = n if not ups else int(rng.integers(0, min(ups) + 1))
    return dims


def random_domain(rng, poset, max_dim=3, rotate=True):
    """A quantized domain with random dims; with ``rotate`` the levels are random subspaces."""
    dims = random_dims(rng, poset, max_dim)
    n = dims[poset.top]
    if not rotate:
        return build_domain(poset, n, dims)
    seeds = {}
    for a in poset.linear_extension():
        if a == poset.top:
            continue
        lower = [seeds[g] for g in poset.below(a, strict=True)]
        base = orthonormalize(np.column_stack(lower)) if lower else np.zeros((n, 0))
        while True:
            extra = unit_square(rng, (n, dims[a] - base.shape[1])) - (0.5 + 0.5j)
            cand = np.column_stack([base, extra])
            if orthonormalize(cand).shape[1] == dims[a]:
                break
        seeds[a] = cand
    return build_domain(poset, n, dims, seeds)


def random_dint(rng, max_atoms=4, max_fiber_dim=3, poset=None, counting=True, rotate=None):
    poset = poset if poset is not None else random_poset(rng)
    m = int(rng.integers(1, max_atoms + 1))
    atoms = tuple(range(1, m + 1))
    fibers = {}
    for p in atoms:
        rot = bool(rng.integers(2)) if rotate is None else rotate
        fibers[p] = random_domain(rng, poset, max_fiber_dim, rotate=rot)
    if counting:
        measure = AtomicMeasureSpace.counting(atoms)
    else:
        measure = AtomicMeasureSpace(atoms, {p: float(rng.uniform(0.1, 3.0)) for p in atoms})
    return DirectIntegralDomain(measure, fibers)


def random_local_operator(rng, domain):
    """Random element of the locally bounded algebra of ``domain``."""
    mats = ambient_basis(domain).matrices()
    coeffs = unit_square(rng, len(mats))
    return ops.from_top(domain, np.tensordot(coeffs, mats, axes=1))


def random_decomposable(rng, dint):
    return decomposable_from_fibers(dint, {p: random_local_operator(rng, dint.fibers[p])
                                           for p in dint.atoms})


def random_function(rng, dint):
    return {p: complex(unit_square(rng, ())) for p in dint.atoms}


def random_field(rng, dint, level):
    return FiberField(level, {p: unit_square(rng, dint.fibers[p].dim(level))
                              for p in dint.atoms})
