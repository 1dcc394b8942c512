"""Hypothesis strategies shared by the property tests."""

import numpy as np
from hypothesis import strategies as st

from locint import instances
from locint.poset import chain, diamond

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def complex_matrices(draw, n=None, m=None, max_dim=5):
    n = draw(st.integers(1, max_dim)) if n is None else n
    m = n if m is None else m
    re = draw(st.lists(finite, min_size=n * m, max_size=n * m))
    im = draw(st.lists(finite, min_size=n * m, max_size=n * m))
    return (np.array(re) + 1j * np.array(im)).reshape(n, m)


seeds = st.integers(0, 2**32 - 1)


@st.composite
def posets(draw):
    kind = draw(st.sampled_from(["chain", "diamond"]))
    if kind == "diamond":
        return diamond()
    return chain(list(range(1, draw(st.integers(1, 4)) + 1)))


@st.composite
def domains(draw, rotate=None):
    rng = np.random.default_rng(draw(seeds))
    rot = draw(st.booleans()) if rotate is None else rotate
    return instances.random_domain(rng, draw(posets()), max_dim=4, rotate=rot)


@st.composite
def dints(draw, counting=True, max_atoms=3):
    rng = np.random.default_rng(draw(seeds))
    return instances.random_dint(rng, max_atoms=max_atoms, max_fiber_dim=3,
                                 counting=counting)
