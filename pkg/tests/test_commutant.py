import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from locint import commutant as C
from locint import decomposable as DEC
from locint import direct_integral as DI
from locint import instances
from locint.domain import projection, standard_flag
from locint.errors import GeneratorOutsideAmbient
from locint.linalg import Relation, subspace_compare
from locint.poset import chain
from strategies import dints, domains


def test_ambient_flag_1_2():
    amb = C.ambient_basis(standard_flag([1, 2]))
    assert amb.dim == 2 == oracles.flag_pattern_count([{1, 2}, {2}])
    for m in amb.matrices():
        assert abs(m[0, 1]) < 1e-12 and abs(m[1, 0]) < 1e-12


def test_ambient_trivial_filtration():
    assert C.ambient_basis(standard_flag([3])).dim == 9


def test_dim8_instance_exact_dimensions():
    d8 = instances.dim8_instance()
    amb = C.ambient_basis(d8)
    # level 1 holds assembled coordinates 0 and 2, the rest only lie in the top
    patterns = [{1, 2}, {2}, {1, 2}, {2}]
    atoms = [1, 1, 2, 2]
    assert amb.dim == 8 == oracles.flag_pattern_count(patterns)
    assert C.dec_span(d8).dim == 4 == oracles.flag_pattern_count(patterns, atoms)
    assert C.diag_span(d8).dim == 2
    dprime = C.commutant(C.diag_generators(d8), amb)
    assert dprime.dim == 4
    assert len(oracles.diag_commutant_oracle(d8)) == 4
    assert oracles.same_span(dprime.matrices(), C.dec_span(d8).matrices())
    rep = C.verify_dec_eq_diag_commutant(d8)
    assert rep.passed
    assert rep.dimensions == {"ambient": 8, "DEC": 4, "DIAG": 2, "DIAG'": 4, "DEC'": 4}


def test_commutant_of_identity_is_ambient(rng):
    d = instances.random_domain(rng, chain([1, 2, 3]), rotate=True)
    amb = C.ambient_basis(d)
    assert subspace_compare(C.commutant([np.eye(d.ambient_dim)], amb).basis,
                            amb.basis).relation is Relation.EQUAL


def test_double_commutant_of_identity_on_dim8():
    # inside the locally bounded algebra the double commutant of the scalars
    # is its center: span{P, 1 - P} for the level-1 projection P
    d8 = instances.dim8_instance()
    amb = C.ambient_basis(d8)
    ident = [np.eye(4)]
    inner = C.double_commutant(ident, amb)
    p = projection(d8.assembled, 1)
    assert inner.dim == 2
    assert oracles.same_span(inner.matrices(), [p, np.eye(4) - p])
    full = C.double_commutant(ident, C.full_algebra(4))
    assert full.dim == 1
    assert full.residual(np.eye(4)) <= 1e-12


def test_generator_outside_ambient():
    amb = C.ambient_basis(standard_flag([1, 2]))
    with pytest.raises(GeneratorOutsideAmbient):
        C.commutant([np.array([[0, 1], [0, 0]])], amb)
    with pytest.raises(GeneratorOutsideAmbient):
        C.commutant([np.eye(3)], amb)


def test_single_atom_collapse(rng):
    fib = instances.random_domain(rng, chain([1, 2]), max_dim=3, rotate=True)
    dint = DI.DirectIntegralDomain(DI.AtomicMeasureSpace.counting((0,)), {0: fib})
    rep = C.verify_dec_eq_diag_commutant(dint)
    assert rep.passed
    amb = C.ambient_basis(dint)
    assert rep.dimensions["DEC"] == rep.dimensions["DIAG'"] == amb.dim
    assert rep.dimensions["DIAG"] == 1


def test_containments_reported():
    rep = C.verify_containments(instances.dim8_instance())
    assert rep.passed
    assert set(rep.residuals) == {"DEC_in_DIAG'", "DIAG_in_DEC'"}


def test_projective_system_dim8():
    rep = C.verify_dec_projective_system(instances.dim8_instance(), rng=0)
    assert rep.passed
    sub = {c["check"]: c for c in rep.details["checks"]}
    for level in ("1", "2"):
        dims = sub["level_von_neumann"]["dimensions"][level]
        assert dims["DEC"] == dims["DEC''"]
    assert sub["mediating_map"]["dimensions"]["kernel"] == 0


def test_projective_flags_corrupted_family():
    d8 = instances.dim8_instance()
    bad = {1: np.array([[5.0, 0], [0, 7.0]]), 2: np.eye(4)}
    rep = C.verify_dec_projective_system(d8, families=[bad], rng=0)
    assert not rep.passed
    sub = {c["check"]: c for c in rep.details["checks"]}
    assert sub["compatibility"]["status"] == "FAIL"
    assert sub["compatibility"]["dimensions"]["probe_families"] == 1
    assert sub["mediating_map"]["status"] == "PASS"


def test_diag_abelian_von_neumann():
    rep = C.verify_diag_abelian(instances.dim8_instance())
    assert rep.passed and rep.dimensions == {"DIAG": 2, "DIAG''": 2}


def test_order_reversing(rng):
    dint = instances.random_dint(rng, max_atoms=3, poset=chain([1, 2]))
    amb = C.ambient_basis(dint)
    gens = [m for m in C.dec_span(dint).matrices()]
    small = C.commutant(gens[:2], amb)
    big = C.commutant(gens, amb)
    assert subspace_compare(big.basis, small.basis).a_inside_b


@given(domains())
def test_ambient_matches_kronecker_oracle(d):
    amb = C.ambient_basis(d)
    want = oracles.locally_bounded_basis(d)
    assert amb.dim == len(want)
    assert oracles.same_span(amb.matrices(), want)


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.booleans())
def test_chain_ambient_dimension_formula(seed, length, rotate):
    r = np.random.default_rng(seed)
    d = instances.random_domain(r, chain(list(range(1, length + 1))), max_dim=4, rotate=rotate)
    dims = [d.dim(a) for a in d.poset.linear_extension()]
    assert C.ambient_basis(d).dim == oracles.chain_algebra_dim(dims)


@given(dints(counting=False))
def test_dec_equals_diag_commutant_against_oracle(dint):
    dprime = C.commutant(C.diag_generators(dint), C.ambient_basis(dint))
    dec = C.dec_span(dint)
    oracle_dec = oracles.dec_oracle(dint)
    oracle_dprime = oracles.diag_commutant_oracle(dint)
    assert dec.dim == len(oracle_dec) == dprime.dim == len(oracle_dprime)
    assert oracles.same_span(dprime.matrices(), oracle_dprime)
    assert oracles.same_span(dec.matrices(), oracle_dec)
    assert C.verify_dec_eq_diag_commutant(dint).passed


@given(dints())
def test_bicommutant_and_triple(dint):
    amb = C.ambient_basis(dint)
    dec = C.dec_span(dint)
    dd = C.double_commutant(dec, amb)
    cmp = subspace_compare(dec.basis, dd.basis)
    assert cmp.relation is Relation.EQUAL and max(cmp.a_in_b, cmp.b_in_a) <= 1e-9
    once = C.commutant(dec, amb)
    thrice = C.commutant(C.commutant(once, amb), amb)
    assert subspace_compare(once.basis, thrice.basis).relation is Relation.EQUAL


@given(dints(), st.integers(0, 2**32 - 1))
def test_commutant_properties(dint, seed):
    r = np.random.default_rng(seed)
    amb = C.ambient_basis(dint)
    gens = [instances.random_local_operator(r, dint.assembled).top_matrix
            for _ in range(int(r.integers(1, 3)))]
    m = C.commutant(gens, amb)
    for t in m.matrices():
        nt = np.linalg.norm(t, 2)
        for s in gens:
            assert np.linalg.norm(t @ s - s @ t, 2) <= 1e-9 * (1 + nt * np.linalg.norm(s, 2))
    mm = C.commutant(m, amb)
    assert all(mm.residual(g) <= 1e-9 for g in gens)
    for space in (C.dec_span(dint), C.diag_span(dint)):
        assert space.adjoint_residual() <= 1e-9
        for b in space.matrices():
            assert amb.residual(b) <= 1e-10


@given(dints())
def test_random_projective_system(dint):
    rep = C.verify_dec_projective_system(dint, rng=0)
    assert rep.passed
    assert all(v <= 1e-9 for v in rep.residuals.values())


def test_diagonalizable_inside_dec(rng):
    dint = instances.random_dint(rng)
    dec = C.dec_span(dint)
    f = DEC.diagonalizable_from_function(dint, instances.random_function(rng, dint))
    assert dec.residual(f.assembled.top_matrix) <= 1e-12
