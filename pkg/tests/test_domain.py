import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from locint import domain as D
from locint.errors import DimensionMismatch, InclusionViolation, NonMonotoneDims, NotOrthonormal
from locint.poset import chain, diamond
from strategies import domains


def test_standard_flag_default_bases():
    d = D.build_domain(chain([1, 2, 3]), 3, {1: 1, 2: 2, 3: 3})
    e = np.eye(3)
    for k, a in enumerate([1, 2, 3], start=1):
        assert np.array_equal(d.basis(a), e[:, :k])
    assert d.top_is_standard
    assert d == D.standard_flag([1, 2, 3])


def test_non_monotone_dims():
    with pytest.raises(NonMonotoneDims):
        D.build_domain(chain([1, 2]), 2, {1: 2, 2: 1})
    with pytest.raises(NonMonotoneDims):
        D.build_domain(chain([1, 2]), 3, {1: 1, 2: 2})


def diamond_with_planes():
    s = 1 / np.sqrt(2)
    e = np.eye(3, dtype=complex)
    seeds = {"a": np.column_stack([e[:, 0], s * (e[:, 1] + e[:, 2])]),
             "b": np.column_stack([e[:, 0], s * (e[:, 1] - e[:, 2])])}
    return D.build_domain(diamond(), 3, {"bot": 1, "a": 2, "b": 2, "top": 3}, seeds)


def test_diamond_with_distinct_seed_planes():
    d = diamond_with_planes()
    rep = D.validate(d)
    assert rep.ok
    assert len(rep.inclusion_residuals) == 4
    assert max(rep.inclusion_residuals.values()) <= 1e-12
    # the two side planes really differ and meet in the bottom line
    pa, pb = D.projection(d, "a"), D.projection(d, "b")
    assert np.abs(pa - pb).max() > 0.5
    assert np.allclose(pa @ pb, D.projection(d, "bot"), atol=1e-12)
    for a in ("a", "b"):
        j = d.inclusion("bot", a)
        assert np.allclose(j.conj().T @ j, np.eye(1), atol=1e-12)


def test_seed_errors():
    with pytest.raises(NotOrthonormal):
        D.build_domain(chain([1, 2]), 3, {1: 2, 2: 3},
                       {1: np.array([[1, 2], [0, 0], [0, 0]], dtype=complex)})
    with pytest.raises(InclusionViolation):
        D.build_domain(chain([1, 2, 3]), 3, {1: 1, 2: 2, 3: 3},
                       {1: np.eye(3)[:, [2]], 2: np.eye(3)[:, [0, 1]]})
    with pytest.raises(DimensionMismatch):
        D.build_domain(chain([1, 2]), 3, {1: 1, 2: 3}, {1: np.eye(3)[:, :2]})


def test_projection_examples():
    d = D.standard_flag([1, 2, 3])
    assert np.array_equal(D.projection(d, 3), np.eye(3))
    assert np.array_equal(D.projection(d, 1), np.diag([1, 0, 0]))


def test_validate_flags_corrupted_basis():
    d = D.standard_flag([1, 2, 3])
    bases = {a: np.array(d.basis(a)) for a in d.poset}
    bases[2][:, 0] = [0, 0, 1]
    bad = D.QuantizedDomain(d.poset, 3, bases, {1: None, 2: 1, 3: 2})
    rep = D.validate(bad)
    assert not rep.ok
    assert any("InclusionViolation 1<=2" in f for f in rep.failures)
    assert rep.inclusion_residuals[(1, 2)] > 0.5
    assert rep.inclusion_residuals[(2, 3)] == 0.0


def test_canonical_domain_validates_clean():
    rep = D.validate(diamond_with_planes())
    assert max(rep.orthonormality.values()) <= 1e-12
    assert all(v == 0.0 for v in rep.prefix_residuals.values())


def test_zero_dimensional_levels():
    d = D.build_domain(chain([1, 2, 3]), 2, {1: 0, 2: 0, 3: 2})
    assert d.dim(1) == 0 and D.validate(d).ok
    assert d.inclusion(1, 3).shape == (2, 0)


def test_levels_and_coordinates():
    d = diamond_with_planes()
    x = d.basis("a") @ np.array([1.0, 2.0])
    assert d.smallest_level_containing(x) == "a"
    assert d.smallest_level_containing(np.array([1.0, 0, 0])) == "bot"
    c = d.to_level("a", x)
    assert np.allclose(d.from_level("a", c), x)


def test_dict_round_trip_exact():
    d = diamond_with_planes()
    back = D.from_dict(json.loads(json.dumps(d.to_dict())))
    assert back == d
    assert back.prefix_parent == d.prefix_parent


def test_dict_without_bases_uses_canonical_extension():
    data = {"poset": chain([1, 2]).to_dict(), "ambient_dim": 2,
            "levels": {"1": {"dim": 1}, "2": {"dim": 2}}}
    assert D.from_dict(data) == D.standard_flag([1, 2])


@given(domains(), st.integers(0, 2**32 - 1))
def test_projection_laws(d, seed):
    x = np.random.default_rng(seed).standard_normal(d.ambient_dim) + 0j
    for a, b in d.poset.pairs():
        pa, pb = D.projection(d, a), D.projection(d, b)
        assert np.abs(pa @ pb - pa).max() <= 1e-12
        assert np.abs(pb @ pa - pa).max() <= 1e-12
        assert np.linalg.norm(pa @ x) <= np.linalg.norm(pb @ x) + 1e-12
        assert np.linalg.norm(pb @ x) <= np.linalg.norm(x) + 1e-12
        y = pa @ x
        assert np.linalg.norm(pb @ y - y) <= 1e-12


@given(domains())
def test_random_domains_are_canonical(d):
    rep = D.validate(d)
    assert rep.ok, rep.failures
    for a in d.poset:
        parent = d.prefix_parent[a]
        if parent is not None:
            k = d.dim(parent)
            assert np.array_equal(d.basis(a)[:, :k], d.basis(parent))
