import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from locint import linalg as L
from locint.errors import DimensionMismatch, NotOrthonormal
from strategies import complex_matrices


def test_operator_norm_examples(rng):
    assert L.operator_norm(np.eye(3)) == pytest.approx(1.0, abs=1e-15)
    assert L.operator_norm(np.diag([1, 2, 3, 4, 5])) == pytest.approx(5.0, abs=1e-12)
    m = rng.random((4, 4)) + 1j * rng.random((4, 4))
    assert abs(L.operator_norm(m) - oracles.svd_norm(m)) <= 1e-10
    assert L.operator_norm(np.zeros((0, 0))) == 0.0


def test_null_space_examples():
    assert L.null_space_basis(np.zeros((3, 3))).dim == 3
    assert L.null_space_basis(np.eye(3)).dim == 0
    assert L.null_space_basis(np.zeros((0, 4)), ncols=4).dim == 4


def test_commutator_with_diag_1_2():
    s = np.diag([1.0, 2.0])
    # coordinate matrix of T -> T S - S T in row-major coordinates, built entry by entry
    cols = []
    for k in range(4):
        t = np.zeros(4)
        t[k] = 1
        t = t.reshape(2, 2)
        cols.append((t @ s - s @ t).reshape(-1))
    ns = L.null_space_basis(np.column_stack(cols))
    assert ns.dim == 2 == oracles.exact_commutant_dim([[1, 0], [0, 2]])
    # the null space is the diagonal matrices
    for v in ns.vectors.T:
        m = v.reshape(2, 2)
        assert abs(m[0, 1]) < 1e-12 and abs(m[1, 0]) < 1e-12


def test_scale_floor_treats_rounding_as_zero():
    tiny = np.array([[1e-17, 0], [0, 0]])
    assert L.null_space_basis(tiny).dim == 1
    assert L.null_space_basis(tiny, scale=1.0).dim == 2


def test_subspace_compare_examples():
    e = np.eye(3, dtype=complex)
    a = L.SubspaceBasis(e[:, [0, 1]])
    b = L.SubspaceBasis(e[:, [1, 0]])
    assert L.subspace_compare(a, b).relation is L.Relation.EQUAL
    e1, e2 = L.SubspaceBasis(e[:, [0]]), L.SubspaceBasis(e[:, [1]])
    assert L.subspace_compare(e1, a).relation is L.Relation.A_INSIDE_B
    assert L.subspace_compare(a, e1).relation is L.Relation.B_INSIDE_A
    assert L.subspace_compare(e1, e2).relation is L.Relation.INCOMPARABLE
    with pytest.raises(DimensionMismatch):
        L.subspace_compare(e1, L.SubspaceBasis(np.eye(2)[:, :1]))


def test_subspace_basis_rejects_non_orthonormal():
    with pytest.raises(NotOrthonormal):
        L.SubspaceBasis(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_orthonormalize_keeps_standard_vectors_exact():
    e = np.eye(4, dtype=complex)
    q = L.orthonormalize(e[:, [2, 0]], against=e[:, [1]])
    assert np.array_equal(q, e[:, [2, 0]])
    assert L.orthonormalize(np.column_stack([e[:, 0], 2 * e[:, 0]])).shape[1] == 1


def test_column_projector_is_blockwise_exact(rng):
    a = L.orthonormalize(rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2)))
    b = L.orthonormalize(rng.standard_normal((2, 1)) + 1j * rng.standard_normal((2, 1)))
    v = np.zeros((5, 3), dtype=complex)
    v[:3, :2], v[3:, 2:] = a, b
    p = L.column_projector(v)
    assert np.array_equal(p[:3, :3], L.column_projector(a))
    assert np.array_equal(p[3:, 3:], L.column_projector(b))
    assert not p[:3, 3:].any()
    assert np.abs(p - v @ v.conj().T).max() <= 1e-15


def test_vec_convention():
    a, m, b = (np.arange(9).reshape(3, 3) + k for k in range(3))
    assert np.allclose(L.vec(a @ m @ b), np.kron(a, b.T) @ L.vec(m))
    assert np.array_equal(L.unvec(L.vec(m), 3), m)


def test_json_round_trip_exact(rng):
    m = rng.random((3, 2)) + 1j * rng.random((3, 2))
    back = L.matrix_from_json(json.loads(json.dumps(L.matrix_to_json(m))))
    assert np.array_equal(back, m)
    assert L.complex_from_json(2.5) == 2.5 + 0j
    with pytest.raises(DimensionMismatch):
        L.matrix_from_json({"rows": 2, "cols": 2, "entries": [[1, 0]]})


@given(complex_matrices())
def test_norm_of_adjoint(m):
    assert abs(L.operator_norm(m) - L.operator_norm(L.adjoint(m))) <= 1e-10 * max(1, L.operator_norm(m))


@given(complex_matrices())
def test_c_star_identity(m):
    n = L.operator_norm(m)
    assert abs(L.operator_norm(L.adjoint(m) @ m) - n ** 2) <= 1e-9 * max(1.0, n ** 2)


@given(complex_matrices(max_dim=4), st.integers(0, 3))
def test_null_vectors_are_annihilated(m, drop):
    # force rank deficiency by making the last column a multiple of the first
    m = m.copy()
    if drop and m.shape[1] > 1:
        m[:, -1] = m[:, 0] * 2
    ns = L.null_space_basis(m)
    norm = L.operator_norm(m)
    for v in ns.vectors.T:
        assert np.linalg.norm(m @ v) <= 1e-9 * max(norm, 1e-300)
    # rank cutoff is relative to the largest singular value
    rank = np.linalg.matrix_rank(m, tol=1e-10 * norm) if norm > 0 else 0
    assert ns.dim == m.shape[1] - rank


@given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(0, 5), st.integers(0, 5))
def test_compare_symmetric(seed, n, ka, kb):
    r = np.random.default_rng(seed)
    ka, kb = min(ka, n), min(kb, n)
    a = L.span_basis(r.standard_normal((n, ka)) + 0j) if ka else L.SubspaceBasis(np.zeros((n, 0)))
    b = L.span_basis(np.column_stack([a.vectors, r.standard_normal((n, kb))])) if kb or ka \
        else L.SubspaceBasis(np.zeros((n, 0)))
    for x, y in ((a, b), (b, a)):
        fwd, back = L.subspace_compare(x, y), L.subspace_compare(y, x)
        assert back.relation is fwd.relation.mirrored()
        assert (fwd.a_in_b, fwd.b_in_a) == (back.b_in_a, back.a_in_b)
