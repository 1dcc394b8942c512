"""Dense complex linear algebra helpers.

Matrices are plain ``complex128`` numpy arrays.  Orthonormal bases are
stored column-wise (``ambient_dim x k``) inside :class:`SubspaceBasis`.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DimensionMismatch, NotOrthonormal

RANK_RTOL = 1e-10
EQUALITY_TOL = 1e-9
GRAM_TOL = 1e-12


def as_matrix(m, shape=None):
    """Coerce to a finite complex128 2-d array."""
    a = np.array(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got ndim={a.ndim}")
    if shape is not None and a.shape != tuple(shape):
        raise DimensionMismatch(f"expected shape {tuple(shape)}, got {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix has non-finite entries")
    return a


def adjoint(m):
    return np.conj(m).T


def column_projector(v):
    """``V V^*`` summed column by column in a fixed order.

    BLAS blocks the sum differently for different shapes, so a block-diagonal
    ``V`` would only reproduce the per-block projectors up to rounding.  A
    sequential sum adds exact zeros for the other blocks and matches bitwise.
    """
    v = np.asarray(v)
    p = np.zeros((v.shape[0], v.shape[0]), dtype=np.result_type(v, np.complex128))
    for k in range(v.shape[1]):
        p += np.outer(v[:, k], np.conj(v[:, k]))
    return p


def operator_norm(m):
    """Largest singular value; 0 for an empty matrix."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.svd(m, compute_uv=False)[0])


def vec(m):
    """Row-major vectorisation, so ``vec(A @ M @ B) == kron(A, B.T) @ vec(M)``."""
    return np.asarray(m).reshape(-1)


def unvec(v, n):
    return np.asarray(v).reshape(n, n)


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal basis (columns of ``vectors``) of a subspace of C^n."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.complex128)
        if v.ndim != 2:
            raise DimensionMismatch("basis must be a 2-d array of column vectors")
        defect = gram_defect(v)
        if defect > GRAM_TOL:
            raise NotOrthonormal(f"Gram matrix deviates from identity by {defect:.3e}")
        object.__setattr__(self, "vectors", v)

    @property
    def ambient_dim(self):
        return self.vectors.shape[0]

    @property
    def dim(self):
        return self.vectors.shape[1]

    def __len__(self):
        return self.dim

    def projector(self):
        return self.vectors @ adjoint(self.vectors)

    def residual(self, x):
        """Norm of the component of ``x`` orthogonal to the subspace."""
        x = np.asarray(x)
        return float(np.linalg.norm(x - self.vectors @ (adjoint(self.vectors) @ x)))

    def contains(self, x, tol=EQUALITY_TOL):
        return self.residual(x) <= tol


def gram_defect(v):
    if v.shape[1] == 0:
        return 0.0
    return float(np.abs(adjoint(v) @ v - np.eye(v.shape[1])).max())


def null_space_basis(L, rtol=RANK_RTOL, ncols=None, scale=None):
    """Orthonormal basis of ``{v : L v = 0}``.

    Singular values below ``rtol`` times the largest one (or times 1 for the
    zero map) count as zero.  ``scale``, when given, is a floor for that
    reference value, so a map that is zero up to rounding is treated as
    zero.  ``ncols`` gives the domain dimension when ``L`` has no rows.
    """
    L = np.asarray(L, dtype=np.complex128)
    if L.ndim != 2:
        if ncols is None:
            raise DimensionMismatch("linear map must be a 2-d array")
        L = L.reshape(0, ncols)
    n = L.shape[1]
    if n == 0:
        return SubspaceBasis(np.zeros((0, 0), dtype=np.complex128))
    if L.shape[0] == 0:
        return SubspaceBasis(np.eye(n, dtype=np.complex128))
    _, s, vh = np.linalg.svd(L, full_matrices=True)
    smax = s[0] if s.size and s[0] > 0 else 1.0
    if scale is not None:
        smax = max(smax, scale)
    rank = int(np.count_nonzero(s > rtol * smax))
    return SubspaceBasis(np.ascontiguousarray(adjoint(vh[rank:])))


def orthonormalize(vectors, against=None, tol=1e-10):
    """Gram-Schmidt with one reorthogonalisation pass, in column order.

    Columns that are (numerically) in the span of ``against`` and of the
    columns already accepted are dropped.  Returns only the new vectors.
    Standard basis vectors orthogonal to ``against`` come out unchanged,
    which keeps the canonical flag bases exact.
    """
    vectors = np.asarray(vectors, dtype=np.complex128)
    n = vectors.shape[0]
    basis = (np.zeros((n, 0), dtype=np.complex128) if against is None
             else np.asarray(against, dtype=np.complex128))
    out = []
    for j in range(vectors.shape[1]):
        x = vectors[:, j].copy()
        norm0 = np.linalg.norm(x)
        if norm0 == 0:
            continue
        for _ in range(2):
            coef = adjoint(basis) @ x
            if np.any(coef):
                x = x - basis @ coef
        nx = np.linalg.norm(x)
        if nx <= tol * norm0:
            continue
        if nx != 1.0:
            x = x / nx
        out.append(x)
        basis = np.column_stack([basis, x])
    if not out:
        return np.zeros((n, 0), dtype=np.complex128)
    return np.column_stack(out)


def span_basis(vectors, tol=1e-10):
    """Orthonormal basis for the column span of ``vectors``."""
    return SubspaceBasis(orthonormalize(vectors, tol=tol))


class Relation(Enum):
    EQUAL = "Equal"
    A_INSIDE_B = "AInsideB"
    B_INSIDE_A = "BInsideA"
    INCOMPARABLE = "Incomparable"

    def mirrored(self):
        return {Relation.A_INSIDE_B: Relation.B_INSIDE_A,
                Relation.B_INSIDE_A: Relation.A_INSIDE_B}.get(self, self)


@dataclass(frozen=True)
class Comparison:
    relation: Relation
    a_in_b: float  # worst ||(I - P_B) a|| over the basis of A
    b_in_a: float

    @property
    def a_inside_b(self):
        return self.relation in (Relation.EQUAL, Relation.A_INSIDE_B)

    @property
    def b_inside_a(self):
        return self.relation in (Relation.EQUAL, Relation.B_INSIDE_A)


def _containment_residual(a, b):
    if a.dim == 0:
        return 0.0
    r = a.vectors - b.vectors @ (adjoint(b.vectors) @ a.vectors)
    return float(np.linalg.norm(r, axis=0).max())


def subspace_compare(a, b, tol=EQUALITY_TOL):
    """Decide containment between two subspaces by projection residuals."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")
    ab = _containment_residual(a, b)
    ba = _containment_residual(b, a)
    inside, outside = ab <= tol, ba <= tol
    if inside and outside:
        rel = Relation.EQUAL
    elif inside:
        rel = Relation.A_INSIDE_B
    elif outside:
        rel = Relation.B_INSIDE_A
    else:
        rel = Relation.INCOMPARABLE
    return Comparison(rel, ab, ba)


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(pair):
    if isinstance(pair, (int, float)):
        return complex(pair)
    re, im = pair
    return complex(float(re), float(im))


def matrix_to_json(m):
    m = np.asarray(m, dtype=np.complex128)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]),
            "entries": [complex_to_json(z) for z in m.reshape(-1)]}


def matrix_from_json(data):
    rows, cols = int(data["rows"]), int(data["cols"])
    entries = data["entries"]
    if len(entries) != rows * cols:
        raise DimensionMismatch(f"{len(entries)} entries for a {rows}x{cols} matrix")
    flat = np.array([complex_from_json(e) for e in entries], dtype=np.complex128)
    return as_matrix(flat.reshape(rows, cols))
