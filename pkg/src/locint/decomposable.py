"""Decomposable and diagonalizable operators on a direct-integral domain.

A decomposable operator is a family ``{T_p}`` of locally bounded fibre
operators acting componentwise, ``(Tu)(p) = T_p u(p)``.  On the assembled
domain it is the block-diagonal (across atoms) operator; since the atom
weights only rescale whole blocks, they do not enter its matrix.
A diagonalizable operator has scalar fibres ``T_p = f(p) Id``.
"""

import numpy as np

from . import operators as ops
from .direct_integral import FiberField, _block_diag, check_field
from .errors import (FiberMismatch, LevelMismatch, MissingAtomValue, NotLocallyBounded,
                     UnknownElement)
from .linalg import (adjoint, complex_from_json, complex_to_json, null_space_basis,
                     operator_norm)
from .report import CheckReport, status

DETECT_TOL = 1e-10


class DecomposableOperator:
    """``T = integral of T_p``; the fibres are the source of truth."""

    def __init__(self, dint, fiber_ops):
        self.dint = dint
        self.fiber_ops = fiber_ops
        self._assembled = None

    def __repr__(self):
        return f"DecomposableOperator(atoms={list(self.dint.atoms)!r})"

    @property
    def assembled(self):
        """The operator on the assembled domain (derived, memoised)."""
        if self._assembled is None:
            fibers = [self.fiber_ops[p] for p in self.dint.atoms]
            sizes = [f.domain.ambient_dim for f in fibers]
            top = _block_diag([f.top_matrix for f in fibers], sizes, sizes)
            self._assembled = ops.from_top(self.dint.assembled, top)
        return self._assembled

    def fiber_restriction(self, p, alpha):
        return self.fiber_ops[p].restrict(alpha)

    def _fiberwise(self, fn, other=None):
        if other is None:
            return DecomposableOperator(self.dint, {p: fn(t) for p, t in self.fiber_ops.items()})
        if other.dint is not self.dint and other.dint != self.dint:
            raise FiberMismatch("decomposable operators over different direct integrals")
        return DecomposableOperator(self.dint, {p: fn(t, other.fiber_ops[p])
                                                for p, t in self.fiber_ops.items()})

    def __add__(self, other):
        return self._fiberwise(lambda a, b: a + b, other)

    def __sub__(self, other):
        return self._fiberwise(lambda a, b: a - b, other)

    def __mul__(self, scalar):
        return self._fiberwise(lambda a: a * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return self._fiberwise(lambda a, b: a @ b, other)

    def adjoint(self):
        return self._fiberwise(lambda a: a.adjoint())

    def to_dict(self):
        return {"fibers": {str(p): self.fiber_ops[p].to_dict() for p in self.dint.atoms}}


class DiagonalizableOperator(DecomposableOperator):
    """``T = integral of f(p) Id``, for a function ``f`` on the atoms."""

    def __init__(self, dint, f):
        self.f = f
        fibers = {p: ops.LocalOperator(dint.fibers[p],
                                       f[p] * np.eye(dint.fibers[p].ambient_dim,
                                                     dtype=np.complex128))
                  for p in dint.atoms}
        super().__init__(dint, fibers)

    def __repr__(self):
        return f"DiagonalizableOperator(f={self.f!r})"

    @property
    def as_decomposable(self):
        return DecomposableOperator(self.dint, dict(self.fiber_ops))

    @property
    def sup_norm(self):
        """``max_p |f(p)|``, the essential supremum for positive atom weights."""
        return max(abs(self.f[p]) for p in self.dint.atoms)

    def _pointwise(self, fn, other=None):
        if other is None:
            return DiagonalizableOperator(self.dint, {p: fn(self.f[p]) for p in self.dint.atoms})
        return DiagonalizableOperator(self.dint, {p: fn(self.f[p], other.f[p])
                                                  for p in self.dint.atoms})

    def __add__(self, other):
        if isinstance(other, DiagonalizableOperator):
            return self._pointwise(lambda a, b: a + b, other)
        return super().__add__(other)

    def __mul__(self, scalar):
        return self._pointwise(lambda a: complex(scalar) * a)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, DiagonalizableOperator):
            return self._pointwise(lambda a, b: a * b, other)
        return super().__matmul__(other)

    def adjoint(self):
        return self._pointwise(lambda a: a.conjugate())

    def to_dict(self):
        return {"f": {str(p): complex_to_json(self.f[p]) for p in self.dint.atoms}}


def decomposable_from_fibers(dint, fiber_ops):
    """Assemble ``integral of T_p`` from one operator per atom.

    Each entry may be a :class:`~locint.operators.LocalOperator` on the
    matching fibre domain or a plain top-level matrix for it.

    Raises
    ------
    FiberMismatch
        Missing atom, unknown atom, or an operator on the wrong fibre.
    NotLocallyBounded
        From the fibre validation, or (guarded) on the assembled domain.
    """
    fibers = {}
    for key, t in fiber_ops.items():
        try:
            p = dint.measure.lookup(key)
        except UnknownElement:
            raise FiberMismatch(f"{key!r} is not an atom") from None
        fib = dint.fibers[p]
        if isinstance(t, ops.LocalOperator):
            if t.domain is not fib and t.domain != fib:
                raise FiberMismatch(f"operator for atom {p!r} lives on a different domain")
        else:
            t = np.asarray(t)
            if t.shape != (fib.ambient_dim, fib.ambient_dim):
                raise FiberMismatch(f"matrix for atom {p!r} has shape {t.shape}, fibre "
                                    f"dimension is {fib.ambient_dim}")
            t = ops.from_top(fib, t)
        fibers[p] = t
    missing = [p for p in dint.atoms if p not in fibers]
    if missing:
        raise FiberMismatch(f"no fibre operator for atoms {missing!r}")
    out = DecomposableOperator(dint, fibers)
    out.assembled  # validates on the assembled domain
    return out


def diagonalizable_from_function(dint, f):
    """The operator ``integral of f(p) Id``; ``f`` maps atoms to scalars."""
    vals = {}
    for key, v in dict(f).items():
        vals[dint.measure.lookup(key)] = complex(v)
    missing = [p for p in dint.atoms if p not in vals]
    if missing:
        raise MissingAtomValue(f"f is not defined on atoms {missing!r}")
    return DiagonalizableOperator(dint, vals)


def indicator(dint, p):
    """The diagonalizable operator of the indicator function of one atom."""
    p = dint.measure.lookup(p)
    return diagonalizable_from_function(dint, {q: 1.0 if q == p else 0.0 for q in dint.atoms})


def apply(t, u):
    """Componentwise action ``(Tu)(p) = T_p u(p)`` on a field, same level."""
    if u.level not in t.dint.poset:
        raise LevelMismatch(f"field level {u.level!r} is not an index of the domain")
    try:
        u = check_field(t.dint, u)
    except ValueError as e:
        raise LevelMismatch(str(e)) from None
    return FiberField(u.level, {p: t.fiber_restriction(p, u.level) @ u.components[p]
                                for p in t.dint.atoms})


def apply_assembled(t, u):
    """Same action through the assembled level matrix (cross-check route)."""
    dint = t.dint
    u = check_field(dint, u)
    a = u.level
    offs = dint.level_offsets(a)
    scale = {p: np.sqrt(dint.measure.weights[p]) for p in dint.atoms}
    coords = np.concatenate([scale[p] * u.components[p] for p in dint.atoms]) \
        if dint.atoms else np.zeros(0)
    out = t.assembled.restrict(a) @ coords
    return FiberField(a, {p: out[offs[p]] / scale[p] for p in dint.atoms})


def dec_norm_profile(t):
    """Per level: the formula ``max_p ||T_p|H_{alpha,p}||`` and the assembled norm."""
    out = {}
    for a in t.dint.poset:
        formula = max(operator_norm(t.fiber_restriction(p, a)) for p in t.dint.atoms)
        direct = operator_norm(t.assembled.restrict(a))
        out[a] = {"formula": formula, "assembled": direct, "difference": abs(formula - direct)}
    return out


def embed_phi(t):
    """Bounded extension of a diagonalizable operator to the completion.

    At finite scale the completion is the assembled top level itself, and
    the image is the block-scalar matrix ``diag(f(p) Id_{H_p})``.
    """
    return np.array(t.assembled.top_matrix)


def phi_kernel_dimension(dint):
    """Kernel dimension of ``f -> Phi(f)`` on functions of the atoms."""
    cols = [embed_phi(indicator(dint, p)).reshape(-1) for p in dint.atoms]
    return null_space_basis(np.column_stack(cols)).dim


def verify_phi(dint, f, g):
    """Homomorphism, involution, injectivity, isometry and commutativity of ``Phi``."""
    s = diagonalizable_from_function(dint, f)
    t = diagonalizable_from_function(dint, g)
    ps, pt = embed_phi(s), embed_phi(t)
    res = {
        "multiplicative": operator_norm(embed_phi(s @ t) - ps @ pt),
        "additive": operator_norm(embed_phi(s + t) - (ps + pt)),
        "adjoint": operator_norm(embed_phi(s.adjoint()) - adjoint(ps)),
        "commutator": operator_norm(ps @ pt - pt @ ps),
        "isometry": abs(operator_norm(ps) - s.sup_norm),
        "unit": operator_norm(embed_phi(diagonalizable_from_function(
            dint, {p: 1.0 for p in dint.atoms})) - np.eye(dint.ambient_dim)),
    }
    kernel = phi_kernel_dimension(dint)
    ok = all(v <= 1e-12 for k, v in res.items() if k != "isometry") \
        and res["isometry"] <= 1e-10 and kernel == 0
    return CheckReport("embed_phi", status(ok), {"kernel": kernel, "atoms": len(dint.atoms)}, res)


def detect_decomposable(op, dint, tol=DETECT_TOL):
    """Recover ``{T_p}`` if ``op`` is block-diagonal across atoms at every level.

    Returns ``None`` when some level has a cross-atom block of norm above
    ``tol`` or a recovered block fails to be locally bounded on its fibre.
    """
    for a in dint.poset:
        block = op.restrict(a)
        offs = dint.level_offsets(a)
        off = np.array(block)
        for sl in offs.values():
            off[sl, sl] = 0
        if off.size and operator_norm(off) > tol:
            return None
    offs = dint.level_offsets(dint.poset.top)
    fibers = {}
    for p in dint.atoms:
        try:
            fibers[p] = ops.from_top(dint.fibers[p], np.array(op.top_matrix[offs[p], offs[p]]))
        except NotLocallyBounded:
            return None
    return fibers


def operator_from_dict(data, dint):
    if "f" in data:
        return diagonalizable_from_function(
            dint, {k: complex_from_json(v) for k, v in data["f"].items()})
    if "fibers" in data:
        fibers = {}
        for k, v in data["fibers"].items():
            p = dint.measure.lookup(k)
            fibers[p] = ops.operator_from_dict(v, dint.fibers[p])
        return decomposable_from_fibers(dint, fibers)
    raise ValueError("decomposable operator needs 'fibers' or 'f'")
