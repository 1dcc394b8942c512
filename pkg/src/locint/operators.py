"""Locally bounded operators on a quantized domain.

An operator is carried by its matrix on the top level, in the canonical
coordinates of that level.  Because a finite directed poset has a top, the
projective family ``{T_alpha}`` is derived from it by restriction:
``T_alpha = J^* T_top J`` with ``J`` the inclusion of ``H_alpha`` into the
top level.  Along canonical prefix pairs this is literally an upper-left
block; those blocks are sliced or copied so the recorded projective
relations hold exactly.
"""

from dataclasses import dataclass

import numpy as np

from .domain import standard_flag
from .errors import (BlockIncompatible, DepthExceeded, DimensionMismatch, DomainMismatch,
                     NotLocallyBounded, VectorOutsideDomain)
from .linalg import adjoint, as_matrix, matrix_from_json, matrix_to_json, operator_norm

REDUCING_TOL = 1e-10
BLOCK_TOL = 1e-10


def reducing_residuals(domain, top_matrix):
    """Per level: ``max(||P T P - T P||, ||P T* P - T* P||)`` in top coordinates."""
    t = top_matrix
    th = adjoint(t)
    out = {}
    for a in domain.poset:
        p = domain.top_projection(a)
        tp, thp = t @ p, th @ p
        out[a] = max(operator_norm(p @ tp - tp), operator_norm(p @ thp - thp))
    return out


class LocalOperator:
    """A locally bounded operator, i.e. a projective family of level blocks.

    Use :func:`from_top`, :func:`from_blocks` or :func:`from_ambient` rather
    than the constructor; they validate the reducing condition.
    """

    __slots__ = ("domain", "top_matrix", "_blocks")

    def __init__(self, domain, top_matrix):
        self.domain = domain
        self.top_matrix = top_matrix
        self.top_matrix.setflags(write=False)
        self._blocks = {}

    def __repr__(self):
        return f"LocalOperator(ambient_dim={self.domain.ambient_dim}, levels={len(self.domain.poset)})"

    def restrict(self, alpha):
        """Level block ``T_alpha`` in canonical level coordinates (memoised)."""
        d = self.domain
        d.poset.index(alpha)
        if alpha in self._blocks:
            return self._blocks[alpha]
        if alpha == d.top:
            block = self.top_matrix
        else:
            child = d.prefix_child(alpha)
            k = d.dim(alpha)
            if child is not None:
                block = np.array(self.restrict(child)[:k, :k])
            else:
                j = d.in_top(alpha)
                block = adjoint(j) @ self.top_matrix @ j
                # keep the recorded prefix relation exact off the top's path too
                parent = d.prefix_parent.get(alpha)
                if parent is not None:
                    kp = d.dim(parent)
                    block[:kp, :kp] = self.restrict(parent)
            block.setflags(write=False)
        self._blocks[alpha] = block
        return block

    def blocks(self):
        return {a: self.restrict(a) for a in self.domain.poset}

    @property
    def ambient_matrix(self):
        """Action on the ambient space in its standard coordinates."""
        if self.domain.top_is_standard:
            return self.top_matrix
        v = self.domain.basis(self.domain.top)
        return v @ self.top_matrix @ adjoint(v)

    def apply(self, x):
        """``T x`` for an ambient vector ``x``."""
        x = _ambient_vector(self.domain, x)
        return self.ambient_matrix @ x

    # algebra
    def _check_same(self, other):
        if not isinstance(other, LocalOperator):
            return False
        if other.domain is not self.domain and other.domain != self.domain:
            raise DomainMismatch("operators live on different domains")
        return True

    def __add__(self, other):
        if not self._check_same(other):
            return NotImplemented
        return from_top(self.domain, self.top_matrix + other.top_matrix)

    def __sub__(self, other):
        if not self._check_same(other):
            return NotImplemented
        return from_top(self.domain, self.top_matrix - other.top_matrix)

    def __neg__(self):
        return LocalOperator(self.domain, -self.top_matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, LocalOperator):
            return self @ scalar
        return from_top(self.domain, complex(scalar) * self.top_matrix)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not self._check_same(other):
            return NotImplemented
        return from_top(self.domain, self.top_matrix @ other.top_matrix)

    def adjoint(self):
        return from_top(self.domain, np.ascontiguousarray(adjoint(self.top_matrix)))

    @property
    def H(self):
        return self.adjoint()

    def equals(self, other):
        """Exact equality of top matrices on equal domains."""
        return self.domain == other.domain and np.array_equal(self.top_matrix, other.top_matrix)

    def to_dict(self, domain_ref=None):
        out = {"top_matrix": matrix_to_json(self.top_matrix)}
        if domain_ref is not None:
            out["domain_ref"] = domain_ref
        return out


def from_top(domain, m):
    """Operator with top-level matrix ``m``; raises if some level is not reducing."""
    n = domain.ambient_dim
    m = as_matrix(m, (n, n))
    res = reducing_residuals(domain, m)
    worst = max(res, key=lambda a: (res[a], -domain.poset.index(a)))
    if res[worst] > REDUCING_TOL:
        raise NotLocallyBounded(f"level {worst!r} is not reducing (residual {res[worst]:.3e})",
                                level=worst, residual=res[worst])
    return LocalOperator(domain, m)


def from_ambient(domain, m):
    """Operator given by its matrix in standard ambient coordinates."""
    n = domain.ambient_dim
    m = as_matrix(m, (n, n))
    if not domain.top_is_standard:
        v = domain.basis(domain.top)
        m = adjoint(v) @ m @ v
    return from_top(domain, m)


def from_blocks(domain, blocks):
    """Assemble an operator from a projective family ``{alpha: T_alpha}``.

    Every pair ``alpha <= beta`` must satisfy ``J^* T_beta J == T_alpha``
    (an upper-left block in canonical coordinates).
    """
    p = domain.poset
    bl = {}
    for key, b in blocks.items():
        a = p.lookup(key)
        bl[a] = as_matrix(b)
    missing = [a for a in p if a not in bl]
    if missing:
        raise BlockIncompatible(f"no block given for levels {missing!r}")
    for a in p:
        k = domain.dim(a)
        if bl[a].shape != (k, k):
            raise BlockIncompatible(f"block at {a!r} has shape {bl[a].shape}, expected {(k, k)}")
    for a, b in p.pairs():
        k = domain.dim(a)
        if domain.prefix_path(a, b):
            restricted = bl[b][:k, :k]
        else:
            j = domain.inclusion(a, b)
            restricted = adjoint(j) @ bl[b] @ j
        r = float(np.abs(restricted - bl[a]).max()) if k else 0.0
        if r > BLOCK_TOL:
            raise BlockIncompatible(f"block at {a!r} is not the restriction of the block at "
                                    f"{b!r} (residual {r:.3e})")
    return from_top(domain, bl[domain.top])


def decompose(op):
    return op.blocks()


def restrict(op, alpha):
    return op.restrict(alpha)


def identity(domain):
    return LocalOperator(domain, np.eye(domain.ambient_dim, dtype=np.complex128))


def zero(domain):
    return LocalOperator(domain, np.zeros((domain.ambient_dim,) * 2, dtype=np.complex128))


def _ambient_vector(domain, u):
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (domain.ambient_dim,) or not np.isfinite(u).all():
        raise VectorOutsideDomain(f"expected a finite vector of length {domain.ambient_dim}, "
                                  f"got shape {u.shape}")
    return u


def uniform_seminorm(op, alpha):
    """``p_alpha(T) = ||T_alpha||``."""
    return operator_norm(op.restrict(alpha))


def strong_seminorm(op, u):
    """``q_u(T) = ||T u||``, evaluated in the smallest level containing ``u``."""
    d = op.domain
    u = _ambient_vector(d, u)
    level = d.smallest_level_containing(u)
    if level is None:
        raise VectorOutsideDomain("vector lies in no level")
    c = d.to_level(level, u)
    return float(np.linalg.norm(op.restrict(level) @ c))


def weak_seminorm(op, u, v):
    """``q_{u,v}(T) = |<u, T v>|``."""
    d = op.domain
    u, v = _ambient_vector(d, u), _ambient_vector(d, v)
    return float(abs(np.vdot(u, op.apply(v))))


def seminorm(op, kind, *, level=None, u=None, v=None):
    """Dispatch to the uniform, strong or weak seminorm."""
    if kind == "uniform":
        return uniform_seminorm(op, level)
    if kind == "strong":
        return strong_seminorm(op, u)
    if kind == "weak":
        return weak_seminorm(op, u, v)
    raise ValueError(f"unknown seminorm kind {kind!r}")


def seminorm_profile(op):
    return {a: uniform_seminorm(op, a) for a in op.domain.poset}


def alg_op(kind, t, s=None, scalar=None):
    if kind == "add":
        return t + s
    if kind == "scale":
        return t * scalar
    if kind == "compose":
        return t @ s
    if kind == "adjoint":
        return t.adjoint()
    raise ValueError(f"unknown operation {kind!r}")


def operator_from_dict(data, domain):
    if "top_matrix" in data:
        return from_top(domain, matrix_from_json(data["top_matrix"]))
    if "blocks" in data:
        return from_blocks(domain, {k: matrix_from_json(v) for k, v in data["blocks"].items()})
    raise ValueError("operator needs 'top_matrix' or 'blocks'")


# the lazy N-chain regime

@dataclass(frozen=True)
class LazyChainOperator:
    """An operator on the standard flag over N given level by level.

    ``dim_rule(n)`` is the dimension of the n-th level (strictly increasing)
    and ``block_rule(n)`` the ``dim_rule(n)``-square block there; smaller
    blocks must be upper-left corners of larger ones.
    """

    dim_rule: object
    block_rule: object
    truncation_depth: int
    name: str = "custom"
    params: tuple = ()

    def to_dict(self):
        return {"rule": self.name, "depth": self.truncation_depth, **dict(self.params)}


def lazy_truncate(lazy, n):
    """The first ``n`` levels as a :class:`LocalOperator` on a standard flag."""
    if not 1 <= n <= lazy.truncation_depth:
        raise DepthExceeded(f"depth {n} outside 1..{lazy.truncation_depth}")
    dims = [int(lazy.dim_rule(k)) for k in range(1, n + 1)]
    if any(a >= b for a, b in zip(dims, dims[1:])):
        raise DimensionMismatch(f"dim_rule is not strictly increasing: {dims}")
    domain = standard_flag(dims)
    top = as_matrix(lazy.block_rule(n), (dims[-1], dims[-1]))
    for k, d in enumerate(dims[:-1], start=1):
        block = as_matrix(lazy.block_rule(k), (d, d))
        if not np.array_equal(block, top[:d, :d]):
            raise BlockIncompatible(f"block_rule({k}) is not the corner of block_rule({n})")
    return from_top(domain, top)


def _diag_rule(depth, scale=1.0):
    return LazyChainOperator(lambda n: n,
                             lambda n: np.diag(scale * np.arange(1, n + 1, dtype=np.float64))
                             .astype(np.complex128),
                             depth, "diag_n", (("scale", scale),) if scale != 1.0 else ())


def _identity_rule(depth):
    return LazyChainOperator(lambda n: n, lambda n: np.eye(n, dtype=np.complex128),
                             depth, "identity")


LAZY_RULES = {"diag_n": _diag_rule, "identity": _identity_rule}


def lazy_rule(name, depth, **params):
    """Registered lazy rule by name, e.g. ``lazy_rule("diag_n", 32)`` for ``S e_k = k e_k``."""
    try:
        factory = LAZY_RULES[name]
    except KeyError:
        raise ValueError(f"unknown lazy rule {name!r}; known: {sorted(LAZY_RULES)}") from None
    return factory(int(depth), **params)
