"""Quantized domains: nested isometric filtrations of a finite-dimensional space.

A :class:`QuantizedDomain` fixes, for every index of a directed poset, an
orthonormal basis ``V_alpha`` (ambient coordinates, one column per vector)
of the level space ``H_alpha``.  Level coordinates of an ambient vector
``x`` are ``V_alpha^* x``; the inclusion ``H_alpha -> H_beta`` in level
coordinates is the isometry ``V_beta^* V_alpha``.

Domains built by :func:`build_domain` are in canonical form: every level
records a *prefix parent*, a predecessor whose basis is copied verbatim as
the first columns of its own basis.  Along those pairs inclusions are
literally ``[I; 0]`` and operator restrictions are literally upper-left
blocks.
"""

from dataclasses import dataclass, field

import numpy as np

from . import poset as _poset
from .errors import (DimensionMismatch, InclusionViolation, NonMonotoneDims,
                     NotOrthonormal, UnknownElement)
from .linalg import (GRAM_TOL, adjoint, as_matrix, column_projector, gram_defect,
                     matrix_from_json, matrix_to_json, orthonormalize)

INCLUSION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QuantizedDomain:
    poset: _poset.DirectedPoset
    ambient_dim: int
    level_bases: dict
    # alpha -> predecessor whose basis is the exact prefix of alpha's, or None
    prefix_parent: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        missing = [a for a in self.poset if a not in self.level_bases]
        if missing:
            raise UnknownElement(f"no basis given for levels {missing!r}")
        for a, v in self.level_bases.items():
            self.poset.index(a)
            if v.ndim != 2 or v.shape[0] != self.ambient_dim:
                raise DimensionMismatch(f"basis of level {a!r} has shape {v.shape}, "
                                        f"expected ({self.ambient_dim}, d)")
        for a in self.poset:
            self.prefix_parent.setdefault(a, None)

    def __eq__(self, other):
        if not isinstance(other, QuantizedDomain):
            return NotImplemented
        return (self.poset == other.poset and self.ambient_dim == other.ambient_dim
                and all(np.array_equal(self.level_bases[a], other.level_bases[a])
                        for a in self.poset))

    __hash__ = object.__hash__

    def basis(self, alpha):
        self.poset.index(alpha)
        return self.level_bases[alpha]

    def dim(self, alpha):
        return self.basis(alpha).shape[1]

    @property
    def dims(self):
        return {a: self.dim(a) for a in self.poset}

    @property
    def top(self):
        return self.poset.top

    def prefix_child(self, alpha):
        """The level just above ``alpha`` on the prefix path of the top, if ``alpha`` is on it."""
        node = self.top
        while node is not None:
            parent = self.prefix_parent.get(node)
            if parent == alpha:
                return node
            node = parent
        return None

    def prefix_path(self, alpha, beta):
        """True when repeated prefix parents lead from ``beta`` down to ``alpha``."""
        node = beta
        while node is not None:
            if node == alpha:
                return True
            node = self.prefix_parent.get(node)
        return False

    def inclusion(self, alpha, beta):
        """Isometry ``H_alpha -> H_beta`` in level coordinates (``alpha <= beta``)."""
        if not self.poset.leq(alpha, beta):
            raise InclusionViolation(f"{alpha!r} is not below {beta!r}")
        da, db = self.dim(alpha), self.dim(beta)
        if self.prefix_path(alpha, beta):
            return np.eye(db, da, dtype=np.complex128)
        return adjoint(self.basis(beta)) @ self.basis(alpha)

    def in_top(self, alpha):
        """Columns of ``H_alpha`` in top-level coordinates (``inclusion(alpha, top)``)."""
        key = ("in_top", alpha)
        if key not in self._cache:
            j = self.inclusion(alpha, self.top)
            j.setflags(write=False)
            self._cache[key] = j
        return self._cache[key]

    def top_projection(self, alpha):
        """Projection onto ``H_alpha`` in top-level coordinates."""
        key = ("top_projection", alpha)
        if key not in self._cache:
            p = column_projector(self.in_top(alpha))
            p.setflags(write=False)
            self._cache[key] = p
        return self._cache[key]

    @property
    def top_is_standard(self):
        v = self.basis(self.top)
        return np.array_equal(v, np.eye(self.ambient_dim))

    def to_level(self, alpha, x):
        """Level coordinates of an ambient vector (no membership check)."""
        v = self.basis(alpha)
        if np.array_equal(v, np.eye(self.ambient_dim, v.shape[1])):
            return np.asarray(x, dtype=np.complex128)[: v.shape[1]].copy()
        return adjoint(v) @ x

    def from_level(self, alpha, c):
        v = self.basis(alpha)
        c = np.asarray(c, dtype=np.complex128)
        if c.shape != (v.shape[1],):
            raise DimensionMismatch(f"level {alpha!r} has dimension {v.shape[1]}, got {c.shape}")
        if np.array_equal(v, np.eye(self.ambient_dim, v.shape[1])):
            out = np.zeros(self.ambient_dim, dtype=np.complex128)
            out[: v.shape[1]] = c
            return out
        return v @ c

    def smallest_level_containing(self, x, tol=1e-10):
        """Level of least dimension containing ``x`` (ties by label order)."""
        best = None
        for a in self.poset:
            v = self.basis(a)
            r = np.linalg.norm(x - v @ (adjoint(v) @ x))
            if r <= tol * max(1.0, np.linalg.norm(x)):
                if best is None or v.shape[1] < self.dim(best):
                    best = a
        return best

    def to_dict(self):
        return {"poset": self.poset.to_dict(),
                "ambient_dim": self.ambient_dim,
                "levels": {str(a): {"dim": self.dim(a), "basis": matrix_to_json(self.basis(a))}
                           for a in self.poset}}


def _detect_prefix_parents(poset, bases):
    parents = {}
    for a in poset:
        va = bases[a]
        candidates = sorted(poset.below(a, strict=True),
                            key=lambda g: (-bases[g].shape[1], poset.index(g)))
        parents[a] = next((g for g in candidates
                           if np.array_equal(va[:, : bases[g].shape[1]], bases[g])), None)
    return parents


def build_domain(poset, ambient_dim, level_dims, seed_bases=None):
    """Construct a canonical quantized domain.

    Levels are built in a linear extension of the order.  Each level starts
    from the basis of its largest immediate predecessor (copied exactly),
    absorbs the other predecessors, then the seed vectors if any, and is
    completed with standard basis vectors in index order.

    Parameters
    ----------
    poset : DirectedPoset
    ambient_dim : int
    level_dims : mapping alpha -> int
        Must be monotone along the order, with the top equal to ``ambient_dim``.
    seed_bases : mapping alpha -> (ambient_dim, d_alpha) array, optional
        Linearly independent columns spanning the desired level space.  They
        are orthonormalised; each must contain the spans of lower levels.

    Raises
    ------
    NonMonotoneDims, InclusionViolation, NotOrthonormal
    """
    n = int(ambient_dim)
    if n < 1:
        raise DimensionMismatch("ambient dimension must be positive")
    dims = {}
    for key, d in level_dims.items():
        dims[poset.lookup(key)] = int(d)
    for a in poset:
        if a not in dims:
            raise UnknownElement(f"no dimension given for level {a!r}")
        if not 0 <= dims[a] <= n:
            raise NonMonotoneDims(f"dimension {dims[a]} of level {a!r} outside [0, {n}]")
    for a, b in poset.pairs():
        if dims[a] > dims[b]:
            raise NonMonotoneDims(f"dim {a!r} = {dims[a]} exceeds dim {b!r} = {dims[b]}")
    if dims[poset.top] != n:
        raise NonMonotoneDims(f"top level has dimension {dims[poset.top]}, ambient is {n}")

    seeds = {}
    for key, s in (seed_bases or {}).items():
        a = poset.lookup(key)
        s = as_matrix(s)
        if s.shape != (n, dims[a]):
            raise DimensionMismatch(f"seed for {a!r} has shape {s.shape}, expected {(n, dims[a])}")
        seeds[a] = s

    identity = np.eye(n, dtype=np.complex128)
    bases, parents = {}, {}
    for a in poset.linear_extension():
        preds = poset.below(a, strict=True)
        maximal = [g for g in preds if not any(poset.lt(g, h) for h in preds)]
        maximal.sort(key=lambda g: (-dims[g], poset.index(g)))
        if maximal:
            parent = maximal[0]
            current = bases[parent].copy()
            for g in maximal[1:]:
                current = np.column_stack([current, orthonormalize(bases[g], against=current)])
        else:
            parent = None
            current = np.zeros((n, 0), dtype=np.complex128)
        if current.shape[1] > dims[a]:
            raise InclusionViolation(
                f"lower levels of {a!r} span {current.shape[1]} dimensions, more than {dims[a]}")
        if a in seeds:
            seed = seeds[a]
            if orthonormalize(seed).shape[1] != dims[a]:
                raise NotOrthonormal(f"seed basis of {a!r} is linearly dependent")
            q = orthonormalize(seed)
            r = current - q @ (adjoint(q) @ current)
            if current.shape[1] and np.linalg.norm(r, axis=0).max() > 1e-10:
                raise InclusionViolation(f"seed for {a!r} does not contain the lower levels")
            current = np.column_stack([current, orthonormalize(seed, against=current)])
        if current.shape[1] < dims[a]:
            extra = orthonormalize(identity, against=current)
            current = np.column_stack([current, extra[:, : dims[a] - current.shape[1]]])
        bases[a] = np.ascontiguousarray(current[:, : dims[a]])
        parents[a] = parent

    dom = QuantizedDomain(poset, n, bases, parents)
    report = validate(dom)
    if not report.ok:
        raise InclusionViolation("; ".join(report.failures))
    return dom


def standard_flag(dims, labels=None):
    """Chain domain ``span(e_1..e_{d_1}) <= span(e_1..e_{d_2}) <= ...``."""
    dims = list(dims)
    labels = list(labels) if labels is not None else list(range(1, len(dims) + 1))
    p = _poset.chain(labels)
    return build_domain(p, dims[-1], dict(zip(labels, dims)))


def projection(domain, alpha):
    """Orthogonal projection of the ambient space onto level ``alpha``."""
    v = domain.basis(alpha)
    key = ("projection", alpha)
    if key not in domain._cache:
        p = column_projector(v)
        p.setflags(write=False)
        domain._cache[key] = p
    return domain._cache[key]


@dataclass
class DomainReport:
    inclusion_residuals: dict    # (alpha, beta) cover pair -> ||(I - P_beta) V_alpha||
    orthonormality: dict         # alpha -> ||V^* V - I||_max
    dims: dict
    monotone: bool
    prefix_residuals: dict       # alpha -> ||V_alpha[:, :d] - V_parent||, recorded pairs only
    top_spans_ambient: bool
    failures: list

    @property
    def ok(self):
        return not self.failures

    def to_dict(self):
        return {"status": "PASS" if self.ok else "FAIL",
                "dims": {str(a): d for a, d in self.dims.items()},
                "monotone": self.monotone,
                "top_spans_ambient": self.top_spans_ambient,
                "inclusion_residuals": {f"{a}<={b}": r
                                        for (a, b), r in self.inclusion_residuals.items()},
                "orthonormality": {str(a): r for a, r in self.orthonormality.items()},
                "prefix_residuals": {str(a): r for a, r in self.prefix_residuals.items()},
                "failures": list(self.failures)}


def validate(domain, tol=INCLUSION_TOL):
    """Diagnose a domain; failures are listed rather than raised."""
    p = domain.poset
    failures = []
    ortho = {a: gram_defect(domain.basis(a)) for a in p}
    for a, d in ortho.items():
        if d > GRAM_TOL:
            failures.append(f"NotOrthonormal at {a!r}: {d:.3e}")
    dims = domain.dims
    monotone = all(dims[a] <= dims[b] for a, b in p.pairs())
    if not monotone:
        failures.append("NonMonotoneDims")
    incl = {}
    for a, b in p.covers():
        va, vb = domain.basis(a), domain.basis(b)
        if va.shape[1] == 0:
            r = 0.0
        else:
            r = float(np.linalg.norm(va - vb @ (adjoint(vb) @ va), axis=0).max())
        incl[(a, b)] = r
        if r > tol:
            failures.append(f"InclusionViolation {a!r}<={b!r}: {r:.3e}")
    prefix = {}
    for a, g in domain.prefix_parent.items():
        if g is None:
            continue
        vg, va = domain.basis(g), domain.basis(a)
        k = vg.shape[1]
        if va.shape[1] < k:
            prefix[a] = float("inf")
        else:
            prefix[a] = float(np.abs(va[:, :k] - vg).max()) if k else 0.0
        if prefix[a] != 0.0:
            failures.append(f"CanonicalFormViolation {g!r}->{a!r}: {prefix[a]:.3e}")
    top_ok = dims[p.top] == domain.ambient_dim
    if not top_ok:
        failures.append("top level does not span the ambient space")
    return DomainReport(incl, ortho, dims, monotone, prefix, top_ok, failures)


def from_dict(data):
    """Load a domain; levels without a ``basis`` get the canonical extension."""
    p = _poset.from_dict(data["poset"])
    n = int(data["ambient_dim"])
    levels = {p.lookup(k): v for k, v in data["levels"].items()}
    dims = {a: int(levels[a]["dim"]) for a in p}
    given = {a: matrix_from_json(levels[a]["basis"]) for a in p if "basis" in levels[a]}
    if len(given) == len(p):
        for a in p:
            if given[a].shape != (n, dims[a]):
                raise DimensionMismatch(f"basis of {a!r} does not match its declared dim")
        dom = QuantizedDomain(p, n, given, _detect_prefix_parents(p, given))
        report = validate(dom)
        if not report.ok:
            raise InclusionViolation("; ".join(report.failures))
        return dom
    return build_domain(p, n, dims, given)
