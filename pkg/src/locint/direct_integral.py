"""Direct integrals of quantized domains over atomic measure spaces.

For a finite atom list the direct integral of the fibres ``H_p`` is the
weighted direct sum.  The assembled ambient space is the concatenation of
the fibre ambient spaces (atom-major); a field ``x`` is stored there as the
block vector ``(sqrt(mu(p)) x(p))_p`` so the weighted inner product becomes
the Euclidean one.  Level ``alpha`` of the assembled domain is spanned by
the block-diagonal matrix of fibre level bases.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import domain as _domain
from .domain import QuantizedDomain, _detect_prefix_parents, projection
from .errors import (DimensionMismatch, FiberPosetMismatch, LevelIncomparable,
                     UnknownElement)
from .linalg import adjoint
from .report import CheckReport, status


@dataclass(frozen=True)
class AtomicMeasureSpace:
    atoms: tuple
    weights: dict

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("duplicate atom labels")
        if set(self.weights) != set(self.atoms):
            raise ValueError("weights must be given for exactly the listed atoms")
        for p, w in self.weights.items():
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"weight of atom {p!r} must be finite and positive, got {w}")

    @classmethod
    def counting(cls, atoms):
        atoms = tuple(atoms)
        return cls(atoms, {p: 1.0 for p in atoms})

    @property
    def is_counting(self):
        return all(w == 1 for w in self.weights.values())

    def __len__(self):
        return len(self.atoms)

    def lookup(self, key):
        if key in self.weights:
            return key
        for p in self.atoms:
            if str(p) == str(key):
                return p
        raise UnknownElement(f"{key!r} is not an atom")

    def to_dict(self):
        return {"atoms": list(self.atoms),
                "weights": {str(p): float(self.weights[p]) for p in self.atoms}}

    @classmethod
    def from_dict(cls, d):
        atoms = tuple(d["atoms"])
        ws = d.get("weights")
        if ws is None:
            return cls.counting(atoms)
        lookup = {str(p): p for p in atoms}
        weights = {}
        for k, w in ws.items():
            if str(k) not in lookup:
                raise UnknownElement(f"weight given for unknown atom {k!r}")
            weights[lookup[str(k)]] = float(w)
        return cls(atoms, weights)


@dataclass(frozen=True)
class FiberField:
    """A field ``p -> x(p)`` with each component in level coordinates of ``H_{level,p}``."""

    level: object
    components: dict


@dataclass(frozen=True, eq=False)
class DirectIntegralDomain:
    measure: AtomicMeasureSpace
    fibers: dict
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if set(self.fibers) != set(self.measure.atoms):
            raise FiberPosetMismatch("fibers must be given for exactly the atoms of the measure")
        first = self.fibers[self.measure.atoms[0]].poset
        for p in self.measure.atoms:
            if self.fibers[p].poset != first:
                raise FiberPosetMismatch(f"fiber {p!r} is indexed by a different poset")

    def __eq__(self, other):
        if not isinstance(other, DirectIntegralDomain):
            return NotImplemented
        return (self.measure == other.measure
                and all(self.fibers[p] == other.fibers[p] for p in self.measure.atoms))

    __hash__ = object.__hash__

    @property
    def atoms(self):
        return self.measure.atoms

    @property
    def poset(self):
        return self.fibers[self.atoms[0]].poset

    def offsets(self):
        """Atom -> slice of the assembled ambient coordinates."""
        out, start = {}, 0
        for p in self.atoms:
            n = self.fibers[p].ambient_dim
            out[p] = slice(start, start + n)
            start += n
        return out

    def level_offsets(self, alpha):
        """Atom -> slice of the assembled level-``alpha`` coordinates."""
        out, start = {}, 0
        for p in self.atoms:
            d = self.fibers[p].dim(alpha)
            out[p] = slice(start, start + d)
            start += d
        return out

    @property
    def ambient_dim(self):
        return sum(self.fibers[p].ambient_dim for p in self.atoms)

    @property
    def assembled(self):
        if "assembled" not in self._cache:
            self._cache["assembled"] = assemble(self)
        return self._cache["assembled"]

    def to_dict(self):
        return {"measure": self.measure.to_dict(),
                "fibers": {str(p): self.fibers[p].to_dict() for p in self.atoms}}

    @classmethod
    def from_dict(cls, d):
        measure = AtomicMeasureSpace.from_dict(d["measure"])
        fibers = {measure.lookup(k): _domain.from_dict(v) for k, v in d["fibers"].items()}
        return cls(measure, fibers)


def _block_diag(blocks, rows, cols):
    out = np.zeros((sum(rows), sum(cols)), dtype=np.complex128)
    r = c = 0
    for b, nr, nc in zip(blocks, rows, cols):
        out[r:r + nr, c:c + nc] = b
        r += nr
        c += nc
    return out


def _assembled_level_basis(dint, alpha):
    fibers = [dint.fibers[p] for p in dint.atoms]
    return _block_diag([f.basis(alpha) for f in fibers],
                       [f.ambient_dim for f in fibers], [f.dim(alpha) for f in fibers])


def assemble(dint):
    """The quantized domain whose level ``alpha`` is the direct sum of the fibre levels."""
    p = dint.poset
    bases = {a: _assembled_level_basis(dint, a) for a in p}
    return QuantizedDomain(p, dint.ambient_dim, bases, _detect_prefix_parents(p, bases))


def weight_scale(dint):
    """Per-coordinate ``sqrt(mu(p))`` over the assembled ambient space."""
    return np.concatenate([np.full(dint.fibers[p].ambient_dim, math.sqrt(dint.measure.weights[p]))
                           for p in dint.atoms])


def check_field(dint, x):
    dint.poset.index(x.level)
    comps = {}
    for key, c in x.components.items():
        comps[dint.measure.lookup(key)] = c
    for p in dint.atoms:
        d = dint.fibers[p].dim(x.level)
        c = np.asarray(comps.get(p, np.zeros(d)), dtype=np.complex128)
        if c.shape != (d,):
            raise DimensionMismatch(f"component at {p!r} has shape {c.shape}, "
                                    f"level {x.level!r} has dimension {d}")
        comps[p] = c
    return FiberField(x.level, comps)


def fiber_vector(dint, x, p):
    """Component ``x(p)`` in the ambient coordinates of the fibre ``H_p``."""
    return dint.fibers[p].from_level(x.level, x.components[p])


def to_assembled(dint, x):
    """Ambient coordinates of ``x`` in the assembled domain (weights folded in)."""
    x = check_field(dint, x)
    parts = []
    for p in dint.atoms:
        w = dint.measure.weights[p]
        v = fiber_vector(dint, x, p)
        parts.append(v if w == 1 else math.sqrt(w) * v)
    return np.concatenate(parts)


def from_assembled(dint, vector, level):
    """Inverse of :func:`to_assembled` for a vector lying in ``level``."""
    vector = np.asarray(vector, dtype=np.complex128)
    comps = {}
    for p, sl in dint.offsets().items():
        w = dint.measure.weights[p]
        v = vector[sl] if w == 1 else vector[sl] / math.sqrt(w)
        comps[p] = dint.fibers[p].to_level(level, v)
    return FiberField(level, comps)


def promote(dint, x, beta):
    """Re-express a field at a higher level through the fibre inclusions."""
    x = check_field(dint, x)
    if x.level == beta:
        return x
    if not dint.poset.leq(x.level, beta):
        raise LevelIncomparable(f"cannot promote from {x.level!r} to {beta!r}")
    return FiberField(beta, {p: dint.fibers[p].inclusion(x.level, beta) @ x.components[p]
                             for p in dint.atoms})


def inner_product(dint, x, y):
    """``sum_p mu(p) <x(p), y(p)>``, conjugate-linear in ``x``.

    Fields at comparable levels are compared at the higher one; incomparable
    levels raise :class:`LevelIncomparable` (promote explicitly through an
    upper bound instead).
    """
    x, y = check_field(dint, x), check_field(dint, y)
    if dint.poset.leq(x.level, y.level):
        x = promote(dint, x, y.level)
    elif dint.poset.leq(y.level, x.level):
        y = promote(dint, y, x.level)
    else:
        raise LevelIncomparable(f"levels {x.level!r} and {y.level!r} are incomparable")
    return complex(sum(dint.measure.weights[p] * np.vdot(x.components[p], y.components[p])
                       for p in dint.atoms))


def projection_defect_profile(dint, x, chain):
    """``f_alpha = sum_p mu(p) ||x(p) - Q_{alpha,p} x(p)||^2`` along a chain.

    ``Q_{alpha,p}`` is the projection of ``H_p`` onto ``H_{alpha,p}``.  Each
    fibre vector is taken in top canonical coordinates, where along a prefix
    path the projection just keeps the leading coordinates; the squared
    distance is then the norm of the discarded tail, so it is never negative
    and vanishes exactly from the field's own level upward.
    """
    chain = dint.poset.check_chain(chain)
    x = check_field(dint, x)
    top = dint.poset.top
    lifted = promote(dint, x, top).components
    out = []
    for a in chain:
        total = 0.0
        for p in dint.atoms:
            fib, v = dint.fibers[p], lifted[p]
            if fib.prefix_path(a, top):
                r = v[fib.dim(a):]
            else:
                j = fib.inclusion(a, top)
                r = v - j @ (adjoint(j) @ v)
            total += dint.measure.weights[p] * float(np.vdot(r, r).real)
        out.append(total)
    return out


def assembled_defect_profile(dint, x, chain):
    """Same profile computed on the assembled domain: ``||X - P_alpha X||^2``."""
    chain = dint.poset.check_chain(chain)
    big = dint.assembled
    xv = to_assembled(dint, x)
    out = []
    for a in chain:
        r = xv - projection(big, a) @ xv
        out.append(float(np.vdot(r, r).real))
    return out


def interchange_check(dint):
    """Compare the two orders of building the assembled filtration.

    Route A takes the direct integral at each level (the assembled domain).
    Route B starts from each fibre's own filtration, i.e. the per-atom level
    projections and bases, and stacks them.  At finite scale both must agree
    exactly: same dimensions, same bases, same projections.  Fibre bases
    that broke canonical form are reported too.
    """
    p = dint.poset
    big = assemble(dint)
    dims, residuals, failures = {}, {}, []
    for a in p.linear_extension():
        fib = [dint.fibers[q] for q in dint.atoms]
        rank_b = sum(int(np.linalg.matrix_rank(projection(f, a), tol=1e-10)) if f.dim(a) else 0
                     for f in fib)
        da = big.dim(a)
        dims[str(a)] = {"union_of_integrals": da, "integral_of_unions": rank_b,
                        "sum_of_fiber_dims": sum(f.dim(a) for f in fib)}
        if not da == rank_b == dims[str(a)]["sum_of_fiber_dims"]:
            failures.append(f"dimension mismatch at {a!r}")
        stacked = _block_diag([f.basis(a) for f in fib], [f.ambient_dim for f in fib],
                              [f.dim(a) for f in fib])
        basis_res = float(np.abs(big.basis(a) - stacked).max()) if stacked.size else 0.0
        proj_b = _block_diag([projection(f, a) for f in fib], [f.ambient_dim for f in fib],
                             [f.ambient_dim for f in fib])
        proj_res = float(np.abs(projection(big, a) - proj_b).max())
        canon = 0.0
        for f in fib:
            rep = _domain.validate(f)
            if a in rep.prefix_residuals:
                canon = max(canon, rep.prefix_residuals[a])
        residuals[str(a)] = {"basis": basis_res, "projection": proj_res, "canonical_form": canon}
        if basis_res != 0.0:
            failures.append(f"assembled basis differs at {a!r}")
        if proj_res != 0.0:
            failures.append(f"projection mismatch at {a!r}")
        if canon != 0.0:
            failures.append(f"fibre basis not in canonical form at {a!r}")
    return CheckReport("interchange", status(not failures), dims, residuals,
                       {"failures": failures} if failures else {})


def direct_sum_check(dint):
    """For a counting measure the direct integral is the plain direct sum.

    Checks dimensions and inner products of the assembled level bases against
    the unweighted concatenation of fibre vectors.
    """
    big = dint.assembled
    dims, residuals, failures = {}, {}, []
    if not dint.measure.is_counting:
        failures.append("measure is not counting")
    for a in dint.poset:
        d_sum = sum(dint.fibers[p].dim(a) for p in dint.atoms)
        dims[str(a)] = {"assembled": big.dim(a), "direct_sum": d_sum}
        if big.dim(a) != d_sum:
            failures.append(f"dimension mismatch at {a!r}")
        # fields given by the level basis vectors, one atom at a time
        worst = 0.0
        fields = []
        for p, sl in dint.level_offsets(a).items():
            for k in range(sl.stop - sl.start):
                comps = {q: np.zeros(dint.fibers[q].dim(a), dtype=np.complex128)
                         for q in dint.atoms}
                comps[p][k] = 1.0
                fields.append(FiberField(a, comps))
        # the direct sum of the level spaces: plain concatenation of level coordinates
        for i, x in enumerate(fields):
            xv = np.concatenate([x.components[q] for q in dint.atoms])
            for y in fields[i:]:
                yv = np.concatenate([y.components[q] for q in dint.atoms])
                worst = max(worst, abs(inner_product(dint, x, y) - np.vdot(xv, yv)))
        residuals[str(a)] = worst
        if worst != 0.0:
            failures.append(f"inner product mismatch at {a!r}")
    return CheckReport("direct_sum", status(not failures), dims, residuals,
                       {"failures": failures} if failures else {})


def truncated_counting(fiber_rule, m):
    """Counting-measure direct integral over atoms ``1..m`` of ``fiber_rule(p)``.

    Stands in for a countable atom set: any finitely supported field lives
    on some truncation.
    """
    atoms = tuple(range(1, m + 1))
    return DirectIntegralDomain(AtomicMeasureSpace.counting(atoms),
                                {p: fiber_rule(p) for p in atoms})
