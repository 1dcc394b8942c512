"""Finite directed posets used to index filtrations."""

from dataclasses import dataclass, field

import numpy as np

from .errors import NotAChain, NotAPartialOrder, NotDirected, UnknownElement


@dataclass(frozen=True, eq=False)
class DirectedPoset:
    """A finite directed partial order.

    Element labels are opaque hashable scalars (strings or ints, so they can
    travel through JSON).  Their position in ``elements`` is the fixed total
    order used for every deterministic tie-break.  Instances are produced by
    :func:`validate_directed`; the constructor itself does not validate.
    """

    elements: tuple
    relation: np.ndarray  # relation[i, j] is True iff elements[i] <= elements[j]
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {e: i for i, e in enumerate(self.elements)})
        self.relation.setflags(write=False)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, x):
        try:
            return x in self._index
        except TypeError:
            return False

    def __eq__(self, other):
        if not isinstance(other, DirectedPoset):
            return NotImplemented
        return self.elements == other.elements and np.array_equal(self.relation, other.relation)

    def __hash__(self):
        return hash((self.elements, self.relation.tobytes()))

    def index(self, x):
        try:
            return self._index[x]
        except (KeyError, TypeError):
            raise UnknownElement(f"{x!r} is not an element of the poset") from None

    def leq(self, a, b):
        return bool(self.relation[self.index(a), self.index(b)])

    def lt(self, a, b):
        return a != b and self.leq(a, b)

    def comparable(self, a, b):
        return self.leq(a, b) or self.leq(b, a)

    @property
    def top(self):
        """The greatest element (exists because the poset is finite and directed)."""
        full = np.flatnonzero(self.relation.all(axis=0))
        return self.elements[int(full[0])]

    @property
    def bottoms(self):
        """Minimal elements, in label order."""
        r = self.relation
        return [e for j, e in enumerate(self.elements)
                if not any(r[i, j] and i != j for i in range(len(self)))]

    def below(self, b, strict=False):
        j = self.index(b)
        return [e for i, e in enumerate(self.elements)
                if self.relation[i, j] and not (strict and i == j)]

    def above(self, a, strict=False):
        i = self.index(a)
        return [e for j, e in enumerate(self.elements)
                if self.relation[i, j] and not (strict and i == j)]

    def pairs(self, strict=True):
        """All comparable pairs ``(a, b)`` with ``a <= b``, in label order."""
        n = len(self)
        return [(self.elements[i], self.elements[j])
                for i in range(n) for j in range(n)
                if self.relation[i, j] and not (strict and i == j)]

    def covers(self):
        """Covering pairs ``(a, b)``: ``a < b`` with nothing strictly between."""
        r = self.relation
        n = len(self)
        out = []
        for i in range(n):
            for j in range(n):
                if i == j or not r[i, j]:
                    continue
                if not any(k != i and k != j and r[i, k] and r[k, j] for k in range(n)):
                    out.append((self.elements[i], self.elements[j]))
        return out

    def linear_extension(self):
        """Elements listed so that ``a < b`` implies ``a`` comes first.

        Ties are broken by label order, which makes the result unique.
        """
        remaining = list(range(len(self)))
        out = []
        while remaining:
            for i in remaining:
                if not any(self.relation[k, i] for k in remaining if k != i):
                    out.append(self.elements[i])
                    remaining.remove(i)
                    break
        return out

    def is_chain(self, seq):
        seq = list(seq)
        for x in seq:
            self.index(x)
        return all(self.leq(a, b) for a, b in zip(seq, seq[1:])) and len(set(seq)) == len(seq)

    def check_chain(self, seq):
        if not self.is_chain(seq):
            raise NotAChain(f"{list(seq)!r} is not a strictly increasing chain")
        return list(seq)

    def maximal_chains(self):
        """Every maximal chain from a minimal element to the top."""
        def extend(path):
            last = path[-1]
            ups = [b for a, b in self.covers() if a == last]
            if not ups:
                return [path]
            return [c for b in ups for c in extend(path + [b])]
        return [c for b in self.bottoms for c in extend([b])]

    def to_dict(self):
        return {"elements": list(self.elements),
                "covers": [[a, b] for a, b in self.covers()]}

    def lookup(self, key):
        """Resolve a label that went through a JSON object key (always a string)."""
        if key in self:
            return key
        for e in self.elements:
            if str(e) == str(key):
                return e
        raise UnknownElement(f"{key!r} is not an element of the poset")


def _closure(relation):
    r = relation.copy()
    np.fill_diagonal(r, True)
    for k in range(len(r)):
        r |= np.outer(r[:, k], r[k, :])
    return r


def validate_directed(elements, relation):
    """Validate ``relation`` as a directed partial order on ``elements``.

    ``relation`` is either a boolean matrix or an iterable of ``(a, b)`` pairs
    meaning ``a <= b``.  No closure is applied: the input must already be
    reflexive and transitive.

    Raises
    ------
    NotAPartialOrder
        On a reflexivity, antisymmetry or transitivity violation.
    NotDirected
        If some pair of elements has no upper bound.
    """
    elements = tuple(elements)
    n = len(elements)
    if n == 0:
        raise NotDirected("the empty poset has no upper bounds")
    if len(set(elements)) != n:
        raise NotAPartialOrder("duplicate element labels")
    if isinstance(relation, np.ndarray):
        r = np.array(relation, dtype=bool)
        if r.shape != (n, n):
            raise NotAPartialOrder(f"relation matrix has shape {r.shape}, expected {(n, n)}")
    else:
        pos = {e: i for i, e in enumerate(elements)}
        r = np.zeros((n, n), dtype=bool)
        for a, b in relation:
            if a not in pos or b not in pos:
                raise UnknownElement(f"relation mentions unknown element in {(a, b)!r}")
            r[pos[a], pos[b]] = True

    if not r.diagonal().all():
        i = int(np.flatnonzero(~r.diagonal())[0])
        raise NotAPartialOrder(f"not reflexive at {elements[i]!r}")
    both = r & r.T
    np.fill_diagonal(both, False)
    if both.any():
        i, j = map(int, np.argwhere(both)[0])
        raise NotAPartialOrder(f"not antisymmetric: {elements[i]!r} and {elements[j]!r}")
    composed = (r.astype(np.int64) @ r.astype(np.int64)) > 0
    if (composed & ~r).any():
        i, j = map(int, np.argwhere(composed & ~r)[0])
        raise NotAPartialOrder(f"not transitive: {elements[i]!r} <= ... <= {elements[j]!r} "
                               "but the pair is missing")
    for i in range(n):
        for j in range(i + 1, n):
            if not (r[i] & r[j]).any():
                raise NotDirected(f"{elements[i]!r} and {elements[j]!r} have no upper bound")

    poset = DirectedPoset(elements, r)
    assert len(np.flatnonzero(r.all(axis=0))) == 1, "finite directed poset without a unique top"
    return poset


def from_covers(elements, covers):
    """Build a poset from generating pairs, closing reflexively and transitively.

    This is the JSON loading path; the closed relation is validated as usual.
    """
    elements = tuple(elements)
    pos = {e: i for i, e in enumerate(elements)}
    r = np.zeros((len(elements), len(elements)), dtype=bool)
    for a, b in covers:
        if a not in pos or b not in pos:
            raise UnknownElement(f"cover {[a, b]!r} mentions an unknown element")
        r[pos[a], pos[b]] = True
    return validate_directed(elements, _closure(r))


def from_dict(data):
    return from_covers(data["elements"], data.get("covers", []))


def chain(labels):
    """Total order ``labels[0] <= labels[1] <= ...``."""
    labels = list(labels)
    return from_covers(labels, list(zip(labels, labels[1:])))


def diamond(bottom="bot", left="a", right="b", top="top"):
    return from_covers([bottom, left, right, top],
                       [(bottom, left), (bottom, right), (left, top), (right, top)])


def branch(poset, beta):
    """The sub-poset ``{alpha : alpha <= beta}`` (always directed, top ``beta``)."""
    j = poset.index(beta)
    keep = np.flatnonzero(poset.relation[:, j])
    return DirectedPoset(tuple(poset.elements[i] for i in keep),
                         poset.relation[np.ix_(keep, keep)].copy())


def upper_bound(poset, a, b):
    """Deterministic upper bound of ``a`` and ``b``.

    Among the minimal upper bounds, the one earliest in label order.
    """
    i, j = poset.index(a), poset.index(b)
    r = poset.relation
    ub = np.flatnonzero(r[i] & r[j])
    minimal = [c for c in ub if not any(d != c and r[d, c] for d in ub)]
    return poset.elements[int(min(minimal))]
