"""Commutants inside the algebra of locally bounded operators.

Operators are coordinatised by their row-major vectorised top-level matrix
(for an assembled domain, the top coordinates already carry the
``sqrt(mu(p))`` scaling, so adjoints are conjugate transposes).  The
ambient algebra ``C*_F(D)`` is the set of matrices commuting with every
level projection, and every commutant is computed as a null space inside
the coordinates of that ambient algebra.
"""

from dataclasses import dataclass

import numpy as np

from . import operators as ops
from .decomposable import decomposable_from_fibers, indicator
from .direct_integral import DirectIntegralDomain, _block_diag
from .domain import QuantizedDomain
from .errors import GeneratorOutsideAmbient
from .linalg import (EQUALITY_TOL, SubspaceBasis, adjoint, null_space_basis, orthonormalize,
                     subspace_compare)
from .poset import branch
from .report import CheckReport, status

GENERATOR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class OperatorSubspace:
    """A linear span of top-level matrices of size ``n``."""

    n: int
    basis: SubspaceBasis
    generators: tuple = ()

    @property
    def dim(self):
        return self.basis.dim

    def matrices(self):
        """Basis elements as ``(dim, n, n)`` array."""
        return np.ascontiguousarray(self.basis.vectors.T).reshape(self.dim, self.n, self.n)

    def residual(self, m):
        """Distance of ``vec(m)`` from the span, relative to ``max(1, ||m||_F)``."""
        m = np.asarray(m).reshape(-1)
        return self.basis.residual(m) / max(1.0, float(np.linalg.norm(m)))

    def contains(self, m, tol=EQUALITY_TOL):
        return self.residual(m) <= tol

    def adjoint_residual(self):
        """Worst distance of an adjoint of a basis element from the span."""
        return max((self.residual(adjoint(b)) for b in self.matrices()), default=0.0)


def _as_matrix(g):
    if isinstance(g, ops.LocalOperator):
        return g.top_matrix
    return np.asarray(g, dtype=np.complex128)


def span(n, matrices):
    mats = [np.asarray(_as_matrix(m)).reshape(-1) for m in matrices]
    if not mats:
        return OperatorSubspace(n, SubspaceBasis(np.zeros((n * n, 0), dtype=np.complex128)))
    return OperatorSubspace(n, SubspaceBasis(orthonormalize(np.column_stack(mats))))


def full_algebra(n):
    return OperatorSubspace(n, SubspaceBasis(np.eye(n * n, dtype=np.complex128)))


def _commutation_rows(basis_mats, s):
    """Columns ``vec(B_j S - S B_j)`` for every basis matrix ``B_j``."""
    k, n, _ = basis_mats.shape
    c = basis_mats @ s - s @ basis_mats
    return c.reshape(k, n * n).T


def _null_within(ambient, constraints, sequential=False):
    """Orthonormal span of ``{T in ambient : C_i(T) = 0 for all i}``.

    By default all commutator maps are stacked into one system (compressed
    to its triangular factor as it grows) and solved with a single SVD: a
    lone generator can have nearly equal eigenvalues, so its own commutator
    map has tiny but genuine singular values, and cutting constraint by
    constraint would misjudge the rank.  ``sequential`` solves one
    constraint at a time, which is cheaper and safe for projections.
    """
    a = ambient.basis.vectors
    k = a.shape[1]
    if k == 0:
        return ambient.basis
    mats = ambient.matrices()
    if sequential:
        current = np.eye(k, dtype=np.complex128)
        for s in constraints:
            if current.shape[1] == 0:
                break
            rows = _commutation_rows(mats, s) @ current
            # ||B S - S B|| <= 2 ||S|| for unit B: rounding-level rows are zero rows
            null = null_space_basis(rows, ncols=current.shape[1],
                                    scale=float(np.linalg.norm(s))).vectors
            current = current @ null
    else:
        r = np.zeros((0, k), dtype=np.complex128)
        scale = 0.0
        for s in constraints:
            r = np.linalg.qr(np.vstack([r, _commutation_rows(mats, s)]), mode="r")
            scale = max(scale, float(np.linalg.norm(s)))
        current = null_space_basis(r, ncols=k, scale=scale).vectors
    vecs = a @ current
    # fold the rounding of the products back onto an orthonormal set
    if vecs.shape[1]:
        q, _ = np.linalg.qr(vecs)
        vecs = q
    return SubspaceBasis(vecs)


def ambient_basis(domain):
    """All top matrices for which every level is reducing.

    Accepts a :class:`QuantizedDomain` or a direct-integral domain (whose
    assembled domain is used).  A level ``H_alpha`` reduces ``T`` exactly
    when ``T`` commutes with the projection onto it.
    """
    if isinstance(domain, DirectIntegralDomain):
        domain = domain.assembled
    n = domain.ambient_dim
    projections = [domain.top_projection(a) for a in domain.poset]
    return OperatorSubspace(n, _null_within(full_algebra(n), projections, sequential=True))


def commutant(generators, ambient):
    """``{T in ambient : T S = S T for every generator S}``.

    ``generators`` may be operators, matrices, or an :class:`OperatorSubspace`
    (whose basis is used).
    """
    if isinstance(generators, OperatorSubspace):
        gens = list(generators.matrices())
    else:
        gens = [_as_matrix(g) for g in generators]
    for i, s in enumerate(gens):
        if s.shape != (ambient.n, ambient.n):
            raise GeneratorOutsideAmbient(f"generator {i} has shape {s.shape}")
        r = ambient.residual(s)
        if r > GENERATOR_TOL:
            raise GeneratorOutsideAmbient(f"generator {i} is not locally bounded "
                                          f"(residual {r:.3e})")
    return OperatorSubspace(ambient.n, _null_within(ambient, gens), tuple(gens))


def double_commutant(generators, ambient):
    return commutant(commutant(generators, ambient), ambient)


def commutator_residual(space, generators):
    """Worst ``||TS - ST|| / (1 + ||T|| ||S||)`` over basis elements and generators."""
    worst = 0.0
    for t in space.matrices():
        nt = np.linalg.norm(t, 2)
        for s in generators:
            s = _as_matrix(s)
            worst = max(worst, np.linalg.norm(t @ s - s @ t, 2) / (1 + nt * np.linalg.norm(s, 2)))
    return float(worst)


def _embed_blocks(n, sizes, p_index, m):
    out = np.zeros((n, n), dtype=np.complex128)
    start = sum(sizes[:p_index])
    out[start:start + sizes[p_index], start:start + sizes[p_index]] = m
    return out


def dec_span(dint):
    """The decomposable operators: fibre ambient algebras placed block-diagonally."""
    sizes = [dint.fibers[p].ambient_dim for p in dint.atoms]
    n = sum(sizes)
    mats = []
    for i, p in enumerate(dint.atoms):
        for b in ambient_basis(dint.fibers[p]).matrices():
            mats.append(_embed_blocks(n, sizes, i, b))
    if not mats:
        return OperatorSubspace(n, SubspaceBasis(np.zeros((n * n, 0), dtype=np.complex128)))
    # distinct blocks are orthogonal and each fibre basis is orthonormal
    return OperatorSubspace(n, SubspaceBasis(np.column_stack([m.reshape(-1) for m in mats])))


def diag_generators(dint):
    """Indicator functions of the atoms; their span is all of DIAG."""
    return [indicator(dint, p).assembled for p in dint.atoms]


def diag_span(dint):
    return span(dint.ambient_dim, diag_generators(dint))


def verify_dec_eq_diag_commutant(dint, tol=EQUALITY_TOL):
    """DEC equals the commutant of DIAG inside the locally bounded operators.

    Also reports the two elementary containments DEC in DIAG' and DIAG in
    DEC'.  With finitely many positively weighted atoms the exceptional null
    sets of the general argument are empty.
    """
    amb = ambient_basis(dint)
    dec = dec_span(dint)
    diag = diag_span(dint)
    diag_c = commutant(diag_generators(dint), amb)
    dec_c = commutant(dec, amb)
    main = subspace_compare(dec.basis, diag_c.basis, tol)
    diag_in = subspace_compare(diag.basis, dec_c.basis, tol)
    residuals = {"DEC_in_DIAG'": main.a_in_b, "DIAG'_in_DEC": main.b_in_a,
                 "DIAG_in_DEC'": diag_in.a_in_b}
    dims = {"ambient": amb.dim, "DEC": dec.dim, "DIAG": diag.dim,
            "DIAG'": diag_c.dim, "DEC'": dec_c.dim}
    ok = main.relation.value == "Equal" and diag_in.a_inside_b
    details = {"relation": main.relation.value,
               "containments": {"DEC<=DIAG'": main.a_inside_b, "DIAG<=DEC'": diag_in.a_inside_b},
               "measure": "counting" if dint.measure.is_counting else "atomic",
               "exceptional_sets": "empty: every atom carries positive mass"}
    return CheckReport("verify_dec_diag", status(ok), dims, residuals, details)


def _branch_fiber(fib, beta):
    """Fibre filtration below ``beta``, coordinatised by level ``beta`` itself."""
    sub = branch(fib.poset, beta)
    bases = {g: fib.inclusion(g, beta) for g in sub}
    parents = {g: (fib.prefix_parent.get(g) if fib.prefix_parent.get(g) in sub else None)
               for g in sub}
    return QuantizedDomain(sub, fib.dim(beta), bases, parents)


def level_dec_span(dint, beta):
    """DEC algebra of level ``beta`` in level-``beta`` coordinates (atom-major)."""
    sizes = [dint.fibers[p].dim(beta) for p in dint.atoms]
    n = sum(sizes)
    mats = []
    for i, p in enumerate(dint.atoms):
        if sizes[i] == 0:
            continue
        fib = _branch_fiber(dint.fibers[p], beta)
        for b in ambient_basis(fib).matrices():
            mats.append(_embed_blocks(n, sizes, i, b))
    if not mats:
        return OperatorSubspace(n, SubspaceBasis(np.zeros((n * n, 0), dtype=np.complex128)))
    return OperatorSubspace(n, SubspaceBasis(np.column_stack([m.reshape(-1) for m in mats])))


def _restrict_block(domain, block, alpha, beta):
    k = domain.dim(alpha)
    if domain.prefix_path(alpha, beta):
        return np.asarray(block)[:k, :k]
    j = domain.inclusion(alpha, beta)
    return adjoint(j) @ block @ j


def _random_coeffs(rng, k):
    return rng.uniform(-1, 1, k) + 1j * rng.uniform(-1, 1, k)


def verify_dec_projective_system(dint, families=None, rng=None, tol=EQUALITY_TOL):
    """DEC as the projective limit of the level DEC algebras.

    Checks, on the assembled domain ``D``:

    (i)   the level-beta DEC algebra restricts into the level-alpha one;
    (ii)  restriction families are compatible, ``phi_{a,b} . phi_b = phi_a``;
          the families default to those of a spanning set of DEC, extra
          ``{alpha: block}`` families may be passed in to be probed;
    (iii) every level DEC algebra is its own double commutant in the full
          matrix algebra of that level (a finite-dimensional von Neumann
          algebra);
    (iv)  the mediating map rebuilds a random decomposable operator from its
          restrictions, fibre by fibre, and is injective.
    """
    rng = np.random.default_rng(rng)
    big = dint.assembled
    poset = dint.poset
    sub = []

    level = {b: level_dec_span(dint, b) for b in poset}

    # (i)
    worst = 0.0
    for a, b in poset.pairs():
        for m in level[b].matrices():
            worst = max(worst, level[a].residual(_restrict_block(big, m, a, b)))
    sub.append(CheckReport("restriction_into_level_algebra", status(worst <= tol), {},
                           {"max": worst}))

    # (ii)
    dec = dec_span(dint)
    fams = [ops.from_top(big, m).blocks() for m in dec.matrices()]
    n_default = len(fams)
    for fam in families or []:
        fams.append({poset.lookup(k): np.asarray(v, dtype=np.complex128) for k, v in fam.items()})
    worst, bad = 0.0, []
    for i, fam in enumerate(fams):
        for a, b in poset.pairs():
            r = float(np.abs(_restrict_block(big, fam[b], a, b) - fam[a]).max()) \
                if big.dim(a) else 0.0
            if r > tol:
                bad.append({"family": i, "pair": [a, b], "residual": r})
            worst = max(worst, r)
    sub.append(CheckReport("compatibility", status(worst <= tol),
                           {"families": len(fams), "probe_families": len(fams) - n_default},
                           {"max": worst}, {"violations": bad} if bad else {}))

    # (iii)
    vn_dims, vn_res, vn_ok = {}, {}, True
    for b in poset:
        lv = level[b]
        full = full_algebra(lv.n)
        bicomm = double_commutant(lv, full)
        cmp = subspace_compare(lv.basis, bicomm.basis, tol)
        vn_dims[str(b)] = {"DEC": lv.dim, "DEC''": bicomm.dim}
        vn_res[str(b)] = max(cmp.a_in_b, cmp.b_in_a)
        vn_ok &= cmp.relation.value == "Equal"
    sub.append(CheckReport("level_von_neumann", status(vn_ok), vn_dims, vn_res))

    # (iv)
    coeffs = _random_coeffs(rng, dec.dim)
    t = ops.from_top(big, np.tensordot(coeffs, dec.matrices(), axes=1))
    psi = t.blocks()
    res = _mediate(dint, psi)
    image = np.column_stack([np.concatenate([np.asarray(blk).reshape(-1) for blk in fam.values()])
                             for fam in fams[:n_default]]) if n_default else np.zeros((1, 0))
    kernel = null_space_basis(image, ncols=n_default).dim if n_default else 0
    rebuilt = res.pop("rebuilt")
    recon = max(float(np.abs(rebuilt.restrict(a) - psi[a]).max()) if big.dim(a) else 0.0
                for a in poset)
    res["reconstruction"] = recon
    ok4 = recon <= tol and res["cross_atom"] <= tol and res["fiber_compatibility"] <= tol \
        and kernel == 0 and res["exceptional_atoms"] == 0
    sub.append(CheckReport("mediating_map", status(ok4), {"kernel": kernel, "DEC": dec.dim},
                           {k: v for k, v in res.items() if k != "exceptional_atoms"},
                           {"exceptional_atoms": res["exceptional_atoms"]}))

    ok = all(s.passed for s in sub)
    out = CheckReport("verify_projective", status(ok),
                      {"levels": len(poset), "DEC": dec.dim},
                      {s.check: max(_flatten_values(s.residuals), default=0.0) for s in sub})
    out.details = {"checks": [s.to_dict() for s in sub]}
    return out


def _flatten_values(d):
    for v in d.values():
        if isinstance(v, dict):
            yield from _flatten_values(v)
        else:
            yield float(v)


def _mediate(dint, psi):
    """Rebuild ``T = integral of T_p`` from a compatible family ``{psi_alpha}``.

    Each ``psi_alpha`` is split into per-atom blocks ``S_{alpha,p}``; the
    fibre operator ``T_p`` is the projective limit of ``alpha -> S_{alpha,p}``.
    """
    poset = dint.poset
    cross = 0.0
    per_atom = {p: {} for p in dint.atoms}
    for a in poset:
        offs = dint.level_offsets(a)
        blk = np.array(psi[a])
        for p, sl in offs.items():
            per_atom[p][a] = np.array(blk[sl, sl])
            blk[sl, sl] = 0
        if blk.size:
            cross = max(cross, float(np.abs(blk).max()))
    compat, exceptional = 0.0, 0
    for p in dint.atoms:
        fib = dint.fibers[p]
        bad = False
        for a, b in poset.pairs():
            if fib.dim(a) == 0:
                continue
            r = float(np.abs(_restrict_block(fib, per_atom[p][b], a, b) - per_atom[p][a]).max())
            compat = max(compat, r)
            bad |= r > EQUALITY_TOL
        exceptional += bad
    fibers = {p: ops.from_blocks(dint.fibers[p], per_atom[p]) for p in dint.atoms}
    rebuilt = decomposable_from_fibers(dint, fibers).assembled
    return {"cross_atom": cross, "fiber_compatibility": compat,
            "exceptional_atoms": exceptional, "rebuilt": rebuilt}


def verify_containments(dint, tol=EQUALITY_TOL):
    """DEC in DIAG' and DIAG in DEC' only."""
    r = verify_dec_eq_diag_commutant(dint, tol)
    c = r.details["containments"]
    ok = c["DEC<=DIAG'"] and c["DIAG<=DEC'"]
    return CheckReport("containments", status(ok), r.dimensions,
                       {"DEC_in_DIAG'": r.residuals["DEC_in_DIAG'"],
                        "DIAG_in_DEC'": r.residuals["DIAG_in_DEC'"]})


def verify_diag_abelian(dint, tol=EQUALITY_TOL):
    """The image of DIAG is an abelian von Neumann algebra of the completion.

    Commutative, closed under adjoints, and equal to its double commutant in
    the full matrix algebra of the assembled space.
    """
    n = dint.ambient_dim
    diag = diag_span(dint)
    full = full_algebra(n)
    bic = double_commutant(diag, full)
    cmp = subspace_compare(diag.basis, bic.basis, tol)
    mats = diag.matrices()
    comm = max((float(np.linalg.norm(a @ b - b @ a, 2)) for a in mats for b in mats), default=0.0)
    res = {"commutator": comm, "adjoint": diag.adjoint_residual(),
           "bicommutant": max(cmp.a_in_b, cmp.b_in_a)}
    ok = comm <= 1e-12 and res["adjoint"] <= tol and cmp.relation.value == "Equal"
    return CheckReport("diag_abelian_von_neumann", status(ok),
                       {"DIAG": diag.dim, "DIAG''": bic.dim}, res)


def block_diag(blocks):
    sizes = [np.asarray(b).shape[0] for b in blocks]
    return _block_diag(blocks, sizes, sizes)
