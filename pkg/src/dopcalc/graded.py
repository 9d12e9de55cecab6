"""Graded modules over a presented algebra and the homological toolkit.

Everything downstream is phrased through :class:`GradedModule`: a cokernel
of a map of graded free modules over ``R = S/I``.  Module elements are
dictionaries ``(position, a_1, ..., a_n) -> coefficient`` with
representatives over ``S``; normal forms are taken modulo the relations
plus ``I`` times the free module.

Graded pieces are handled by exact linear algebra on standard-monomial
bases.  Hom and Ext are computed degree by degree, and induced maps along
module maps come from lifting through minimal free resolutions.
"""

from __future__ import annotations

from operator import add as _add

from .exactalg import monomials_of_degree
from .groebner import MonomialOrder, buchberger, divides
from .linalg import Echelon, Solver, matrix_rank, nullspace


class NotHomogeneous(ValueError):
    pass


def _acc(p, out, t, c):
    v = out.get(t, 0) + c
    if p:
        v %= p
    if v:
        out[t] = v
    else:
        out.pop(t, None)


def elem_add(field, f, g, c=1):
    """``f + c*g`` as a new dictionary."""
    p = field.p
    out = dict(f)
    for t, a in g.items():
        _acc(p, out, t, c * a)
    return out


def elem_scale(field, f, c):
    p = field.p
    if not c:
        return {}
    if p:
        return {t: (a * c) % p for t, a in f.items()}
    return {t: a * c for t, a in f.items()}


def elem_mul_poly(field, f, poly):
    """Multiply a module element by a polynomial ``exp -> coeff`` (no reduction)."""
    p = field.p
    out = {}
    for t, a in f.items():
        pos = t[0]
        rest = t[1:]
        for e, c in poly.items():
            u = (pos,) + tuple(map(_add, rest, e))
            _acc(p, out, u, a * c)
    return out


def shift_positions(f, offset):
    return {(t[0] + offset,) + t[1:]: c for t, c in f.items()}


def poly_to_elem(poly, pos=0):
    return {(pos,) + e: c for e, c in poly.items()}


class GradedModule:
    """Cokernel of ``relations`` inside the free module ``R(-d_0) + ... ``.

    ``degrees[j]`` is the degree of the ``j``-th generator.  Relations are
    module elements over ``S``; they must be homogeneous.
    """

    def __init__(self, ring, degrees, relations=(), name=None):
        self.ring = ring
        self.field = ring.field
        self.degrees = tuple(int(d) for d in degrees)
        self.rank = len(self.degrees)
        rels = []
        for r in relations:
            r = {t: c for t, c in r.items() if c}
            if r:
                rels.append(r)
        self.relations = rels
        self.name = name
        self.order = MonomialOrder(ring.weights, self.degrees)
        for r in rels:
            ds = {self.order.degree(t) for t in r}
            if len(ds) != 1:
                raise NotHomogeneous("relation is not homogeneous")
        self._gb = None
        self._nf = {}
        self._basis = {}
        self._index = {}

    def __repr__(self):
        return f"GradedModule(rank={self.rank}, relations={len(self.relations)})"

    @property
    def is_free(self):
        return not self.relations

    # Groebner data
    @property
    def gb(self):
        if self._gb is None:
            gens = list(self.relations)
            counted = list(range(len(gens)))
            for j in range(self.rank):
                for g in self.ring.ideal_basis:
                    gens.append(poly_to_elem(g, j))
            self._gb = buchberger(self.field, gens, self.order, None, counted)
        return self._gb

    def minimal_relations(self):
        """A minimal generating set of the relation module modulo ``I``."""
        gb = self.gb
        return [self.relations[i] for i in sorted(gb.kept)]

    def is_standard(self, t):
        if self.is_free:
            return self.ring.is_standard(t[1:])
        return self.gb.is_standard(t)

    def nf_term(self, t):
        out = self._nf.get(t)
        if out is None:
            if self.is_free:
                pos = t[0]
                out = {(pos,) + e: c for e, c in self.ring.nf_exp(t[1:]).items()}
            else:
                out = self.gb.normal_form({t: self.field.one})
            self._nf[t] = out
        return out

    def nf(self, f):
        p = self.field.p
        out = {}
        for t, c in f.items():
            for u, a in self.nf_term(t).items():
                _acc(p, out, u, c * a)
        return out

    def degree_of(self, t):
        return self.order.degree(t)

    def element_degree(self, f):
        for t in f:
            return self.order.degree(t)
        return None

    # graded pieces
    def basis(self, d):
        b = self._basis.get(d)
        if b is None:
            b = []
            for j, dj in enumerate(self.degrees):
                if d - dj < 0:
                    continue
                for e in monomials_of_degree(self.ring.weights, d - dj):
                    t = (j,) + e
                    if self.is_standard(t):
                        b.append(t)
            self._basis[d] = b
            self._index[d] = {t: i for i, t in enumerate(b)}
        return b

    def index(self, d):
        self.basis(d)
        return self._index[d]

    def dim(self, d):
        return len(self.basis(d))

    def hilbert_window(self, lo, hi):
        return {d: self.dim(d) for d in range(lo, hi + 1)}

    def coords(self, f, d=None):
        """Coordinates of the class of homogeneous ``f`` in degree ``d``."""
        g = self.nf(f)
        if not g:
            return {}
        if d is None:
            d = self.element_degree(g)
        idx = self.index(d)
        return {idx[t]: c for t, c in g.items()}

    def element(self, vec, d):
        b = self.basis(d)
        return {b[i]: c for i, c in vec.items()}

    def mul(self, f, poly):
        return self.nf(elem_mul_poly(self.field, f, poly))

    def generator(self, j):
        return {(j,) + (0,) * self.ring.nvars: self.field.one}

    def min_degree(self):
        return min(self.degrees) if self.degrees else 0

    def shifted(self, s):
        """``M(s)``: the same module with degrees lowered by ``s``."""
        return GradedModule(self.ring, [d - s for d in self.degrees], self.relations)

    def direct_sum(self, other):
        rels = list(self.relations) + [shift_positions(r, self.rank) for r in other.relations]
        return GradedModule(self.ring, self.degrees + other.degrees, rels)

    def power(self, r, shifts=None):
        """``M(-s_0) + ... + M(-s_{r-1})`` with block-wise positions."""
        shifts = shifts or [0] * r
        degs = []
        rels = []
        for b in range(r):
            degs.extend(d + shifts[b] for d in self.degrees)
            rels.extend(shift_positions(x, b * self.rank) for x in self.relations)
        return GradedModule(self.ring, degs, rels)


def free_module(ring, degrees):
    return GradedModule(ring, degrees, ())


def cyclic_module(ring, ideal_gens, degree=0):
    """``R/J`` shifted to start in ``degree``."""
    return GradedModule(ring, [degree], [poly_to_elem(g) for g in ideal_gens])


# ---------------------------------------------------------------------------
# free-module helpers


class FreeDegree:
    """Basis of ``(F)_d`` for a graded free ``R``-module ``F``."""

    def __init__(self, ring, degrees, d):
        self.basis = []
        for j, dj in enumerate(degrees):
            if d - dj < 0:
                continue
            for e in ring.basis(d - dj):
                self.basis.append((j,) + e)
        self.index = {t: i for i, t in enumerate(self.basis)}

    def __len__(self):
        return len(self.basis)


def map_columns(target, images, source_degrees, d, target_index=None):
    """Matrix (as columns) of the map ``F -> target`` in degree ``d``.

    ``images[j]`` is the image of the ``j``-th generator of ``F``.  Columns
    follow :class:`FreeDegree` ordering of ``F_d``.
    """
    ring = target.ring
    fd = FreeDegree(ring, source_degrees, d)
    idx = target_index if target_index is not None else target.index(d)
    cols = []
    field = target.field
    p = field.p
    for t in fd.basis:
        j = t[0]
        e = t[1:]
        col = {}
        for u, c in images[j].items():
            w = (u[0],) + tuple(map(_add, u[1:], e))
            for v, a in target.nf_term(w).items():
                _acc(p, col, idx[v], c * a)
        cols.append(col)
    return fd, cols


# ---------------------------------------------------------------------------
# elimination: kernels and minimal generators


def kernel_of(images, source_degrees, target):
    """Generators (over ``S``) of ``{x in F : sum x_j images[j] = 0 in target}``.

    Uses an order where the target summand dominates, so basis elements
    with no target component generate the intersection with ``F``.
    """
    ring = target.ring
    field = target.field
    T = target.rank
    shifts = list(target.degrees) + list(source_degrees)
    order = MonomialOrder(ring.weights, shifts, split=T)
    zero = (0,) * ring.nvars
    gens = []
    for j, img in enumerate(images):
        g = dict(img)
        g[(T + j,) + zero] = field.one
        gens.append(g)
    for r in target.relations:
        gens.append(dict(r))
    for j in range(T):
        for g in ring.ideal_basis:
            gens.append(poly_to_elem(g, j))
    gb = buchberger(field, gens, order)
    out = []
    for g, lt in zip(gb.elements, gb.lts):
        if lt[0] >= T:
            out.append(shift_positions(g, -T))
    return out


def minimal_subset(ambient, gens):
    """Indices of a minimal subset of ``gens`` generating their span in ``ambient``.

    ``ambient`` supplies the relations (and ``I``) that are already zero.
    """
    base = list(ambient.relations)
    for j in range(ambient.rank):
        for g in ambient.ring.ideal_basis:
            base.append(poly_to_elem(g, j))
    allg = base + [dict(g) for g in gens]
    counted = list(range(len(base), len(allg)))
    gb = buchberger(ambient.field, allg, ambient.order, None, counted)
    return sorted(i - len(base) for i in gb.kept)


def submodule_presentation(gens, ambient):
    """Present the submodule of ``ambient`` generated by ``gens``.

    Returns ``(module, kept)`` where ``kept`` indexes the minimal generators
    used; generator ``i`` of the result maps to ``gens[kept[i]]``.
    """
    kept = minimal_subset(ambient, gens)
    hs = [gens[i] for i in kept]
    degs = [ambient.element_degree(h) for h in hs]
    rels = kernel_of(hs, degs, ambient)
    return GradedModule(ambient.ring, degs, rels), kept


# ---------------------------------------------------------------------------
# pruning and minimal presentations


class Pruned:
    """A presentation with unit relations eliminated.

    ``module`` keeps the generators listed in ``kept``; ``subst[j]`` writes
    original generator ``j`` as an element of the pruned free module.
    """

    def __init__(self, module, kept, subst, original):
        self.module = module
        self.kept = kept
        self.subst = subst
        self.original = original

    def translate(self, f):
        """Rewrite an element over the original generators."""
        field = self.module.field
        p = field.p
        out = {}
        for t, c in f.items():
            e = t[1:]
            for u, a in self.subst[t[0]].items():
                w = (u[0],) + tuple(map(_add, u[1:], e))
                _acc(p, out, w, c * a)
        return out

    def lift(self, f):
        """Rewrite a pruned element over the original generators."""
        return {(self.kept[t[0]],) + t[1:]: c for t, c in f.items()}


def prune(M):
    """Eliminate generators killed by relations with a constant coefficient."""
    field = M.field
    n = M.ring.nvars
    zero = (0,) * n
    rels = [dict(r) for r in M.relations]
    alive = list(range(M.rank))
    subst = {j: {(j,) + zero: field.one} for j in range(M.rank)}
    while True:
        hit = None
        for ri, r in enumerate(rels):
            for t, c in r.items():
                if t[1:] == zero:
                    if hit is None or t[0] < hit[1]:
                        hit = (ri, t[0], c)
            if hit is not None:
                break
        if hit is None:
            break
        ri, j, c = hit
        r = rels.pop(ri)
        # e_j = -(1/c) * (r - c e_j)
        ci = field.inv(c)
        expr = {t: field.neg(field.mul(a, ci)) for t, a in r.items() if t != (j,) + zero}

        def sub(f):
            out = {}
            for t, a in f.items():
                if t[0] == j:
                    e = t[1:]
                    for u, b in expr.items():
                        w = (u[0],) + tuple(map(_add, u[1:], e))
                        _acc(field.p, out, w, a * b)
                else:
                    _acc(field.p, out, t, a)
            return out

        rels = [s for s in (sub(x) for x in rels) if s]
        for k in list(subst):
            subst[k] = sub(subst[k])
        alive.remove(j)
    remap = {j: i for i, j in enumerate(alive)}

    def renum(f):
        return {(remap[t[0]],) + t[1:]: c for t, c in f.items()}

    module = GradedModule(M.ring, [M.degrees[j] for j in alive], [renum(r) for r in rels])
    return Pruned(module, alive, {k: renum(v) for k, v in subst.items()}, M)


def minimal_presentation(M):
    """Prune, then keep only a minimal set of relations."""
    pr = prune(M)
    N = pr.module
    mins = N.minimal_relations()
    pr.module = GradedModule(N.ring, N.degrees, mins)
    return pr


def minimal_generators(M):
    """Degrees of a minimal homogeneous generating set, sorted."""
    pr = prune(M)
    return sorted(pr.module.degrees)


# ---------------------------------------------------------------------------
# free resolutions


class Resolution:
    """A minimal graded free resolution ``F_0 <- F_1 <- ...`` of a module.

    ``degrees[i]`` lists generator degrees of ``F_i``; ``maps[i]`` (for
    ``i >= 1``) lists images of the generators of ``F_i`` in ``F_{i-1}``.
    ``pruned`` relates ``F_0`` to the original presentation.
    """

    def __init__(self, M, length):
        self.ring = M.ring
        self.field = M.field
        self.pruned = minimal_presentation(M)
        N = self.pruned.module
        self.module = N
        self.degrees = [list(N.degrees)]
        self.maps = [None]
        self.free = [free_module(self.ring, N.degrees)]
        self.length = 0
        self._next = [dict(r) for r in N.relations]
        self._solvers = {}
        self.extend(length)

    def extend(self, length):
        while self.length < length:
            i = self.length + 1
            gens = self._next
            target = self.free[i - 1]
            degs = [target.element_degree(g) for g in gens]
            reduced = [target.nf(g) for g in gens]
            self.degrees.append(degs)
            self.maps.append(reduced)
            F = free_module(self.ring, degs)
            self.free.append(F)
            self.length = i
            if not gens:
                self._next = []
                continue
            ker = kernel_of(reduced, degs, target)
            if ker:
                keep = minimal_subset(F, ker)
                self._next = [F.nf(ker[k]) for k in keep]
            else:
                self._next = []
        return self

    def betti(self):
        return [len(d) for d in self.degrees]

    def rank(self, i):
        return len(self.degrees[i]) if i <= self.length else None

    def differential_columns(self, i, d):
        """Matrix of ``F_i -> F_{i-1}`` in degree ``d`` (``i >= 1``)."""
        return map_columns(self.free[i - 1], self.maps[i], self.degrees[i], d)

    def solver(self, i, d):
        key = (i, d)
        s = self._solvers.get(key)
        if s is None:
            fd, cols = self.differential_columns(i, d)
            s = (fd, Solver(self.field, cols))
            self._solvers[key] = s
        return s

    def lift_boundary(self, i, x):
        """Find ``v`` in ``F_i`` with ``d_i(v) = x`` (``x`` homogeneous in ``F_{i-1}``)."""
        target = self.free[i - 1]
        x = target.nf(x)
        if not x:
            return {}
        d = target.element_degree(x)
        fd, solver = self.solver(i, d)
        idx = target.index(d)
        vec = {idx[t]: c for t, c in x.items()}
        sol = solver.solve(vec)
        if sol is None:
            raise ValueError("element is not a boundary")
        return {fd.basis[k]: c for k, c in sol.items()}

    def check_complex(self):
        """``d_{i-1} d_i = 0`` for every pair of consecutive maps."""
        for i in range(2, self.length + 1):
            F = self.free[i - 2]
            for img in self.maps[i]:
                acc = {}
                for t, c in img.items():
                    g = self.maps[i - 1][t[0]]
                    acc = elem_add(self.field, acc, elem_mul_poly(self.field, g, {t[1:]: c}))
                if F.nf(acc):
                    return False
        # the last map lands in the relations
        return True


def free_resolution(M, length):
    return Resolution(M, length)


def lift_chain_map(src, tgt, f0, length):
    """Lift a module map to a chain map between resolutions.

    ``f0[j]`` is the image (in ``tgt``'s ``F_0``) of generator ``j`` of
    ``src``'s ``F_0``.  Returns ``[f_0, ..., f_length]``.
    """
    field = src.field
    maps = [[tgt.free[0].nf(x) for x in f0]]
    for i in range(1, length + 1):
        fi = []
        prev = maps[i - 1]
        for img in src.maps[i]:
            x = {}
            for t, c in img.items():
                x = elem_add(field, x, elem_mul_poly(field, prev[t[0]], {t[1:]: c}))
            fi.append(tgt.lift_boundary(i, x))
        maps.append(fi)
    return maps


# ---------------------------------------------------------------------------
# Hom and Ext in single degrees


class HomDegree:
    """``Hom_R(F, N)_k`` for graded free ``F`` as a coordinate space."""

    def __init__(self, degrees, N, k):
        self.N = N
        self.k = k
        self.degrees = degrees
        self.offsets = []
        total = 0
        for d in degrees:
            self.offsets.append(total)
            total += N.dim(k + d)
        self.size = total

    def block(self, j):
        """Basis terms of ``N_{k + d_j}`` used for slot ``j``."""
        return self.N.basis(self.k + self.degrees[j])

    def split(self, vec):
        """Per-generator values as module elements of ``N``."""
        vals = [dict() for _ in self.degrees]
        owner = []
        for j, off in enumerate(self.offsets):
            owner.append((off, j))
        for col, c in vec.items():
            j = _owner(self.offsets, col)
            t = self.block(j)[col - self.offsets[j]]
            vals[j][t] = c
        return vals

    def join(self, vals):
        vec = {}
        for j, v in enumerate(vals):
            if not v:
                continue
            idx = self.N.index(self.k + self.degrees[j])
            for t, c in self.N.nf(v).items():
                vec[self.offsets[j] + idx[t]] = c
        return vec


def _owner(offsets, col):
    lo, hi = 0, len(offsets) - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if offsets[mid] <= col:
            lo = mid
        else:
            hi = mid - 1
    return lo


def pullback_columns(src_hom, tgt_hom, images):
    """Matrix of ``phi -> phi o f`` from ``Hom(F, N)_k`` to ``Hom(G, N)_k``.

    ``images[l]`` is the image in ``F`` of generator ``l`` of ``G``.
    """
    N = src_hom.N
    field = N.field
    p = field.p
    k = src_hom.k
    # invert: for each source slot j, list (l, poly) with coefficient of e_j in images[l]
    by_slot = {}
    for l, img in enumerate(images):
        for t, c in img.items():
            by_slot.setdefault(t[0], []).append((l, t[1:], c))
    cols = []
    for j, dj in enumerate(src_hom.degrees):
        for t in N.basis(k + dj):
            col = {}
            for l, e, c in by_slot.get(j, ()):
                w = (t[0],) + tuple(map(_add, t[1:], e))
                nfw = N.nf_term(w)
                if not nfw:
                    continue
                idx = N.index(k + tgt_hom.degrees[l])
                off = tgt_hom.offsets[l]
                for u, a in nfw.items():
                    _acc(p, col, off + idx[u], c * a)
            cols.append(col)
    return cols


class ExtCell:
    """``Ext^i_R(M, N)_k`` with cycle and boundary data for induced maps.

    The dimension comes from two matrix ranks; cycles and boundaries are
    built only when an induced map needs them.
    """

    def __init__(self, res, N, i, k):
        if res.length < i + 1:
            res.extend(i + 1)
        field = N.field
        self.i = i
        self.k = k
        self.field = field
        self.hom = HomDegree(res.degrees[i], N, k)
        nxt = HomDegree(res.degrees[i + 1], N, k)
        self._out = pullback_columns(self.hom, nxt, res.maps[i + 1]) if self.hom.size else []
        self._in = []
        if i > 0 and self.hom.size:
            prev = HomDegree(res.degrees[i - 1], N, k)
            if prev.size:
                self._in = pullback_columns(prev, self.hom, res.maps[i])
        self._cycles = None
        self._boundaries = None
        r_out = matrix_rank(field, self._out, nxt.size)
        r_in = matrix_rank(field, self._in, self.hom.size)
        self.dim = self.hom.size - r_out - r_in

    @property
    def cycles(self):
        if self._cycles is None:
            self._cycles = nullspace(self.field, self._out) if self._out else [
                {j: self.field.one} for j in range(self.hom.size)]
        return self._cycles

    @property
    def boundaries(self):
        if self._boundaries is None:
            e = Echelon(self.field)
            for c in self._in:
                e.add(c)
            self._boundaries = e
        return self._boundaries

    def representatives(self):
        """Cycles whose classes form a basis of the cell."""
        e = Echelon(self.field)
        for r in self.boundaries.rows.values():
            e.add(r)
        reps = []
        for z in self.cycles:
            if e.add(z) is None:
                reps.append(z)
        return reps


def induced_rank(cell_src, cell_tgt, chain_i, src_res_degrees):
    """Rank of the map ``Ext(M) -> Ext(M')`` induced by ``f: M' -> M``.

    ``chain_i`` lists images (in ``F_i`` of ``M``'s resolution) of the
    generators of ``F'_i``.  The induced map sends ``phi`` to ``phi o f_i``.
    """
    cols = pullback_columns(cell_src.hom, cell_tgt.hom, chain_i)
    e = Echelon(cell_src.field)
    for r in cell_tgt.boundaries.rows.values():
        e.add(r)
    base = e.rank
    reps = cell_src.representatives()
    from .linalg import apply_columns

    for z in reps:
        e.add(apply_columns(cell_src.field, cols, z))
    return e.rank - base


def ext_dims(M, N, i, lo, hi, res=None):
    res = res or Resolution(M, i + 1)
    return {k: ExtCell(res, N, i, k).dim for k in range(lo, hi + 1)}


def hom_dims(M, N, lo, hi, res=None):
    return ext_dims(M, N, 0, lo, hi, res)


# ---------------------------------------------------------------------------
# Hom as a module


class HomModule:
    """``Hom_R(M, N)`` presented as a graded module with an evaluator.

    Generators are homomorphisms; ``values[g][j]`` is the image (in ``N``)
    of the ``j``-th generator of the pruned ``M``.
    """

    def __init__(self, M, N):
        pr = minimal_presentation(M)
        Mp = pr.module
        self.pruned = pr
        self.N = N
        r0 = Mp.rank
        shifts = []
        for j in range(r0):
            shifts.append(-Mp.degrees[j])
        # ambient: N^{r0} with block j shifted by -deg e_j
        amb = N.power(r0, shifts)
        self.ambient = amb
        rels = Mp.relations
        r1 = len(rels)
        tgt = N.power(r1, [-Mp.element_degree(r) for r in rels]) if r1 else None
        nr = N.rank
        zero = (0,) * N.ring.nvars
        images = []
        src_deg = []
        for j in range(r0):
            for m in range(nr):
                img = {}
                for l, rel in enumerate(rels):
                    for t, c in rel.items():
                        if t[0] != j:
                            continue
                        u = (l * nr + m,) + t[1:]
                        _acc(N.field.p, img, u, c)
                images.append(img)
                src_deg.append(amb.degrees[j * nr + m])
        if tgt is not None:
            ker = kernel_of(images, src_deg, tgt)
        else:
            ker = [{(q,) + zero: N.field.one} for q in range(r0 * nr)]
        ker = [amb.nf(x) for x in ker]
        ker = [x for x in ker if x]
        module, kept = submodule_presentation(ker, amb) if ker else (
            GradedModule(N.ring, [], []), [])
        self.module = module
        self.generators = [ker[k] for k in kept]
        self.r0 = r0

    def values(self, g):
        """Split an element of the ambient ``N^{r0}`` into per-generator values."""
        nr = self.N.rank
        vals = [dict() for _ in range(self.r0)]
        for t, c in g.items():
            j, m = divmod(t[0], nr)
            vals[j][(m,) + t[1:]] = c
        return vals

    def to_ambient(self, f):
        """Element of the Hom module (over its generators) to ``N^{r0}``."""
        field = self.N.field
        out = {}
        for t, c in f.items():
            out = elem_add(field, out, elem_mul_poly(field, self.generators[t[0]], {t[1:]: c}))
        return self.ambient.nf(out)

    def evaluate(self, f, m):
        """Apply the homomorphism ``f`` to ``m`` (an element of the original ``M``)."""
        field = self.N.field
        phi = self.values(self.to_ambient(f))
        x = self.pruned.translate(m)
        out = {}
        for t, c in x.items():
            out = elem_add(field, out, elem_mul_poly(field, phi[t[0]], {t[1:]: c}))
        return self.N.nf(out)


def hom_presentation(M, N):
    H = HomModule(M, N)
    return H.module, H.evaluate


# ---------------------------------------------------------------------------
# homology modules and module maps


def homology_module(ambient_degrees, ring, d_in_images, d_out_images, next_degrees):
    """``ker(d_out) / im(d_in)`` for maps of free modules.

    ``d_out_images[j]`` is the image of generator ``j`` of the middle free
    module; ``d_in_images`` are elements of the middle free module.
    """
    mid = free_module(ring, ambient_degrees)
    if d_out_images and any(d_out_images):
        tgt = free_module(ring, next_degrees)
        ker = kernel_of(d_out_images, ambient_degrees, tgt)
        ker = [mid.nf(x) for x in ker]
        ker = [x for x in ker if x]
    else:
        zero = (0,) * ring.nvars
        ker = [{(j,) + zero: ring.field.one} for j in range(len(ambient_degrees))]
    quot = GradedModule(ring, ambient_degrees, [mid.nf(x) for x in d_in_images if x])
    if not ker:
        return GradedModule(ring, [], [])
    module, kept = submodule_presentation(ker, quot)
    return module



def dual_homology(res, i):
    """``Ext^i(M, R)`` as a module: homology of ``Hom(F_*, R)`` at ``F_i``.

    The dual generator ``e_j^*`` of ``F_i`` sits in degree ``-deg e_j``.
    """
    ring = res.ring
    p = ring.field.p
    res.extend(i + 1)
    degs = [-a for a in res.degrees[i]]

    def dual(k):
        # images of the dual generators of F_{k-1} in F_k^*
        out = []
        for j in range(len(res.degrees[k - 1])):
            img = {}
            for l, col in enumerate(res.maps[k]):
                for t, a in col.items():
                    if t[0] == j:
                        _acc(p, img, (l,) + t[1:], a)
            out.append(img)
        return out

    d_in = dual(i) if i >= 1 else []
    nxt = [-a for a in res.degrees[i + 1]]
    d_out = dual(i + 1) if nxt else []
    return homology_module(degs, ring, d_in, d_out, nxt)


def ext(M, N, i, window, res=None):
    """Dimensions of ``Ext^i(M, N)`` in ``window`` and, for ``N = R(-s)``, the module.

    The module presentation is ``None`` unless ``N`` is free of rank one.
    """
    lo, hi = window
    res = res or Resolution(M, i + 1)
    dims = ext_dims(M, N, i, lo, hi, res)
    module = None
    if N.is_free and N.rank == 1:
        H = dual_homology(res, i)
        module = GradedModule(N.ring, [d + N.degrees[0] for d in H.degrees], H.relations)
    return dims, module

# ---------------------------------------------------------------------------
# restriction of scalars to a subset of the variables


class Restriction:
    """``M`` regarded as a module over ``K[x_i : i in sub]``.

    The module must be finite over that subring.  ``base`` is the
    subring (a :class:`PresentedAlgebra`-like object supplied by the
    caller); ``module`` is the restricted presentation and ``to_sub``
    converts elements of ``M``.
    """

    def __init__(self, M, sub, base, max_generators=10000):
        ring = M.ring
        field = M.field
        n = ring.nvars
        sub = tuple(sub)
        other = tuple(i for i in range(n) if i not in sub)
        self.M = M
        self.sub = sub
        self.other = other
        self.base = base
        order = MonomialOrder(ring.weights, M.degrees, blocks=[other, sub])
        gens = list(M.relations)
        for j in range(M.rank):
            for g in ring.ideal_basis:
                gens.append(poly_to_elem(g, j))
        gb = buchberger(field, gens, order)
        self.gb = gb
        # generators: standard monomials in the other variables
        B = []
        for j in range(M.rank):
            frontier = [tuple([0] * n)]
            seen = set(frontier)
            while frontier:
                e = frontier.pop()
                t = (j,) + e
                if not gb.is_standard(t):
                    continue
                B.append(t)
                if len(B) > max_generators:
                    raise ValueError("module does not look finite over the subring")
                for i in other:
                    f = list(e)
                    f[i] += 1
                    f = tuple(f)
                    if f not in seen:
                        seen.add(f)
                        frontier.append(f)
        B.sort(key=lambda t: (M.order.degree(t), t))
        self.gens = B
        self.gen_index = {t: k for k, t in enumerate(B)}
        degs = [M.order.degree(t) for t in B]
        self.degrees = degs
        # relations: minimal monomials X^g with X^g * b a leading term
        rels = []
        lts = gb.lts
        for k, b in enumerate(B):
            cands = []
            for lt in lts:
                if lt[0] != b[0]:
                    continue
                if all(lt[1 + i] <= b[1 + i] for i in other):
                    g = tuple(lt[1 + i] if i in sub else 0 for i in range(n))
                    cands.append(g)
            mins = []
            for g in sorted(set(cands), key=lambda g: (sum(g), g)):
                if not any(all(a <= c for a, c in zip(h, g)) for h in mins):
                    mins.append(g)
            for g in mins:
                t = (b[0],) + tuple(map(_add, b[1:], g))
                red = gb.normal_form({t: field.one})
                rel = {(k,) + self._sub_exp(g): field.one}
                for u, c in self._convert(red).items():
                    _acc(field.p, rel, u, field.neg(c))
                rels.append(rel)
        self.module = GradedModule(base, degs, rels)

    def _sub_exp(self, e):
        return tuple(e[i] for i in self.sub)

    def _convert(self, red):
        out = {}
        p = self.M.field.p
        n = self.M.ring.nvars
        for t, c in red.items():
            head = (t[0],) + tuple(t[1 + i] if i in self.other else 0 for i in range(n))
            k = self.gen_index[head]
            u = (k,) + tuple(t[1 + i] for i in self.sub)
            _acc(p, out, u, c)
        return out

    def to_sub(self, f):
        """An element of ``M`` written over the subring generators."""
        red = self.gb.normal_form(f) if f else {}
        return self._convert(red)
