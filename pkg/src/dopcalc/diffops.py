"""Differential operators as homomorphisms out of principal parts.

An operator of order ``n`` from ``M`` to ``N`` is an element of
``Hom_R(P^n(M), N)``; it acts on ``m`` through the universal map
``m -> 1 (x) m``.  Degree ``k`` operators send ``M_j`` into ``N_{j+k}``.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from math import comb

from .algebra import PresentedAlgebra, PrincipalParts
from .graded import (
    ExtCell,
    GradedModule,
    Resolution,
    Restriction,
    elem_add,
    elem_mul_poly,
    poly_to_elem,
)
from .linalg import Echelon, apply_columns, rank as _rank


class WindowTooNarrow(ValueError):
    pass


class ModuleMismatch(ValueError):
    pass


class InfeasibleBound(ValueError):
    pass


def _acc(p, out, t, c):
    v = out.get(t, 0) + c
    if p:
        v %= p
    if v:
        out[t] = v
    else:
        out.pop(t, None)


class OperatorSpace:
    """Graded pieces of ``D^n(M, N) = Hom_R(P^n(M), N)``."""

    def __init__(self, R, n, M=None, N=None):
        self.ring = R
        self.order = n
        self.M = M if M is not None else R.free([0])
        self.N = N if N is not None else R.free([0])
        self.pp = PrincipalParts(R, n, self.M)
        self.res = Resolution(self.pp.module, 1)
        self._cells = {}

    def cell(self, k):
        c = self._cells.get(k)
        if c is None:
            c = ExtCell(self.res, self.N, 0, k)
            self._cells[k] = c
        return c

    def dim(self, k):
        return self.cell(k).dim

    def table(self, lo, hi):
        return {k: self.dim(k) for k in range(lo, hi + 1)}

    def basis(self, k):
        cell = self.cell(k)
        return [self.operator_from_vector(v, k) for v in cell.cycles]

    def operator_from_vector(self, vec, k):
        cell = self.cell(k)
        pruned_vals = cell.hom.split(vec)
        return DiffOperator.from_pruned(self, pruned_vals, k)

    def pruned_degrees(self):
        return list(self.res.degrees[0])


class DiffOperator:
    """A homogeneous operator given by its values on generators of ``P^n(M)``.

    ``values[g]`` is the image in ``N`` of the ``g``-th generator
    ``y^b (x) m_j`` of the (unpruned) principal parts presentation.
    """

    def __init__(self, R, pp, N, values, degree):
        self.ring = R
        self.pp = pp
        self.N = N
        self.values = values
        self.degree = degree

    @property
    def order(self):
        return self.pp.order

    @property
    def source(self):
        return self.pp.source

    @property
    def target(self):
        return self.N

    @classmethod
    def from_pruned(cls, space, pruned_vals, k):
        pr = space.res.pruned
        field = space.ring.field
        vals = []
        for g in range(space.pp.module.rank):
            out = {}
            for t, c in pr.subst[g].items():
                out = elem_add(field, out, elem_mul_poly(field, pruned_vals[t[0]], {t[1:]: c}))
            vals.append(space.N.nf(out))
        return cls(space.ring, space.pp, space.N, vals, k)

    @classmethod
    def from_action(cls, R, n, action, degree, M=None, N=None):
        """The operator of order ``n`` agreeing with a K-linear ``action``.

        Uses ``phi(y^b (x) m) = sum_{a <= b} C(b, a) (-x)^(b-a) action(x^a m)``.
        """
        M = M if M is not None else R.free([0])
        N = N if N is not None else R.free([0])
        pp = PrincipalParts(R, n, M)
        field = R.field
        p = field.p
        nv = R.nvars
        vals = []
        for j in range(M.rank):
            for b in pp.betas:
                out = {}
                for a in _below(b):
                    c = 1
                    sign = 0
                    for bi, ai in zip(b, a):
                        c *= comb(bi, ai)
                        sign += bi - ai
                    if sign % 2:
                        c = -c
                    c = field(c)
                    if not c:
                        continue
                    m = {(j,) + a: field.one}
                    img = action(m)
                    rest = tuple(bi - ai for bi, ai in zip(b, a))
                    out = elem_add(field, out, elem_mul_poly(field, img, {rest: c}))
                vals.append(N.nf(out))
        del nv, p
        return cls(R, pp, N, vals, degree)

    def apply(self, m):
        """``delta(m)`` for an element ``m`` of the source module."""
        field = self.ring.field
        x = self.pp.universal(m)
        out = {}
        for t, c in x.items():
            v = self.values[t[0]]
            if v:
                out = elem_add(field, out, elem_mul_poly(field, v, {t[1:]: c}))
        return self.N.nf(out)

    def apply_poly(self, f):
        return self.apply(poly_to_elem(f))

    def __call__(self, m):
        return self.apply(m)

    def is_well_defined(self):
        """Relations of ``P^n(M)`` map to zero in ``N``."""
        field = self.ring.field
        for rel in self.pp.module.relations:
            out = {}
            for t, c in rel.items():
                out = elem_add(field, out, elem_mul_poly(field, self.values[t[0]], {t[1:]: c}))
            if self.N.nf(out):
                return False
        return True


def _below(b):
    if not b:
        yield ()
        return
    for a0 in range(b[0] + 1):
        for rest in _below(b[1:]):
            yield (a0,) + rest


def diff_ops(R, n, lo, hi, M=None, N=None):
    """Dimension table ``k -> dim D^n(M, N)_k`` and the operator space."""
    space = OperatorSpace(R, n, M, N)
    return space.table(lo, hi), space


def operator_table(R, orders, lo, hi, M=None, N=None):
    """``{(n, k): dim}`` over several orders."""
    out = {}
    for n in orders:
        space = OperatorSpace(R, n, M, N)
        for k in range(lo, hi + 1):
            out[(n, k)] = space.dim(k)
    return out


def inclusion_rank(R, n, k, M=None, N=None):
    """Rank of ``D^n_k -> D^{n+1}_k`` induced by ``P^{n+1} -> P^n``."""
    small = OperatorSpace(R, n, M, N)
    big = OperatorSpace(R, n + 1, M, N)
    imgs = big.pp.surjection_images(small.pp)
    prs = small.res.pruned
    f0 = [prs.translate(imgs[g]) for g in big.res.pruned.kept]
    from .graded import pullback_columns

    cs = small.cell(k)
    cb = big.cell(k)
    cols = pullback_columns(cs.hom, cb.hom, f0)
    return _rank(R.field, [apply_columns(R.field, cols, z) for z in cs.cycles])


# ---------------------------------------------------------------------------
# order verification by nested brackets


class BracketResult:
    def __init__(self, verified, order, witness=None, checked=0):
        self.verified = verified
        self.order = order
        self.witness = witness
        self.checked = checked

    def __bool__(self):
        return self.verified

    def __repr__(self):
        if self.verified:
            return f"verified(order={self.order}, checked={self.checked})"
        return f"refuted(order={self.order}, witness={self.witness})"


def bracket_order_check(action, n, module, lo, hi, generators=None, degree=0):
    """Check ``[...[[delta, f_0], f_1], ..., f_n] = 0`` on ``module`` in ``[lo, hi]``.

    ``action`` maps module elements to elements of a target that supports
    ``mul`` and ``nf`` (a :class:`GradedModule`).  Brackets are evaluated on
    the standard basis of every degree ``d`` with ``d + (n+1) * w_max <= hi``
    where ``w_max`` is the largest generator weight; nested brackets with
    the variables suffice because brackets with products expand into them.
    """
    R = module.ring
    field = R.field
    if generators is None:
        generators = [R.var(i) for i in range(R.nvars)]
    wmax = max(
        (max(R.degree(e) for e in g) for g in generators if g), default=0
    )
    top = hi - (n + 1) * wmax
    if top < lo:
        raise WindowTooNarrow(
            f"window [{lo}, {hi}] cannot hold {n + 1} nested brackets of degree {wmax}"
        )
    target = getattr(action, "target", None)
    memo = {}

    def act(m):
        key = frozenset(m.items())
        r = memo.get(key)
        if r is None:
            r = action(m)
            memo[key] = r
        return r

    def bracket(S, m):
        # B_S(m) with B_{S + f}(m) = B_S(f m) - f B_S(m)
        if not S:
            return act(m)
        f = generators[S[-1]]
        rest = S[:-1]
        fm = module.mul(m, f)
        a = bracket(rest, fm) if fm else {}
        b = bracket(rest, m)
        fb = elem_mul_poly(field, b, f) if b else {}
        out = elem_add(field, a, fb, field.neg(field.one))
        if target is not None:
            out = target.nf(out)
        return out

    checked = 0
    if not generators:
        return BracketResult(True, n, None, 0)
    for S in combinations_with_replacement(range(len(generators)), n + 1):
        for d in range(lo, top + 1):
            for t in module.basis(d):
                m = {t: field.one}
                v = bracket(S, m)
                checked += 1
                if v:
                    return BracketResult(False, n, (S, t, v), checked)
    return BracketResult(True, n, None, checked)


def verified_order(action, module, lo, hi, max_order, generators=None):
    """Smallest order ``<= max_order`` that passes, or ``None``."""
    for n in range(max_order + 1):
        try:
            if bracket_order_check(action, n, module, lo, hi, generators):
                return n
        except WindowTooNarrow:
            return None
    return None


def compose(d1, d2):
    """``d2 o d1`` as an operator of order ``d1.order + d2.order``."""
    if d1.N.degrees != d2.source.degrees or d1.N.relations != d2.source.relations:
        raise ModuleMismatch("target of the first operator is not the source of the second")

    def action(m):
        return d2.apply(d1.apply(m))

    return DiffOperator.from_action(
        d1.ring, d1.order + d2.order, action, d1.degree + d2.degree, d1.source, d2.N
    )


# ---------------------------------------------------------------------------
# residue-field operators and the D-simplicity probe


def residue_operators(R, n, lo, hi, M=None):
    """``k -> dim D^n(M, K)_k`` where ``K = R/R_+``."""
    space = OperatorSpace(R, n, M, R.residue_field())
    return space.table(lo, hi), space


class SimplicityReport:
    def __init__(self, order, depth, cells):
        self.order = order
        self.depth = depth
        self.cells = cells  # k -> (rank, target)

    @property
    def obstruction(self):
        for k in sorted(self.cells, reverse=True):
            r, t = self.cells[k]
            if r < t:
                return (k, t - r)
        return None

    @property
    def simple(self):
        return self.obstruction is None

    def verdict(self):
        ob = self.obstruction
        if ob is None:
            return "SimpleUpToBound"
        return f"Obstruction(degree={ob[0]}, cokernel={ob[1]})"

    def __repr__(self):
        return self.verdict()


def d_simplicity_probe(R, n, depth):
    """Surjectivity of ``D^n(R,R)_k -> D^n(R,K)_k`` for ``-depth <= k <= 0``.

    Post-composing with ``R -> K`` keeps only the degree-zero values of an
    operator on the minimal generators of ``P^n`` sitting in degree ``-k``;
    the target has one dimension per such generator.
    """
    space = OperatorSpace(R, n)
    degs = space.pruned_degrees()
    cells = {}
    for k in range(-depth, 1):
        slots = [j for j, d in enumerate(degs) if d == -k]
        target = len(slots)
        cell = space.cell(k)
        hom = cell.hom
        cols = []
        for z in cell.cycles:
            v = {}
            for s, j in enumerate(slots):
                off = hom.offsets[j]
                c = z.get(off)
                if c:
                    v[s] = c
            cols.append(v)
        cells[k] = (_rank(R.field, cols), target)
    return SimplicityReport(n, depth, cells)


# ---------------------------------------------------------------------------
# Frobenius operators


class FrobeniusOperators:
    """``End_{R^q}(R)`` for ``q = p^e`` computed degree by degree.

    ``R`` is written as a module over ``K[X]`` with ``X_i`` acting as
    ``x_i^q`` through the graph ring ``K[x, X]/(I, X_i - x_i^q)``.
    """

    def __init__(self, R, e):
        p = R.field.p
        if not p:
            raise ValueError("Frobenius operators need positive characteristic")
        self.ring = R
        self.q = q = p ** e
        n = R.nvars
        names = list(R.names) + [f"X{i}" for i in range(n)]
        weights = list(R.weights) + [q * w for w in R.weights]
        rels = [dict((m + (0,) * n, c) for m, c in r.items()) for r in R.relations]
        one = R.field.one
        for i in range(n):
            a = [0] * (2 * n)
            a[n + i] = 1
            b = [0] * (2 * n)
            b[i] = q
            rels.append({tuple(a): one, tuple(b): R.field.neg(one)})
        self.graph = PresentedAlgebra(R.field, names, weights, rels)
        self.base = self.graph.subring(range(n, 2 * n))
        T = self.graph.free([0])
        self.restriction = Restriction(T, tuple(range(n, 2 * n)), self.base)
        self.module = self.restriction.module
        self.res = Resolution(self.module, 1)
        self._cells = {}

    def cell(self, k):
        c = self._cells.get(k)
        if c is None:
            c = ExtCell(self.res, self.module, 0, k)
            self._cells[k] = c
        return c

    def dim(self, k):
        return self.cell(k).dim

    def table(self, lo, hi):
        return {k: self.dim(k) for k in range(lo, hi + 1)}

    def _to_ring(self, f):
        """Element of the restricted module back to a polynomial in ``R``."""
        R = self.ring
        n = R.nvars
        q = self.q
        out = {}
        for t, c in f.items():
            b = self.restriction.gens[t[0]]
            e = tuple(b[1 + i] + q * t[1 + i] for i in range(n))
            _acc(R.field.p, out, e, c)
        return R.nf(out)

    def _from_ring(self, f):
        n = self.ring.nvars
        lifted = {(0,) + e + (0,) * n: c for e, c in f.items()}
        return self.restriction.to_sub(lifted)

    def operators(self, k):
        """Basis of the degree-``k`` piece as K-linear actions on ``R``."""
        cell = self.cell(k)
        pr = self.res.pruned
        field = self.ring.field
        ops = []
        for z in cell.cycles:
            vals = cell.hom.split(z)
            full = []
            for g in range(self.module.rank):
                out = {}
                for t, c in pr.subst[g].items():
                    out = elem_add(field, out, elem_mul_poly(field, vals[t[0]], {t[1:]: c}))
                full.append(self.module.nf(out))
            ops.append(FrobeniusOperator(self, full, k))
        return ops


class FrobeniusOperator:
    def __init__(self, owner, values, degree):
        self.owner = owner
        self.values = values
        self.degree = degree
        self.target = owner.ring.free([0])

    def apply_poly(self, f):
        o = self.owner
        field = o.ring.field
        x = o._from_ring(f)
        out = {}
        for t, c in x.items():
            v = self.values[t[0]]
            if v:
                out = elem_add(field, out, elem_mul_poly(field, v, {t[1:]: c}))
        return o._to_ring(o.module.nf(out))

    def __call__(self, m):
        """Action on module elements of ``R`` (position 0)."""
        f = {t[1:]: c for t, c in m.items()}
        return poly_to_elem(self.apply_poly(f))

    def rank_on(self, d):
        """Rank of the restriction to ``R_d``."""
        R = self.owner.ring
        idx = R.basis_index(d + self.degree)
        cols = []
        for e in R.basis(d):
            img = self.apply_poly({e: R.field.one})
            cols.append({idx[m]: c for m, c in img.items()})
        return _rank(R.field, cols)


def frobenius_operators(R, e, lo, hi):
    if R.field.p == 0:
        raise ValueError("needs a prime field")
    if hi < lo:
        raise InfeasibleBound(f"window [{lo}, {hi}] is empty")
    F = FrobeniusOperators(R, e)
    return F.table(lo, hi), F


def graded_piece_witness(op, lo, hi):
    """A degree ``d`` where the image of ``R_d`` is neither 0 nor all of ``R_d``."""
    R = op.owner.ring
    for d in range(lo, hi + 1):
        dim = R.hilbert(d)
        if not dim:
            continue
        r = op.rank_on(d)
        if 0 < r < dim:
            return d, r, dim
    return None
