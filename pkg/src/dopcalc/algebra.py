"""Presented graded algebras, enveloping algebras and principal parts.

``R = K[x_1..x_n]/I`` with positive weights and homogeneous ``I``.  The
enveloping algebra ``P = R (x) R`` doubles the variables (primed copies on
the right); the diagonal ideal is generated by ``x_i - x_i'``.  Principal
parts are presented as left ``R``-modules in the coordinates
``y_i = x_i' - x_i``.
"""

from __future__ import annotations

from itertools import combinations

from itertools import combinations_with_replacement
from math import comb

from .exactalg import (
    PolyRing,
    exponents_up_to,
    format_polynomial,
    hasse_derivative,
    monomials_of_degree,
    parse_polynomial,
)
from .graded import GradedModule, Resolution, dual_homology, free_module, poly_to_elem
from .groebner import groebner_ideal


class InhomogeneousRelation(ValueError):
    pass


class PresentedAlgebra:
    """R = K[x_1..x_n]/I for homogeneous I with positive variable weights.

    Relations may be given as strings in the polynomial grammar or as raw
    dictionaries ``exponent tuple -> coefficient``.
    """

    def __init__(self, field, names, weights=None, relations=(), name=None):
        self.poly_ring = PolyRing(field, names, weights)
        self.field = field
        self.names = self.poly_ring.names
        self.weights = self.poly_ring.weights
        self.nvars = len(self.names)
        self.name = name
        rels = []
        for r in relations:
            if isinstance(r, str):
                r = parse_polynomial(r, self.names, field)
            else:
                r = {tuple(m): field(c) for m, c in r.items() if field(c)}
            if not r:
                continue
            degs = {sum(a * w for a, w in zip(m, self.weights)) for m in r}
            if len(degs) != 1:
                raise InhomogeneousRelation(
                    f"relation {format_polynomial(r, self.names, field)} is not homogeneous"
                )
            if degs.pop() == 0:
                raise ValueError("a nonzero constant relation kills the ring")
            rels.append(r)
        self.relations = rels
        self.gb = groebner_ideal(field, rels, self.weights)
        self.ideal_basis = [{t[1:]: c for t, c in g.items()} for g in self.gb.elements]
        self._nf = {}
        self._basis = {}
        self._index = {}
        self._dim = None

    def __repr__(self):
        rel = ", ".join(format_polynomial(r, self.names, self.field) for r in self.relations)
        return f"{self.poly_ring!r}/({rel})"

    # normal forms
    def nf_exp(self, e):
        out = self._nf.get(e)
        if out is None:
            if not self.relations:
                out = {e: self.field.one}
            else:
                r = self.gb.normal_form({(0,) + e: self.field.one})
                out = {t[1:]: c for t, c in r.items()}
            self._nf[e] = out
        return out

    def nf(self, f):
        p = self.field.p
        out = {}
        for e, c in f.items():
            for m, a in self.nf_exp(e).items():
                v = out.get(m, 0) + c * a
                if p:
                    v %= p
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return out

    def is_standard(self, e):
        return not self.relations or self.gb.is_standard((0,) + e)

    def mul(self, f, g):
        p = self.field.p
        out = {}
        for e1, c1 in f.items():
            for e2, c2 in g.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                for m, a in self.nf_exp(e).items():
                    v = out.get(m, 0) + c1 * c2 * a
                    if p:
                        v %= p
                    if v:
                        out[m] = v
                    else:
                        out.pop(m, None)
        return out

    def degree(self, e):
        return sum(a * w for a, w in zip(e, self.weights))

    def basis(self, d):
        b = self._basis.get(d)
        if b is None:
            b = [e for e in monomials_of_degree(self.weights, d) if self.is_standard(e)]
            self._basis[d] = b
            self._index[d] = {e: i for i, e in enumerate(b)}
        return b

    def basis_index(self, d):
        self.basis(d)
        return self._index[d]

    def hilbert(self, d):
        return len(self.basis(d)) if d >= 0 else 0

    def hilbert_window(self, lo, hi):
        return {d: self.hilbert(d) for d in range(lo, hi + 1)}

    @property
    def dimension(self):
        """Krull dimension, read off the lead-term ideal."""
        if self._dim is None:
            lts = [t[1:] for t in self.gb.lts]
            supports = [frozenset(i for i, a in enumerate(m) if a) for m in lts]
            best = 0
            for size in range(self.nvars, -1, -1):
                found = False
                for U in combinations(range(self.nvars), size):
                    Us = set(U)
                    if all(not s <= Us for s in supports):
                        found = True
                        break
                if found:
                    best = size
                    break
            self._dim = best
        return self._dim

    def parse(self, text):
        return parse_polynomial(text, self.names, self.field)

    def format(self, f):
        return format_polynomial(f, self.names, self.field)

    def var(self, i):
        e = [0] * self.nvars
        e[i] = 1
        return {tuple(e): self.field.one}

    def one(self):
        return {(0,) * self.nvars: self.field.one}

    def with_field(self, field):
        """The same presentation read over another coefficient field."""
        rels = []
        for r in self.relations:
            rels.append({m: field(c) for m, c in r.items()})
        return PresentedAlgebra(field, self.names, self.weights, rels, self.name)



    def polynomial_ring(self):
        """The ambient ring ``S`` as a presented algebra."""
        return PresentedAlgebra(self.field, self.names, self.weights, ())

    def subring(self, indices):
        """``K[x_i : i in indices]`` (no relations)."""
        return PresentedAlgebra(
            self.field,
            [self.names[i] for i in indices],
            [self.weights[i] for i in indices],
            (),
        )

    def free(self, degrees=(0,)):
        return free_module(self, degrees)

    def residue_field(self):
        """``K = R/R_+`` as a cyclic module."""
        return GradedModule(self, [0], [poly_to_elem(self.var(i)) for i in range(self.nvars)])

    def is_artinian(self):
        return self.dimension == 0

    def top_degree(self):
        """Largest degree with ``R_d != 0`` (artinian rings only)."""
        if not self.is_artinian():
            raise ValueError("ring is not artinian")
        d = 0
        top = 0
        misses = 0
        w = max(self.weights, default=0)
        while misses <= w:
            if self.hilbert(d):
                top = d
                misses = 0
            else:
                misses += 1
            d += 1
        return top


def noether_variables(R):
    """A subset of the variables over which ``R`` is finite, of size ``dim R``.

    Returns ``None`` when no such subset of the coordinates exists.
    """
    d = R.dimension
    n = R.nvars
    for U in combinations(range(n), d):
        rels = list(R.relations) + [R.var(i) for i in U]
        Q = PresentedAlgebra(R.field, R.names, R.weights, rels)
        lts = [t[1:] for t in Q.gb.lts]
        ok = True
        for i in range(n):
            if i in U:
                continue
            if not any(m[i] > 0 and all(a == 0 for k, a in enumerate(m) if k != i) for m in lts):
                ok = False
                break
        if ok:
            return U
    return None


# ---------------------------------------------------------------------------
# enveloping algebra and the diagonal


def _prime(name):
    return name + "'"


class EnvelopingAlgebra:
    """``P = R (x)_K R`` with the diagonal ideal and multiplication map."""

    def __init__(self, R):
        self.base = R
        n = R.nvars
        names = list(R.names) + [_prime(x) for x in R.names]
        weights = list(R.weights) + list(R.weights)
        rels = []
        for r in R.relations:
            rels.append({m + (0,) * n: c for m, c in r.items()})
        for r in R.relations:
            rels.append({(0,) * n + m: c for m, c in r.items()})
        self.ring = PresentedAlgebra(R.field, names, weights, rels)
        one = R.field.one
        self.diagonal = []
        for i in range(n):
            a = [0] * (2 * n)
            b = [0] * (2 * n)
            a[i] = 1
            b[n + i] = 1
            self.diagonal.append({tuple(a): one, tuple(b): R.field.neg(one)})

    def multiplication(self, f):
        """Image of ``f`` in ``R`` under ``x_i, x_i' -> x_i``."""
        n = self.base.nvars
        out = {}
        p = self.base.field.p
        for m, c in f.items():
            e = tuple(a + b for a, b in zip(m[:n], m[n:]))
            v = out.get(e, 0) + c
            if p:
                v %= p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return self.base.nf(out)

    def left(self, f):
        n = self.base.nvars
        return {m + (0,) * n: c for m, c in f.items()}

    def right(self, f):
        n = self.base.nvars
        return {(0,) * n + m: c for m, c in f.items()}

    def swap(self, f):
        """The automorphism exchanging the two tensor factors."""
        n = self.base.nvars
        return {m[n:] + m[:n]: c for m, c in f.items()}

    def bidegree(self, m):
        n = self.base.nvars
        w = self.base.weights
        return (
            sum(a * b for a, b in zip(m[:n], w)),
            sum(a * b for a, b in zip(m[n:], w)),
        )

    def diagonal_power(self, t):
        return ideal_power(self.ring, self.diagonal, t)

    def diagonal_quotient(self, t):
        """``P / Delta^t`` as a cyclic ``P``-module."""
        if t <= 0:
            return GradedModule(self.ring, [], [])
        gens = self.diagonal_power(t)
        return GradedModule(self.ring, [0], [poly_to_elem(g) for g in gens])


def enveloping(R):
    return EnvelopingAlgebra(R)


def ideal_power(T, gens, t, reduce=True):
    """Generators of ``J^t`` (products of ``t`` generators), optionally pruned."""
    gens = [g for g in gens if g]
    if t == 0:
        return [T.one()]
    prods = []
    seen = set()
    for combo in combinations_with_replacement(range(len(gens)), t):
        f = T.one()
        for i in combo:
            f = _poly_mul_raw(T.field, f, gens[i])
        f = T.nf(f)
        if not f:
            continue
        key = frozenset(f.items())
        if key in seen:
            continue
        seen.add(key)
        prods.append(f)
    if not reduce or not prods:
        return prods
    from .graded import minimal_subset

    amb = free_module(T, [0])
    keep = minimal_subset(amb, [poly_to_elem(f) for f in prods])
    return [prods[i] for i in keep]


def _poly_mul_raw(field, f, g):
    p = field.p
    out = {}
    for a, c in f.items():
        for b, d in g.items():
            e = tuple(x + y for x, y in zip(a, b))
            v = out.get(e, 0) + c * d
            if p:
                v %= p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


# ---------------------------------------------------------------------------
# principal parts


class PrincipalParts:
    """``P^n(M) = (R (x) R)/Delta^{n+1} (x)_R M`` as a left ``R``-module.

    Generators are ``y^b (x) m_j`` for ``|b| <= n``, in degree
    ``w.b + deg m_j``.  The right factor acts through Taylor expansion
    ``r(x') = sum_b D^(b) r(x) y^b`` with Hasse derivatives ``D^(b)``.
    """

    def __init__(self, R, n, M=None):
        self.ring = R
        self.order = n
        if M is None:
            M = R.free([0])
        self.source = M
        self.betas = exponents_up_to(R.nvars, n)
        self.beta_index = {b: i for i, b in enumerate(self.betas)}
        nb = len(self.betas)
        field = R.field
        p = field.p
        w = R.weights
        degrees = []
        for j, dj in enumerate(M.degrees):
            for b in self.betas:
                degrees.append(dj + sum(x * y for x, y in zip(b, w)))
        rels = []
        # relations of R read in the right factor
        right_rels = [(j, r) for j in range(M.rank) for r in R.relations]
        for j, f in right_rels:
            derivs = {b: hasse_derivative(field, f, b) for b in self.betas if any(b)}
            for g in self.betas:
                if sum(g) > n - 1:
                    continue
                rel = {}
                for b, df in derivs.items():
                    gb = tuple(x + y for x, y in zip(g, b))
                    if sum(gb) > n:
                        continue
                    pos = j * nb + self.beta_index[gb]
                    for e, c in df.items():
                        _acc(p, rel, (pos,) + e, c)
                if rel:
                    rels.append(rel)
        # relations of M through the right factor
        for r in M.relations:
            for g in self.betas:
                rel = {}
                for t, c in r.items():
                    j = t[0]
                    mono = {t[1:]: c}
                    for b in self.betas:
                        gb = tuple(x + y for x, y in zip(g, b))
                        if sum(gb) > n:
                            continue
                        df = hasse_derivative(field, mono, b)
                        pos = j * nb + self.beta_index[gb]
                        for e, a in df.items():
                            _acc(p, rel, (pos,) + e, a)
                if rel:
                    rels.append(rel)
        self.module = GradedModule(R, degrees, rels)
        self.nb = nb

    def position(self, beta, j=0):
        return j * self.nb + self.beta_index[tuple(beta)]

    def universal(self, m):
        """``d(m) = 1 (x) m``: the Taylor expansion of ``m`` in ``y``."""
        field = self.ring.field
        p = field.p
        out = {}
        for t, c in m.items():
            j = t[0]
            e = t[1:]
            for b in self.betas:
                if any(x < y for x, y in zip(e, b)):
                    continue
                k = c
                for x, y in zip(e, b):
                    k = k * comb(x, y)
                if p:
                    k %= p
                if not k:
                    continue
                u = (self.position(b, j),) + tuple(x - y for x, y in zip(e, b))
                _acc(p, out, u, k)
        return out

    def surjection_images(self, smaller):
        """Images of this module's generators in ``P^{n'}(M)``, ``n' <= n``."""
        out = []
        zero = (0,) * self.ring.nvars
        for j in range(self.source.rank):
            for b in self.betas:
                if sum(b) <= smaller.order:
                    out.append({(smaller.position(b, j),) + zero: self.ring.field.one})
                else:
                    out.append({})
        return out

    def multiplication_map(self, f):
        """``P^n -> R``: set ``y = 0`` (left module with ``M = R``)."""
        out = {}
        p = self.ring.field.p
        for t, c in f.items():
            if t[0] % self.nb == 0:
                _acc(p, out, (t[0] // self.nb,) + t[1:], c)
        return out


def _acc(p, out, t, c):
    v = out.get(t, 0) + c
    if p:
        v %= p
    if v:
        out[t] = v
    else:
        out.pop(t, None)


def principal_parts(R, n, M=None):
    return PrincipalParts(R, n, M)


# ---------------------------------------------------------------------------
# canonical modules


class NotCohenMacaulay(UserWarning):
    pass


class CanonicalModule:
    """``omega_R = Ext^c_S(R, S(-sum w))`` presented over ``R``.

    ``a`` is set when the module was found cyclic and isomorphic to
    ``R(a)`` in the tested window (evidence, not proof, of Gorenstein).
    """

    def __init__(self, R, window=None):
        self.ring = R
        S = R.polynomial_ring()
        c = R.nvars - R.dimension
        self.codim = c
        res = Resolution(S.free([0]) if not R.relations else _cyclic(S, R.relations), R.nvars + 1)
        self.betti = res.betti()
        length = max(i for i, b in enumerate(self.betti) if b) if any(self.betti) else 0
        self.projective_dimension = length
        self.cohen_macaulay = length == c
        sw = sum(R.weights)
        H = dual_homology(res, c)
        degs = [d + sw for d in H.degrees]
        self.module = GradedModule(R, degs, H.relations)
        self.a = None
        from .graded import minimal_generators

        gens = minimal_generators(self.module)
        if len(gens) == 1:
            cand = -gens[0]
            lo, hi = window or (0, 2 * max(R.weights) * (R.nvars + 1))
            same = all(
                self.module.dim(k) == R.hilbert(k + cand) for k in range(lo, hi + 1)
            )
            if same:
                self.a = cand

    @property
    def gorenstein(self):
        return self.a is not None

    def as_shift(self):
        """``R(a)`` as a free module when Gorenstein."""
        if self.a is None:
            raise ValueError("canonical module is not cyclic free in the window")
        return self.ring.free([-self.a])


def _cyclic(S, rels):
    return GradedModule(S, [0], [poly_to_elem(r) for r in rels])


def canonical_module(R, window=None):
    return CanonicalModule(R, window)
