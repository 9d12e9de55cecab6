"""Buchberger's algorithm for homogeneous submodules of graded free modules.

A module term is a tuple ``(position, a_1, ..., a_n)`` and a module element
is a dictionary ``term -> coefficient``.  Ideals are the rank one case
(every position is 0).  Elements are homogeneous for the grading where
``deg(x^a e_j) = sum a_i w_i + shifts[j]``.
"""

from __future__ import annotations

import heapq
from operator import add as _add, sub as _sub


class DegreeBoundTooSmall(ValueError):
    pass


class MonomialOrder:
    """Weighted degrevlex lifted to free modules.

    ``rule`` is ``"top"`` (degree, monomial, then position) or ``"pot"``
    (position first).  ``blocks`` splits the variables into groups compared
    one after another, each by weighted degrevlex, which gives elimination
    orders.  ``split`` makes positions ``< split`` dominate all others, so a
    basis can be intersected with the trailing summand.

    ``rank(term)`` returns a tuple whose *smallest* value is the largest
    term; this suits ``min`` and ``heapq``.
    """

    def __init__(self, weights, shifts=(), rule="top", blocks=None, split=0):
        self.weights = tuple(weights)
        self.nvars = len(self.weights)
        self.shifts = tuple(shifts)
        self.rule = rule
        if blocks is None:
            blocks = [list(range(self.nvars))]
        self.blocks = [tuple(b) for b in blocks if len(b)]
        if not self.blocks:
            self.blocks = [()]
        self.split = split
        self._cache = {}
        self._build()

    def _build(self):
        w = self.weights
        shifts = self.shifts
        split = self.split
        rule = self.rule
        blocks = [(b, tuple(reversed(b))) for b in self.blocks]
        single = len(blocks) == 1

        def rank(t):
            pos = t[0]
            out = []
            if split:
                out.append(0 if pos < split else 1)
            if rule == "pot":
                out.append(pos)
            for k, (b, rb) in enumerate(blocks):
                deg = 0
                for i in b:
                    deg += t[i + 1] * w[i]
                if single and shifts:
                    deg += shifts[pos]
                out.append(-deg)
                for i in rb:
                    out.append(t[i + 1])
            if rule != "pot":
                out.append(pos)
            return tuple(out)

        self._rank = rank

    def rank(self, t):
        r = self._cache.get(t)
        if r is None:
            r = self._rank(t)
            self._cache[t] = r
        return r

    def with_shifts(self, shifts):
        return MonomialOrder(self.weights, shifts, self.rule, self.blocks, self.split)

    def leading(self, f):
        return min(f, key=self.rank)

    def sorted_terms(self, f):
        return sorted(f, key=self.rank)

    def degree(self, t):
        d = 0
        for a, w in zip(t[1:], self.weights):
            d += a * w
        if self.shifts:
            d += self.shifts[t[0]]
        return d


def element_degree(f, order):
    for t in f:
        return order.degree(t)
    return None


def divides(s, t):
    """Does module term ``s`` divide ``t`` (same position, exponentwise)?"""
    if s[0] != t[0]:
        return False
    for a, b in zip(s[1:], t[1:]):
        if a > b:
            return False
    return True


def term_lcm(s, t):
    return (s[0],) + tuple(a if a > b else b for a, b in zip(s[1:], t[1:]))


def term_mul(t, e):
    """Multiply module term ``t`` by the exponent vector ``e``."""
    return (t[0],) + tuple(map(_add, t[1:], e))


def mul_term(field, f, e, c=None):
    """``c * x^e * f`` for a module element ``f``."""
    p = field.p
    out = {}
    for t, a in f.items():
        u = (t[0],) + tuple(map(_add, t[1:], e))
        if c is None:
            out[u] = a
        else:
            v = a * c
            if p:
                v %= p
            out[u] = v
    if c is not None and not c:
        return {}
    return out


class GroebnerBasis:
    """A reduced Groebner basis, possibly certified only up to a degree."""

    def __init__(self, field, order, elements, certified=None, kept=None):
        self.field = field
        self.order = order
        self.elements = elements
        self.lts = [order.leading(g) for g in elements]
        self.certified = certified
        self.kept = kept or []
        self._by_pos = {}
        for idx, lt in enumerate(self.lts):
            self._by_pos.setdefault(lt[0], []).append(idx)
        self._reducer = {}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def is_complete(self):
        return self.certified is None

    def check_degree(self, d):
        if self.certified is not None and d is not None and d > self.certified:
            raise DegreeBoundTooSmall(
                f"degree {d} exceeds the certified bound {self.certified}"
            )

    def find_reducer(self, t):
        hit = self._reducer.get(t, -2)
        if hit != -2:
            return hit
        lts = self.lts
        found = None
        for idx in self._by_pos.get(t[0], ()):
            if divides(lts[idx], t):
                found = idx
                break
        self._reducer[t] = found
        return found

    def is_standard(self, t):
        return self.find_reducer(t) is None

    def normal_form(self, f, full=True):
        self.check_degree(element_degree(f, self.order))
        return _reduce(self.field, self.order, f, self.lts, self.elements,
                       self.find_reducer, full)

    def contains(self, f):
        return not self.normal_form(f)

    def leading_terms(self):
        return list(self.lts)


def _reduce(field, order, f, lts, elements, find, full=True):
    p = field.p
    rank = order.rank
    f = dict(f)
    heap = [(rank(t), t) for t in f]
    heapq.heapify(heap)
    rem = {}
    while heap:
        _, t = heapq.heappop(heap)
        c = f.pop(t, None)
        if c is None:
            continue
        idx = find(t)
        if idx is None:
            rem[t] = c
            if not full:
                for u, a in f.items():
                    rem[u] = a
                return rem
            continue
        g = elements[idx]
        lt = lts[idx]
        shift = tuple(map(_sub, t[1:], lt[1:]))
        for s, a in g.items():
            if s == lt:
                continue
            u = (s[0],) + tuple(map(_add, s[1:], shift))
            old = f.get(u)
            if old is None:
                v = -c * a
                if p:
                    v %= p
                f[u] = v
                heapq.heappush(heap, (rank(u), u))
            else:
                v = old - c * a
                if p:
                    v %= p
                if v:
                    f[u] = v
                else:
                    del f[u]
    return rem


def _monic(field, f, lt):
    c = f[lt]
    if c == 1:
        return f
    ci = field.inv(c)
    p = field.p
    if p:
        return {t: (a * ci) % p for t, a in f.items()}
    return {t: a * ci for t, a in f.items()}


def spoly(field, f, lf, g, lg):
    """S-element of monic ``f`` and ``g`` with leading terms ``lf``, ``lg``."""
    l = term_lcm(lf, lg)
    ef = tuple(map(_sub, l[1:], lf[1:]))
    eg = tuple(map(_sub, l[1:], lg[1:]))
    out = mul_term(field, f, ef)
    p = field.p
    for t, a in g.items():
        u = (t[0],) + tuple(map(_add, t[1:], eg))
        v = out.get(u, 0) - a
        if p:
            v %= p
        if v:
            out[u] = v
        else:
            out.pop(u, None)
    return out


class _Builder:
    def __init__(self, field, order, rank_one):
        self.field = field
        self.order = order
        self.rank_one = rank_one
        self.elements = []
        self.lts = []
        self.degs = []
        self.by_pos = {}
        self.pairs = []  # heap of (deg, rank(lcm), i, j)
        self.live = set()
        self._reducer = {}

    def find(self, t):
        hit = self._reducer.get(t)
        lts = self.lts
        start = 0
        if hit is not None:
            n_checked, idx = hit
            if idx is not None:
                return idx
            start = n_checked
        found = None
        for idx in self.by_pos.get(t[0], ()):
            if idx < start:
                continue
            if divides(lts[idx], t):
                found = idx
                break
        self._reducer[t] = (len(lts), found)
        return found

    def reduce(self, f):
        return _reduce(self.field, self.order, f, self.lts, self.elements, self.find)

    def add(self, h):
        lt = self.order.leading(h)
        h = _monic(self.field, h, lt)
        t = len(self.elements)
        deg = self.order.degree(lt)
        w = self.order.weights
        shifts = self.order.shifts

        def ldeg(l):
            d = sum(a * b for a, b in zip(l[1:], w))
            return d + (shifts[l[0]] if shifts else 0)

        # new candidate pairs (Gebauer-Moeller)
        cands = []
        for i in self.by_pos.get(lt[0], ()):
            li = self.lts[i]
            l = term_lcm(li, lt)
            coprime = self.rank_one and all(
                a == 0 or b == 0 for a, b in zip(li[1:], lt[1:])
            )
            cands.append((i, l, coprime))
        # remove old pairs
        if self.live:
            drop = []
            for key in self.live:
                i, j, l = key
                if divides(lt, l):
                    lit = term_lcm(self.lts[i], lt)
                    ljt = term_lcm(self.lts[j], lt)
                    if lit != l and ljt != l:
                        drop.append(key)
            for key in drop:
                self.live.discard(key)
        # M criterion and equal lcm handling
        keep = []
        for idx, (i, l, cop) in enumerate(cands):
            dominated = False
            for jdx, (j, l2, _) in enumerate(cands):
                if jdx != idx and l2 != l and divides(l2, l):
                    dominated = True
                    break
            if not dominated:
                keep.append((i, l, cop))
        groups = {}
        for i, l, cop in keep:
            groups.setdefault(l, []).append((i, cop))
        for l, members in groups.items():
            if any(cop for _, cop in members):
                continue
            i = members[0][0]
            key = (i, t, l)
            self.live.add(key)
            heapq.heappush(self.pairs, (ldeg(l), self.order.rank(l), i, t, l))
        self.elements.append(h)
        self.lts.append(lt)
        self.degs.append(deg)
        self.by_pos.setdefault(lt[0], []).append(t)
        return t


def buchberger(field, gens, order, degree_bound=None, counted=None):
    """Reduced Groebner basis of the submodule generated by ``gens``.

    Processing is degree by degree (normal strategy, ties broken by the lcm
    term).  Pairs above ``degree_bound`` are left untreated and the result is
    certified only up to that degree.  ``counted`` lists the indices of
    ``gens`` whose minimality should be tracked: within a degree, S-elements
    are reduced first, then uncounted inputs, then counted ones, and
    ``kept`` records the counted inputs that were not redundant.
    """
    gens = [dict(g) for g in gens]
    degs = []
    for g in gens:
        if not g:
            degs.append(None)
            continue
        ds = {order.degree(t) for t in g}
        if len(ds) != 1:
            raise ValueError("generators must be homogeneous")
        degs.append(ds.pop())
    if degree_bound is not None:
        for d in degs:
            if d is not None and d > degree_bound:
                raise DegreeBoundTooSmall(
                    f"generator of degree {d} exceeds bound {degree_bound}"
                )
    counted = set(range(len(gens))) if counted is None else set(counted)
    rank_one = all(t[0] == 0 for g in gens for t in g)
    b = _Builder(field, order, rank_one)
    pending = sorted(
        (d, 1 if i in counted else 0, i) for i, d in enumerate(degs) if d is not None
    )
    pi = 0
    kept = []
    certified = None
    while pi < len(pending) or b.pairs:
        d_in = pending[pi][0] if pi < len(pending) else None
        d_pair = b.pairs[0][0] if b.pairs else None
        d = min(x for x in (d_in, d_pair) if x is not None)
        if degree_bound is not None and d > degree_bound:
            certified = degree_bound
            break
        while b.pairs and b.pairs[0][0] == d:
            _, _, i, j, l = heapq.heappop(b.pairs)
            key = (i, j, l)
            if key not in b.live:
                continue
            b.live.discard(key)
            s = spoly(field, b.elements[i], b.lts[i], b.elements[j], b.lts[j])
            s = b.reduce(s)
            if s:
                b.add(s)
        while pi < len(pending) and pending[pi][0] == d:
            _, flag, i = pending[pi]
            pi += 1
            r = b.reduce(gens[i])
            if r:
                b.add(r)
                if flag:
                    kept.append(i)
            # a counted zero remainder is a redundant generator
    elements = interreduce(field, order, b.elements, b.lts)
    return GroebnerBasis(field, order, elements, certified, kept)


def interreduce(field, order, elements, lts=None):
    """Tail-reduce a minimal basis; leading terms are left untouched."""
    if lts is None:
        lts = [order.leading(g) for g in elements]
    by_pos = {}
    for idx, lt in enumerate(lts):
        by_pos.setdefault(lt[0], []).append(idx)
    # drop non-minimal leading terms
    alive = []
    for idx, lt in enumerate(lts):
        redundant = False
        for j in by_pos[lt[0]]:
            if j != idx and divides(lts[j], lt) and (lts[j] != lt or j < idx):
                redundant = True
                break
        if not redundant:
            alive.append(idx)
    els = [elements[i] for i in alive]
    lt2 = [lts[i] for i in alive]
    bp = {}
    for k, lt in enumerate(lt2):
        bp.setdefault(lt[0], []).append(k)
    cache = {}

    def find(t):
        if t in cache:
            return cache[t]
        found = None
        for k in bp.get(t[0], ()):
            if divides(lt2[k], t):
                found = k
                break
        cache[t] = found
        return found

    out = []
    for k, g in enumerate(els):
        lt = lt2[k]
        c = g[lt]
        tail = {t: a for t, a in g.items() if t != lt}
        tail = _reduce(field, order, tail, lt2, els, find)
        tail[lt] = c
        out.append(tail)
    # the order of the basis: by leading term, largest first
    idx = sorted(range(len(out)), key=lambda k: order.rank(lt2[k]))
    return [out[k] for k in idx]


def groebner_ideal(field, polys, weights, degree_bound=None, blocks=None):
    """Groebner basis of an ideal given by raw polynomial dictionaries."""
    order = MonomialOrder(weights, blocks=blocks)
    gens = [{(0,) + m: c for m, c in f.items()} for f in polys if f]
    return buchberger(field, gens, order, degree_bound)


def normal_form(f, gb):
    return gb.normal_form(f)


def syzygies(field, gb):
    """Syzygies among the elements of ``gb`` (Schreyer's S-pair lifting).

    Returned as module elements over positions ``0..len(gb)-1`` whose
    contraction against ``gb`` vanishes.  Each S-pair with matching leading
    position gives one syzygy: the pair's multipliers minus the standard
    representation found while reducing the S-element to zero.
    """
    order = gb.order
    elements = gb.elements
    lts = gb.lts
    n = len(elements)
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            if lts[i][0] != lts[j][0]:
                continue
            l = term_lcm(lts[i], lts[j])
            ei = tuple(map(_sub, l[1:], lts[i][1:]))
            ej = tuple(map(_sub, l[1:], lts[j][1:]))
            ci = elements[i][lts[i]]
            cj = elements[j][lts[j]]
            s = _sub_scaled(field, mul_term(field, elements[i], ei, field.inv(ci)),
                            mul_term(field, elements[j], ej, field.inv(cj)))
            rep = _lift(field, order, s, gb)
            syz = {}
            _acc(field, syz, (i,) + ei, field.inv(ci))
            _acc(field, syz, (j,) + ej, field.neg(field.inv(cj)))
            for t, a in rep.items():
                _acc(field, syz, t, field.neg(a))
            if syz:
                out.append(syz)
    return out


def _acc(field, f, t, c):
    v = f.get(t, 0) + c
    if field.p:
        v %= field.p
    if v:
        f[t] = v
    else:
        f.pop(t, None)


def _sub_scaled(field, f, g):
    out = dict(f)
    for t, a in g.items():
        _acc(field, out, t, field.neg(a))
    return out


def _lift(field, order, f, gb):
    """Express ``f`` (which must reduce to 0) as a combination of ``gb``."""
    p = field.p
    f = dict(f)
    rep = {}
    while f:
        t = order.leading(f)
        idx = gb.find_reducer(t)
        if idx is None:
            raise ValueError("element is not in the submodule")
        lt = gb.lts[idx]
        g = gb.elements[idx]
        c = field.div(f[t], g[lt])
        e = tuple(map(_sub, t[1:], lt[1:]))
        _acc(field, rep, (idx,) + e, c)
        for s, a in g.items():
            u = (s[0],) + tuple(map(_add, s[1:], e))
            v = f.get(u, 0) - c * a
            if p:
                v %= p
            if v:
                f[u] = v
            else:
                f.pop(u, None)
    return rep
