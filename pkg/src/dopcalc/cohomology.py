"""Colimits of Ext: local cohomology, derived operator functors and comparisons.

A colimit cell ``(i, k)`` is tracked over stages ``s`` together with the
maps between consecutive stages, obtained by lifting the stage maps
through minimal resolutions.  A cell is *stable* from ``s0`` when the
dimensions at ``s0, s0+1, s0+2`` agree and both connecting maps are
isomorphisms on the cell.  Equal dimensions alone never count.
"""

from __future__ import annotations

from itertools import combinations

from .algebra import (
    EnvelopingAlgebra,
    PresentedAlgebra,
    PrincipalParts,
    canonical_module,
    noether_variables,
)
from .graded import (
    ExtCell,
    GradedModule,
    HomModule,
    Resolution,
    Restriction,
    induced_rank,
    lift_chain_map,
    poly_to_elem,
)
from .linalg import Echelon, apply_columns, nullspace


class Unstable(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# colimit bookkeeping


class ColimitCell:
    def __init__(self, i, k):
        self.i = i
        self.k = k
        self.dims = {}
        self.iso = {}

    def stable_from(self):
        """Start of the terminal run of isomorphisms, if it spans three stages.

        Only the tail is used, so a later jump in dimension is never
        hidden behind an early run of equal stages.
        """
        stages = sorted(self.dims)
        if len(stages) < 3:
            return None
        s = stages[-1]
        while s - 1 in self.dims and self.iso.get(s - 1):
            s -= 1
        return s if stages[-1] - s >= 2 else None

    @property
    def stable(self):
        return self.stable_from() is not None

    @property
    def dim(self):
        s = self.stable_from()
        return None if s is None else self.dims[s]

    def last(self):
        return self.dims[max(self.dims)] if self.dims else None

    def status(self):
        s = self.stable_from()
        return f"stable({s})" if s is not None else "unstable"


class ColimitTable:
    """Cells ``(i, k)`` of a direct system of Ext groups."""

    def __init__(self, direction, cells=None, shift=0):
        self.direction = direction
        self.cells = cells or {}
        self.shift = shift

    def cell(self, i, k):
        return self.cells[(i, k)]

    def rows(self):
        for (i, k) in sorted(self.cells):
            c = self.cells[(i, k)]
            yield i, k, c

    def all_stable(self):
        return all(c.stable for c in self.cells.values())


class StageSystem:
    """A direct system ``Ext^i(M_s, N)`` for a tower ``M_{s+1} -> M_s``.

    ``stage(s)`` builds ``M_s`` (a :class:`GradedModule`); ``transition(s)``
    returns images of the generators of ``M_{s+1}`` as elements of ``M_s``
    (over the original generators of each presentation).
    """

    def __init__(self, stage, transition, N, first=0):
        self._stage = stage
        self._transition = transition
        self.N = N
        self.first = first
        self._res = {}
        self._cells = {}
        self._chains = {}

    def resolution(self, s, length):
        r = self._res.get(s)
        if r is None:
            r = Resolution(self._stage(s), length)
            self._res[s] = r
        elif r.length < length:
            r.extend(length)
        return r

    def ext_cell(self, s, i, k):
        key = (s, i, k)
        c = self._cells.get(key)
        if c is None:
            c = ExtCell(self.resolution(s, i + 1), self.N, i, k)
            self._cells[key] = c
        return c

    def chain(self, s, length):
        """Chain map from the resolution of ``M_{s+1}`` to that of ``M_s``."""
        got = self._chains.get(s)
        if got is not None and len(got) > length:
            return got
        src = self.resolution(s + 1, length + 1)
        tgt = self.resolution(s, length + 1)
        imgs = self._transition(s)
        f0 = [tgt.pruned.translate(imgs[g]) for g in src.pruned.kept]
        chain = lift_chain_map(src, tgt, f0, length)
        self._chains[s] = chain
        return chain

    def connecting_iso(self, s, i, k):
        a = self.ext_cell(s, i, k)
        b = self.ext_cell(s + 1, i, k)
        if a.dim != b.dim:
            return False
        if a.dim == 0:
            return True
        chain = self.chain(s, i)
        r = induced_rank(a, b, chain[i], None)
        return r == a.dim

    def table(self, indices, lo, hi, last, direction):
        cells = {}
        for i in indices:
            for k in range(lo, hi + 1):
                cell = ColimitCell(i, k)
                for s in range(self.first, last + 1):
                    cell.dims[s] = self.ext_cell(s, i, k).dim
                for s in range(self.first, last):
                    cell.iso[s] = self.connecting_iso(s, i, k)
                cells[(i, k)] = cell
        return ColimitTable(direction, cells)

    def stage_dims(self, i, k, s):
        return self.ext_cell(s, i, k).dim


# ---------------------------------------------------------------------------
# local cohomology


def power_tower(T, J, M=None):
    """Stages ``T/J^t`` (``t >= 1``) with the canonical surjections."""
    from .algebra import ideal_power

    def stage(t):
        gens = ideal_power(T, J, t)
        return GradedModule(T, [0], [poly_to_elem(g) for g in gens])

    zero = (0,) * T.nvars

    def transition(t):
        return [{(0,) + zero: T.field.one}]

    return stage, transition


def local_cohomology_ext(T, J, M, i, lo, hi, t_max):
    """``lim_t Ext^i_T(T/J^t, M)`` cell by cell for ``t = 1..t_max``."""
    stage, transition = power_tower(T, J)
    system = StageSystem(stage, transition, M, first=1)
    return system.table([i], lo, hi, t_max, "powers")


class KoszulSystem:
    """``H^i(f_1^t, ..., f_m^t; M)`` with maps multiplying by ``prod f_j``.

    Its colimit over ``t`` is ``H^i_J(M)`` for ``J = (f_1, ..., f_m)``.
    """

    def __init__(self, T, gens, M):
        self.T = T
        self.gens = [g for g in gens if g]
        self.M = M
        self.degs = [T.degree(next(iter(g))) for g in self.gens]
        self._powers = {}
        self._cells = {}

    def power(self, j, t):
        key = (j, t)
        f = self._powers.get(key)
        if f is None:
            f = self.T.one()
            for _ in range(t):
                f = self.T.mul(f, self.gens[j])
            self._powers[key] = f
        return f

    def _space(self, i, t, k):
        subsets = list(combinations(range(len(self.gens)), i))
        offsets = {}
        total = 0
        for S in subsets:
            offsets[S] = total
            total += self.M.dim(k + t * sum(self.degs[j] for j in S))
        return subsets, offsets, total

    def _differential(self, i, t, k):
        """Columns of ``C^i -> C^{i+1}`` in degree ``k``."""
        M = self.M
        field = M.field
        subs, offs, _ = self._space(i, t, k)
        subs2, offs2, _ = self._space(i + 1, t, k)
        cols = []
        for S in subs:
            dS = k + t * sum(self.degs[j] for j in S)
            for bt in M.basis(dS):
                col = {}
                for j in range(len(self.gens)):
                    if j in S:
                        continue
                    S2 = tuple(sorted(S + (j,)))
                    sign = S2.index(j) % 2
                    img = M.mul({bt: field.one}, self.power(j, t))
                    if not img:
                        continue
                    d2 = dS + t * self.degs[j]
                    idx = M.index(d2)
                    off = offs2[S2]
                    for u, c in img.items():
                        v = col.get(off + idx[u], 0) + (field.neg(c) if sign else c)
                        if field.p:
                            v %= field.p
                        if v:
                            col[off + idx[u]] = v
                        else:
                            col.pop(off + idx[u], None)
                cols.append(col)
        return cols

    def cell(self, i, t, k):
        key = (i, t, k)
        c = self._cells.get(key)
        if c is not None:
            return c
        field = self.M.field
        cols = self._differential(i, t, k)
        cycles = nullspace(field, cols)
        bound = Echelon(field)
        if i > 0:
            for col in self._differential(i - 1, t, k):
                bound.add(col)
        c = (cycles, bound, len(cycles) - bound.rank)
        self._cells[key] = c
        return c

    def transition_columns(self, i, t, k):
        """``C^i(t) -> C^i(t+1)``: multiply the ``S`` slot by ``prod_{j in S} f_j``."""
        M = self.M
        field = M.field
        subs, offs, _ = self._space(i, t, k)
        _, offs2, _ = self._space(i, t + 1, k)
        cols = []
        for S in subs:
            dS = k + t * sum(self.degs[j] for j in S)
            mult = self.T.one()
            for j in S:
                mult = self.T.mul(mult, self.gens[j])
            d2 = dS + sum(self.degs[j] for j in S)
            idx = M.index(d2)
            for bt in M.basis(dS):
                img = M.mul({bt: field.one}, mult)
                cols.append({offs2[S] + idx[u]: c for u, c in img.items()})
        return cols

    def connecting_iso(self, i, t, k):
        za, ba, da = self.cell(i, t, k)
        zb, bb, db = self.cell(i, t + 1, k)
        if da != db:
            return False
        if da == 0:
            return True
        field = self.M.field
        cols = self.transition_columns(i, t, k)
        e = Echelon(field)
        for r in bb.rows.values():
            e.add(r)
        base = e.rank
        # representatives of the source classes
        e0 = Echelon(field)
        for r in ba.rows.values():
            e0.add(r)
        for z in za:
            if e0.add(z) is None:
                e.add(apply_columns(field, cols, z))
        return e.rank - base == db

    def table(self, indices, lo, hi, t_max):
        cells = {}
        for i in indices:
            for k in range(lo, hi + 1):
                cell = ColimitCell(i, k)
                for t in range(1, t_max + 1):
                    cell.dims[t] = self.cell(i, t, k)[2]
                for t in range(1, t_max):
                    cell.iso[t] = self.connecting_iso(i, t, k)
                cells[(i, k)] = cell
        return ColimitTable("koszul", cells)


def local_cohomology(T, J, M, i, lo, hi, t_max, method="powers"):
    """``H^i_J(M)`` in degrees ``lo..hi`` as a :class:`ColimitTable`.

    ``method="powers"`` uses ``Ext^i_T(T/J^t, M)`` with resolutions;
    ``method="koszul"`` uses Koszul complexes on powers of the given
    generators of ``J``, which is cheaper and gives the same colimit.
    """
    if method == "powers":
        return local_cohomology_ext(T, J, M, i, lo, hi, t_max)
    if method == "koszul":
        return KoszulSystem(T, J, M).table([i], lo, hi, t_max)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# derived operator functors


def principal_parts_system(R, N, M=None):
    """Stages ``Ext(P^n(M), N)`` along ``P^{n+1} -> P^n``."""
    cache = {}

    def pp(n):
        x = cache.get(n)
        if x is None:
            x = PrincipalParts(R, n, M)
            cache[n] = x
        return x

    def stage(n):
        return pp(n).module

    def transition(n):
        return pp(n + 1).surjection_images(pp(n))

    return StageSystem(stage, transition, N, first=0)


def svdb(R, M, indices, lo, hi, n_max, system=None):
    """``lim_n Ext^i_R(P^n, M)`` for ``i`` in ``indices``."""
    system = system or principal_parts_system(R, M)
    if isinstance(indices, int):
        indices = [indices]
    return system.table(indices, lo, hi, n_max, "principal-parts")


class NormalizedExt:
    """``Ext^j_T(M_s, omega_T)`` through a Noether normalization ``A`` of ``T``.

    For Cohen-Macaulay ``T`` finite over the polynomial subring ``A``,
    ``Ext^j_T(M, omega_T) = Ext^j_A(M, A(-sum w_A))``; both the modules
    and the stage maps are restricted to ``A``.
    """

    def __init__(self, T, stage, transition, variables=None, first=0):
        U = variables if variables is not None else noether_variables(T)
        if U is None:
            raise ValueError("no coordinate Noether normalization found")
        self.T = T
        self.U = tuple(U)
        self.A = T.subring(self.U)
        sw = sum(T.weights[i] for i in self.U)
        self.omega_A = self.A.free([sw])
        self._stage = stage
        self._transition = transition
        self._restr = {}
        self.system = StageSystem(self.restricted, self._restricted_transition,
                                  self.omega_A, first)

    def restriction(self, s):
        r = self._restr.get(s)
        if r is None:
            r = Restriction(self._stage(s), self.U, self.A)
            self._restr[s] = r
        return r

    def restricted(self, s):
        return self.restriction(s).module

    def _restricted_transition(self, s):
        src = self.restriction(s + 1)
        tgt = self.restriction(s)
        imgs = self._transition(s)
        out = []
        for b in src.gens:
            # generator b of M_{s+1}|A is a monomial multiple of a generator
            j = b[0]
            x = {}
            for t, c in imgs[j].items():
                u = (t[0],) + tuple(a + e for a, e in zip(t[1:], b[1:]))
                x[u] = x.get(u, 0) + c
            x = {u: c for u, c in x.items() if c}
            out.append(tgt.to_sub(x))
        return out


def diagonal_system(R, variables=None):
    """Stages ``P/Delta^{n+1}`` of the enveloping algebra, via normalization."""
    E = EnvelopingAlgebra(R)
    P = E.ring
    if variables is None:
        U = noether_variables(R)
        if U is None:
            raise ValueError("no coordinate Noether normalization of R")
        n = R.nvars
        variables = tuple(U) + tuple(n + i for i in U)

    cache = {}

    def stage(s):
        m = cache.get(s)
        if m is None:
            m = E.diagonal_quotient(s + 1)
            cache[s] = m
        return m

    zero = (0,) * P.nvars

    def transition(s):
        return [{(0,) + zero: P.field.one}]

    return E, NormalizedExt(P, stage, transition, variables)


# ---------------------------------------------------------------------------
# the comparison of both sides


class CellVerdict:
    def __init__(self, key, lhs, rhs, verdict):
        self.key = key
        self.lhs = lhs
        self.rhs = rhs
        self.verdict = verdict


class ComparisonReport:
    """Per-cell verdicts: ``match``, ``mismatch`` or ``inconclusive``."""

    def __init__(self, kind, stage_cells, colimit_cells, notes=()):
        self.kind = kind
        self.stage_cells = stage_cells
        self.colimit_cells = colimit_cells
        self.notes = list(notes)

    @property
    def stage_ok(self):
        return all(c.verdict == "match" for c in self.stage_cells)

    @property
    def colimit_ok(self):
        return all(c.verdict == "match" for c in self.colimit_cells)

    def verdicts(self):
        return [c.verdict for c in self.stage_cells] + [c.verdict for c in self.colimit_cells]


def colimit_verdict(a, b):
    if not (a.stable and b.stable):
        return "inconclusive"
    return "match" if a.dim == b.dim else "mismatch"


def theorem_a_compare(R, i, lo, hi, n_max, omega=None, variables=None):
    """``lim Ext^i_R(P^n, omega_R)`` against ``lim Ext^{d+i}_P(P/Delta^{n+1}, omega_P)``.

    Degrees are reported as operator degrees: a class in degree ``k`` of
    ``Ext(P^n, omega_R)`` with ``omega_R = R(a)`` has operator degree
    ``k + a``.  Stage ``n`` of each side is compared exactly, and the
    colimit cells are compared when both sides are stable.
    """
    d = R.dimension
    omega = omega or canonical_module(R)
    a = omega.a if omega.a is not None else 0
    lhs_sys = principal_parts_system(R, omega.module)
    E, rhs = diagonal_system(R, variables)
    rsys = rhs.system
    wlo, whi = lo - a, hi - a
    lt = lhs_sys.table([i], wlo, whi, n_max, "principal-parts")
    rt = rsys.table([d + i], wlo, whi, n_max, "diagonal")
    stage_cells = []
    colim = []
    for k in range(wlo, whi + 1):
        lc = lt.cell(i, k)
        rc = rt.cell(d + i, k)
        for n in range(0, n_max + 1):
            v = "match" if lc.dims[n] == rc.dims[n] else "mismatch"
            stage_cells.append(CellVerdict((n, k + a), lc.dims[n], rc.dims[n], v))
        colim.append(CellVerdict((k + a,), lc, rc, colimit_verdict(lc, rc)))
    notes = [f"d={d}", f"a={a}", f"normalization={rhs.U}"]
    rep = ComparisonReport("theorem-a", stage_cells, colim, notes)
    rep.lhs_table = lt
    rep.rhs_table = rt
    rep.shift = a
    return rep


def horrocks_check(R, n, i, lo, hi, t_max, omega=None, params=None):
    """``Ext^i_R(P^n, omega)`` against ``H^{i+1}_{R_+}(Hom_R(P^n, omega))``.

    The right side is a Koszul colimit on powers of a system of parameters
    (coordinate Noether normalization), which has radical ``R_+``.
    """
    omega = omega or canonical_module(R)
    pp = PrincipalParts(R, n)
    res = Resolution(pp.module, i + 1)
    H = HomModule(pp.module, omega.module)
    if params is None:
        U = noether_variables(R)
        params = [R.var(j) for j in U]
    ks = KoszulSystem(R, params, H.module)
    table = ks.table([i + 1], lo, hi, t_max)
    stage_cells = []
    colim = []
    for k in range(lo, hi + 1):
        lhs = ExtCell(res, omega.module, i, k).dim
        rc = table.cell(i + 1, k)
        if rc.stable:
            v = "match" if rc.dim == lhs else "mismatch"
        else:
            v = "inconclusive"
        colim.append(CellVerdict((k,), lhs, rc, v))
    rep = ComparisonReport("horrocks", stage_cells, colim, [f"n={n}", f"i={i}"])
    rep.rhs_table = table
    return rep


# ---------------------------------------------------------------------------
# probes


class DepthReport:
    def __init__(self, d, i_max, tables, first_nonzero, inconclusive):
        self.d = d
        self.i_max = i_max
        self.tables = tables
        self.first_nonzero = first_nonzero
        self.inconclusive = inconclusive

    def summary(self):
        if self.first_nonzero is not None:
            return f"depth {min(1 + self.first_nonzero, self.d)} (nonzero stable cell at i={self.first_nonzero})"
        if self.inconclusive:
            return "inconclusive: unstable cells within bounds"
        return f"no obstruction found up to bounds: depth >= {min(self.i_max + 1, self.d)} evidence"


def depth_probe(R, lo, hi, i_max, n_max):
    """Smallest ``i > 0`` with a nonzero stable cell of ``lim Ext^i(P^n, R)``."""
    d = R.dimension
    system = principal_parts_system(R, R.free([0]))
    tables = {}
    inconclusive = False
    for i in range(1, i_max + 1):
        t = system.table([i], lo, hi, n_max, "principal-parts")
        tables[i] = t
        nonzero = [c for (_, _, c) in t.rows() if c.stable and c.dim]
        if nonzero:
            return DepthReport(d, i_max, tables, i, inconclusive)
        if any(not c.stable for (_, _, c) in t.rows()):
            inconclusive = True
    return DepthReport(d, i_max, tables, None, inconclusive)


def syzygy_module(M):
    """First syzygy module of ``M`` (kernel of its minimal free cover)."""
    res = Resolution(M, 1)
    F0 = res.free[0]
    rels = res.maps[1]
    from .graded import submodule_presentation

    if not rels:
        return GradedModule(M.ring, [], [])
    mod, _ = submodule_presentation(rels, F0)
    return mod


def vanishing_propagation_check(R, M, s, lo, hi, n_max):
    """Compare ``lim Ext^i(P^n, M)`` with ``lim Ext^{i+1}(P^n, syz M)`` for ``s < i <= s+2``."""
    Z = syzygy_module(M)
    idx = [s + 1, s + 2]
    tm = svdb(R, M, idx, lo, hi, n_max)
    tz = svdb(R, Z, [i + 1 for i in idx], lo, hi, n_max)
    cells = []
    for i in idx:
        for k in range(lo, hi + 1):
            a = tm.cell(i, k)
            b = tz.cell(i + 1, k)
            cells.append(CellVerdict((i, k), a, b, colimit_verdict(a, b)))
    rep = ComparisonReport("vanishing", [], cells, [f"s={s}"])
    rep.module_table = tm
    rep.syzygy_table = tz
    return rep


# ---------------------------------------------------------------------------
# left and right module structures on operators


class StructureReport:
    def __init__(self, name, hilbert, generators, complete):
        self.name = name
        self.hilbert = hilbert
        self.generators = generators
        self.complete = complete

    @property
    def count(self):
        return sum(self.generators.values())

    def multiset(self):
        out = []
        for k in sorted(self.generators):
            out += [k] * self.generators[k]
        return out


class LeftRightReport:
    def __init__(self, order, left, right):
        self.order = order
        self.left = left
        self.right = right

    @property
    def identical(self):
        return self.left.multiset() == self.right.multiset()


def stable_artinian_order(R, limit=32):
    """Smallest ``n`` with ``D^n(R, R) = Hom_K(R, R)`` for artinian ``R``."""
    from .diffops import OperatorSpace

    top = R.top_degree()
    total = sum(R.hilbert(d) for d in range(top + 1))
    for n in range(limit + 1):
        space = OperatorSpace(R, n)
        if sum(space.table(-top, top).values()) == total * total:
            return n, space
    raise ValueError("operators did not exhaust Hom_K(R, R) within the order limit")


def left_right_compare(R, n=None, lo=None, hi=None):
    """Minimal generators of ``D^n(R, R)`` under post- and pre-composition.

    The left structure is ``(r delta)(m) = r delta(m)``, the right one is
    ``(delta r)(m) = delta(r m)``.  Generators in degree ``k`` are counted
    as ``dim D_k - dim (R_+ D)_k``; a count is complete only when every
    ``D_{k - w_i}`` lies in the window.  For artinian rings the defaults
    take the order where ``D`` exhausts ``Hom_K(R, R)`` and the full
    degree range.
    """
    from .diffops import OperatorSpace

    if R.is_artinian():
        top = R.top_degree()
        if n is None:
            n, space = stable_artinian_order(R)
        else:
            space = OperatorSpace(R, n)
        lo = -top if lo is None else lo
        hi = top if hi is None else hi
        points_deg = range(0, top + 1)
    else:
        if n is None or lo is None or hi is None:
            raise ValueError("order and window are required for non-artinian rings")
        space = OperatorSpace(R, n)
        points_deg = range(0, n + 2)
    field = R.field
    points = []
    for d in points_deg:
        points += [{(0,) + e: field.one} for e in R.basis(d)]
    ops = {k: space.basis(k) for k in range(lo, hi + 1)}
    hilbert = {k: len(ops[k]) for k in ops}
    wmax = max(R.weights) if R.weights else 0

    def count(products):
        gens = {}
        for k in ops:
            e = Echelon(field)
            for i, w in enumerate(R.weights):
                if k - w in ops:
                    for v in products(i, k - w):
                        e.add(v)
            g = hilbert[k] - e.rank
            if g:
                gens[k] = g
        return gens

    F = R.free([0])

    def products(i, k, side):
        xi = R.var(i)
        out = []
        for op in ops[k]:
            vec = {}
            for pi, m in enumerate(points):
                if side == "left":
                    img = op(m)
                    img = F.mul(img, xi) if img else {}
                else:
                    xm = F.mul(m, xi)
                    img = op(xm) if xm else {}
                for t, c in img.items():
                    vec[(pi, t)] = c
            out.append(vec)
        return out

    def left_products(i, k):
        return products(i, k, "left")

    def right_products(i, k):
        return products(i, k, "right")

    complete = R.is_artinian()
    left = StructureReport("left", hilbert, count(left_products), complete)
    right = StructureReport("right", hilbert, count(right_products), complete)
    if not R.is_artinian():
        for rep in (left, right):
            rep.complete_from = lo + wmax
    return LeftRightReport(n, left, right)
