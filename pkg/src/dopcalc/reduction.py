"""Comparing operator dimensions over QQ and over F_p.

For a graded ring defined over ZZ, the dimension of a cell of ``D^n`` can
only jump up when passing from the rational fiber to the fiber at ``p``
(when both fibers are presented by the same lead terms).  A strict jump is
a torsion witness; a drop, or differing lead terms, marks a bad prime.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from itertools import combinations

from .algebra import PresentedAlgebra
from .diffops import OperatorSpace
from .exactalg import GF, QQ, format_polynomial, parse_polynomial
from .groebner import MonomialOrder, buchberger

HYPOTHESES = (
    "fibers of the integral ring are flat over ZZ at the tested primes",
    "principal parts modules are projective over ZZ localized at the tested primes",
)

NO_WITNESS = "NoWitness"
WITNESS = "TorsionWitness"
BAD_PRIME = "BadPrime"


class NotIntegral(ValueError):
    pass


class IntegralPresentation:
    """Variables, weights and relations with integer coefficients."""

    def __init__(self, names, weights=None, relations=(), name=None):
        self.names = tuple(names)
        self.weights = tuple(weights) if weights is not None else (1,) * len(self.names)
        rels = []
        for r in relations:
            if isinstance(r, str):
                r = parse_polynomial(r, self.names, QQ)
            out = {}
            for m, c in r.items():
                c = QQ(c)
                if c.denominator != 1:
                    raise NotIntegral(f"coefficient {c} is not an integer")
                if c:
                    out[tuple(m)] = int(c.numerator)
            if out:
                rels.append(out)
        self.relations = rels
        self.name = name

    def __repr__(self):
        rel = ", ".join(format_polynomial(r, self.names, QQ) for r in self.relations)
        return f"ZZ[{', '.join(self.names)}]/({rel})"

    def fiber(self, p=0):
        """The ring over QQ (``p = 0``) or over ``F_p``."""
        field = QQ if p == 0 else GF(p)
        rels = []
        for r in self.relations:
            f = {m: field(c) for m, c in r.items() if field(c)}
            if f:
                rels.append(f)
        return PresentedAlgebra(field, self.names, self.weights, rels, self.name)

    def jacobian_generators(self, field, codim):
        """Relations together with the ``codim``-minors of their Jacobian."""
        n = len(self.names)
        rels = [{m: field(c) for m, c in r.items() if field(c)} for r in self.relations]
        rels = [r for r in rels if r]
        partial = []
        for r in rels:
            row = []
            for i in range(n):
                d = {}
                for m, c in r.items():
                    if m[i]:
                        v = field.mul(c, field(m[i]))
                        if v:
                            e = list(m)
                            e[i] -= 1
                            d[tuple(e)] = v
                row.append(d)
            partial.append(row)
        out = list(rels)
        if codim <= 0:
            return out
        for rows in combinations(range(len(rels)), codim):
            for cols in combinations(range(n), codim):
                out.append(_det(field, [[partial[r][c] for c in cols] for r in rows]))
        return [f for f in out if f]


def _det(field, m):
    from .exactalg import poly_add, poly_mul, poly_neg

    if len(m) == 1:
        return m[0][0]
    out = {}
    for j in range(len(m)):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = poly_mul(field, m[0][j], _det(field, minor))
        if j % 2:
            term = poly_neg(field, term)
        out = poly_add(field, out, term)
    return out


def _lead_terms(field, polys, weights, bound):
    order = MonomialOrder(weights)
    gens = [{(0,) + m: c for m, c in f.items()} for f in polys if f]
    if not gens:
        return frozenset()
    gb = buchberger(field, gens, order, degree_bound=bound)
    return frozenset(t[1:] for t in gb.lts)


class PrimeCheck:
    def __init__(self, p, good, reasons):
        self.p = p
        self.good = good
        self.reasons = reasons


def check_prime(RZ, p, degree_bound=None):
    """Compare truncated lead-term ideals of ``I`` and of its Jacobian ideal.

    Both ideals must have the same lead terms over QQ and over ``F_p`` up
    to ``degree_bound`` (default: twice the largest relation degree).
    """
    reasons = []
    Fp = GF(p)
    w = RZ.weights
    degs = [max(sum(a * b for a, b in zip(m, w)) for m in r) for r in RZ.relations]
    bound = degree_bound if degree_bound is not None else 2 * max(degs, default=1)
    for r in RZ.relations:
        if not any(c % p for c in r.values()):
            reasons.append("a relation vanishes identically")
    if _lead_terms(QQ, RZ.fiber(0).relations, w, bound) != _lead_terms(
            Fp, [{m: Fp(c) for m, c in r.items() if Fp(c)} for r in RZ.relations], w, bound):
        reasons.append("lead terms of the defining ideal differ")
    R0 = RZ.fiber(0)
    codim = len(RZ.names) - R0.dimension
    jq = RZ.jacobian_generators(QQ, codim)
    jp = RZ.jacobian_generators(Fp, codim)
    if _lead_terms(QQ, jq, w, bound) != _lead_terms(Fp, jp, w, bound):
        reasons.append("lead terms of the Jacobian ideal differ")
    return PrimeCheck(p, not reasons, reasons)


class TorsionRow:
    __slots__ = ("prime", "order", "degree", "dim_q", "dim_p", "excess", "verdict")

    def __init__(self, prime, order, degree, dim_q, dim_p, verdict):
        self.prime = prime
        self.order = order
        self.degree = degree
        self.dim_q = dim_q
        self.dim_p = dim_p
        self.excess = dim_p - dim_q
        self.verdict = verdict

    def as_tuple(self):
        return (self.prime, self.order, self.degree, self.dim_q, self.dim_p,
                self.excess, self.verdict)


class TorsionReport:
    """Rows per prime and cell, with a per-prime summary."""

    def __init__(self, rows, checks, order, lo, hi):
        self.rows = rows
        self.checks = checks
        self.order = order
        self.window = (lo, hi)
        self.hypotheses = HYPOTHESES

    def primes(self):
        return sorted(self.checks)

    def verdict(self, p):
        rows = [r for r in self.rows if r.prime == p]
        if not self.checks[p].good or any(r.verdict == BAD_PRIME for r in rows):
            return BAD_PRIME
        if any(r.verdict == WITNESS for r in rows):
            return WITNESS
        return NO_WITNESS

    def witnesses(self, p):
        return [r for r in self.rows if r.prime == p and r.verdict == WITNESS]

    def summary(self):
        return {p: self.verdict(p) for p in self.primes()}

    def rational_table(self):
        out = {}
        for r in self.rows:
            out[(r.order, r.degree)] = r.dim_q
        return out


def operator_dims(R, n, lo, hi):
    """``(m, k) -> dim D^m_k`` for ``m = 0..n``."""
    out = {}
    for m in range(n + 1):
        space = OperatorSpace(R, m)
        for k, d in space.table(lo, hi).items():
            out[(m, k)] = d
    return out


def _fiber_dims(args):
    RZ, p, n, lo, hi = args
    return operator_dims(RZ.fiber(p), n, lo, hi)


def base_change_compare(RZ, p, n, lo, hi, rational=None, check=None):
    """Rows comparing ``D^m_k`` over QQ and ``F_p`` for ``m <= n``."""
    check = check or check_prime(RZ, p)
    rational = rational or operator_dims(RZ.fiber(0), n, lo, hi)
    modp = operator_dims(RZ.fiber(p), n, lo, hi)
    return _rows(p, check, rational, modp)


def _rows(p, check, rational, modp):
    rows = []
    for key in sorted(rational):
        m, k = key
        dq = rational[key]
        dp = modp[key]
        if not check.good or dp < dq:
            v = BAD_PRIME
        elif dp > dq:
            v = WITNESS
        else:
            v = NO_WITNESS
        rows.append(TorsionRow(p, m, k, dq, dp, v))
    return rows


def torsion_scan(RZ, primes, n, lo, hi, workers=1):
    """Aggregate :func:`base_change_compare` over ``primes``.

    Each prime is independent; with ``workers > 1`` the fibers are computed
    in separate processes and the rows are still emitted in prime order.
    """
    primes = sorted(set(primes))
    jobs = [(RZ, 0, n, lo, hi)] + [(RZ, p, n, lo, hi) for p in primes]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            tables = list(ex.map(_fiber_dims, jobs))
    else:
        tables = [_fiber_dims(j) for j in jobs]
    rational = tables[0]
    rows = []
    checks = {}
    for p, modp in zip(primes, tables[1:]):
        checks[p] = check_prime(RZ, p)
        rows += _rows(p, checks[p], rational, modp)
    return TorsionReport(rows, checks, n, lo, hi)
