"""Exact coefficient fields, weighted polynomial rings and the polynomial grammar.

Field elements are ``gmpy2.mpq`` rationals over QQ and plain ``int``
residues in ``[0, p)`` over GF(p).  Polynomials are dictionaries mapping
exponent tuples to nonzero coefficients; :class:`Polynomial` wraps one for
user-facing code while the Groebner engine works on the raw dictionaries.
"""

from __future__ import annotations

import re
from fractions import Fraction

from gmpy2 import mpq
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

_SCALARS = (int, Fraction, type(mpq(0)))


class DivisionByZero(ZeroDivisionError):
    pass


class VariableCountMismatch(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.message = message
        self.line = line
        self.column = column


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class CoefficientField:
    """QQ (``p == 0``) or a prime field GF(p) with p < 2**31."""

    __slots__ = ("p",)

    def __init__(self, p=0):
        p = int(p)
        if p:
            if not _is_prime(p):
                raise ValueError(f"{p} is not prime")
            if p >= 2**31:
                raise ValueError("prime fields are limited to p < 2^31")
        self.p = p

    @classmethod
    def rationals(cls):
        return cls(0)

    @classmethod
    def prime(cls, p):
        return cls(p)

    @property
    def characteristic(self):
        return self.p

    @property
    def kind(self):
        return "QQ" if self.p == 0 else "Fp"

    def __eq__(self, other):
        return isinstance(other, CoefficientField) and other.p == self.p

    def __hash__(self):
        return hash(("field", self.p))

    def __repr__(self):
        return "QQ" if self.p == 0 else f"GF({self.p})"

    # element constructors
    def __call__(self, value):
        if self.p:
            if isinstance(value, int):
                return value % self.p
            num, den = value.numerator, value.denominator
            return self.div(int(num) % self.p, int(den) % self.p)
        return mpq(value)

    @property
    def zero(self):
        return 0 if self.p else mpq(0)

    @property
    def one(self):
        return 1 if self.p else mpq(1)

    # arithmetic
    def add(self, a, b):
        return (a + b) % self.p if self.p else a + b

    def sub(self, a, b):
        return (a - b) % self.p if self.p else a - b

    def neg(self, a):
        return (-a) % self.p if self.p else -a

    def mul(self, a, b):
        return (a * b) % self.p if self.p else a * b

    def inv(self, a):
        if not a:
            raise DivisionByZero("inverse of zero")
        if self.p:
            return pow(a, self.p - 2, self.p)
        return 1 / mpq(a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def field_arith(self, a, b, op):
        """Dispatch by name; ``inv`` and ``neg`` are unary on ``b``."""
        if op == "add":
            return self.add(a, b)
        if op == "mul":
            return self.mul(a, b)
        if op == "inv":
            return self.inv(b)
        if op == "neg":
            return self.neg(b)
        raise ValueError(f"unknown field operation {op!r}")

    def to_str(self, a):
        if self.p:
            return str(a)
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"


QQ = CoefficientField(0)


def GF(p):
    return CoefficientField(p)


# ---------------------------------------------------------------------------
# raw polynomial dictionaries


def poly_add(F, f, g):
    p = F.p
    h = dict(f)
    for m, c in g.items():
        v = h.get(m)
        if v is None:
            h[m] = c
            continue
        v = v + c
        if p:
            v %= p
        if v:
            h[m] = v
        else:
            del h[m]
    return h


def poly_scale(F, f, c):
    if not c:
        return {}
    p = F.p
    if p:
        return {m: (v * c) % p for m, v in f.items()}
    return {m: v * c for m, v in f.items()}


def poly_neg(F, f):
    p = F.p
    if p:
        return {m: (-v) % p for m, v in f.items()}
    return {m: -v for m, v in f.items()}


def poly_mul(F, f, g):
    p = F.p
    h = {}
    for m1, c1 in f.items():
        for m2, c2 in g.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            v = h.get(m, 0) + c1 * c2
            if p:
                v %= p
            if v:
                h[m] = v
            else:
                h.pop(m, None)
    return h


def poly_pow(F, f, e, nvars):
    result = {(0,) * nvars: F.one}
    base = f
    while e:
        if e & 1:
            result = poly_mul(F, result, base)
        e >>= 1
        if e:
            base = poly_mul(F, base, base)
    return result


def monomial_degree(exp, weights):
    return sum(a * w for a, w in zip(exp, weights))


def poly_degrees(f, weights):
    return {monomial_degree(m, weights) for m in f}


def hasse_derivative(F, f, beta):
    """Coefficientwise binomial derivative: x^a -> C(a, beta) x^(a - beta).

    This is the coefficient of y^beta in f(x + y); it needs no division, so it
    is the right Taylor coefficient in every characteristic.
    """
    p = F.p
    out = {}
    for m, c in f.items():
        if any(a < b for a, b in zip(m, beta)):
            continue
        k = 1
        for a, b in zip(m, beta):
            k *= comb(a, b)
        v = c * k
        if p:
            v %= p
        if v:
            nm = tuple(a - b for a, b in zip(m, beta))
            out[nm] = out.get(nm, 0) + v
            if p:
                out[nm] %= p
            if not out[nm]:
                del out[nm]
    return out


@lru_cache(maxsize=None)
def monomials_of_degree(weights, d):
    """All exponent tuples of weighted degree ``d`` (weights positive)."""
    n = len(weights)
    if d < 0:
        return ()
    if n == 0:
        return ((),) if d == 0 else ()
    out = []
    w0 = weights[0]
    rest = weights[1:]
    for a in range(d // w0, -1, -1):
        for tail in monomials_of_degree(rest, d - a * w0):
            out.append((a,) + tail)
    return tuple(out)


@lru_cache(maxsize=None)
def exponents_up_to(nvars, n):
    """Exponent vectors with total (unweighted) size at most ``n``."""
    out = []
    for total in range(n + 1):
        for combo in combinations_with_replacement(range(nvars), total):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    # deterministic: by size, then lexicographically descending
    out.sort(key=lambda e: (sum(e), tuple(-a for a in e)))
    return tuple(out)


# ---------------------------------------------------------------------------
# rings and polynomials


class PolyRing:
    """A weighted polynomial ring K[x_1..x_n]; weights are positive integers."""

    def __init__(self, field, names, weights=None):
        names = tuple(names)
        if weights is None:
            weights = (1,) * len(names)
        weights = tuple(int(w) for w in weights)
        if len(weights) != len(names):
            raise VariableCountMismatch("one weight per variable is required")
        if any(w <= 0 for w in weights):
            raise ValueError("variable weights must be positive")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.field = field
        self.names = names
        self.weights = weights
        self.nvars = len(names)

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.field == other.field
            and self.names == other.names
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.field, self.names, self.weights))

    def __repr__(self):
        vs = ", ".join(
            n if w == 1 else f"{n}:{w}" for n, w in zip(self.names, self.weights)
        )
        return f"{self.field!r}[{vs}]"

    @property
    def zero_exp(self):
        return (0,) * self.nvars

    def degree(self, exp):
        return monomial_degree(exp, self.weights)

    def var(self, i):
        if isinstance(i, str):
            i = self.names.index(i)
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): self.field.one})

    def gens(self):
        return [self.var(i) for i in range(self.nvars)]

    def const(self, c):
        c = self.field(c)
        return Polynomial(self, {self.zero_exp: c} if c else {})

    def poly(self, terms):
        return Polynomial(self, terms)

    def parse(self, text):
        return Polynomial(self, parse_polynomial(text, self.names, self.field))

    def format(self, terms):
        return format_polynomial(terms, self.names, self.field)

    def monomials(self, d):
        return monomials_of_degree(self.weights, d)


class Polynomial:
    """Immutable polynomial over a :class:`PolyRing`."""

    __slots__ = ("ring", "terms", "homogeneous_degree")

    def __init__(self, ring, terms):
        F = ring.field
        clean = {}
        for m, c in terms.items():
            m = tuple(m)
            if len(m) != ring.nvars:
                raise VariableCountMismatch(
                    f"exponent {m} does not match {ring.nvars} variables"
                )
            c = F(c)
            if c:
                clean[m] = c
        self.ring = ring
        self.terms = clean
        degs = poly_degrees(clean, ring.weights)
        self.homogeneous_degree = degs.pop() if len(degs) == 1 else None

    def _check(self, other):
        if isinstance(other, _SCALARS):
            return self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.ring.nvars != self.ring.nvars:
            raise VariableCountMismatch("polynomials live in different rings")
        if other.ring.field != self.ring.field:
            raise ValueError("coefficient fields differ")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ring, poly_add(self.ring.field, self.terms, other.terms))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, poly_neg(self.ring.field, self.terms))

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return Polynomial(self.ring, poly_mul(self.ring.field, self.terms, other.terms))

    __rmul__ = __mul__

    def __pow__(self, e):
        return Polynomial(
            self.ring, poly_pow(self.ring.field, self.terms, int(e), self.ring.nvars)
        )

    def __eq__(self, other):
        if isinstance(other, _SCALARS):
            other = self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_homogeneous(self):
        return not self.terms or self.homogeneous_degree is not None

    def degree(self):
        if not self.terms:
            return None
        return max(self.ring.degree(m) for m in self.terms)

    def __repr__(self):
        return self.ring.format(self.terms)

    __str__ = __repr__


def poly_arith(f, g, op):
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown polynomial operation {op!r}")


# ---------------------------------------------------------------------------
# the ASCII grammar: identifiers, ^ powers, optional *, a/b literals

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*'*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    pos = 0
    tokens = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            ch = text[pos:].lstrip()[:1]
            col = len(text) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {ch!r}", 1, col)
        kind = m.lastgroup
        start = m.start(kind) + 1
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text, names, field):
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = {n: k for k, n in enumerate(names)}
        self.n = len(names)
        self.F = field

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def error(self, msg):
        raise ParseError(msg, 1, self.peek()[2])

    def const(self, c):
        c = self.F(c)
        return {(0,) * self.n: c} if c else {}

    def parse(self):
        f = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return f

    def expr(self):
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        f = self.term()
        if sign < 0:
            f = poly_neg(self.F, f)
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            g = self.term()
            f = poly_add(self.F, f, g if op == "+" else poly_neg(self.F, g))
        return f

    def term(self):
        f = self.power()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                f = poly_mul(self.F, f, self.power())
            elif kind in ("num", "id") or (kind == "op" and val == "("):
                f = poly_mul(self.F, f, self.power())
            else:
                return f

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, val, _ = self.peek()
            if kind != "num":
                self.error("exponent must be a nonnegative integer")
            self.take()
            base = poly_pow(self.F, base, int(val), self.n)
        return base

    def atom(self):
        kind, val, col = self.take()
        if kind == "num":
            num = int(val)
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                k2, v2, c2 = self.take()
                if k2 != "num":
                    raise ParseError("expected integer denominator", 1, c2)
                if int(v2) == 0:
                    raise ParseError("zero denominator", 1, c2)
                return self.const(Fraction(num, int(v2)))
            return self.const(num)
        if kind == "id":
            if val not in self.names:
                raise ParseError(f"unknown variable {val!r}", 1, col)
            e = [0] * self.n
            e[self.names[val]] = 1
            return {tuple(e): self.F.one}
        if kind == "op" and val == "(":
            f = self.expr()
            k2, v2, c2 = self.take()
            if v2 != ")":
                raise ParseError("expected ')'", 1, c2)
            return f
        raise ParseError(f"unexpected token {val!r}", 1, col)


def parse_polynomial(text, names, field=QQ):
    """Parse ``text`` into a raw polynomial dictionary over ``field``."""
    return _Parser(text, names, field).parse()


def format_monomial(exp, names):
    parts = []
    for a, n in zip(exp, names):
        if a == 1:
            parts.append(n)
        elif a > 1:
            parts.append(f"{n}^{a}")
    return "*".join(parts)


def _term_sort_key(exp):
    return (sum(exp), exp)


def format_polynomial(terms, names, field=QQ):
    """Canonical text: terms by descending degree then lex; parse(format(f)) == f."""
    if not terms:
        return "0"
    out = []
    for exp in sorted(terms, key=_term_sort_key, reverse=True):
        c = terms[exp]
        mono = format_monomial(exp, names)
        if field.p:
            neg = False
            mag = str(c)
        else:
            neg = c < 0
            a = -c if neg else c
            mag = field.to_str(a)
        if mono:
            body = mono if mag == "1" else f"{mag}*{mono}"
        else:
            body = mag
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)
