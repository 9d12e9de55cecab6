"""Ring description files, run configuration and report serialization.

A ring file is a sequence of statements ended by ``;`` or a newline::

    # the elliptic cone
    field QQ;            # or: field Fp 5   /  field ZZ
    vars x:1 y:1 z:1;    # weights default to 1
    rel x^3+y^3+z^3;     # repeatable, commas separate several relations
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field as dc_field

from .exactalg import GF, QQ, ParseError, format_polynomial, parse_polynomial

REPORT_SCHEMA = "dopcalc-report/1"


class RingFileError(ParseError):
    pass


@dataclass
class RingDescription:
    field: str
    p: int = 0
    variables: list = dc_field(default_factory=list)
    relations: list = dc_field(default_factory=list)

    @property
    def names(self):
        return [n for n, _ in self.variables]

    @property
    def weights(self):
        return [w for _, w in self.variables]

    def coefficient_field(self):
        return GF(self.p) if self.field == "Fp" else QQ

    def to_text(self):
        """Canonical form; parsing it again gives the same description."""
        head = "field Fp %d;" % self.p if self.field == "Fp" else f"field {self.field};"
        parts = [head, "vars " + " ".join(f"{n}:{w}" for n, w in self.variables) + ";"]
        for r in self.relations:
            parts.append(f"rel {r};")
        return " ".join(parts)

    def algebra(self, p=None):
        """The ring over its own field, or over ``F_p`` / ``QQ`` for ZZ input."""
        from .algebra import PresentedAlgebra

        if self.field == "ZZ":
            return self.integral().fiber(p or 0)
        return PresentedAlgebra(self.coefficient_field(), self.names, self.weights,
                                self.relations)

    def integral(self):
        from .reduction import IntegralPresentation

        if self.field != "ZZ":
            raise RingFileError("reduction commands need 'field ZZ'", 1, 1)
        return IntegralPresentation(self.names, self.weights, self.relations)


def _statements(text):
    """Split into ``(line, column, statement)`` with comments removed."""
    out = []
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        col = 0
        for piece in line.split(";"):
            stripped = piece.strip()
            if stripped:
                lead = len(piece) - len(piece.lstrip())
                out.append((ln, col + lead + 1, stripped))
            col += len(piece) + 1
    return out


def _degree_error(poly, names, weights, field):
    degs = {}
    for m in poly:
        degs.setdefault(sum(a * w for a, w in zip(m, weights)), []).append(m)
    if len(degs) <= 1:
        return None
    first = max(poly, key=lambda m: (sum(m), m))
    d0 = sum(a * w for a, w in zip(first, weights))
    for m in sorted(poly, key=lambda m: (sum(m), m), reverse=True):
        d = sum(a * w for a, w in zip(m, weights))
        if d != d0:
            term = format_polynomial({m: poly[m]}, names, field)
            return f"inhomogeneous relation: term {term} has degree {d}, expected {d0}"
    return None


def parse_ring(text):
    """Parse a ring file into a :class:`RingDescription`."""
    desc = None
    variables = None
    relations = []
    for ln, col, st in _statements(text):
        word, _, rest = st.partition(" ")
        rest = rest.strip()
        rest_col = col + len(st) - len(st[len(word):].lstrip()) if rest else col
        if word == "field":
            toks = rest.split()
            if toks == ["QQ"]:
                desc = ("QQ", 0)
            elif toks == ["ZZ"]:
                desc = ("ZZ", 0)
            elif len(toks) == 2 and toks[0] == "Fp" and toks[1].isdigit():
                p = int(toks[1])
                try:
                    GF(p)
                except ValueError:
                    raise RingFileError(f"{p} is not a prime", ln, rest_col)
                desc = ("Fp", p)
            else:
                raise RingFileError(f"unknown field {rest!r}", ln, rest_col)
        elif word == "vars":
            if desc is None:
                raise RingFileError("'vars' before 'field'", ln, col)
            variables = []
            offset = rest_col
            for tok in rest.split():
                at = st.index(tok, offset - col) + col
                offset = at + len(tok)
                name, _, w = tok.partition(":")
                if not name.replace("_", "a").replace("'", "").isalnum() or not name[0].isalpha():
                    raise RingFileError(f"bad variable name {name!r}", ln, at)
                if name in [n for n, _ in variables]:
                    raise RingFileError(f"duplicate variable {name!r}", ln, at)
                try:
                    weight = int(w) if w else 1
                except ValueError:
                    raise RingFileError(f"weight {w!r} is not an integer", ln, at)
                if weight <= 0:
                    raise RingFileError(f"nonpositive weight {weight} for {name}", ln, at)
                variables.append((name, weight))
        elif word == "rel":
            if variables is None:
                raise RingFileError("'rel' before 'vars'", ln, col)
            names = [n for n, _ in variables]
            weights = [w for _, w in variables]
            field = GF(desc[1]) if desc[0] == "Fp" else QQ
            start = rest_col
            for piece in rest.split(","):
                lead = len(piece) - len(piece.lstrip())
                src = piece.strip()
                if not src:
                    start += len(piece) + 1
                    continue
                try:
                    poly = parse_polynomial(src, names, field)
                except ParseError as err:
                    raise RingFileError(err.message, ln, start + lead + err.column - 1)
                msg = _degree_error(poly, names, weights, field)
                if msg:
                    raise RingFileError(msg, ln, start + lead)
                if desc[0] == "ZZ" and any(
                        getattr(c, "denominator", 1) != 1 for c in poly.values()):
                    raise RingFileError("ZZ relations need integer coefficients", ln, start + lead)
                if poly:
                    relations.append(format_polynomial(poly, names, field))
                start += len(piece) + 1
        else:
            raise RingFileError(f"unknown statement {word!r}", ln, col)
    if desc is None:
        raise RingFileError("missing 'field' statement", 1, 1)
    if variables is None:
        variables = []
    return RingDescription(desc[0], desc[1], variables, relations)


# ---------------------------------------------------------------------------
# run configuration


@dataclass
class RunConfig:
    order: int = 2
    window: tuple = (-2, 2)
    tmax: int = 0
    nmax: int = 0
    primes: tuple = ()
    fmt: str = "tsv"
    workers: int = 1
    degree_cap: int = 64
    i: int = 0
    e: int = 1
    imax: int = 2
    depth: int = 2
    method: str = "powers"
    ideal: tuple = ()
    quotient: tuple = ()

    def __post_init__(self):
        lo, hi = self.window
        width = hi - lo
        if not self.tmax:
            self.tmax = width + 3
        if not self.nmax:
            self.nmax = width + 3

    def validate(self):
        lo, hi = self.window
        if lo > hi:
            raise ValueError(f"window {lo}:{hi} is empty")
        for name in ("tmax", "nmax", "workers", "e", "degree_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"--{name} must be positive")
        for name in ("order", "i", "imax", "depth"):
            if getattr(self, name) < 0:
                raise ValueError(f"--{name} must be nonnegative")
        bounds = {"window": max(abs(lo), abs(hi)), "order": self.order,
                  "tmax": self.tmax, "nmax": self.nmax}
        for name, b in bounds.items():
            if b > self.degree_cap:
                raise ValueError(
                    f"{name} bound {b} exceeds --degree-cap {self.degree_cap}; "
                    f"raise the cap to at least {b}"
                )
        for p in self.primes:
            GF(p)
        return self

    def embedded(self):
        """Configuration as written into reports (worker count excluded)."""
        d = asdict(self)
        d.pop("workers")
        d["window"] = list(self.window)
        d["primes"] = list(self.primes)
        d["ideal"] = list(self.ideal)
        d["quotient"] = list(self.quotient)
        return d


# ---------------------------------------------------------------------------
# reports


class Table:
    def __init__(self, name, columns, rows=None):
        self.name = name
        self.columns = list(columns)
        self.rows = rows if rows is not None else []

    def add(self, *row):
        self.rows.append(list(row))


class Report:
    def __init__(self, command, ring, config, version):
        self.command = command
        self.ring = ring
        self.config = config
        self.version = version
        self.tables = []
        self.verdict = None
        self.notes = []

    def table(self, name, columns):
        t = Table(name, columns)
        self.tables.append(t)
        return t

    def as_dict(self):
        return {
            "schema": REPORT_SCHEMA,
            "tool": "dopcalc",
            "version": self.version,
            "command": self.command,
            "ring": self.ring,
            "config": self.config,
            "tables": {t.name: {"columns": t.columns, "rows": t.rows} for t in self.tables},
            "notes": self.notes,
            "verdict": self.verdict,
        }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"

    def to_tsv(self):
        lines = [
            f"# dopcalc {self.version}",
            f"# command {self.command}",
            f"# ring {self.ring}",
            "# config " + json.dumps(self.config, sort_keys=True),
        ]
        for note in self.notes:
            lines.append(f"# note {note}")
        for t in self.tables:
            lines.append(f"## {t.name}")
            lines.append("\t".join(t.columns))
            for row in t.rows:
                lines.append("\t".join(_cell(x) for x in row))
        lines.append(f"# verdict {self.verdict}")
        return "\n".join(lines) + "\n"

    def render(self, fmt):
        return self.to_json() if fmt == "json" else self.to_tsv()


def _cell(x):
    if x is None:
        return "-"
    if isinstance(x, (list, tuple)):
        return ",".join(_cell(y) for y in x)
    return str(x)
