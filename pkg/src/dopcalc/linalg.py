"""Sparse exact linear algebra over a :class:`CoefficientField`.

Vectors are dictionaries ``index -> nonzero coefficient``.  Indices must be
mutually comparable (ints or tuples); the pivot of a row is its smallest
index, and every stored row is scaled so that its pivot entry is one.
"""

from __future__ import annotations

import heapq


class InconsistentSystem(ValueError):
    pass


class Echelon:
    """Incremental row echelon form, optionally tracking combinations.

    ``add(vec, tag)`` reduces ``vec`` against the stored rows.  A nonzero
    remainder becomes a new row; a zero remainder means the vector was
    dependent and the tracked combination (a dictionary over tag keys) is
    returned so callers can read off kernel vectors.
    """

    def __init__(self, field, track=False):
        self.field = field
        self.p = field.p
        self.track = track
        self.rows = {}
        self.tags = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self):
        return len(self.rows)

    def pivots(self):
        return sorted(self.rows)

    def _reduce(self, v, tag):
        rows = self.rows
        if not rows or not v:
            return v, tag
        p = self.p
        tags = self.tags
        track = tag is not None
        heap = [k for k in v if k in rows]
        if not heap:
            return v, tag
        heapq.heapify(heap)
        seen = set()
        while heap:
            k = heapq.heappop(heap)
            if k in seen:
                continue
            seen.add(k)
            c = v.get(k)
            if not c:
                continue
            row = rows[k]
            if p:
                for j, a in row.items():
                    w = (v.get(j, 0) - c * a) % p
                    if w:
                        if j not in v and j in rows:
                            heapq.heappush(heap, j)
                        v[j] = w
                    else:
                        v.pop(j, None)
                if track:
                    for j, a in tags[k].items():
                        w = (tag.get(j, 0) - c * a) % p
                        if w:
                            tag[j] = w
                        else:
                            tag.pop(j, None)
            else:
                for j, a in row.items():
                    w = v.get(j, 0) - c * a
                    if w:
                        if j not in v and j in rows:
                            heapq.heappush(heap, j)
                        v[j] = w
                    else:
                        v.pop(j, None)
                if track:
                    for j, a in tags[k].items():
                        w = tag.get(j, 0) - c * a
                        if w:
                            tag[j] = w
                        else:
                            tag.pop(j, None)
        return v, tag

    def reduce(self, vec):
        """Remainder of ``vec`` modulo the row space (a new dict)."""
        v, _ = self._reduce(dict(vec), None)
        return v

    def reduce_tracked(self, vec):
        """Remainder and the combination of rows that was subtracted."""
        v, t = self._reduce(dict(vec), {})
        return v, t

    def contains(self, vec):
        return not self.reduce(vec)

    def add(self, vec, tag=None):
        """Insert ``vec``; return ``None`` if it was independent, else its relation."""
        if self.track:
            t = dict(tag) if tag is not None else {}
        else:
            t = None
        v, t = self._reduce(dict(vec), t)
        if not v:
            return t if self.track else {}
        piv = min(v)
        c = v[piv]
        if c != 1:
            F = self.field
            ci = F.inv(c)
            v = _scale(v, ci, self.p)
            if t is not None:
                t = _scale(t, ci, self.p)
        self.rows[piv] = v
        if self.track:
            self.tags[piv] = t
        return None


def _scale(v, c, p):
    if p:
        return {k: (a * c) % p for k, a in v.items()}
    return {k: a * c for k, a in v.items()}


def rank(field, vectors):
    e = Echelon(field)
    for v in vectors:
        e.add(v)
    return e.rank


def nullspace(field, columns):
    """Basis of ``{x : sum_j x_j * columns[j] = 0}`` as dictionaries over j."""
    e = Echelon(field, track=True)
    kernel = []
    for j, col in enumerate(columns):
        rel = e.add(col, {j: field.one})
        if rel is not None:
            kernel.append(rel)
    return kernel


class Solver:
    """Repeated solves ``sum_j x_j columns[j] = b`` against fixed columns."""

    def __init__(self, field, columns):
        self.field = field
        self.echelon = Echelon(field, track=True)
        self.kernel = []
        for j, col in enumerate(columns):
            rel = self.echelon.add(col, {j: field.one})
            if rel is not None:
                self.kernel.append(rel)

    @property
    def rank(self):
        return self.echelon.rank

    def solve(self, b):
        """A particular solution (dict over column indices) or ``None``."""
        rem, comb = self.echelon.reduce_tracked(b)
        if rem:
            return None
        return comb

    def solve_strict(self, b):
        x = self.solve(b)
        if x is None:
            raise InconsistentSystem("right-hand side is not in the column span")
        return x


def apply_columns(field, columns, x):
    """``sum_j x_j columns[j]``."""
    p = field.p
    out = {}
    for j, c in x.items():
        for k, a in columns[j].items():
            w = out.get(k, 0) + c * a
            if p:
                w %= p
            if w:
                out[k] = w
            else:
                out.pop(k, None)
    return out


def add_scaled(field, target, vec, c):
    """In place: ``target += c * vec``."""
    p = field.p
    for k, a in vec.items():
        w = target.get(k, 0) + c * a
        if p:
            w %= p
        if w:
            target[k] = w
        else:
            target.pop(k, None)
    return target


def quotient_rank(field, sub, vectors):
    """dim(span(sub) + span(vectors)) - dim span(sub)."""
    e = Echelon(field)
    for v in sub:
        e.add(v)
    base = e.rank
    for v in vectors:
        e.add(v)
    return e.rank - base


def matrix_rank(field, columns, nrows=None):
    """Exact rank of the matrix with the given sparse columns."""
    e = Echelon(field)
    for c in columns:
        if c:
            e.add(c)
    return e.rank
