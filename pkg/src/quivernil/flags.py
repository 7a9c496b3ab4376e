"""Flag-types, relative positions of two flags, and incidence-variety dimensions.

A flag-type is a tuple of nonzero dimension vectors (d_1, ..., d_r).  Two flags
of that type sit in a relative position z: an r x r array of dimension vectors
whose p-th row and p-th column both sum to d_p.  For each z the fibre product of
the incidence variety with itself over E_d has a stratum of formal dimension
base(z) + fiber(z); the map to E_d is small when every off-diagonal stratum
has positive codimension.

Index ranges in the comments use 0-based steps; "row" is p and "column" is q in
z[p][q].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .core import Quiver
from .errors import DimensionVectorError


def enumerate_flag_types(d, discrete: bool = False, max_steps: int | None = None) -> Iterator[tuple]:
    """Ordered tuples of nonzero vectors summing to d (single-vertex steps if discrete)."""
    d = tuple(int(x) for x in d)
    if any(x < 0 for x in d):
        return

    def steps(room):
        if discrete:
            for i, r in enumerate(room):
                for k in range(1, r + 1):
                    yield tuple(k if j == i else 0 for j in range(len(room)))
        else:
            for e in itertools.product(*(range(r + 1) for r in room)):
                if any(e):
                    yield e

    def rec(room, acc):
        if not any(room):
            yield tuple(acc)
            return
        if max_steps is not None and len(acc) >= max_steps:
            return
        for e in steps(room):
            yield from rec(tuple(a - b for a, b in zip(room, e)), acc + [e])

    yield from rec(d, [])


def flag_type_total(ft, nv: int | None = None) -> tuple:
    if not ft:
        return (0,) * (nv or 0)
    return tuple(sum(col) for col in zip(*ft))


@dataclass(frozen=True)
class RelPosition:
    z: tuple  # z[p][q] is a dimension vector

    @property
    def r(self) -> int:
        return len(self.z)

    @property
    def nv(self) -> int:
        return len(self.z[0][0]) if self.z else 0

    def at(self, i: int) -> list[list[int]]:
        """The integer table of vertex i."""
        return [[self.z[p][q][i] for q in range(self.r)] for p in range(self.r)]

    def is_diagonal(self) -> bool:
        return all(not any(self.z[p][q]) for p in range(self.r) for q in range(self.r) if p != q)

    @classmethod
    def diagonal(cls, ft) -> "RelPosition":
        r = len(ft)
        nv = len(ft[0]) if ft else 0
        return cls(tuple(tuple(tuple(ft[p]) if p == q else (0,) * nv for q in range(r)) for p in range(r)))

    @classmethod
    def from_tables(cls, tables) -> "RelPosition":
        """Build from per-vertex r x r integer tables."""
        r = len(tables[0])
        return cls(tuple(tuple(tuple(t[p][q] for t in tables) for q in range(r)) for p in range(r)))


def check_margins(ft, z: RelPosition) -> None:
    r = len(ft)
    if z.r != r:
        raise DimensionVectorError(f"relative position has {z.r} rows for a {r}-step flag-type")
    for s in range(r):
        row = tuple(sum(z.z[s][q][i] for q in range(r)) for i in range(z.nv))
        col = tuple(sum(z.z[p][s][i] for p in range(r)) for i in range(z.nv))
        if row != tuple(ft[s]) or col != tuple(ft[s]):
            raise DimensionVectorError(f"row/column {s} of z sums to {row}/{col}, expected {tuple(ft[s])}")


def contingency_tables(margins) -> Iterator[tuple]:
    """Nonnegative integer square tables with row s and column s summing to margins[s]."""
    r = len(margins)
    table = [[0] * r for _ in range(r)]
    col_left = list(margins)

    def fill(p, q, row_left):
        if p == r:
            if not any(col_left):
                yield tuple(tuple(row) for row in table)
            return
        if q == r - 1:
            v = row_left
            if v <= col_left[q]:
                table[p][q] = v
                col_left[q] -= v
                yield from fill(p + 1, 0, margins[p + 1] if p + 1 < r else 0)
                col_left[q] += v
            table[p][q] = 0
            return
        for v in range(min(row_left, col_left[q]), -1, -1):
            table[p][q] = v
            col_left[q] -= v
            yield from fill(p, q + 1, row_left - v)
            col_left[q] += v
        table[p][q] = 0

    if r == 0:
        yield ()
        return
    yield from fill(0, 0, margins[0])


def theta(ft) -> Iterator[RelPosition]:
    """All relative positions of two flags of type ft (vertex-wise independent tables)."""
    ft = [tuple(s) for s in ft]
    if not ft:
        yield RelPosition(())
        return
    nv = len(ft[0])
    per_vertex = [list(contingency_tables([s[i] for s in ft])) for i in range(nv)]
    for tables in itertools.product(*per_vertex):
        yield RelPosition.from_tables(tables)


def _pair_sum(a, b, tp: str, qs: str) -> int:
    """Sum of a[p][q] * b[t][s] over t (tp) p and q (qs) s.

    tp: "le" means t <= p, "lt" t < p.
    qs: "ge" means s <= q, "gt" s < q, "le" q <= s, "lt" q < s.
    """
    r = len(a)
    rel = {
        "le": lambda x, y: x <= y,
        "lt": lambda x, y: x < y,
        "ge": lambda x, y: x >= y,
        "gt": lambda x, y: x > y,
    }
    ok_tp = rel[tp]
    ok_qs = rel[qs]
    total = 0
    for p in range(r):
        for q in range(r):
            apq = a[p][q]
            if not apq:
                continue
            acc = 0
            for t in range(r):
                if not ok_tp(t, p):
                    continue
                bt = b[t]
                for s in range(r):
                    if ok_qs(q, s):
                        acc += bt[s]
            total += apq * acc
    return total


@dataclass(frozen=True)
class IncidenceDims:
    base_dim: int       # dimension of the pair-of-flags stratum
    fiber_dim: int      # maps compatible with both flags
    total_dim: int      # formal dimension of the fibre-product stratum
    tilde_dim: int      # dimension of the incidence variety itself
    codim: int          # tilde_dim - total_dim
    codim_closed_form: int


def _diag_tables(ft, i):
    r = len(ft)
    return [[ft[p][i] if p == q else 0 for q in range(r)] for p in range(r)]


def tilde_dim(q: Quiver, ft, nil: bool) -> int:
    """dim of {(x, F) : F of type ft, x(F_j) ⊆ F_j (plain) or F_{j-1} (nil)}."""
    ft = [q.dim(s) for s in ft]
    r = len(ft)
    lt = (lambda t, p: t < p) if nil else (lambda t, p: t <= p)
    arrows = sum(ft[p][i] * ft[t][j] for i, j in q.edges for p in range(r) for t in range(r) if lt(t, p))
    group = sum(ft[p][i] * ft[t][i] for i in range(q.n) for p in range(r) for t in range(r))
    parabolic = sum(ft[p][i] * ft[t][i] for i in range(q.n) for p in range(r) for t in range(p + 1))
    return arrows + group - parabolic


def incidence_dims(q: Quiver, ft, z: RelPosition, nil: bool) -> IncidenceDims:
    ft = [q.dim(s) for s in ft]
    check_margins(ft, z)
    tabs = [z.at(i) for i in range(q.n)]
    group = sum(ft[p][i] * ft[t][i] for i in range(q.n) for p in range(len(ft)) for t in range(len(ft)))
    base = group - sum(_pair_sum(tabs[i], tabs[i], "le", "ge") for i in range(q.n))
    if nil:
        fiber = sum(_pair_sum(tabs[i], tabs[j], "lt", "gt") for i, j in q.edges)
    else:
        fiber = sum(_pair_sum(tabs[i], tabs[j], "le", "ge") for i, j in q.edges)
    total = base + fiber
    tdim = tilde_dim(q, ft, nil)
    if nil:
        closed = (sum(_pair_sum(tabs[i], tabs[j], "lt", "le") for i, j in q.edges)
                  - sum(_pair_sum(tabs[i], tabs[i], "lt", "le") for i in range(q.n)))
    else:
        closed = (sum(_pair_sum(tabs[i], tabs[j], "le", "lt") for i, j in q.edges)
                  - sum(_pair_sum(tabs[i], tabs[i], "le", "lt") for i in range(q.n)))
    return IncidenceDims(base, fiber, total, tdim, tdim - total, closed)


def identity_sides(z) -> tuple[int, int, int, int]:
    """Both sides of the two margin identities for a square integer table z.

    first:  sum_{t<p, q<=s} z[p][q] z[t][s]  vs  sum_{t<=p, q<s} z[p][q] z[t][s]
    second: sum_{t<p, q} z[p][q] z[t][q]     vs  sum_{p, q<s} z[p][q] z[p][s]
    """
    r = len(z)
    first_l = _pair_sum(z, z, "lt", "le")
    first_r = _pair_sum(z, z, "le", "lt")
    second_l = sum(z[p][q] * z[t][q] for p in range(r) for t in range(p) for q in range(r))
    second_r = sum(z[p][q] * z[p][s] for p in range(r) for q in range(r) for s in range(q + 1, r))
    return first_l, first_r, second_l, second_r


def identity_check(z) -> bool:
    """True iff both margin identities hold; z needs equal row/column sums."""
    if isinstance(z, RelPosition):
        return all(identity_check(z.at(i)) for i in range(z.nv))
    r = len(z)
    for s in range(r):
        if sum(z[s]) != sum(z[p][s] for p in range(r)):
            raise DimensionVectorError(f"row {s} and column {s} have different sums")
    a, b, c, d = identity_sides(z)
    return a == b and c == d


@dataclass(frozen=True)
class SmallnessReport:
    is_small_criterion: bool
    min_codim_offdiag: int | None
    witness_z: RelPosition | None
    positions: int
    tilde_dim: int
    divisibility_notes: tuple


def smallness_report(q: Quiver, ft, nil: bool) -> SmallnessReport:
    """Evaluate the codimension formula on every off-diagonal relative position.

    Positivity everywhere is sufficient for smallness; whether a given
    stratum is empty is not tested (its formal dimension is used regardless).
    """
    ft = [q.dim(s) for s in ft]
    best, witness, count = None, None, 0
    codims = []
    for z in theta(ft):
        count += 1
        dims = incidence_dims(q, ft, z, nil)
        if dims.codim != dims.codim_closed_form:
            raise AssertionError(f"closed form disagrees with base + fiber at {z}")
        if z.is_diagonal():
            if dims.codim != 0:
                raise AssertionError("diagonal stratum must have codimension 0")
            continue
        codims.append(dims.codim)
        if best is None or dims.codim < best:
            best, witness = dims.codim, z
    tdim = tilde_dim(q, ft, nil)
    notes = ["formal dimensions: emptiness of strata is not checked"]
    if q.n == 1:
        g = len(q.arrows)
        if g >= 2:
            ok = all(c % (g - 1) == 0 for c in codims)
            notes.append(f"codims divisible by g-1={g - 1}: {ok}")
        if nil:
            notes.append(f"tilde_dim divisible by g+1={g + 1}: {tdim % (g + 1) == 0}")
    return SmallnessReport(best is None or best > 0, best, witness, count, tdim, tuple(notes))
