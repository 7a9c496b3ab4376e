"""Explicit representations over exact fields and the doubled-quiver tests.

A graded subspace of V = (V_i) is a tuple of canonical column bases, one per
vertex (see :func:`quivernil.linalg.span`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence

import numpy as np

from . import linalg
from .core import Quiver, opposite
from .errors import DimensionVectorError, ShapeError, UnsupportedInputError
from .linalg import ExactField

DEFAULT_EXHAUSTIVE_CAP = 4


def _nonnegative(d: tuple) -> tuple:
    if any(x < 0 for x in d):
        raise DimensionVectorError("dimension vectors are nonnegative")
    return d


@dataclass(frozen=True, eq=False)
class Rep:
    quiver: Quiver
    dim: tuple
    field: ExactField
    mats: tuple  # mats[k] has shape (dim[target], dim[source]) for arrow k

    def __post_init__(self):
        object.__setattr__(self, "dim", self.quiver.dim(self.dim))
        if len(self.mats) != len(self.quiver.arrows):
            raise ShapeError(f"{len(self.mats)} matrices for {len(self.quiver.arrows)} arrows")
        if any(x < 0 for x in self.dim):
            raise DimensionVectorError("dimension vectors are nonnegative")
        fixed = []
        for k, ((s, t), m) in enumerate(zip(self.quiver.edges, self.mats)):
            shape = (self.dim[t], self.dim[s])
            if not isinstance(m, np.ndarray):
                m = self.field.array(m, shape=shape)
            if m.shape != shape:
                raise ShapeError(f"arrow {k} needs a {shape} matrix, got {m.shape}")
            fixed.append(self.field.reduce(m.astype(self.field.dtype)))
        object.__setattr__(self, "mats", tuple(fixed))

    @classmethod
    def zero(cls, q: Quiver, d, F: ExactField) -> "Rep":
        d = _nonnegative(q.dim(d))
        return cls(q, d, F, tuple(F.zeros(d[t], d[s]) for s, t in q.edges))

    @classmethod
    def random(cls, q: Quiver, d, F: ExactField, rng, height: int = 3) -> "Rep":
        d = _nonnegative(q.dim(d))
        return cls(q, d, F, tuple(F.random_matrix(rng, d[t], d[s], height) for s, t in q.edges))

    @property
    def total_dim(self) -> int:
        return sum(self.dim)

    def key(self) -> tuple:
        return tuple(tuple(m.flat) for m in self.mats)

    def __eq__(self, other):
        return (
            isinstance(other, Rep)
            and self.quiver == other.quiver
            and self.dim == other.dim
            and self.field == other.field
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash((self.quiver, self.dim, self.field, self.key()))

    def __repr__(self):
        return f"Rep(dim={self.dim}, field={self.field}, mats={[m.tolist() for m in self.mats]})"

    def transported(self, g: Sequence[np.ndarray]) -> "Rep":
        """g . x with x_a -> g_t x_a g_s^{-1}."""
        F = self.field
        ginv = [linalg.inverse(F, m) for m in g]
        mats = tuple(F.mul(F.mul(g[t], m), ginv[s]) for (s, t), m in zip(self.quiver.edges, self.mats))
        return Rep(self.quiver, self.dim, F, mats)


def direct_sum(reps: Sequence[Rep]) -> Rep:
    q, F = reps[0].quiver, reps[0].field
    dim = tuple(sum(r.dim[i] for r in reps) for i in range(q.n))
    mats = []
    for k, (s, t) in enumerate(q.edges):
        m = F.zeros(dim[t], dim[s])
        ro = co = 0
        for r in reps:
            m[ro:ro + r.dim[t], co:co + r.dim[s]] = r.mats[k]
            ro += r.dim[t]
            co += r.dim[s]
        mats.append(m)
    return Rep(q, dim, F, tuple(mats))


@dataclass(frozen=True, eq=False)
class DoubledPoint:
    """(x, x*): x on Q, x* on the opposite quiver, arrow k of x* reversing arrow k of x."""

    x: Rep
    xstar: Rep

    def __post_init__(self):
        if self.xstar.quiver != opposite(self.x.quiver):
            raise ShapeError("x* must live on the opposite quiver")
        if self.x.dim != self.xstar.dim or self.x.field != self.xstar.field:
            raise ShapeError("x and x* need the same dimension vector and field")

    @property
    def quiver(self) -> Quiver:
        return self.x.quiver

    @property
    def field(self) -> ExactField:
        return self.x.field

    @property
    def dim(self) -> tuple:
        return self.x.dim

    @classmethod
    def from_mats(cls, q: Quiver, d, F: ExactField, x, xstar) -> "DoubledPoint":
        return cls(Rep(q, d, F, tuple(x)), Rep(opposite(q), d, F, tuple(xstar)))

    def swapped(self) -> "DoubledPoint":
        """The same point read on Q^op: (x*, x)."""
        return DoubledPoint(self.xstar, self.x)


def moment_map(p: DoubledPoint) -> list[np.ndarray]:
    """Per vertex: sum over arrows a of x_a x*_a at the target minus x*_a x_a at the source."""
    F, d = p.field, p.dim
    out = [F.zeros(n, n) for n in d]
    for (s, t), x, y in zip(p.quiver.edges, p.x.mats, p.xstar.mats):
        out[t] = F.add(out[t], F.mul(x, y))
        out[s] = F.sub(out[s], F.mul(y, x))
    return out


def is_moment_zero(p: DoubledPoint) -> bool:
    return all(p.field.is_zero(m) for m in moment_map(p))


def is_nilpotent(r: Rep) -> bool:
    F = r.field
    w = [F.eye(n) for n in r.dim]
    for _ in range(r.total_dim + 1):
        if all(b.shape[1] == 0 for b in w):
            return True
        images = [[] for _ in r.dim]
        for (s, t), m in zip(r.quiver.edges, r.mats):
            images[t].append(F.mul(m, w[s]))
        w = [linalg.span(F, linalg.hstack(F, r.dim[i], images[i])) for i in range(r.quiver.n)]
    return all(b.shape[1] == 0 for b in w)


def _cycle_maps(r: Rep) -> list[np.ndarray]:
    q = r.quiver
    if not q.is_cyclic_orientation():
        raise UnsupportedInputError("expected the cyclic quiver with arrows i -> i+1")
    n = q.n
    by_source = {}
    for (s, t), m in zip(q.edges, r.mats):
        by_source[s] = m
    return [by_source[i] for i in range(n)]


def rank_profile(r: Rep, max_len: int | None = None) -> list[list[int]]:
    """table[i][l] = rank of the length-l path x_{i+l-1} ... x_i out of vertex i."""
    F = r.field
    maps = _cycle_maps(r)
    n = len(maps)
    if max_len is None:
        max_len = r.total_dim
    table = []
    for i in range(n):
        comp = F.eye(r.dim[i])
        row = [r.dim[i]]
        for l in range(1, max_len + 1):
            comp = F.mul(maps[(i + l - 1) % n], comp)
            row.append(linalg.rank(F, comp))
        table.append(row)
    return table


# graded subspaces


def graded_span(F: ExactField, dims, bases) -> tuple:
    return tuple(linalg.span(F, b) for b in bases)


def graded_key(sub) -> tuple:
    return tuple((b.shape[1], tuple(b.flat)) for b in sub)


def graded_dims(sub) -> tuple:
    return tuple(b.shape[1] for b in sub)


def graded_contains(F: ExactField, big, small) -> bool:
    return all(linalg.contains(F, b, s) for b, s in zip(big, small))


def _maps_into(F, m: np.ndarray, source_basis: np.ndarray, target_basis: np.ndarray) -> bool:
    if source_basis.shape[1] == 0 or m.shape[0] == 0:
        return True
    return linalg.contains(F, target_basis, F.mul(m, source_basis))


def extensions(F: ExactField, dims, sub, step) -> Iterator[tuple]:
    """Graded subspaces G containing ``sub`` with dim G_i - dim sub_i = step_i."""
    per_vertex = []
    for n, b, k in zip(dims, sub, step):
        comp = linalg.complement(F, b)
        choices = []
        for s in linalg.subspaces(F, comp.shape[1], k):
            choices.append(linalg.span(F, linalg.hstack(F, n, [b, F.mul(comp, s)])))
        per_vertex.append(choices)
    yield from itertools.product(*per_vertex)


def graded_subspaces(F: ExactField, dims, sub_dims) -> Iterator[tuple]:
    zero = tuple(F.zeros(n, 0) for n in dims)
    yield from extensions(F, dims, zero, sub_dims)


def is_subrep(r: Rep, sub) -> bool:
    return all(_maps_into(r.field, m, sub[s], sub[t]) for (s, t), m in zip(r.quiver.edges, r.mats))


def subrep(r: Rep, sub) -> Rep:
    """Restriction of r to an x-stable graded subspace, in the given bases."""
    F = r.field
    mats = []
    for (s, t), m in zip(r.quiver.edges, r.mats):
        img = F.mul(m, sub[s])
        mats.append(linalg.coordinates(F, sub[t], img) if sub[t].shape[1] else F.zeros(0, sub[s].shape[1]))
    return Rep(r.quiver, graded_dims(sub), F, tuple(mats))


# flags


class NilFlavor(Enum):
    NIL = "nil"        # x strictly decreasing, x* preserving
    PLAIN = "plain"    # x preserving, x* strictly decreasing
    NIL_ONE = "nil1"   # NIL with a discrete flag
    ONE = "one"        # PLAIN with a discrete flag

    @property
    def discrete(self) -> bool:
        return self in (NilFlavor.NIL_ONE, NilFlavor.ONE)

    @property
    def x_strict(self) -> bool:
        return self in (NilFlavor.NIL, NilFlavor.NIL_ONE)

    @property
    def dual(self) -> "NilFlavor":
        return {NilFlavor.NIL: NilFlavor.PLAIN, NilFlavor.PLAIN: NilFlavor.NIL,
                NilFlavor.NIL_ONE: NilFlavor.ONE, NilFlavor.ONE: NilFlavor.NIL_ONE}[self]

    @classmethod
    def parse(cls, s) -> "NilFlavor":
        if isinstance(s, cls):
            return s
        aliases = {"nil": cls.NIL, "plain": cls.PLAIN, "empty": cls.PLAIN, "": cls.PLAIN,
                   "nil1": cls.NIL_ONE, "nil,1": cls.NIL_ONE, "nilone": cls.NIL_ONE,
                   "one": cls.ONE, "1": cls.ONE}
        try:
            return aliases[str(s).lower()]
        except KeyError:
            raise UnsupportedInputError(f"unknown flavor {s!r}") from None


@dataclass(frozen=True)
class GradedFlag:
    steps: tuple  # graded subspaces F_1 ⊂ F_2 ⊂ ... ⊂ F_l = V (F_0 = 0 implicit)

    def dims(self) -> list[tuple]:
        return [graded_dims(s) for s in self.steps]

    def flag_type(self) -> tuple:
        out = []
        prev = None
        for dims in self.dims():
            out.append(dims if prev is None else tuple(a - b for a, b in zip(dims, prev)))
            prev = dims
        return tuple(out)

    @property
    def is_discrete(self) -> bool:
        return all(sum(1 for x in step if x) == 1 for step in self.flag_type())


@dataclass(frozen=True)
class FlagSearch:
    status: str  # "present" | "absent" | "undecided"
    flag: GradedFlag | None = None
    method: str = ""
    note: str = ""

    @property
    def present(self) -> bool:
        return self.status == "present"

    @property
    def decided(self) -> bool:
        return self.status != "undecided"


def _strict_lax(p: DoubledPoint, flavor: NilFlavor):
    """Arrow maps as (source, target, matrix), split into strict and lax halves."""
    xs = [(s, t, m) for (s, t), m in zip(p.quiver.edges, p.x.mats)]
    ys = [(t, s, m) for (s, t), m in zip(p.quiver.edges, p.xstar.mats)]
    return (xs, ys) if flavor.x_strict else (ys, xs)


def check_flag(p: DoubledPoint, flavor: NilFlavor, flag: GradedFlag) -> bool:
    """Independent verification of a witness flag."""
    F = p.field
    flavor = NilFlavor.parse(flavor)
    strict, lax = _strict_lax(p, flavor)
    prev = tuple(F.zeros(n, 0) for n in p.dim)
    for step in flag.steps:
        if not graded_contains(F, step, prev):
            return False
        for s, t, m in strict:
            if not _maps_into(F, m, step[s], prev[t]):
                return False
        for s, t, m in lax:
            if not _maps_into(F, m, step[s], step[t]):
                return False
        prev = step
    if graded_dims(prev) != p.dim:
        return False
    return not flavor.discrete or flag.is_discrete


def _preimage_rows(F, m, target_basis, target_dim):
    # rows whose kernel is {v : m v in span(target_basis)}
    ann = linalg.annihilator(F, target_basis)
    return F.mul(ann, m) if ann.shape[0] else F.zeros(0, m.shape[1])


def _max_step(F, dims, strict, lax, cur, vertices) -> tuple:
    """Largest G ⊇ cur, G_j = cur_j off ``vertices``, with strict(G) ⊆ cur, lax(G) ⊆ G."""
    g = list(cur)
    fixed = [i not in vertices for i in range(len(dims))]
    base_rows = [[] for _ in dims]
    for s, t, m in strict:
        if not fixed[s]:
            base_rows[s].append(_preimage_rows(F, m, cur[t], dims[t]))
    for i in vertices:
        g[i] = linalg.span(F, linalg.nullspace(F, linalg.vstack(F, dims[i], base_rows[i])))
    while True:
        changed = False
        for i in vertices:
            rows = list(base_rows[i])
            rows.append(linalg.annihilator(F, g[i]))
            for s, t, m in lax:
                if s == i:
                    rows.append(_preimage_rows(F, m, g[t], dims[t]))
            new = linalg.span(F, linalg.nullspace(F, linalg.vstack(F, dims[i], rows)))
            if new.shape[1] != g[i].shape[1]:
                g[i] = new
                changed = True
        if not changed:
            return tuple(g)


def greedy_flag(p: DoubledPoint, flavor: NilFlavor) -> GradedFlag | None:
    """Maximal admissible next step, repeated; None when it gets stuck."""
    F, dims = p.field, p.dim
    flavor = NilFlavor.parse(flavor)
    strict, lax = _strict_lax(p, flavor)
    cur = tuple(F.zeros(n, 0) for n in dims)
    steps = []
    while graded_dims(cur) != dims:
        if flavor.discrete:
            nxt = None
            for i in range(len(dims)):
                if cur[i].shape[1] == dims[i]:
                    continue
                cand = _max_step(F, dims, strict, lax, cur, [i])
                if cand[i].shape[1] > cur[i].shape[1]:
                    nxt = cand
                    break
        else:
            nxt = _max_step(F, dims, strict, lax, cur, list(range(len(dims))))
            if graded_dims(nxt) == graded_dims(cur):
                nxt = None
        if nxt is None:
            return None
        steps.append(nxt)
        cur = nxt
    return GradedFlag(tuple(steps))


def exhaustive_flag(p: DoubledPoint, flavor: NilFlavor) -> GradedFlag | None:
    """Depth-first search over all admissible chains of graded subspaces."""
    F, dims = p.field, p.dim
    if not F.is_finite:
        raise UnsupportedInputError("exhaustive flag search needs a finite field")
    flavor = NilFlavor.parse(flavor)
    strict, lax = _strict_lax(p, flavor)
    dead = set()

    def admissible(cur, g):
        return all(_maps_into(F, m, g[s], cur[t]) for s, t, m in strict) and all(
            _maps_into(F, m, g[s], g[t]) for s, t, m in lax
        )

    def steps_from(cur):
        have = graded_dims(cur)
        room = [n - h for n, h in zip(dims, have)]
        if flavor.discrete:
            for i, r in enumerate(room):
                for k in range(1, r + 1):
                    yield tuple(k if j == i else 0 for j in range(len(dims)))
        else:
            for step in itertools.product(*(range(r + 1) for r in room)):
                if any(step):
                    yield step

    def search(cur):
        if graded_dims(cur) == dims:
            return []
        key = graded_key(cur)
        if key in dead:
            return None
        for step in steps_from(cur):
            for g in extensions(F, dims, cur, step):
                if admissible(cur, g):
                    rest = search(g)
                    if rest is not None:
                        return [g] + rest
        dead.add(key)
        return None

    found = search(tuple(F.zeros(n, 0) for n in dims))
    return None if found is None else GradedFlag(tuple(found))


def find_flag(p: DoubledPoint, flavor, cap: int = DEFAULT_EXHAUSTIVE_CAP,
              cross_check: bool = False, trust_greedy: bool = True) -> FlagSearch:
    """Search for a flag of the given flavor.

    A greedy success is a verified witness.  A greedy failure is also
    conclusive: any admissible flag pushes forward to an admissible flag of
    the quotient by the maximal first step, so the greedy recursion only gets
    stuck when no flag exists.  Over a finite field with total dimension at
    most ``cap`` the exhaustive search settles (and with ``cross_check``
    double-checks) the answer independently.  ``trust_greedy=False`` reports
    "undecided" instead of relying on that argument when no exhaustive search
    is possible.
    """
    flavor = NilFlavor.parse(flavor)
    flag = greedy_flag(p, flavor)
    small = p.field.is_finite and sum(p.dim) <= cap
    if flag is not None:
        if not check_flag(p, flavor, flag):
            raise AssertionError("greedy produced an invalid flag")
        if cross_check and small and exhaustive_flag(p, flavor) is None:
            raise AssertionError("exhaustive search missed a verified flag")
        return FlagSearch("present", flag, "greedy")
    if small:
        ex = exhaustive_flag(p, flavor)
        if ex is None:
            return FlagSearch("absent", None, "exhaustive")
        return FlagSearch("present", ex, "exhaustive", note="greedy search failed; exhaustive found a flag")
    if trust_greedy:
        return FlagSearch("absent", None, "greedy")
    return FlagSearch("undecided", None, "greedy",
                      note=f"greedy search failed and exhaustive search is off (field {p.field}, "
                           f"total dim {sum(p.dim)}, cap {cap})")


@dataclass(frozen=True)
class LambdaReport:
    member: bool | None  # None = undecided
    moment_zero: bool
    search: FlagSearch | None


def lambda_member(p: DoubledPoint, flavor, cap: int = DEFAULT_EXHAUSTIVE_CAP,
                  trust_greedy: bool = True) -> LambdaReport:
    flavor = NilFlavor.parse(flavor)
    if not is_moment_zero(p):
        return LambdaReport(False, False, None)
    search = find_flag(p, flavor, cap, trust_greedy=trust_greedy)
    member = None if not search.decided else search.present
    return LambdaReport(member, True, search)


# Hom spaces


def _intertwiner_system(r: Rep, s: Rep) -> tuple[np.ndarray, list]:
    if r.quiver != s.quiver or r.field != s.field:
        raise UnsupportedInputError("Hom needs representations of one quiver over one field")
    F = r.field
    offsets, nvars = [], 0
    for a, b in zip(r.dim, s.dim):
        offsets.append(nvars)
        nvars += a * b
    rows = []
    for (i, j), x, y in zip(r.quiver.edges, r.mats, s.mats):
        # (f_j x - y f_i)[a, b] = 0 with f_i of shape (s.dim[i], r.dim[i])
        for a in range(s.dim[j]):
            for b in range(r.dim[i]):
                row = [0] * nvars
                for c in range(r.dim[j]):
                    row[offsets[j] + a * r.dim[j] + c] += x[c, b]
                for c in range(s.dim[i]):
                    row[offsets[i] + c * r.dim[i] + b] -= y[a, c]
                rows.append(row)
    return F.array(rows, shape=(len(rows), nvars)), offsets


def hom_basis(r: Rep, s: Rep) -> list[tuple]:
    """Basis of Hom(r, s): each element is a tuple of matrices f_i: r_i -> s_i."""
    F = r.field
    system, offsets = _intertwiner_system(r, s)
    ns = linalg.nullspace(F, system)
    out = []
    for k in range(ns.shape[1]):
        v = ns[:, k]
        fs = []
        for i, (a, b) in enumerate(zip(r.dim, s.dim)):
            block = v[offsets[i]:offsets[i] + a * b]
            fs.append(F.array(np.reshape(block, (b, a)).tolist(), shape=(b, a)) if a * b else F.zeros(b, a))
        out.append(tuple(fs))
    return out


def hom_dim(r: Rep, s: Rep) -> int:
    system, _ = _intertwiner_system(r, s)
    return system.shape[1] - linalg.rank(r.field, system)


def end_dim(r: Rep) -> int:
    return hom_dim(r, r)


def orbit_dim(r: Rep) -> int:
    return sum(x * x for x in r.dim) - end_dim(r)


# stable flags of a fixed type


def iter_stable_flags(r: Rep, ft, strict: bool) -> Iterator[GradedFlag]:
    """Flags of type ``ft`` with x(F_j) ⊆ F_j, or ⊆ F_{j-1} when strict (finite fields)."""
    F = r.field
    if not F.is_finite:
        raise UnsupportedInputError("stable flag enumeration needs a finite field")
    ft = [r.quiver.dim(step) for step in ft]
    total = tuple(sum(col) for col in zip(*ft)) if ft else r.quiver.zero()
    if total != r.dim:
        raise DimensionVectorError(f"flag type sums to {total}, representation has dim {r.dim}")
    edges = list(zip(r.quiver.edges, r.mats))

    def rec(cur, j, acc):
        if j == len(ft):
            yield GradedFlag(tuple(acc))
            return
        for g in extensions(F, r.dim, cur, ft[j]):
            target = cur if strict else g
            if all(_maps_into(F, m, g[s], target[t]) for (s, t), m in edges):
                yield from rec(g, j + 1, acc + [g])

    yield from rec(tuple(F.zeros(n, 0) for n in r.dim), 0, [])


def stable_flags(r: Rep, ft, strict: bool) -> int:
    return sum(1 for _ in iter_stable_flags(r, ft, strict))
