"""Nilpotent representations of the cyclic quiver C_n (arrows i -> i+1 mod n).

A nilpotent representation is a direct sum of segments I_{i,l}: top at
residue i, length l, dimension e_i + e_{i+1} + ... + e_{i+l-1}.  A
:class:`MultiPartition` records, per residue, the lengths of the segments with
that top.  n = 1 is the Jordan quiver.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping

import numpy as np

from . import linalg
from .core import cyclic_quiver
from .errors import DimensionVectorError, InternalConsistencyError, NotAperiodicError, UnsupportedInputError
from .linalg import ExactField
from .reps import Rep, is_nilpotent, orbit_dim, rank_profile


@dataclass(frozen=True, order=True)
class MultiPartition:
    n: int
    parts: tuple  # parts[i] is a weakly decreasing tuple of segment lengths with top i

    def __post_init__(self):
        if self.n < 1:
            raise UnsupportedInputError("cycle length must be positive")
        parts = tuple(tuple(sorted((int(x) for x in p), reverse=True)) for p in self.parts)
        if len(parts) != self.n:
            raise UnsupportedInputError(f"need one partition per residue, got {len(parts)} for n={self.n}")
        if any(x <= 0 for p in parts for x in p):
            raise UnsupportedInputError("partition parts are positive")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def from_mapping(cls, n: int, parts: Mapping) -> "MultiPartition":
        out = [()] * n
        for k, v in parts.items():
            i = int(k)
            if not 0 <= i < n:
                raise UnsupportedInputError(f"residue {k} outside 0..{n - 1}")
            out[i] = tuple(v)
        return cls(n, tuple(out))

    @classmethod
    def empty(cls, n: int) -> "MultiPartition":
        return cls(n, ((),) * n)

    def segments(self) -> list[tuple[int, int]]:
        return [(i, l) for i in range(self.n) for l in self.parts[i]]

    def is_empty(self) -> bool:
        return not any(self.parts)

    def __str__(self):
        return "{" + ", ".join(f"{i}:{p}" for i, p in enumerate(self.parts) if p) + "}"


def dim_of(m: MultiPartition) -> tuple:
    d = [0] * m.n
    for i, l in m.segments():
        for k in range(l):
            d[(i + k) % m.n] += 1
    return tuple(d)


def build_nilpotent(m: MultiPartition, F: ExactField = linalg.Q) -> Rep:
    """N_m: each segment is a chain of basis vectors moved one step along the cycle."""
    n = m.n
    where = [[] for _ in range(n)]  # per vertex: list of (segment, position)
    for seg, (i, l) in enumerate(m.segments()):
        for pos in range(l):
            where[(i + pos) % n].append((seg, pos))
    index = [{sp: k for k, sp in enumerate(where[v])} for v in range(n)]
    lengths = [l for _, l in m.segments()]
    q = cyclic_quiver(n)
    d = dim_of(m)
    mats = []
    for s, t in q.edges:
        x = F.zeros(d[t], d[s])
        for col, (seg, pos) in enumerate(where[s]):
            if pos + 1 < lengths[seg]:
                x[index[t][(seg, pos + 1)], col] = F.scalar(1)
        mats.append(x)
    return Rep(q, d, F, tuple(mats))


def segment_counts(profile: list[list[int]]) -> dict[tuple[int, int], int]:
    """Invert a rank profile: {(top, length): multiplicity}.

    With G(i, l) = number of segments with top i and length >= l, the rank of
    the length-t path out of i satisfies R(i, t) = G(i, t+1) + R(i-1, t+1).
    """
    n = len(profile)
    L = len(profile[0]) - 1

    def R(i, t):
        return profile[i % n][t] if t <= L else 0

    def G(i, l):
        return R(i, l - 1) - R(i - 1, l)

    out = {}
    for i in range(n):
        for l in range(1, L + 1):
            c = G(i, l) - G(i, l + 1)
            if c < 0:
                raise UnsupportedInputError("rank profile is not that of a nilpotent representation")
            if c:
                out[(i, l)] = c
    return out


def decompose_nilpotent(r: Rep) -> MultiPartition:
    if not is_nilpotent(r):
        raise UnsupportedInputError("representation is not nilpotent")
    profile = rank_profile(r, r.total_dim + 1)
    n = r.quiver.n
    parts = [[] for _ in range(n)]
    for (i, l), c in sorted(segment_counts(profile).items()):
        parts[i].extend([l] * c)
    m = MultiPartition(n, tuple(tuple(p) for p in parts))
    if dim_of(m) != r.dim:
        raise AssertionError("segment decomposition does not account for the dimension")
    return m


def is_aperiodic(m: MultiPartition) -> bool:
    return _periodic_length(m) is None


def _periodic_length(m: MultiPartition) -> int | None:
    """Smallest l that occurs at every residue, if any."""
    common = set(m.parts[0])
    for p in m.parts[1:]:
        common &= set(p)
    return min(common) if common else None


def pair_encode(m: MultiPartition) -> tuple[MultiPartition, tuple]:
    """Split off the completely periodic part: m <-> (aperiodic N, partition lam)."""
    counts = [Counter(p) for p in m.parts]
    lam = []
    for l in sorted(set().union(*counts), reverse=True):
        k = min(c[l] for c in counts)
        if k:
            lam.extend([l] * k)
            for c in counts:
                c[l] -= k
    parts = tuple(tuple(sorted(c.elements(), reverse=True)) for c in counts)
    return MultiPartition(m.n, parts), tuple(lam)


def pair_decode(N: MultiPartition, lam) -> MultiPartition:
    if not is_aperiodic(N):
        raise NotAperiodicError(f"{N} is not aperiodic", _periodic_length(N))
    return MultiPartition(N.n, tuple(tuple(sorted(p + tuple(lam), reverse=True)) for p in N.parts))


# partitions


def partitions(k: int, max_part: int | None = None) -> Iterator[tuple]:
    """Partitions of k, largest parts first, in reverse lexicographic order."""
    if max_part is None:
        max_part = k
    if k == 0:
        yield ()
        return
    for first in range(min(k, max_part), 0, -1):
        for rest in partitions(k - first, first):
            yield (first,) + rest


def _fitting_partitions(i: int, n: int, room: list[int], max_part: int) -> Iterator[tuple]:
    """Partitions at residue i whose segments fit inside ``room`` (mutated and restored)."""
    yield ()
    for l in range(min(max_part, sum(room)), 0, -1):
        cells = [(i + k) % n for k in range(l)]
        for c in cells:
            room[c] -= 1
        if min(room) >= 0:
            for rest in _fitting_partitions(i, n, room, l):
                yield (l,) + rest
        for c in cells:
            room[c] += 1


def enumerate_orbits(n: int, d, aperiodic_only: bool = False) -> list[MultiPartition]:
    """All m with dim_of(m) = d, sorted by parts in reverse lexicographic order."""
    d = tuple(int(x) for x in d)
    if len(d) != n:
        raise DimensionVectorError(f"dimension vector has {len(d)} entries for C_{n}")
    if any(x < 0 for x in d):
        return []
    out = []
    room = list(d)

    def rec(i, acc):
        if i == n:
            if not any(room):
                out.append(MultiPartition(n, tuple(acc)))
            return
        # the generator keeps ``room`` reduced by p while p is current
        for p in _fitting_partitions(i, n, room, sum(d)):
            rec(i + 1, acc + [p])

    rec(0, [])
    if aperiodic_only:
        out = [m for m in out if is_aperiodic(m)]
    return sorted(out, key=lambda m: m.parts, reverse=True)


# eigenvalue data on the invertible part


@dataclass(frozen=True, order=True)
class EigenvalueTypes:
    """Finitely supported map partition -> count: how many distinct nonzero
    eigenvalues of the cycle composite carry each Jordan type."""

    items: tuple = ()  # ((partition, count), ...) sorted, counts positive

    def __post_init__(self):
        merged = Counter()
        for lam, c in self.items:
            lam = tuple(sorted(lam, reverse=True))
            if c < 0 or not lam:
                raise UnsupportedInputError("counts are nonnegative and partitions nonempty")
            merged[lam] += c
        object.__setattr__(self, "items", tuple(sorted((k, v) for k, v in merged.items() if v)))

    @property
    def weight(self) -> int:
        return sum(sum(lam) * c for lam, c in self.items)

    @property
    def is_regular(self) -> bool:
        return all(len(lam) == 1 for lam, _ in self.items)

    @property
    def is_regular_semisimple(self) -> bool:
        return all(lam == (1,) for lam, _ in self.items)

    def as_partition(self) -> tuple:
        """For regular data: the partition with part k repeated count((k)) times."""
        if not self.is_regular:
            raise UnsupportedInputError("only regular eigenvalue data correspond to a partition")
        return tuple(sorted((lam[0] for lam, c in self.items for _ in range(c)), reverse=True))

    def __str__(self):
        return "{" + ", ".join(f"{lam}:{c}" for lam, c in self.items) + "}"


def eigenvalue_types(weight: int, constraint: str = "any") -> list[EigenvalueTypes]:
    """All eigenvalue data of the given weight under constraint any|regular|regular_semisimple."""
    if constraint == "regular_semisimple":
        return [EigenvalueTypes((((1,), weight),) if weight else ())]
    if constraint == "regular":
        out = []
        for lam in partitions(weight):
            out.append(EigenvalueTypes(tuple(((k,), c) for k, c in Counter(lam).items())))
        return out
    if constraint != "any":
        raise UnsupportedInputError(f"unknown eigenvalue constraint {constraint!r}")
    # multisets of partitions with total size = weight
    shapes = [lam for k in range(1, weight + 1) for lam in partitions(k)]
    out = []

    def rec(start, left, acc):
        if left == 0:
            out.append(EigenvalueTypes(tuple((lam, c) for lam, c in Counter(acc).items())))
            return
        for j in range(start, len(shapes)):
            if sum(shapes[j]) <= left:
                rec(j, left - sum(shapes[j]), acc + [shapes[j]])

    rec(0, weight, [])
    return out


def enumerate_cyclic_strata(n: int, d, mu_constraint: str = "any",
                            aperiodic_N: bool = False) -> list[tuple[MultiPartition, EigenvalueTypes]]:
    """Pairs (N nilpotent, mu) with dim_of(N) + weight(mu) * delta = d."""
    d = tuple(int(x) for x in d)
    out = []
    for k in range(min(d) + 1 if d else 1):
        rest = tuple(x - k for x in d)
        for N in enumerate_orbits(n, rest, aperiodic_only=aperiodic_N):
            for mu in eigenvalue_types(k, mu_constraint):
                out.append((N, mu))
    return out


def char_map(r: Rep) -> list:
    """Characteristic polynomial (highest degree first) of x_{n-1} ... x_0 at vertex 0."""
    q = r.quiver
    if not q.is_cyclic_orientation():
        raise UnsupportedInputError("expected the cyclic quiver with arrows i -> i+1")
    F = r.field
    by_source = {s: m for (s, _), m in zip(q.edges, r.mats)}
    comp = F.eye(r.dim[0])
    for i in range(q.n):
        comp = F.mul(by_source[i], comp)
    return linalg.charpoly(F, comp)


# resolution flag-types


@dataclass(frozen=True)
class ResolutionData:
    top_power: int             # largest s with x^s != 0
    coarse: tuple              # d'_j = dim im x^(N-j) / im x^(N-j+1), j = 0..N
    new_socles: tuple          # d'_j - rotate(d'_{j-1}) from ranks
    new_socles_formula: tuple  # the same from the segment lengths of m
    layer_refinement: tuple    # layer-by-layer discrete refinement of ``coarse``
    flag_type: tuple           # discrete flag-type resolving the orbit closure


def _rotate(v: tuple) -> tuple:
    # (v_{+1})_k = v_{k+1}
    return tuple(v[(k + 1) % len(v)] for k in range(len(v)))


def _layer_refinement(n: int, tops) -> tuple:
    """Split each layer into single-vertex steps: shifted previous steps, then new socles.

    Strict for every point of the orbit, but the image is in general larger
    than the orbit closure (e.g. n=2, m={0:(2), 1:(1)} reaches I_{1,3}).
    """
    steps = []
    block: list[tuple[int, int]] = []  # (multiplicity, residue)
    for j, tilde in enumerate(tops):
        if min(tilde) < 0:
            raise AssertionError("coarse dimensions are not compatible with the rotation")
        zeros = [k for k in range(n) if tilde[k] == 0]
        if not zeros:
            raise NotAperiodicError(f"layer {j} has new socles at every residue", None)
        i = zeros[0]
        block = [(a, (k - 1) % n) for a, k in block]
        block += [(tilde[(i - t) % n], (i - t) % n) for t in range(1, n)]
        block = [(a, k) for a, k in block if a]
        steps.extend(tuple(a if v == k else 0 for v in range(n)) for a, k in block)
    return tuple(steps)


@lru_cache(maxsize=None)
def _orbit_dim(m: "MultiPartition") -> int:
    return orbit_dim(build_nilpotent(m))


def _peel(m: "MultiPartition", v: int, top: bool) -> tuple["MultiPartition", int]:
    """Remove the whole socle (or top) of N_m at vertex v; returns the rest and its size."""
    n = m.n
    parts = [list(p) for p in m.parts]
    out = [[] for _ in range(n)]
    a = 0
    for i in range(n):
        for l in parts[i]:
            hit = i == v if top else (i + l - 1) % n == v
            if not hit:
                out[i].append(l)
                continue
            a += 1
            if l > 1:
                out[(i + 1) % n if top else i].append(l - 1)
    return MultiPartition(n, tuple(tuple(sorted(p, reverse=True)) for p in out)), a


def _peel_series(m: "MultiPartition") -> tuple | None:
    """Search for a discrete flag-type built by peeling whole socles and tops.

    A socle peel at vertex v becomes the next step from the bottom, a top
    peel the next step from the top.  Either way a point of O_m leaves no
    choice, so the fibre over the orbit is a point; requiring the strict
    incidence variety to have dimension dim O_m makes the orbit dense in the
    (irreducible) image.
    """
    n = m.n
    dead = set()

    def rec(cur, target):
        if cur.is_empty():
            return () if target == 0 else None
        key = (cur, target)
        if key in dead or target < _orbit_dim(cur):
            return None
        d = dim_of(cur)
        for top in (False, True):
            for v in range(n):
                nxt, a = _peel(cur, v, top)
                if not a:
                    continue
                neighbour = d[(v + 1) % n] if top else d[(v - 1) % n]
                tail = rec(nxt, target - a * (d[v] - a) - a * neighbour)
                if tail is not None:
                    step = (tuple(a if k == v else 0 for k in range(n)),)
                    return tail + step if top else step + tail
        dead.add(key)
        return None

    return rec(m, _orbit_dim(m))


def resolution_data(m: MultiPartition) -> ResolutionData:
    n = m.n
    if not is_aperiodic(m):
        l = _periodic_length(m)
        raise NotAperiodicError(f"segments of length {l} occur at every residue of {m}", l)
    if m.is_empty():
        return ResolutionData(-1, (), (), (), (), ())
    if n < 2:
        raise UnsupportedInputError("the resolution refinement needs n >= 2")
    r = build_nilpotent(m)
    R = rank_profile(r, r.total_dim + 1)
    top = max(s for i in range(n) for s in range(len(R[i])) if R[i][s] > 0)

    def rk(i, s):
        return R[i % n][s] if s < len(R[0]) else 0

    coarse, socles, formula = [], [], []
    prev = (0,) * n
    for j in range(top + 1):
        s = top - j
        dj = tuple(rk(k - s, s) - rk(k - s - 1, s + 1) for k in range(n))
        coarse.append(dj)
        socles.append(tuple(a - b for a, b in zip(dj, _rotate(prev))))
        formula.append(tuple(m.parts[(k - s) % n].count(s + 1) for k in range(n)))
        prev = dj
    ft = _peel_series(m)
    if ft is None:
        raise InternalConsistencyError(f"no peel series of {m} has the orbit dimension")
    return ResolutionData(top, tuple(coarse), tuple(socles), tuple(formula),
                          _layer_refinement(n, socles), ft)


def resolution_flag_type(m: MultiPartition) -> tuple:
    return resolution_data(m).flag_type


def is_discrete(ft) -> bool:
    return all(sum(1 for x in step if x) == 1 for step in ft)


def rank_dominated(profile: list[list[int]], bound: list[list[int]]) -> bool:
    """Entrywise comparison of rank profiles (missing lengths count as 0)."""
    for row, brow in zip(profile, bound):
        for l, v in enumerate(row):
            if v > (brow[l] if l < len(brow) else 0):
                return False
    return True


# conormal points


def opposite_nilpotent(m: MultiPartition, F: ExactField = linalg.Q) -> Rep:
    """N_m carried to the opposite cycle through the relabelling i -> -i.

    The result is a representation of opposite(C_n) (arrow k reversed) whose
    orbit is the nilpotent orbit of type m there.
    """
    from .core import opposite
    n = m.n
    y = build_nilpotent(m, F)
    ymaps = {(s, t): mat for (s, t), mat in zip(y.quiver.edges, y.mats)}
    q = cyclic_quiver(n)
    qop = opposite(q)
    mats = []
    for s, t in qop.edges:  # reversed arrow t -> s of C_n, i.e. s = t + 1
        mats.append(ymaps[((-s) % n, (-t) % n)])
    dim = tuple(y.dim[(-i) % n] for i in range(n))
    return Rep(qop, dim, F, tuple(mats))


def conormal_point(m: MultiPartition, rng, F: ExactField = linalg.Q, height: int = 3):
    """(x, x*) with x* nilpotent of type m and x a random solution of the moment equation.

    The solutions of mu(x, x*) = 0 in x are exactly the conormal directions
    to the orbit of x*.
    """
    from .reps import DoubledPoint, moment_map
    xstar = opposite_nilpotent(m, F)
    q = cyclic_quiver(m.n)
    d = xstar.dim
    shapes = [(d[t], d[s]) for s, t in q.edges]
    zero = [F.zeros(a, b) for a, b in shapes]
    columns = []
    for k, (a, b) in enumerate(shapes):
        for i in range(a):
            for j in range(b):
                mats = [z.copy() for z in zero]
                mats[k][i, j] = F.scalar(1)
                mu = moment_map(DoubledPoint(Rep(q, d, F, tuple(mats)), xstar))
                columns.append(np.concatenate([np.asarray(u).reshape(-1) for u in mu]) if mu else np.zeros(0))
    total = sum(a * b for a, b in shapes)
    if total == 0:
        return DoubledPoint(Rep(q, d, F, tuple(zero)), xstar)
    system = F.zeros(len(columns[0]), total)
    for c, col in enumerate(columns):
        for r, v in enumerate(col):
            system[r, c] = F.scalar(v)
    basis = linalg.nullspace(F, system)
    coeffs = F.zeros(basis.shape[1], 1)
    for i in range(basis.shape[1]):
        coeffs[i, 0] = F.random_scalar(rng, height)
    flat = F.mul(basis, coeffs)[:, 0] if basis.shape[1] else F.zeros(total, 1)[:, 0]
    mats, pos = [], 0
    for a, b in shapes:
        block = F.zeros(a, b)
        for i in range(a):
            for j in range(b):
                block[i, j] = flat[pos]
                pos += 1
        mats.append(block)
    return DoubledPoint(Rep(q, d, F, tuple(mats)), xstar)
