"""Brute-force oracle over F_p: orbits, images of incidence maps, filtrations.

A point of E_d(F_p) is encoded as an integer: the arrow matrices are read in
arrow order, row-major, as base-p digits (first entry most significant).
Everything here is exponential and guarded by a point budget.
"""

from __future__ import annotations

import itertools
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import linalg
from .core import Quiver, classify, defect, dim_rep_space
from .errors import BudgetExceeded, UnsupportedInputError
from .linalg import ExactField
from .reps import (NilFlavor, Rep, end_dim, graded_subspaces, hom_basis, is_subrep, stable_flags,
                   subrep)

DEFAULT_BUDGET = 2 ** 22


class PointSpace:
    """Integer encoding of E_d(F_p)."""

    def __init__(self, q: Quiver, d, p: int, budget: int = DEFAULT_BUDGET):
        self.q = q
        self.d = q.dim(d)
        self.p = p
        self.F = ExactField.prime(p)
        self.shapes = [(self.d[t], self.d[s]) for s, t in q.edges]
        self.D = sum(a * b for a, b in self.shapes)
        self.size = p ** self.D
        if self.size > budget:
            raise BudgetExceeded(self.size, budget, "points")
        self.weights = np.array([p ** (self.D - 1 - k) for k in range(self.D)], dtype=np.int64)

    def all_points(self) -> np.ndarray:
        """(size, D) digit array of every point, in index order."""
        idx = np.arange(self.size, dtype=np.int64)
        return (idx[:, None] // self.weights[None, :]) % self.p if self.D else np.zeros((1, 0), np.int64)

    def split(self, flat: np.ndarray) -> list[np.ndarray]:
        """(M, D) digits -> one (M, rows, cols) array per arrow."""
        out, pos = [], 0
        for r, c in self.shapes:
            out.append(flat[:, pos:pos + r * c].reshape(flat.shape[0], r, c))
            pos += r * c
        return out

    def join(self, mats: list[np.ndarray]) -> np.ndarray:
        m = mats[0].shape[0] if mats else 1
        if not mats:
            return np.zeros((m, 0), np.int64)
        return np.concatenate([a.reshape(a.shape[0], a.shape[1] * a.shape[2]) for a in mats], axis=1)

    def encode(self, flat: np.ndarray) -> np.ndarray:
        return flat.astype(np.int64) @ self.weights if self.D else np.zeros(flat.shape[0], np.int64)

    def rep(self, index: int) -> Rep:
        digits = (int(index) // self.weights) % self.p if self.D else np.zeros(0, np.int64)
        mats = [m[0] for m in self.split(digits[None, :])]
        return Rep(self.q, self.d, self.F, tuple(self.F.array(m, m.shape) for m in mats))


def _generators(d, p):
    """Per vertex: elementary transvections and a scaling by a primitive root."""
    omega = next(w for w in range(1, p) if all(pow(w, (p - 1) // f, p) != 1 for f in _prime_factors(p - 1))) \
        if p > 2 else 1
    gens = []
    for i, n in enumerate(d):
        for a in range(n):
            for b in range(n):
                if a != b:
                    g = np.eye(n, dtype=np.int64)
                    g[a, b] = 1
                    gi = np.eye(n, dtype=np.int64)
                    gi[a, b] = p - 1
                    gens.append((i, g, gi))
        if n and p > 2:
            g = np.eye(n, dtype=np.int64)
            g[0, 0] = omega
            gi = np.eye(n, dtype=np.int64)
            gi[0, 0] = pow(omega, p - 2, p)
            gens.append((i, g, gi))
    return gens


def _prime_factors(n):
    out, k = set(), 2
    while k * k <= n:
        while n % k == 0:
            out.add(k)
            n //= k
        k += 1
    if n > 1:
        out.add(n)
    return out


@dataclass(frozen=True)
class OrbitInfo:
    representative: Rep
    index: int   # encoded index of the representative (smallest in the orbit)
    size: int
    end_dim: int


@dataclass(frozen=True)
class CensusReport:
    q_field: int
    total_points: int
    orbits: tuple
    elapsed: float
    labels: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def count(self) -> int:
        return len(self.orbits)


def orbit_labels(space: PointSpace) -> tuple[int, np.ndarray]:
    """Connected components of the generator action graph on all points."""
    pts = space.all_points()
    src = np.arange(space.size, dtype=np.int64)
    rows, cols = [], []
    mats = space.split(pts)
    for i, g, gi in _generators(space.d, space.p):
        moved = []
        for (s, t), m in zip(space.q.edges, mats):
            x = m
            if t == i:
                x = np.einsum("ab,mbc->mac", g, x) % space.p
            if s == i:
                x = np.einsum("mab,bc->mac", x, gi) % space.p
            moved.append(x)
        rows.append(src)
        cols.append(space.encode(space.join(moved)))
    if not rows:
        return space.size, np.arange(space.size)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    graph = coo_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(space.size, space.size))
    return connected_components(graph, directed=True, connection="weak")


def orbit_census(q: Quiver, d, p: int, budget: int = DEFAULT_BUDGET) -> CensusReport:
    t0 = time.perf_counter()
    space = PointSpace(q, d, p, budget)
    ncomp, labels = orbit_labels(space)
    sizes = np.bincount(labels, minlength=ncomp)
    first = np.full(ncomp, -1, dtype=np.int64)
    # smallest index in each component
    order = np.arange(space.size, dtype=np.int64)[::-1]
    first[labels[order]] = order
    orbits = []
    for comp in np.argsort(first, kind="stable"):
        r = space.rep(first[comp])
        orbits.append(OrbitInfo(r, int(first[comp]), int(sizes[comp]), end_dim(r)))
    if sum(o.size for o in orbits) != space.size:
        raise AssertionError("orbit sizes do not add up to the number of points")
    return CensusReport(p, space.size, tuple(orbits), time.perf_counter() - t0, labels)


# images of incidence maps


def _flavor_strict(flavor) -> bool:
    if isinstance(flavor, NilFlavor):
        return flavor.x_strict
    if isinstance(flavor, bool):
        return flavor
    s = str(flavor).lower()
    if s not in ("nil", "plain"):
        raise UnsupportedInputError(f"image flavor must be nil or plain, got {flavor!r}")
    return s == "nil"


def _adapted_flags(F: ExactField, d, ft):
    """Every flag of type ft, as one invertible adapted basis per vertex plus step labels."""
    nv = len(d)

    def vertex_flags(i):
        steps = [s[i] for s in ft]

        def rec(basis, j):
            if j == len(steps):
                yield basis
                return
            comp = linalg.complement(F, basis)
            for sub in linalg.subspaces(F, comp.shape[1], steps[j]):
                yield from rec(linalg.hstack(F, d[i], [basis, F.mul(comp, sub)]), j + 1)

        yield from rec(F.zeros(d[i], 0), 0)

    labels = [np.repeat(np.arange(len(ft)), [s[i] for s in ft]) for i in range(nv)]
    per_vertex = [list(vertex_flags(i)) for i in range(nv)]
    for bases in itertools.product(*per_vertex):
        yield [np.asarray(b, dtype=np.int64) for b in bases], labels


@dataclass(frozen=True)
class PiImage:
    space: PointSpace = field(repr=False)
    counts: np.ndarray = field(repr=False)

    @property
    def image(self) -> np.ndarray:
        return np.flatnonzero(self.counts)

    @property
    def histogram(self) -> dict:
        vals, freq = np.unique(self.counts, return_counts=True)
        return {int(v): int(f) for v, f in zip(vals, freq)}

    def image_set(self) -> frozenset:
        return frozenset(int(i) for i in self.image)


def image_of_pi(q: Quiver, ft, flavor, p: int, budget: int = DEFAULT_BUDGET) -> PiImage:
    """Number of stable flags of type ft at every point of E_d(F_p).

    Each flag contributes the linear space of compatible points; in a basis
    adapted to the flag these are the block (strictly) upper triangular maps.
    """
    strict = _flavor_strict(flavor)
    ft = [q.dim(s) for s in ft]
    d = tuple(sum(col) for col in zip(*ft)) if ft else q.zero()
    space = PointSpace(q, d, p, budget)
    F = space.F
    counts = np.zeros(space.size, dtype=np.int64)
    for bases, labels in _adapted_flags(F, d, ft):
        invs = [np.asarray(linalg.inverse(F, b), dtype=np.int64) if b.shape[0] else b for b in bases]
        masks = []
        for s, t in q.edges:
            rows, cols = labels[t][:, None], labels[s][None, :]
            masks.append(rows < cols if strict else rows <= cols)
        nfree = sum(int(m.sum()) for m in masks)
        if p ** nfree > budget:
            raise BudgetExceeded(p ** nfree, budget, "points in one fibre")
        free = np.array(list(itertools.product(range(p), repeat=nfree)), dtype=np.int64).reshape(p ** nfree, nfree)
        pos, mats = 0, []
        for (s, t), mask in zip(q.edges, masks):
            k = int(mask.sum())
            b = np.zeros((free.shape[0],) + mask.shape, dtype=np.int64)
            b[:, mask] = free[:, pos:pos + k]
            pos += k
            x = np.einsum("ab,mbc,cd->mad", bases[t], b, invs[s]) % p
            mats.append(x)
        idx = space.encode(space.join(mats)) if mats else np.zeros(free.shape[0], np.int64)
        np.add.at(counts, idx, 1)
    return PiImage(space, counts)


def image_of_pi_pointwise(q: Quiver, ft, flavor, p: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Same counts, one point at a time through the generic stable-flag search."""
    strict = _flavor_strict(flavor)
    ft = [q.dim(s) for s in ft]
    d = tuple(sum(col) for col in zip(*ft)) if ft else q.zero()
    space = PointSpace(q, d, p, budget)
    return np.array([stable_flags(space.rep(i), ft, strict) for i in range(space.size)], dtype=np.int64)


@dataclass(frozen=True)
class InclusionResult:
    relation: str            # equal | strict_subset | incomparable
    direction: str | None    # "first<second" or "second<first" for strict_subset
    sizes: tuple


def inclusion_check(q: Quiver, ft1, ft2, flavor, p: int, budget: int = DEFAULT_BUDGET) -> InclusionResult:
    d1 = tuple(sum(c) for c in zip(*[q.dim(s) for s in ft1])) if ft1 else q.zero()
    d2 = tuple(sum(c) for c in zip(*[q.dim(s) for s in ft2])) if ft2 else q.zero()
    if d1 != d2:
        return InclusionResult("incomparable", None, (None, None))
    a = image_of_pi(q, ft1, flavor, p, budget).image_set()
    b = image_of_pi(q, ft2, flavor, p, budget).image_set()
    sizes = (len(a), len(b))
    if a == b:
        return InclusionResult("equal", None, sizes)
    if a < b:
        return InclusionResult("strict_subset", "first<second", sizes)
    if b < a:
        return InclusionResult("strict_subset", "second<first", sizes)
    return InclusionResult("incomparable", None, sizes)


# Krull-Schmidt at census scale

KS_EXHAUSTIVE_END_DIM = 6


class KrullSchmidtFailure(Exception):
    pass


def _power(F, m, k):
    out = F.eye(m.shape[0])
    for _ in range(k):
        out = F.mul(out, m)
    return out


def _splitting(r: Rep, phi) -> tuple | None:
    """Fitting decomposition ker phi^N + im phi^N, if both parts are nonzero."""
    F = r.field
    N = r.total_dim
    kers, ims = [], []
    for m in phi:
        mn = _power(F, m, N)
        kers.append(linalg.nullspace(F, mn))
        ims.append(linalg.span(F, mn))
    if all(k.shape[1] == 0 for k in kers) or all(i.shape[1] == 0 for i in ims):
        return None
    return tuple(kers), tuple(ims)


def indecomposable_summands(r: Rep) -> list[Rep]:
    """Split r into indecomposables by Fitting's lemma over F_p.

    A representation is indecomposable iff every endomorphism is nilpotent
    or invertible.  Basis elements of End are tried first; the full algebra
    is enumerated only when it is small.
    """
    if r.total_dim == 0:
        return []
    F = r.field
    basis = hom_basis(r, r)
    if len(basis) == 1:
        return [r]

    def combos():
        yield from basis
        for a, b in itertools.combinations(basis, 2):
            yield tuple(F.add(x, y) for x, y in zip(a, b))
        if len(basis) <= KS_EXHAUSTIVE_END_DIM:
            for coeffs in itertools.product(range(r.field.p), repeat=len(basis)):
                acc = tuple(F.zeros(*m.shape) for m in basis[0])
                for c, e in zip(coeffs, basis):
                    if c:
                        acc = tuple(F.reduce(a + c * m) for a, m in zip(acc, e))
                yield acc

    for phi in combos():
        split = _splitting(r, phi)
        if split is not None:
            a, b = split
            return indecomposable_summands(subrep(r, a)) + indecomposable_summands(subrep(r, b))
    if len(basis) > KS_EXHAUSTIVE_END_DIM:
        raise KrullSchmidtFailure(f"End has dimension {len(basis)}; no splitting element found")
    return [r]


@dataclass(frozen=True)
class FiltrationReport:
    points: int
    orbits: int
    violations: tuple        # (representative index, d_P, d_R, d_I, count_I, count_IR)
    ks_failures: tuple       # representative indices whose decomposition was not certified
    field_sensitive: bool
    notes: tuple


def defect_parts(q: Quiver, summands, delta) -> tuple:
    z = q.zero()
    parts = {"P": z, "R": z, "I": z}
    for s in summands:
        df = defect(q, s.dim, delta)
        key = "P" if df < 0 else "I" if df > 0 else "R"
        parts[key] = tuple(a + b for a, b in zip(parts[key], s.dim))
    return parts["P"], parts["R"], parts["I"]


def count_subreps(r: Rep, sub_dims) -> int:
    return sum(1 for sub in graded_subspaces(r.field, r.dim, sub_dims) if is_subrep(r, sub))


def filtration_uniqueness(q: Quiver, d, p: int, budget: int = DEFAULT_BUDGET) -> FiltrationReport:
    """Check that every point has one subrepresentation of dim d_I and one of dim d_I + d_R.

    Both the decomposition type and the subrepresentation counts are
    isomorphism invariants, so one representative per orbit suffices.
    """
    c = classify(q)
    if c.kind != "Affine":
        raise UnsupportedInputError(f"filtration check needs an acyclic affine quiver, got {c.kind}")
    census = orbit_census(q, d, p, budget)
    violations, failures = [], []
    for orb in census.orbits:
        r = orb.representative
        try:
            summands = indecomposable_summands(r)
        except KrullSchmidtFailure:
            failures.append(orb.index)
            continue
        dP, dR, dI = defect_parts(q, summands, c.delta)
        dIR = tuple(a + b for a, b in zip(dI, dR))
        nI, nIR = count_subreps(r, dI), count_subreps(r, dIR)
        if nI != 1 or nIR != 1:
            violations.append((orb.index, dP, dR, dI, nI, nIR))
    notes = (
        "over a small field the homogeneous tubes are parametrized by few points, so regular parts are field sensitive",
        f"{census.count} orbits checked through one representative each",
    )
    return FiltrationReport(census.total_points, census.count, tuple(violations), tuple(failures), True, notes)


# batched linear algebra for whole point sets


def batch_rank(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks over F_p of a stack of matrices, shape (M, r, c)."""
    a = np.array(mats, dtype=np.int64) % p
    M, r, c = a.shape
    rank = np.zeros(M, dtype=np.int64)
    if r == 0 or c == 0:
        return rank
    inv = np.array([0] + [pow(v, p - 2, p) for v in range(1, p)], dtype=np.int64)
    rows = np.arange(r)
    batch = np.arange(M)
    for col in range(c):
        # pivot: first row at or below the current rank with a nonzero entry
        cand = (a[:, :, col] != 0) & (rows[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        piv = np.argmax(cand, axis=1)
        sel = batch[has & (rank < r)]
        if not len(sel):
            continue
        pr, tr = piv[sel], rank[sel]
        # swap pivot row into position
        prow = a[sel, pr, :].copy()
        a[sel, pr, :] = a[sel, tr, :]
        prow = (prow * inv[prow[:, col]][:, None]) % p
        a[sel, tr, :] = prow
        factors = a[sel, :, col].copy()
        factors[np.arange(len(sel)), tr] = 0
        a[sel] = (a[sel] - factors[:, :, None] * prow[:, None, :]) % p
        rank[sel] += 1
    return rank


def batch_rank_profiles(space: PointSpace, indices) -> np.ndarray:
    """Rank profiles table[k][i][l] of cyclic-quiver points given by index."""
    q = space.q
    if not q.is_cyclic_orientation():
        raise UnsupportedInputError("rank profiles need the cyclic quiver with arrows i -> i+1")
    n, p = q.n, space.p
    idx = np.asarray(indices, dtype=np.int64)
    digits = (idx[:, None] // space.weights[None, :]) % p if space.D else np.zeros((len(idx), 0), np.int64)
    by_source = {s: m for (s, _), m in zip(q.edges, space.split(digits))}
    L = sum(space.d)
    out = np.zeros((len(idx), n, L + 1), dtype=np.int64)
    for i in range(n):
        comp = np.broadcast_to(np.eye(space.d[i], dtype=np.int64), (len(idx), space.d[i], space.d[i]))
        out[:, i, 0] = space.d[i]
        for l in range(1, L + 1):
            comp = np.einsum("mab,mbc->mac", by_source[(i + l - 1) % n], comp) % p
            out[:, i, l] = batch_rank(comp, p)
    return out
