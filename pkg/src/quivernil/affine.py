"""Tubes of affine quivers, stratification types, component and sheaf labels.

Indecomposables of an acyclic affine quiver are preprojective (defect < 0),
regular (defect 0) or preinjective (defect > 0).  Regular modules live in
tubes; the non-homogeneous tubes are equivalent to nilpotent representations
of cyclic quivers, so their content is a multipartition per tube.  The
homogeneous tubes are carried only by eigenvalue data: how many tube points
carry each Jordan type.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field

from . import census, linalg
from .core import (Quiver, classify, coxeter, defect, dim_group, dim_rep_space, opposite,
                   real_roots_below, tits_form)
from .cyclic import (EigenvalueTypes, MultiPartition, build_nilpotent, dim_of, eigenvalue_types,
                     enumerate_cyclic_strata,
                     enumerate_orbits, partitions)
from .errors import InternalConsistencyError, UnsupportedInputError
from .flags import enumerate_flag_types, tilde_dim
from .reps import NilFlavor, Rep, direct_sum, end_dim, orbit_dim


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _scale(k, a):
    return tuple(k * x for x in a)


def _fits(a, bound):
    return all(0 <= x <= b for x, b in zip(a, bound))


@dataclass(frozen=True)
class TubeData:
    index: int
    period: int
    simple_regular_dims: tuple  # Coxeter orbit, in order of application


def regular_simples(q: Quiver) -> list[TubeData]:
    """Dimension vectors of the regular simples in non-homogeneous tubes.

    Candidates are real roots e < delta of defect 0.  A Coxeter orbit of
    quasi-length-l modules sums to l * delta, so the regular simples are
    exactly the orbits summing to delta.
    """
    c = classify(q)
    if c.kind != "Affine":
        raise UnsupportedInputError(f"tubes are defined for affine quivers, got {c.kind}")
    delta = c.delta
    cands = [e for e in real_roots_below(q, delta) if e != delta and defect(q, e, delta) == 0]
    seen, tubes = set(), []
    for e in sorted(cands):
        if e in seen:
            continue
        orbit = [e]
        while True:
            nxt = coxeter(q, orbit[-1])
            if nxt == e:
                break
            orbit.append(nxt)
            if len(orbit) > len(cands):
                raise InternalConsistencyError(f"Coxeter orbit of {e} does not close")
        seen.update(orbit)
        total = tuple(sum(col) for col in zip(*orbit))
        if total == delta:
            tubes.append(orbit)
    tubes.sort(key=lambda o: (len(o), o[0]))
    expected = sorted(p for p in c.tube_periods if p > 1)
    if sorted(len(o) for o in tubes) != expected:
        raise InternalConsistencyError(
            f"{c.label}: Coxeter orbits of sizes {sorted(len(o) for o in tubes)}, expected periods {expected}"
        )
    for o in tubes:
        for e in o:
            if tits_form(q, e) != 1 or defect(q, e, delta) != 0:
                raise InternalConsistencyError(f"regular simple {e} is not a defect-0 real root")
    return [TubeData(k, len(o), tuple(o)) for k, o in enumerate(tubes)]


def tube_dim(tube: TubeData, m: MultiPartition) -> tuple:
    """Dimension in Q of the tube module with multipartition m."""
    d = dim_of(m)
    out = tuple(0 for _ in tube.simple_regular_dims[0])
    for k, mult in enumerate(d):
        out = _add(out, _scale(mult, tube.simple_regular_dims[k]))
    return out


@dataclass(frozen=True, order=True)
class RingelType:
    P: tuple      # preprojective root dims, sorted
    I: tuple      # preinjective root dims, sorted
    N: tuple      # one MultiPartition per non-homogeneous tube
    mu: EigenvalueTypes

    def dim(self, q: Quiver, tubes, delta) -> tuple:
        d = q.zero()
        for e in self.P + self.I:
            d = _add(d, e)
        for tube, m in zip(tubes, self.N):
            d = _add(d, tube_dim(tube, m))
        return _add(d, _scale(self.mu.weight, delta))


def _multisets(atoms: list, bound: tuple) -> list[tuple]:
    """All multisets of atom vectors whose sum stays below ``bound``; returns (items, total)."""
    out = []

    def rec(start, acc, total):
        out.append((tuple(acc), total))
        for k in range(start, len(atoms)):
            nxt = _add(total, atoms[k])
            if _fits(nxt, bound):
                rec(k, acc + [atoms[k]], nxt)

    rec(0, [], tuple(0 for _ in bound))
    return out


def _tube_choices(tubes, bound, aperiodic):
    """Per tube content (tuple of multipartitions) with the total Q-dimension."""
    results = [((), tuple(0 for _ in bound))]
    for tube in tubes:
        nxt = []
        p = tube.period
        for content, total in results:
            room = _sub(bound, total)
            # coefficient vectors a with sum a_k E_k <= room
            limits = [min(r // e if e else r for r, e in zip(room, E) if e) for E in tube.simple_regular_dims]
            for a in itertools.product(*(range(lim + 1) for lim in limits)):
                v = total
                for k, mult in enumerate(a):
                    v = _add(v, _scale(mult, tube.simple_regular_dims[k]))
                if not _fits(v, bound):
                    continue
                for m in enumerate_orbits(p, a, aperiodic_only=aperiodic):
                    nxt.append((content + (m,), v))
        results = nxt
    return results


def _affine_data(q: Quiver):
    c = classify(q)
    if c.kind != "Affine":
        raise UnsupportedInputError(f"stratification types need an acyclic affine quiver, got {c.kind}")
    return c, regular_simples(q)


def enumerate_ringel_types(q: Quiver, d, mu_mode: str = "regular", aperiodic_N: bool = True) -> list[RingelType]:
    d = tuple(int(x) for x in d)
    if any(x < 0 for x in d):
        return []
    c, tubes = _affine_data(q)
    d = q.dim(d)
    delta = c.delta
    roots = [e for e in real_roots_below(q, d) if defect(q, e, delta) != 0]
    out = []
    for items, total in _multisets(roots, d):
        P = tuple(sorted(e for e in items if defect(q, e, delta) < 0))
        I = tuple(sorted(e for e in items if defect(q, e, delta) > 0))
        for content, v in _tube_choices(tubes, _sub(d, total), aperiodic_N):
            rest = _sub(_sub(d, total), v)
            k = rest[0] // delta[0]
            if rest != _scale(k, delta):
                continue
            for mu in eigenvalue_types(k, mu_mode):
                t = RingelType(P, I, content, mu)
                if t.dim(q, tubes, delta) != d:
                    raise AssertionError("type dimension bookkeeping failed")
                out.append(t)
    return sorted(out)


# finite type


def root_multisets(q: Quiver, d) -> list[tuple]:
    """Multisets of positive roots summing to d (each is a sorted tuple)."""
    d = q.dim(d)
    roots = real_roots_below(q, d)
    return sorted(items for items, total in _multisets(roots, d) if total == d)


def generic_indecomposable(q: Quiver, root, seed: int = 0, tries: int = 200) -> Rep:
    """A representation of dimension ``root`` with End = k, found by random search over Q."""
    rng = random.Random(seed)
    F = linalg.Q
    for _ in range(tries):
        r = Rep.random(q, root, F, rng, height=2)
        if end_dim(r) == 1:
            return r
    raise InternalConsistencyError(f"no brick of dimension {root} found")


# labels


@dataclass(frozen=True)
class ComponentLabel:
    kind: str
    label: object
    stratum_dim: int | None
    component_dim: int
    notes: str = ""


@dataclass(frozen=True)
class SheafLabel:
    kind: str  # FiniteOrbit | CyclicAperiodic | CyclicExtended | Affine | GLoop | Jordan
    data: tuple

    def __str__(self):
        return f"{self.kind}{self.data}"


def _support(q: Quiver, flavor: NilFlavor) -> tuple[str, object]:
    c = classify(q)
    if c.kind in ("Finite", "Affine"):
        return c.kind, c
    if c.kind == "JordanLike":
        if not q.is_cyclic_orientation():
            raise UnsupportedInputError("relabel the cycle as 0 -> 1 -> ... -> n-1 -> 0")
        return ("Jordan" if q.n == 1 else "Cyclic"), c
    if q.n == 1 and len(q.arrows) >= 2:
        return "GLoop", c
    raise UnsupportedInputError(f"no component description for a {c.kind} quiver with flavor {flavor.value}")


def _homogeneous_block(n: int, lam, F=linalg.Q) -> Rep:
    """Invertible cycle representation: one Jordan block J_k(c) per part, distinct c."""
    size = sum(lam)
    q_mats = []
    j = F.zeros(size, size)
    pos = 0
    for idx, k in enumerate(lam):
        for a in range(k):
            j[pos + a, pos + a] = F.scalar(idx + 1)
            if a + 1 < k:
                j[pos + a, pos + a + 1] = F.scalar(1)
        pos += k
    from .core import cyclic_quiver
    q = cyclic_quiver(n)
    for s, t in q.edges:
        q_mats.append(j if s == 0 else F.eye(size))
    return Rep(q, (size,) * n, F, tuple(q_mats))


def _cyclic_stratum_dim(N: MultiPartition, lam) -> int:
    parts = [build_nilpotent(N)]
    if lam:
        parts.append(_homogeneous_block(N.n, lam))
    return orbit_dim(direct_sum(parts)) + len(lam)


def components(q: Quiver, d, flavor="nil") -> list[ComponentLabel]:
    flavor = NilFlavor.parse(flavor)
    d = q.dim(d)
    kind, c = _support(q, flavor)
    cdim = dim_rep_space(q, d)
    if kind == "Finite":
        out = []
        for k, items in enumerate(root_multisets(q, d)):
            summands = [generic_indecomposable(q, e, seed=k) for e in items]
            sdim = orbit_dim(direct_sum(summands)) if summands else 0
            out.append(ComponentLabel("FiniteOrbit", items, sdim, cdim, "conormal to a G_d-orbit"))
        return out
    if kind == "Affine":
        types = enumerate_ringel_types(q, d, "regular", aperiodic_N=True)
        return [ComponentLabel("RingelType", t, None, cdim, "mu regular, tube content aperiodic")
                for t in types]
    if kind == "Cyclic":
        n = q.n
        if flavor.discrete:
            return [ComponentLabel("AperiodicOrbit", m, orbit_dim(build_nilpotent(m)), cdim,
                                   "conormal to an aperiodic nilpotent orbit")
                    for m in enumerate_orbits(n, d, aperiodic_only=True)]
        note = "N aperiodic, mu regular"
        if flavor is NilFlavor.NIL:
            note += "; read on the opposite quiver through the swap (x, x*) -> (x*, x)"
        out = []
        for N, mu in enumerate_cyclic_strata(n, d, "regular", aperiodic_N=True):
            out.append(ComponentLabel("CyclicStratum", (N, mu), _cyclic_stratum_dim(N, mu.as_partition()),
                                      cdim, note))
        return out
    if kind == "Jordan":
        (k,) = d
        note = "nilpotent orbit of x" if flavor.x_strict else "mu regular: eigenvalue data of x"
        return [ComponentLabel("JordanPartition", lam, None, cdim, note) for lam in partitions(k)]
    # g-loop quiver: one vertex, g >= 2 loops; every flag-type is discrete
    note = "discrete flag-type; image of the strict incidence map"
    if not flavor.x_strict:
        note += " for the swapped point (the quiver is its own opposite)"
    fts = list(enumerate_flag_types(d, discrete=True))
    dedup = gloop_image_classes(q, d)
    out = []
    for ft in fts:
        extra = "candidate (pre-dedup)" if dedup is None else \
            f"F_2 image class {dedup[ft]} of {len(set(dedup.values()))}"
        out.append(ComponentLabel("FlagType", ft, tilde_dim(q, ft, True), cdim, f"{note}; {extra}"))
    return out


GLOOP_DEDUP_MAX_DIM = 3


def gloop_image_classes(q: Quiver, d, budget: int = census.DEFAULT_BUDGET) -> dict | None:
    """Group compositions of d by their strict-image point sets over F_2.

    Only a proxy for equality over C, and only run when the census fits
    (d <= 3 and the point budget); returns None otherwise.
    """
    (k,) = q.dim(d)
    if k > GLOOP_DEDUP_MAX_DIM or 2 ** dim_rep_space(q, (k,)) > budget:
        return None
    classes, out = {}, {}
    for ft in enumerate_flag_types((k,), discrete=True):
        img = census.image_of_pi(q, ft, "nil", 2, budget).image_set()
        out[ft] = classes.setdefault(img, len(classes))
    return out


def lusztig_labels(q: Quiver, d, flavor="nil") -> list[SheafLabel]:
    flavor = NilFlavor.parse(flavor)
    d = q.dim(d)
    kind, c = _support(q, flavor)
    if kind == "Finite":
        return [SheafLabel("FiniteOrbit", items) for items in root_multisets(q, d)]
    if kind == "Affine":
        out = []
        for t in enumerate_ringel_types(q, d, "regular_semisimple", aperiodic_N=True):
            for lam in partitions(t.mu.weight):
                out.append(SheafLabel("Affine", (t, lam)))
        return out
    if kind == "Cyclic":
        n = q.n
        if flavor.discrete:
            return [SheafLabel("CyclicAperiodic", (m,)) for m in enumerate_orbits(n, d, aperiodic_only=True)]
        out = []
        for N, mu in enumerate_cyclic_strata(n, d, "regular_semisimple", aperiodic_N=True):
            for lam in partitions(mu.weight):
                out.append(SheafLabel("CyclicExtended", (N, mu, lam)))
        return out
    if kind == "Jordan":
        (k,) = d
        if flavor.x_strict:
            # images of the strict incidence maps: one per orbit closure, i.e. per sorted step list
            return [SheafLabel("Jordan", (tuple((p,) for p in lam),)) for lam in partitions(k)]
        return [SheafLabel("Jordan", (lam,)) for lam in partitions(k)]
    return [SheafLabel("GLoop", (ft,)) for ft in enumerate_flag_types(d, discrete=True)]
