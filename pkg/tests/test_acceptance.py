"""End-to-end acceptance checks, one test per criterion.

Each test prints a PASS/FAIL line (with elapsed time) and then asserts.
"""

import itertools
import random
import time

import numpy as np
import pytest

from quivernil import affine, census, core, cyclic, flags, linalg, reps
from quivernil.linalg import ExactField
from quivernil.reps import DoubledPoint, NilFlavor, Rep

from oracles import root_multiset_count


@pytest.fixture
def report(capsys):
    def emit(n, ok, started, limit, detail=""):
        elapsed = time.perf_counter() - started
        passed = ok and elapsed < limit
        with capsys.disabled():
            status = "PASS" if passed else "FAIL"
            print(f"\n{status} criterion {n}: {detail} ({elapsed:.2f}s, limit {limit}s)")
        assert ok, detail
        assert elapsed < limit, f"too slow: {elapsed:.1f}s"
    return emit


def test_criterion_01_tube_periods(report):
    t0 = time.perf_counter()
    cases = [(core.affine_d(4), (2, 2, 2)), (core.affine_e(6), (2, 3, 3)), (core.kronecker(), ())]
    for o in ("++-", "+--", "-+-"):
        cases.append((core.affine_a(o), (o.count("+"), o.count("-"))))
    ok = True
    for q, want in cases:
        c = core.classify(q)
        ok &= c.kind == "Affine" and tuple(c.tube_periods) == want
        tubes = affine.regular_simples(q)
        ok &= sorted(t.period for t in tubes) == sorted(p for p in want if p > 1)
        for t in tubes:
            ok &= tuple(map(sum, zip(*t.simple_regular_dims))) == c.delta
            ok &= all(core.coxeter(q, e) == t.simple_regular_dims[(k + 1) % t.period]
                      for k, e in enumerate(t.simple_regular_dims))
    report(1, ok, t0, 1, f"{len(cases)} affine quivers")


def _random_balanced(rng, r, top):
    # sum of permutation matrices keeps row and column sums aligned
    z = [[0] * r for _ in range(r)]
    for _ in range(rng.randint(1, top)):
        perm = list(range(r))
        rng.shuffle(perm)
        if any(z[p][perm[p]] >= top for p in range(r)):
            break
        for p in range(r):
            z[p][perm[p]] += 1
    return z


def test_criterion_02_relative_position_identity(report):
    t0 = time.perf_counter()
    checked = 0
    ok = True
    for k in range(1, 6):
        for ft in flags.enumerate_flag_types((k,)):
            for z in flags.theta(ft):
                ok &= flags.identity_check([[z.z[p][t][0] for t in range(len(ft))] for p in range(len(ft))])
                checked += 1
    rng = random.Random(2024)
    for _ in range(1000):
        z = _random_balanced(rng, 5, 9)
        assert all(v <= 9 for row in z for v in row)
        ok &= flags.identity_check(z)
        checked += 1
    report(2, ok, t0, 10, f"{checked} arrays")


def test_criterion_03_smallness(report):
    t0 = time.perf_counter()
    ok = True
    checked = 0
    for g in (2, 3):
        q = core.loop_quiver(g)
        for k in range(1, 5):
            for ft in flags.enumerate_flag_types((k,)):
                for nil in (True, False):
                    ok &= flags.smallness_report(q, ft, nil).is_small_criterion
                    for z in flags.theta(ft):
                        if z.is_diagonal():
                            continue
                        c = flags.incidence_dims(q, ft, z, nil).codim
                        ok &= c > 0 and c % (g - 1) == 0
                        checked += 1
                ok &= flags.tilde_dim(q, ft, nil=True) % (g + 1) == 0
    report(3, ok, t0, 30, f"{checked} off-diagonal positions")


def test_criterion_04_resolution(report):
    t0 = time.perf_counter()
    ok = True
    cases = points = 0
    for n in (2, 3):
        q = core.cyclic_quiver(n)
        for d in itertools.product(range(7), repeat=n):
            if sum(d) > 6:
                continue
            for m in cyclic.enumerate_orbits(n, d, aperiodic_only=True):
                if m.is_empty():
                    continue
                ft = cyclic.resolution_flag_type(m)
                ok &= cyclic.is_discrete(ft) and tuple(map(sum, zip(*ft))) == d
                x = cyclic.build_nilpotent(m, ExactField.prime(2))
                ok &= reps.stable_flags(x, ft, strict=True) == 1
                bound = np.array(reps.rank_profile(x))
                img = census.image_of_pi(q, ft, "nil", 2)
                prof = census.batch_rank_profiles(img.space, img.image)
                ok &= bool((prof <= bound[None]).all())
                # the points of the orbit are those with the full rank profile
                top = (prof == bound[None]).all(axis=(1, 2))
                ok &= bool(top.any()) and bool((img.counts[img.image[top]] == 1).all())
                cases += 1
                points += len(img.image)
    report(4, ok, t0, 120, f"{cases} aperiodic types, {points} image points")


def test_criterion_05_pair_bijection(report):
    t0 = time.perf_counter()
    ok = True
    checked = 0
    for n in (1, 2, 3):
        for d in itertools.product(range(4), repeat=n):
            total = len(cyclic.enumerate_orbits(n, d))
            pairs = 0
            for k in range(min(d) + 1):
                N = cyclic.enumerate_orbits(n, tuple(a - k for a in d), aperiodic_only=True)
                pairs += len(N) * len(list(cyclic.partitions(k)))
            ok &= total == pairs
            ok &= len(affine.lusztig_labels(core.cyclic_quiver(n) if n > 1 else core.loop_quiver(1), d,
                                            "plain")) == total
            checked += 1
    report(5, ok, t0, 30, f"{checked} dimension vectors")


def test_criterion_06_gabriel_census(report):
    t0 = time.perf_counter()
    ok = True
    checked = 0
    for q in (core.type_a(2), core.type_a(3)):
        for d in itertools.product(range(3), repeat=q.n):
            want = root_multiset_count(q.edges, q.n, d)
            for p in (2, 3):
                ok &= census.orbit_census(q, d, p).count == want
                checked += 1
    report(6, ok, t0, 60, f"{checked} censuses")


def _random_invertible(F, rng, k):
    while True:
        a = F.random_matrix(rng, k, k)
        if k == 0 or linalg.is_invertible(F, a):
            return a


def _biased_point(q, d, F, rng):
    """Half uniform; half built to admit a nil flag, then maybe perturbed."""
    qop = core.opposite(q)
    if rng.random() < 0.5:
        return DoubledPoint(Rep.random(q, d, F, rng), Rep.random(qop, d, F, rng))
    # basis vectors in a random total order; x strictly lowers it, x* does not raise it
    slots = [(i, k) for i in range(q.n) for k in range(d[i])]
    rng.shuffle(slots)
    pos = {s: j for j, s in enumerate(slots)}

    def mats(edges, strict):
        out = []
        for s, t in edges:
            m = [[0] * d[s] for _ in range(d[t])]
            for a in range(d[t]):
                for b in range(d[s]):
                    lower = pos[(t, a)] < pos[(s, b)] if strict else pos[(t, a)] <= pos[(s, b)]
                    if lower:
                        m[a][b] = rng.randrange(F.p)
            out.append(m)
        return out

    x = Rep(q, d, F, mats(q.edges, True))
    xs = Rep(qop, d, F, mats(qop.edges, False))
    if rng.random() < 0.3:
        k = rng.randrange(len(q.edges))
        s, t = q.edges[k]
        if d[s] and d[t]:
            m = [row[:] for row in x.mats[k].tolist()]
            m[rng.randrange(d[t])][rng.randrange(d[s])] = rng.randrange(F.p)
            x = Rep(q, d, F, x.mats[:k] + (m,) + x.mats[k + 1:])
    g = [_random_invertible(F, rng, k) for k in d]
    return DoubledPoint(x.transported(g), xs.transported(g))


def test_criterion_07_duality(report):
    t0 = time.perf_counter()
    F = ExactField.prime(5)
    rng = random.Random(7)
    mismatches = undecided = present = 0
    for q, dims in ((core.loop_quiver(2), [(1,), (2,), (3,), (4,)]),
                    (core.cyclic_quiver(2), [(1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3)])):
        for _ in range(500):
            p = _biased_point(q, rng.choice(dims), F, rng)
            a = reps.find_flag(p, NilFlavor.NIL, trust_greedy=False)
            b = reps.find_flag(p.swapped(), NilFlavor.PLAIN, trust_greedy=False)
            if not (a.decided and b.decided):
                undecided += 1
            elif a.present != b.present:
                mismatches += 1
            present += a.present
    ok = mismatches == 0 and undecided == 0 and present > 0
    report(7, ok, t0, 60, f"1000 points, {present} with a nil flag, {mismatches} mismatches, {undecided} undecided")


def test_criterion_08_conormal_points(report):
    t0 = time.perf_counter()
    rng = random.Random(8)
    pool = [m for n in (1, 2, 3) for d in itertools.product(range(4), repeat=n) if 0 < sum(d) <= 6
            for m in cyclic.enumerate_orbits(n, d)]
    ok = True
    for _ in range(100):
        p = cyclic.conormal_point(rng.choice(pool), rng)
        ok &= p.field == ExactField.rationals() and reps.is_moment_zero(p)
        ok &= reps.find_flag(p, NilFlavor.PLAIN).present
    report(8, ok, t0, 30, f"100 points from {len(pool)} orbit types")


def test_criterion_09_filtration(report):
    t0 = time.perf_counter()
    ok = True
    seen = []
    for d in ((1, 1), (2, 1), (2, 2)):
        r = census.filtration_uniqueness(core.kronecker(), d, 2)
        ok &= not r.violations and not r.ks_failures
        seen.append(r.orbits)
    report(9, ok, t0, 120, f"orbits checked {seen}")


def test_criterion_10_component_label_counts(report):
    t0 = time.perf_counter()
    ok = True
    checked = 0
    cases = [(q, d, None) for q in (core.type_a(2), core.type_a(3)) for d in itertools.product(range(3), repeat=q.n)]
    cases += [(core.cyclic_quiver(2), d, fl) for d in itertools.product(range(3), repeat=2)
              for fl in ("nil", "plain", "nil1", "one")]
    cases += [(core.kronecker(), d, None) for d in ((1, 1), (2, 2))]
    for q, d, fl in cases:
        kw = {} if fl is None else {"flavor": fl}
        ok &= len(affine.lusztig_labels(q, d, **kw)) == len(affine.components(q, d, **kw))
        checked += 1
    report(10, ok, t0, 60, f"{checked} cases")
