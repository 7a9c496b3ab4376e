import itertools

import numpy as np
import pytest

from quivernil import census, core, cyclic, flags, linalg, reps
from quivernil.errors import BudgetExceeded, UnsupportedInputError
from quivernil.linalg import ExactField
from quivernil.reps import Rep

from oracles import apply, in_line, lines, orbit_count_full_group

F2 = ExactField.prime(2)
S1, S2 = core.loop_quiver(1), core.loop_quiver(2)


def test_point_space_encoding_round_trip():
    space = census.PointSpace(core.kronecker(), (2, 1), 3)
    assert space.size == 3 ** 4
    pts = space.all_points()
    assert (space.encode(pts) == np.arange(space.size)).all()
    r = space.rep(5)
    flat = np.concatenate([m.reshape(-1) for m in r.mats]).astype(np.int64)
    assert int(space.encode(flat[None])[0]) == 5


def test_orbit_census_examples():
    rep = census.orbit_census(core.type_a(2), (1, 1), 2)
    assert rep.count == 2 and sorted(o.size for o in rep.orbits) == [1, 1]
    assert {o.index for o in rep.orbits} == {0, 1}
    jordan = census.orbit_census(S1, (2,), 2)
    assert jordan.count == 6 == orbit_count_full_group(S1.edges, (2,), 2)
    assert census.orbit_census(core.kronecker(), (0, 0), 5).count == 1


@pytest.mark.parametrize("q, d, p", [(S1, (2,), 3), (core.kronecker(), (1, 2), 2), (core.type_a(3), (1, 2, 1), 2),
                                     (core.cyclic_quiver(2), (1, 2), 2), (S2, (2,), 2)])
def test_orbit_counts_against_full_group(q, d, p):
    rep = census.orbit_census(q, d, p)
    assert rep.count == orbit_count_full_group(q.edges, d, p)
    assert sum(o.size for o in rep.orbits) == rep.total_points == p ** core.dim_rep_space(q, d)


def test_orbit_sizes_from_stabilizers():
    # |orbit| = |G| / |Aut|, and over F_2 with Aut = units of End this is checked for A_2 (2, 2)
    q = core.type_a(2)
    rep = census.orbit_census(q, (2, 2), 2)
    gl2 = 6
    for o in rep.orbits:
        end = reps.hom_basis(o.representative, o.representative)
        units = 0
        for coeffs in itertools.product(range(2), repeat=len(end)):
            mats = [sum((c * e[i] for c, e in zip(coeffs, end)), start=np.zeros_like(end[0][i])) % 2
                    for i in range(q.n)]
            if all(round(abs(np.linalg.det(m.astype(float)))) % 2 == 1 for m in mats):
                units += 1
        assert o.size * units == gl2 * gl2


def test_orbit_representatives_are_deterministic():
    a = census.orbit_census(core.kronecker(), (2, 1), 2)
    b = census.orbit_census(core.kronecker(), (2, 1), 2)
    assert [o.index for o in a.orbits] == [o.index for o in b.orbits] == sorted(o.index for o in a.orbits)


def test_budget_refusal():
    with pytest.raises(BudgetExceeded) as info:
        census.orbit_census(S2, (3,), 2, budget=1000)
    assert info.value.required == 2 ** 18 and info.value.budget == 1000


def test_nilpotent_orbits_match_multipartitions():
    for n, d in [(1, (2,)), (1, (3,)), (2, (1, 1)), (2, (2, 1)), (2, (2, 2))]:
        q = core.cyclic_quiver(n) if n > 1 else S1
        rep = census.orbit_census(q, d, 2)
        nil = [o for o in rep.orbits if reps.is_nilpotent(o.representative)]
        assert len(nil) == len(cyclic.enumerate_orbits(n, d))
        types = {cyclic.decompose_nilpotent(o.representative) for o in nil}
        assert types == set(cyclic.enumerate_orbits(n, d))


def _strictly_triangular_pair(x1, x2):
    return any(all(apply(m, v, 2) == (0, 0) for m in (x1, x2)) and all(
        in_line(apply(m, e, 2), v, 2) for m in (x1, x2) for e in ((1, 0), (0, 1))) for v in lines(2, 2))


def test_pi_image_strict_pairs():
    img = census.image_of_pi(S2, ((1,), (1,)), "nil", 2)
    space = img.space
    expect = set()
    for k in range(space.size):
        x1, x2 = (m.tolist() for m in space.rep(k).mats)
        if _strictly_triangular_pair(x1, x2):
            expect.add(k)
    assert img.image_set() == expect
    assert len(expect) == 10
    assert img.histogram == {0: 246, 1: 9, 3: 1}
    assert img.histogram[1] > len(expect) / 2


def test_pi_image_single_step_plain():
    img = census.image_of_pi(S2, ((2,),), "plain", 2)
    assert len(img.image) == img.space.size and img.histogram == {1: img.space.size}


def test_pi_image_excludes_invertible():
    img = census.image_of_pi(S1, ((1,), (1,)), "nil", 3)
    space = img.space
    for k in img.image:
        assert reps.is_nilpotent(space.rep(int(k)))
    ident = [[1, 0], [0, 1]]
    k = int(space.encode(np.array([[1, 0, 0, 1]]))[0])
    assert space.rep(k).mats[0].tolist() == ident and img.counts[k] == 0


@pytest.mark.parametrize("q, ft, flavor", [
    (S2, ((1,), (1,)), "plain"), (core.cyclic_quiver(2), ((1, 0), (0, 1)), "nil"),
    (core.kronecker(), ((0, 1), (1, 1)), "plain"), (core.cyclic_quiver(3), ((0, 1, 0), (1, 0, 1)), "nil"),
    (S1, ((1,), (2,)), "nil"),
])
def test_pi_image_matches_pointwise_oracle(q, ft, flavor):
    fast = census.image_of_pi(q, ft, flavor, 2).counts
    slow = census.image_of_pi_pointwise(q, ft, flavor, 2)
    assert (fast == slow).all()


def test_inclusion_examples():
    r = census.inclusion_check(S2, ((1,), (1,)), ((1,), (1,)), "nil", 2)
    assert r.relation == "equal"
    r = census.inclusion_check(S2, ((2,),), ((1,), (1,)), "nil", 2)
    assert r.relation == "strict_subset" and r.direction == "first<second" and r.sizes == (1, 10)
    c2 = core.cyclic_quiver(2)
    r = census.inclusion_check(c2, ((1, 0), (0, 1)), ((0, 1), (1, 0)), "nil", 2)
    assert r.relation == "incomparable"
    assert census.inclusion_check(c2, ((1, 0),), ((0, 1),), "nil", 2).relation == "incomparable"


def test_refining_grows_the_strict_image():
    for k in (2, 3):
        for ft in flags.enumerate_flag_types((k,)):
            fine = census.image_of_pi(S2, ft, "nil", 2).image_set()
            for j in range(len(ft) - 1):
                merged = ft[:j] + ((ft[j][0] + ft[j + 1][0],),) + ft[j + 2:]
                assert census.image_of_pi(S2, merged, "nil", 2).image_set() <= fine


# Krull-Schmidt and filtrations


def test_zero_rep_splits_into_simples():
    r = Rep.zero(core.kronecker(), (2, 2), F2)
    parts = census.indecomposable_summands(r)
    assert sorted(p.dim for p in parts) == [(0, 1), (0, 1), (1, 0), (1, 0)]


def test_summands_of_a_direct_sum():
    q = core.kronecker()
    a = Rep(q, (1, 1), F2, ([[1]], [[0]]))
    b = Rep(q, (1, 2), F2, ([[1], [0]], [[0], [1]]))
    c = Rep(q, (1, 0), F2, (F2.zeros(0, 1), F2.zeros(0, 1)))
    parts = census.indecomposable_summands(reps.direct_sum([a, b, c]))
    assert sorted(p.dim for p in parts) == [(1, 0), (1, 1), (1, 2)]
    assert all(reps.end_dim(p) == 1 for p in parts)


def test_regular_point_has_trivial_filtration():
    q = core.kronecker()
    r = Rep(q, (1, 1), F2, ([[1]], [[1]]))
    parts = census.indecomposable_summands(r)
    delta = (1, 1)
    dP, dR, dI = census.defect_parts(q, parts, delta)
    assert dP == dI == (0, 0) and dR == (1, 1)
    assert census.count_subreps(r, (0, 0)) == 1 and census.count_subreps(r, (1, 1)) == 1


@pytest.mark.parametrize("d, orbits", [((1, 1), 4), ((2, 1), 5)])
def test_filtration_examples(d, orbits):
    rep = census.filtration_uniqueness(core.kronecker(), d, 2)
    assert rep.violations == () and rep.ks_failures == ()
    assert rep.orbits == orbits and rep.field_sensitive


def test_filtration_on_d4():
    rep = census.filtration_uniqueness(core.affine_d(4), (1, 1, 1, 0, 0), 2)
    assert rep.violations == ()


def test_filtration_rejects_non_affine():
    with pytest.raises(UnsupportedInputError):
        census.filtration_uniqueness(core.type_a(2), (1, 1), 2)


def test_batch_rank_matches_scalar_rank():
    rng = np.random.default_rng(3)
    for p in (2, 3, 5):
        mats = rng.integers(0, p, (50, 3, 4))
        mats[::4, 2] = mats[::4, 0]
        ranks = census.batch_rank(mats, p)
        F = ExactField.prime(p)
        assert [int(x) for x in ranks] == [linalg.rank(F, F.array(m.tolist(), (3, 4))) for m in mats]


def test_batch_rank_profiles():
    space = census.PointSpace(core.cyclic_quiver(2), (2, 1), 2)
    idx = np.arange(space.size)
    prof = census.batch_rank_profiles(space, idx)
    for k in range(0, space.size, 3):
        assert prof[k].tolist() == reps.rank_profile(space.rep(k))
