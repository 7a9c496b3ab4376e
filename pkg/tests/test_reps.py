import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quivernil import core, cyclic, reps
from quivernil.errors import DimensionVectorError, ShapeError
from quivernil.linalg import ExactField
from quivernil.reps import DoubledPoint, NilFlavor, Rep

from oracles import apply, commutator_2x2, flag_variety_size, in_line, lines

Q = ExactField.rationals()
F2 = ExactField.prime(2)
F3 = ExactField.prime(3)
F5 = ExactField.prime(5)
J2 = [[0, 1], [0, 0]]


def point(q, d, F, x, xstar):
    return DoubledPoint.from_mats(q, d, F, x, xstar)


def test_rep_shape_checks():
    q = core.type_a(2)
    with pytest.raises(ShapeError):
        Rep(q, (1, 2), Q, ([[1, 1]],))
    with pytest.raises(ShapeError):
        Rep(q, (1, 1), Q, ())
    with pytest.raises(DimensionVectorError):
        Rep.zero(q, (1, -1), Q)


def test_moment_map_examples():
    s1 = core.loop_quiver(1)
    p = point(s1, (2,), Q, [J2], [[[0, 0], [0, 0]]])
    assert reps.is_moment_zero(p)
    assert reps.is_moment_zero(point(s1, (2,), Q, [J2], [J2]))
    jt = [[0, 0], [1, 0]]
    mu = reps.moment_map(point(s1, (2,), Q, [J2], [jt]))
    assert mu[0].tolist() == commutator_2x2(J2, jt)
    assert mu[0].tolist() == [[1, 0], [0, -1]]


def test_moment_map_on_a_tree():
    # A_2: mu_1 = -x* x at the source, mu_2 = x x* at the target
    q = core.type_a(2)
    p = point(q, (1, 1), Q, [[[2]]], [[[3]]])
    mu = reps.moment_map(p)
    assert mu[0].tolist() == [[-6]] and mu[1].tolist() == [[6]]


def test_is_nilpotent_examples():
    s1 = core.loop_quiver(1)
    assert reps.is_nilpotent(Rep.zero(core.kronecker(), (2, 3), Q))
    assert not reps.is_nilpotent(Rep(s1, (2,), Q, ([[1, 0], [0, 1]],)))
    c2 = core.cyclic_quiver(2)
    assert reps.is_nilpotent(Rep(c2, (1, 1), Q, ([[1]], [[0]])))
    assert not reps.is_nilpotent(Rep(c2, (1, 1), Q, ([[1]], [[2]])))
    # the fixed-point space of two loops x1 = J, x2 = J^T is not nilpotent (x1 x2 has rank 1)
    s2 = core.loop_quiver(2)
    assert not reps.is_nilpotent(Rep(s2, (2,), Q, (J2, [[0, 0], [1, 0]])))
    assert reps.is_nilpotent(Rep(s2, (2,), Q, (J2, [[0, 3], [0, 0]])))


def test_rank_profile_examples():
    m = cyclic.MultiPartition.from_mapping(2, {0: [2]})
    prof = reps.rank_profile(cyclic.build_nilpotent(m))
    assert prof[0][1] == 1 and prof[0][2] == 0
    zero = reps.rank_profile(Rep.zero(core.cyclic_quiver(3), (1, 2, 0), Q))
    assert all(v == 0 for row in zero for v in row[1:])
    ident = reps.rank_profile(Rep(core.loop_quiver(1), (3,), Q, ([[1, 0, 0], [0, 1, 0], [0, 0, 1]],)))
    assert ident == [[3, 3, 3, 3]]


# flags


def test_nilpotent_x_with_zero_xstar_is_nil():
    s1 = core.loop_quiver(1)
    p = point(s1, (3,), Q, [[[0, 1, 0], [0, 0, 1], [0, 0, 0]]], [[[0] * 3] * 3])
    res = reps.find_flag(p, NilFlavor.NIL)
    assert res.present and res.method == "greedy"
    assert reps.check_flag(p, NilFlavor.NIL, res.flag)
    # iterated kernels: one line at each step
    assert res.flag.flag_type() == ((1,), (1,), (1,))


@pytest.mark.parametrize("flavor", list(NilFlavor))
def test_identity_pair_has_no_flag(flavor):
    p = point(core.loop_quiver(1), (2,), F3, [[[1, 0], [0, 1]]], [[[1, 0], [0, 1]]])
    res = reps.find_flag(p, flavor, cross_check=True)
    assert res.status == "absent"
    rep = reps.lambda_member(p, flavor)
    assert rep.moment_zero and rep.member is False


def _nil_one_oracle(x_mats, y_mats, p):
    """Discrete nil flag on one vertex of dim 2: a line L with x(L)=0, x(V)⊆L, y(L)⊆L, or x = 0."""
    if all(all(v == 0 for row in m for v in row) for m in x_mats):
        return True
    for v in lines(2, p):
        ok = all(apply(m, v, p) == (0, 0) for m in x_mats)
        ok = ok and all(in_line(apply(m, e, p), v, p) for m in x_mats for e in ((1, 0), (0, 1)))
        ok = ok and all(in_line(apply(m, v, p), v, p) for m in y_mats)
        if ok:
            return True
    return False


def test_s2_nil_one_example():
    s2 = core.loop_quiver(2)
    zero = [[0, 0], [0, 0]]
    p = point(s2, (2,), F2, [J2, J2], [zero, zero])
    res = reps.find_flag(p, NilFlavor.NIL_ONE, cross_check=True)
    assert res.present and res.flag.is_discrete
    assert _nil_one_oracle([J2, J2], [zero, zero], 2)


def test_nil_one_against_line_oracle():
    s2 = core.loop_quiver(2)
    mats = [tuple(tuple(m[i * 2:i * 2 + 2]) for i in range(2)) for m in itertools.product(range(2), repeat=4)]
    rng = random.Random(7)
    for _ in range(300):
        x = [rng.choice(mats) for _ in range(2)]
        y = [rng.choice(mats) for _ in range(2)]
        p = point(s2, (2,), F2, x, y)
        expect = _nil_one_oracle(x, y, 2)
        assert reps.find_flag(p, NilFlavor.NIL_ONE, cross_check=True).present == expect
        assert reps.find_flag(p.swapped(), NilFlavor.ONE, cross_check=True).present == expect


def test_lambda_member_requires_moment_zero():
    s1 = core.loop_quiver(1)
    p = point(s1, (2,), Q, [J2], [[[0, 0], [1, 0]]])
    rep = reps.lambda_member(p, "nil")
    assert rep.member is False and not rep.moment_zero


def test_undecided_is_a_value():
    # a nilpotent-free point over Q, above any exhaustive cap, with greedy trust off
    s1 = core.loop_quiver(1)
    p = point(s1, (2,), Q, [[[1, 0], [0, 2]]], [[[0, 0], [0, 0]]])
    res = reps.find_flag(p, "nil", trust_greedy=False)
    assert res.status == "undecided" and not res.decided
    assert reps.lambda_member(p, "nil", trust_greedy=False).member is None


def test_conormal_point_on_cycle_is_plain_member():
    rng = random.Random(1)
    m = cyclic.MultiPartition.from_mapping(3, {0: [2], 1: [1]})
    p = cyclic.conormal_point(m, rng)
    rep = reps.lambda_member(p, NilFlavor.PLAIN)
    assert rep.member is True and reps.is_moment_zero(p)


@pytest.mark.parametrize("q, d", [(core.type_a(3), (1, 1, 1)), (core.kronecker(), (1, 1))])
def test_acyclic_flavors_agree(q, d):
    rng = random.Random(11)
    for _ in range(40):
        x = Rep.random(q, d, F3, rng)
        y = Rep.random(core.opposite(q), d, F3, rng)
        p = DoubledPoint(x, y)
        answers = {f: reps.find_flag(p, f).present for f in NilFlavor}
        assert len(set(answers.values())) == 1


def test_one_loop_flavors_pair_up():
    q = core.quiver([1, 2], [(1, 1), (1, 2)])
    rng = random.Random(5)
    for _ in range(60):
        p = DoubledPoint(Rep.random(q, (2, 1), F2, rng), Rep.random(core.opposite(q), (2, 1), F2, rng))
        assert reps.find_flag(p, "nil").present == reps.find_flag(p, "nil1").present
        assert reps.find_flag(p, "plain").present == reps.find_flag(p, "one").present


points_s2 = st.lists(st.integers(0, 1), min_size=16, max_size=16)


@settings(max_examples=150, deadline=None)
@given(points_s2, st.sampled_from(list(NilFlavor)))
def test_greedy_matches_exhaustive(bits, flavor):
    s2 = core.loop_quiver(2)
    mats = [[bits[4 * k:4 * k + 2], bits[4 * k + 2:4 * k + 4]] for k in range(4)]
    p = point(s2, (2,), F2, mats[:2], mats[2:])
    greedy = reps.greedy_flag(p, flavor)
    exhaustive = reps.exhaustive_flag(p, flavor)
    assert (greedy is None) == (exhaustive is None)
    if exhaustive is not None:
        assert reps.check_flag(p, flavor, exhaustive)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_duality_random_cyclic(seed):
    rng = random.Random(seed)
    q = core.cyclic_quiver(2)
    p = DoubledPoint(Rep.random(q, (1, 2), F2, rng), Rep.random(core.opposite(q), (1, 2), F2, rng))
    for fl in NilFlavor:
        a = reps.find_flag(p, fl, cross_check=True)
        b = reps.find_flag(p.swapped(), fl.dual, cross_check=True)
        assert a.present == b.present


# hom spaces


def test_hom_examples():
    q = core.type_a(2)
    r = Rep.zero(q, (1, 1), Q)
    assert reps.end_dim(r) == 2 and reps.orbit_dim(r) == 0
    kr = core.kronecker()
    p_simple = Rep.zero(kr, (0, 1), Q)
    i_simple = Rep.zero(kr, (1, 0), Q)
    assert reps.hom_dim(i_simple, p_simple) == 0
    assert reps.hom_dim(p_simple, i_simple) == 0
    gen = Rep(kr, (1, 1), Q, ([[1]], [[0]]))
    assert reps.hom_dim(gen, gen) >= 1
    assert reps.hom_dim(p_simple, gen) == 1  # the socle
    assert reps.hom_dim(gen, p_simple) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_orbit_plus_end_is_group_dimension(seed):
    rng = random.Random(seed)
    q = core.kronecker()
    d = (rng.randint(0, 2), rng.randint(0, 2))
    r = Rep.random(q, d, F2, rng)
    assert reps.orbit_dim(r) + reps.end_dim(r) == sum(x * x for x in d)
    for f in reps.hom_basis(r, r):
        for (s, t), m in zip(q.edges, r.mats):
            assert (F2.mul(f[t], m) == F2.mul(m, f[s])).all()


# stable flags


@pytest.mark.parametrize("ft", [((1,), (1,)), ((2,), (1,)), ((1,), (1,), (1,))])
def test_zero_rep_counts_flags(ft):
    d = (sum(s[0] for s in ft),)
    r = Rep.zero(core.loop_quiver(1), d, F2)
    assert reps.stable_flags(r, ft, strict=False) == flag_variety_size(ft, 2)


def test_zero_rep_counts_graded_flags():
    ft = ((1, 0), (0, 1), (1, 1))
    r = Rep.zero(core.type_a(2), (2, 2), F3)
    # x = 0 is never an issue in plain mode
    assert reps.stable_flags(r, ft, strict=False) == flag_variety_size(ft, 3)


def test_jordan_block_has_unique_strict_flag():
    r = Rep(core.loop_quiver(1), (2,), F2, (J2,))
    assert reps.stable_flags(r, ((1,), (1,)), strict=True) == 1
    # oracle: among the three lines only ker J works
    good = [v for v in lines(2, 2) if apply(J2, v, 2) == (0, 0) and all(
        in_line(apply(J2, e, 2), v, 2) for e in ((1, 0), (0, 1)))]
    assert good == [(1, 0)]


def test_invertible_loop_has_no_strict_flag():
    r = Rep(core.loop_quiver(1), (2,), F3, ([[1, 1], [0, 1]],))
    assert reps.stable_flags(r, ((1,), (1,)), strict=True) == 0
    assert reps.stable_flags(r, ((1,), (1,)), strict=False) == 1


def test_stable_flags_dimension_mismatch():
    with pytest.raises(DimensionVectorError):
        reps.stable_flags(Rep.zero(core.loop_quiver(1), (2,), F2), ((1,),), strict=False)
