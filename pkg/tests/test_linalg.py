import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quivernil import linalg
from quivernil.linalg import ExactField

from oracles import gaussian_binomial, rank_exact

Q = ExactField.rationals()
F3 = ExactField.prime(3)


def test_prime_field_rejects_composites():
    with pytest.raises(ValueError):
        ExactField.prime(4)


@settings(max_examples=60)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 10 ** 6), st.sampled_from([0, 2, 3, 5]))
def test_rank_matches_oracle(m, n, seed, p):
    F = ExactField(p)
    rng = random.Random(seed)
    a = F.random_matrix(rng, m, n, height=2)
    if rng.random() < 0.5 and m > 1:
        a[-1] = a[0]
    rows = [[Fraction(x) if not p else int(x) for x in row] for row in a.tolist()]
    assert linalg.rank(F, a) == rank_exact(rows, p)
    ns = linalg.nullspace(F, a)
    assert ns.shape[1] == n - linalg.rank(F, a)
    assert F.is_zero(F.mul(a, ns))


def test_inverse_and_charpoly():
    a = Q.array([[2, 1], [1, 1]], shape=(2, 2))
    assert (Q.mul(a, linalg.inverse(Q, a)) == Q.eye(2)).all()
    assert linalg.charpoly(Q, Q.array([[2, 0], [0, 3]], shape=(2, 2))) == [1, -5, 6]


def test_subspace_counts_are_gaussian_binomials():
    for n in range(4):
        for k in range(n + 1):
            assert sum(1 for _ in linalg.subspaces(F3, n, k)) == gaussian_binomial(n, k, 3)


def test_complement_and_coordinates():
    b = F3.array([[1], [2], [0]], shape=(3, 1))
    c = linalg.complement(F3, b)
    assert c.shape[1] == 2 and linalg.rank(F3, linalg.hstack(F3, 3, [b, c])) == 3
    v = F3.mul(b, F3.array([[2]], shape=(1, 1)))
    assert (linalg.coordinates(F3, b, v) == np.array([[2]])).all()
