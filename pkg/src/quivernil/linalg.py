"""Exact linear algebra over the rationals and prime fields.

Matrices are numpy arrays: ``dtype=object`` holding :class:`fractions.Fraction`
over Q, ``int64`` reduced mod p over F_p.  numpy only supplies storage,
shapes (including zero-width ones) and products; every elimination runs on
Python scalars so results are exact.

Subspaces of k^n are carried as n x r matrices whose columns form a basis.
:func:`span` returns the canonical basis (transpose of the reduced row echelon
form), so two subspaces are equal iff their canonical bases are equal arrays.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

from .errors import ShapeError


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, int(p**0.5) + 1))


@dataclass(frozen=True)
class ExactField:
    """Q when ``p == 0``, otherwise the prime field F_p."""

    p: int = 0

    def __post_init__(self):
        if self.p and not _is_prime(self.p):
            raise ValueError(f"field characteristic {self.p} is not prime")
        if self.p >= 2**31:
            raise ValueError("prime too large for int64 products")

    @classmethod
    def rationals(cls) -> "ExactField":
        return cls(0)

    @classmethod
    def prime(cls, p: int) -> "ExactField":
        return cls(p)

    @property
    def is_finite(self) -> bool:
        return self.p != 0

    @property
    def dtype(self):
        return np.int64 if self.p else object

    def __str__(self):
        return f"F_{self.p}" if self.p else "Q"

    # scalars

    def scalar(self, x):
        if self.p:
            if isinstance(x, Fraction):
                return (x.numerator * pow(x.denominator, -1, self.p)) % self.p
            return int(x) % self.p
        return Fraction(x)

    def inv(self, x):
        if self.p:
            return pow(int(x), -1, self.p)
        return 1 / Fraction(x)

    def elements(self):
        if not self.p:
            raise ValueError("Q has no finite element list")
        return range(self.p)

    def random_scalar(self, rng: random.Random, height: int = 3):
        if self.p:
            return rng.randrange(self.p)
        return Fraction(rng.randint(-height, height))

    # matrices

    def array(self, data, shape=None) -> np.ndarray:
        """Build a matrix from nested lists; ``shape`` is needed for empty data."""
        if shape is not None and 0 in shape:
            return np.zeros(shape, dtype=self.dtype) if self.p else self.zeros(*shape)
        rows = [[self.scalar(v) for v in row] for row in data]
        a = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=self.dtype)
        for i, row in enumerate(rows):
            for j, v in enumerate(row):
                a[i, j] = v
        if shape is not None and a.shape != tuple(shape):
            raise ShapeError(f"matrix has shape {a.shape}, expected {tuple(shape)}")
        return a

    def zeros(self, m: int, n: int) -> np.ndarray:
        if self.p:
            return np.zeros((m, n), dtype=np.int64)
        a = np.empty((m, n), dtype=object)
        a.fill(Fraction(0))
        return a

    def eye(self, n: int) -> np.ndarray:
        a = self.zeros(n, n)
        for i in range(n):
            a[i, i] = self.scalar(1)
        return a

    def reduce(self, a: np.ndarray) -> np.ndarray:
        return a % self.p if self.p else a

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if a.shape[1] == 0:
            return self.zeros(a.shape[0], b.shape[1])
        return self.reduce(a @ b)

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce(a + b)

    def sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce(a - b)

    def neg(self, a: np.ndarray) -> np.ndarray:
        return self.reduce(-a)

    def random_matrix(self, rng: random.Random, m: int, n: int, height: int = 3):
        return self.array(
            [[self.random_scalar(rng, height) for _ in range(n)] for _ in range(m)],
            shape=(m, n),
        )

    def is_zero(self, a: np.ndarray) -> bool:
        return not a.size or not any(v != 0 for v in a.flat)


Q = ExactField(0)


def _rows(F: ExactField, a: np.ndarray) -> list[list]:
    return [[F.scalar(v) for v in row] for row in a.tolist()]


def rref(F: ExactField, a: np.ndarray) -> tuple[list[list], list[int]]:
    """Reduced row echelon form of ``a`` as Python rows, plus pivot columns."""
    m, n = a.shape
    rows = _rows(F, a)
    pivots: list[int] = []
    r = 0
    p = F.p
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = F.inv(rows[r][c])
        if p:
            rows[r] = [(v * inv) % p for v in rows[r]]
        else:
            rows[r] = [v * inv for v in rows[r]]
        pr = rows[r]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                if p:
                    rows[i] = [(u - f * w) % p for u, w in zip(rows[i], pr)]
                else:
                    rows[i] = [u - f * w for u, w in zip(rows[i], pr)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def _bareiss_rank(rows: list[list[int]]) -> int:
    # fraction-free elimination: every intermediate entry is an exact minor
    m = [list(r) for r in rows]
    if not m:
        return 0
    nrows, ncols = len(m), len(m[0])
    prev = 1
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, nrows):
            for j in range(c + 1, ncols):
                m[i][j] = (m[i][j] * m[rank][c] - m[i][c] * m[rank][j]) // prev
            m[i][c] = 0
        prev = m[rank][c]
        rank += 1
        if rank == nrows:
            break
    return rank


def rank(F: ExactField, a: np.ndarray) -> int:
    if 0 in a.shape:
        return 0
    if F.p:
        return len(rref(F, a)[1])
    rows = []
    for row in _rows(F, a):
        den = lcm(*(v.denominator for v in row))
        rows.append([int(v * den) for v in row])
    return _bareiss_rank(rows)


def nullspace(F: ExactField, a: np.ndarray) -> np.ndarray:
    """Basis of {v : a v = 0} as the columns of an n x k matrix."""
    m, n = a.shape
    rows, pivots = rref(F, a) if m else ([], [])
    free = [c for c in range(n) if c not in set(pivots)]
    basis = F.zeros(n, len(free))
    one = F.scalar(1)
    for k, f in enumerate(free):
        basis[f, k] = one
        for r, pc in enumerate(pivots):
            basis[pc, k] = F.scalar(-rows[r][f])
    return basis


def span(F: ExactField, vecs: np.ndarray) -> np.ndarray:
    """Canonical column basis of the column space of ``vecs``."""
    n = vecs.shape[0]
    if vecs.shape[1] == 0:
        return F.zeros(n, 0)
    rows, _ = rref(F, vecs.T)
    if not rows:
        return F.zeros(n, 0)
    return F.array(rows, shape=(len(rows), n)).T


def hstack(F: ExactField, n: int, mats) -> np.ndarray:
    mats = [m for m in mats if m.shape[1]]
    if not mats:
        return F.zeros(n, 0)
    return np.concatenate(mats, axis=1)


def vstack(F: ExactField, n: int, mats) -> np.ndarray:
    mats = [m for m in mats if m.shape[0]]
    if not mats:
        return F.zeros(0, n)
    return np.concatenate(mats, axis=0)


def annihilator(F: ExactField, basis: np.ndarray) -> np.ndarray:
    """Rows c with c . v = 0 for v in the span; their common kernel is the span."""
    return nullspace(F, basis.T).T


def contains(F: ExactField, big: np.ndarray, small: np.ndarray) -> bool:
    if small.shape[1] == 0:
        return True
    return F.is_zero(F.mul(annihilator(F, big), small))


def subspace_sum(F: ExactField, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return span(F, hstack(F, a.shape[0], [a, b]))


def coordinates(F: ExactField, basis: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Solve ``basis @ c = vecs`` for a full-column-rank ``basis``."""
    n, k = basis.shape
    aug = hstack(F, n, [basis, vecs])
    rows, pivots = rref(F, aug)
    if any(pc >= k for pc in pivots) or len(pivots) != k:
        raise ValueError("vectors are not in the span of the basis")
    c = F.zeros(k, vecs.shape[1])
    for r in range(k):
        for j in range(vecs.shape[1]):
            c[r, j] = rows[r][k + j]
    return c


def complement(F: ExactField, sub: np.ndarray) -> np.ndarray:
    """Standard-basis columns completing the canonical basis of ``sub``."""
    n = sub.shape[0]
    rows, pivots = rref(F, sub.T) if sub.shape[1] else ([], [])
    cols = [c for c in range(n) if c not in set(pivots)]
    comp = F.zeros(n, len(cols))
    for k, c in enumerate(cols):
        comp[c, k] = F.scalar(1)
    return comp


def inverse(F: ExactField, a: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    if n == 0:
        return F.zeros(0, 0)
    aug = hstack(F, n, [a, F.eye(n)])
    rows, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return F.array([row[n:] for row in rows], shape=(n, n))


def is_invertible(F: ExactField, a: np.ndarray) -> bool:
    return a.shape[0] == a.shape[1] and rank(F, a) == a.shape[0]


def charpoly(F: ExactField, a: np.ndarray) -> list:
    """Coefficients of det(t I - a), highest degree first.

    Berkowitz recursion over leading principal blocks: division free, so it
    is valid in every characteristic.
    """
    n = a.shape[0]
    m = _rows(F, a)
    p = F.p
    poly = [F.scalar(1)]
    for k in range(n):
        # a_kk, row R = m[k][:k], column C = m[:k][k], block A = leading k x k
        col = [m[i][k] for i in range(k)]
        row = m[k][:k]
        # Toeplitz column: 1, -a_kk, -R C, -R A C, -R A^2 C, ...
        t = [F.scalar(1), F.scalar(-m[k][k])]
        vec = col
        for _ in range(k):
            val = sum((r * v for r, v in zip(row, vec)), F.scalar(0))
            t.append(F.scalar(-val))
            vec = [sum((m[i][j] * vec[j] for j in range(k)), F.scalar(0)) for i in range(k)]
        new = []
        for i in range(k + 2):
            s = F.scalar(0)
            for j in range(len(poly)):
                if 0 <= i - j < len(t):
                    s = s + t[i - j] * poly[j]
            new.append(s % p if p else s)
        poly = new
    return poly


def subspaces(F: ExactField, n: int, k: int):
    """Yield every k-dimensional subspace of F_p^n as a canonical n x k basis."""
    if not F.is_finite:
        raise ValueError("subspace enumeration needs a finite field")
    if k < 0 or k > n:
        return
    if k == 0:
        yield F.zeros(n, 0)
        return
    for piv in itertools.combinations(range(n), k):
        slots = [(r, c) for r in range(k) for c in range(piv[r] + 1, n) if c not in piv]
        for vals in itertools.product(range(F.p), repeat=len(slots)):
            b = np.zeros((k, n), dtype=np.int64)
            for r, c in enumerate(piv):
                b[r, c] = 1
            for (r, c), v in zip(slots, vals):
                b[r, c] = v
            yield b.T.copy()


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den
