"""Quivers, dimension vectors, the Euler form and its consequences.

A dimension vector is a plain tuple of integers aligned with
``Quiver.vertices``; :meth:`Quiver.dim` converts mappings keyed by vertex ids
and validates them.  Everything here is integer arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from . import linalg
from .errors import ClassificationError, DimensionVectorError, UnsupportedInputError

DimVector = tuple  # tuple[int, ...] aligned with Quiver.vertices


@dataclass(frozen=True)
class Quiver:
    vertices: tuple
    arrows: tuple  # ((source, target), ...), parallel arrows and loops allowed
    # for doubled quivers: pairing[k] is the arrow index paired with arrow k
    pairing: tuple = field(default=(), compare=False)

    def __post_init__(self):
        verts = tuple(self.vertices)
        arrows = tuple((s, t) for s, t in self.arrows)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "arrows", arrows)
        if len(set(verts)) != len(verts):
            raise UnsupportedInputError("vertex ids must be unique")
        known = set(verts)
        for s, t in arrows:
            if s not in known or t not in known:
                raise UnsupportedInputError(f"arrow ({s!r}, {t!r}) has an undeclared endpoint")
        index = {v: i for i, v in enumerate(verts)}
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_edges", tuple((index[s], index[t]) for s, t in arrows))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, v) -> int:
        return self._index[v]

    @property
    def edges(self) -> tuple:
        """Arrows as (source index, target index)."""
        return self._edges

    def dim(self, d) -> DimVector:
        """Normalize ``d`` (sequence or vertex-keyed mapping) to a tuple."""
        if isinstance(d, Mapping):
            if set(d) != set(self.vertices):
                raise DimensionVectorError(
                    f"dimension vector keys {sorted(map(str, d))} do not match vertices "
                    f"{[str(v) for v in self.vertices]}"
                )
            out = tuple(int(d[v]) for v in self.vertices)
        else:
            out = tuple(int(x) for x in d)
            if len(out) != self.n:
                raise DimensionVectorError(
                    f"dimension vector has {len(out)} entries, quiver has {self.n} vertices"
                )
        return out

    def zero(self) -> DimVector:
        return (0,) * self.n

    def unit(self, i: int) -> DimVector:
        return tuple(int(k == i) for k in range(self.n))

    def euler_matrix(self) -> list[list[int]]:
        a = [[int(i == j) for j in range(self.n)] for i in range(self.n)]
        for s, t in self.edges:
            a[s][t] -= 1
        return a

    def symmetrized_matrix(self) -> list[list[int]]:
        a = self.euler_matrix()
        return [[a[i][j] + a[j][i] for j in range(self.n)] for i in range(self.n)]

    def loops(self, i: int) -> int:
        return sum(1 for s, t in self.edges if s == t == i)

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        adj = {i: set() for i in range(self.n)}
        for s, t in self.edges:
            adj[s].add(t)
            adj[t].add(s)
        seen, stack = {0}, [0]
        while stack:
            for j in adj[stack.pop()] - seen:
                seen.add(j)
                stack.append(j)
        return len(seen) == self.n

    def is_acyclic(self) -> bool:
        indeg = [0] * self.n
        out = {i: [] for i in range(self.n)}
        for s, t in self.edges:
            indeg[t] += 1
            out[s].append(t)
        ready = [i for i in range(self.n) if indeg[i] == 0]
        seen = 0
        while ready:
            i = ready.pop()
            seen += 1
            for j in out[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    ready.append(j)
        return seen == self.n

    def is_cyclic_orientation(self) -> bool:
        """True for C_n in standard form: arrows i -> i+1 in declared vertex order."""
        n = self.n
        return sorted(self.edges) == sorted((i, (i + 1) % n) for i in range(n))

    def is_oriented_cycle(self) -> bool:
        """Every vertex has exactly one incoming and one outgoing arrow (connected)."""
        outs = [0] * self.n
        ins = [0] * self.n
        for s, t in self.edges:
            outs[s] += 1
            ins[t] += 1
        return self.is_connected() and all(x == 1 for x in outs + ins)

    def __repr__(self):
        return f"Quiver(vertices={self.vertices!r}, arrows={self.arrows!r})"


# named quivers


def quiver(vertices: Iterable, arrows: Iterable) -> Quiver:
    return Quiver(tuple(vertices), tuple(arrows))


def type_a(n: int) -> Quiver:
    """Linearly oriented A_n: 1 -> 2 -> ... -> n."""
    return quiver(range(1, n + 1), [(i, i + 1) for i in range(1, n)])


def kronecker() -> Quiver:
    return quiver([1, 2], [(1, 2), (1, 2)])


def loop_quiver(g: int) -> Quiver:
    """S_g: one vertex carrying g loops (g = 1 is the Jordan quiver)."""
    return quiver([0], [(0, 0)] * g)


def cyclic_quiver(n: int) -> Quiver:
    """C_n: vertices 0..n-1, arrows i -> i+1 mod n."""
    return quiver(range(n), [(i, (i + 1) % n) for i in range(n)])


def affine_a(orientation: str) -> Quiver:
    """A cycle on len(orientation) vertices; character k is '+' for k -> k+1, '-' for k+1 -> k."""
    n = len(orientation)
    if n < 2 or set(orientation) - {"+", "-"}:
        raise UnsupportedInputError("orientation is a string over '+-' of length >= 2")
    if n == 2:
        arrows = [(0, 1) if c == "+" else (1, 0) for c in orientation]
    else:
        arrows = [(k, (k + 1) % n) if c == "+" else ((k + 1) % n, k) for k, c in enumerate(orientation)]
    return quiver(range(n), arrows)


def affine_d(n: int) -> Quiver:
    """D_n^(1) on n+1 vertices, arrows oriented towards the spine's end."""
    if n < 4:
        raise UnsupportedInputError("D_n^(1) needs n >= 4")
    spine = list(range(2, n - 1))  # vertices 2..n-2
    arrows = [(0, 2), (1, 2)] + [(i, i + 1) for i in spine[:-1]] + [(n - 2, n - 1), (n - 2, n)]
    return quiver(range(n + 1), arrows)


def _star(arms: Sequence[int]) -> Quiver:
    arrows = []
    nxt = 1
    for length in arms:
        prev = 0
        for _ in range(length):
            arrows.append((nxt, prev))
            prev = nxt
            nxt += 1
    return quiver(range(nxt), arrows)


def affine_e(n: int) -> Quiver:
    arms = {6: (2, 2, 2), 7: (1, 3, 3), 8: (1, 2, 5)}
    if n not in arms:
        raise UnsupportedInputError("E_n^(1) needs n in {6, 7, 8}")
    return _star(arms[n])


def dynkin_d(n: int) -> Quiver:
    return _star((1, 1, n - 3))


def dynkin_e(n: int) -> Quiver:
    arms = {6: (1, 2, 2), 7: (1, 2, 3), 8: (1, 2, 4)}
    if n not in arms:
        raise UnsupportedInputError("E_n needs n in {6, 7, 8}")
    return _star(arms[n])


# forms


def euler_form(q: Quiver, d, e) -> int:
    d, e = q.dim(d), q.dim(e)
    return sum(x * y for x, y in zip(d, e)) - sum(d[s] * e[t] for s, t in q.edges)


def tits_form(q: Quiver, d) -> int:
    return euler_form(q, d, d)


def symmetric_form(q: Quiver, d, e) -> int:
    return euler_form(q, d, e) + euler_form(q, e, d)


# transforms


def opposite(q: Quiver) -> Quiver:
    return Quiver(q.vertices, tuple((t, s) for s, t in q.arrows))


def double(q: Quiver) -> Quiver:
    """Q with a reversed copy of every arrow; arrow k pairs with arrow k + |arrows|."""
    m = len(q.arrows)
    arrows = q.arrows + tuple((t, s) for s, t in q.arrows)
    pairing = tuple(range(m, 2 * m)) + tuple(range(m))
    return Quiver(q.vertices, arrows, pairing)


def transform(q: Quiver, mode: str) -> Quiver:
    if mode == "opposite":
        return opposite(q)
    if mode == "double":
        return double(q)
    raise UnsupportedInputError(f"unknown transform mode {mode!r}")


# classification


@dataclass(frozen=True)
class QuiverClass:
    kind: str  # "Finite" | "Affine" | "Wild" | "JordanLike"
    label: str = ""
    delta: DimVector | None = None
    tube_periods: tuple = ()
    cycle_length: int = 0
    notes: str = ""


def _leading_minors_positive(b: list[list[int]]) -> bool:
    n = len(b)
    m = [[Fraction(x) for x in row] for row in b]
    # Gaussian elimination without pivoting: pivots are ratios of leading minors
    for k in range(n):
        if m[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            for j in range(k, n):
                m[i][j] -= f * m[k][j]
    return True


def _radical_vector(q: Quiver) -> DimVector | None:
    """Primitive positive generator of a 1-dim radical, or None."""
    b = q.symmetrized_matrix()
    ns = linalg.nullspace(linalg.Q, linalg.Q.array(b, shape=(q.n, q.n)))
    if ns.shape[1] != 1:
        return None
    v = [Fraction(x) for x in ns[:, 0]]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    if all(x < 0 for x in ints):
        ints = [-x for x in ints]
    if not all(x > 0 for x in ints):
        return None
    return tuple(ints)


def _graph(q: Quiver):
    adj = {i: [] for i in range(q.n)}
    for s, t in q.edges:
        if s != t:
            adj[s].append(t)
            adj[t].append(s)
    return adj


def _arms(q: Quiver, center: int, adj) -> list[int]:
    arms = []
    for nb in adj[center]:
        length, prev, cur = 1, center, nb
        while True:
            nxt = [v for v in adj[cur] if v != prev]
            if not nxt:
                break
            if len(nxt) > 1:
                return []
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    return sorted(arms)


def _tree_label(q: Quiver, affine: bool) -> str:
    n = q.n
    adj = _graph(q)
    degrees = [len(adj[i]) for i in range(n)]
    branch = [i for i in range(n) if degrees[i] >= 3]
    if not branch:
        return f"A_{n}"
    if affine:
        if len(branch) == 2:
            return f"D_{n - 1}^(1)"
        arms = _arms(q, branch[0], adj)
        if arms == [1, 1, 1, 1]:
            return "D_4^(1)"
        return {(2, 2, 2): "E_6^(1)", (1, 3, 3): "E_7^(1)", (1, 2, 5): "E_8^(1)"}.get(tuple(arms), "?")
    arms = _arms(q, branch[0], adj)
    if arms[:2] == [1, 1]:
        return f"D_{n}"
    return f"E_{n}"


def _cycle_order(q: Quiver) -> list[int]:
    """Vertex indices around the underlying cycle, starting at vertex 0."""
    adj = _graph(q)
    order = [0]
    prev, cur = None, 0
    while True:
        nbrs = sorted(set(adj[cur]))
        choices = [v for v in nbrs if v != prev and v not in order[1:]]
        if not choices:
            break
        nxt = choices[0]
        if nxt == 0:
            break
        order.append(nxt)
        prev, cur = cur, nxt
        if len(order) == q.n:
            break
    return order


def _cycle_direction_counts(q: Quiver) -> tuple[int, int]:
    order = _cycle_order(q)
    pos = {v: k for k, v in enumerate(order)}
    n = q.n
    cw = ccw = 0
    for s, t in q.edges:
        if pos[t] == (pos[s] + 1) % n:
            cw += 1
        else:
            ccw += 1
    return cw, ccw


def _tube_periods(q: Quiver, label: str) -> tuple[tuple, str]:
    if label.startswith("A_"):
        if q.n == 2:
            return (), "Kronecker: every tube is homogeneous"
        cw, ccw = _cycle_direction_counts(q)
        periods = (cw, ccw)
        notes = f"clockwise={cw}, counterclockwise={ccw} along the canonical cycle order"
        if 1 in periods:
            notes += "; a direction carrying one arrow gives a period-1 (homogeneous) tube, so only one non-homogeneous tube"
        return periods, notes
    if label.startswith("D_"):
        n = int(label[2:].split("^")[0])
        return (2, 2, n - 2), ""
    n = int(label[2:].split("^")[0])
    return (2, 3, n - 3), ""


def classify(q: Quiver) -> QuiverClass:
    if not q.is_connected():
        raise UnsupportedInputError("classification needs a connected quiver")
    if q.is_oriented_cycle():
        return QuiverClass("JordanLike", label=f"C_{q.n}", cycle_length=q.n,
                           delta=(1,) * q.n,
                           notes="oriented cycle: nilpotent representations are labeled by multipartitions")
    b = q.symmetrized_matrix()
    if _leading_minors_positive(b):
        return QuiverClass("Finite", label=_tree_label(q, affine=False))
    delta = _radical_vector(q)
    if delta is not None and all(q.loops(i) == 0 for i in range(q.n)):
        # a positive radical vector forces positive semidefiniteness
        n_edges = len(q.edges)
        label = f"A_{q.n - 1}^(1)" if n_edges == q.n else _tree_label(q, affine=True)
        periods, notes = _tube_periods(q, label)
        return QuiverClass("Affine", label=label, delta=delta, tube_periods=periods, notes=notes)
    return QuiverClass("Wild", notes="symmetrized Tits form is indefinite")


def affine_delta(q: Quiver) -> DimVector:
    c = classify(q)
    if c.kind != "Affine":
        raise ClassificationError(f"quiver is {c.kind}, not affine")
    return c.delta


def defect(q: Quiver, d, delta: DimVector | None = None) -> int:
    """<delta, d>: negative on preprojectives, positive on preinjectives."""
    if delta is None:
        delta = affine_delta(q)
    return euler_form(q, delta, d)


# roots


def positive_roots(q: Quiver, bound=None) -> list[DimVector]:
    """All nonzero d <= bound with Tits value 1, in lexicographic order."""
    c = classify(q)
    if c.kind != "Finite":
        raise ClassificationError(f"positive roots are enumerated for finite type, got {c.kind}")
    bound = q.dim(bound) if bound is not None else (6,) * q.n
    return real_roots_below(q, bound)


def real_roots_below(q: Quiver, bound) -> list[DimVector]:
    bound = q.dim(bound)
    out = []
    for d in itertools.product(*(range(b + 1) for b in bound)):
        if any(d) and tits_form(q, d) == 1:
            out.append(tuple(d))
    return out


# Coxeter transformation


def coxeter_matrix(q: Quiver, inverse: bool = False) -> list[list[int]]:
    """-A^{-T} A, or its inverse -A^{-1} A^T; integer since A is unitriangular up to order."""
    if not q.is_acyclic():
        raise UnsupportedInputError("the Coxeter transformation needs an acyclic quiver")
    F = linalg.Q
    a = F.array(q.euler_matrix(), shape=(q.n, q.n))
    if inverse:
        m = F.neg(F.mul(linalg.inverse(F, a), a.T))
    else:
        m = F.neg(F.mul(linalg.inverse(F, a.T), a))
    return [[int(x) for x in row] for row in m.tolist()]


def coxeter(q: Quiver, d, inverse: bool = False) -> DimVector:
    m = coxeter_matrix(q, inverse)
    d = q.dim(d)
    return tuple(sum(m[i][j] * d[j] for j in range(q.n)) for i in range(q.n))


def dim_rep_space(q: Quiver, d) -> int:
    d = q.dim(d)
    return sum(d[s] * d[t] for s, t in q.edges)


def dim_group(q: Quiver, d) -> int:
    return sum(x * x for x in q.dim(d))


def dominated(d, bound) -> bool:
    return all(0 <= x <= b for x, b in zip(d, bound))
