"""Finite posets stored as boolean order matrices.

Element identifiers are opaque strings; the element tuple fixes every
iteration order used downstream.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import AntisymmetryViolation, UnknownElement


def reflexive_transitive_closure(m: np.ndarray) -> np.ndarray:
    """Warshall closure of a square boolean matrix (reflexive)."""
    m = np.array(m, dtype=bool, copy=True)
    n = m.shape[0]
    m[np.arange(n), np.arange(n)] = True
    for k in range(n):
        m |= m[:, k, None] & m[None, k, :]
    return m


class FinitePoset:
    """A finite partial order.  ``matrix[i, j]`` means element i <= element j."""

    def __init__(self, elements: Iterable[str], matrix, _checked=False):
        self.elements = tuple(str(e) for e in elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise ValueError("duplicate element identifiers")
        m = np.array(matrix, dtype=bool).reshape(len(self.elements), len(self.elements))
        m.setflags(write=False)
        self.matrix = m
        if not _checked:
            _check_partial_order(self)
        self._leq = None

    @classmethod
    def from_matrix(cls, elements, matrix, check=True) -> "FinitePoset":
        return cls(elements, matrix, _checked=not check)

    @property
    def size(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, e):
        return e in self.index

    def idx(self, e) -> int:
        try:
            return self.index[e]
        except KeyError:
            raise UnknownElement(f"unknown element {e!r}") from None

    def le(self, a, b) -> bool:
        return bool(self.matrix[self.idx(a), self.idx(b)])

    def lt(self, a, b) -> bool:
        return a != b and self.le(a, b)

    @property
    def leq(self) -> frozenset:
        if self._leq is None:
            ii, jj = np.nonzero(self.matrix)
            self._leq = frozenset((self.elements[i], self.elements[j]) for i, j in zip(ii, jj))
        return self._leq

    def strict_matrix(self):
        return self.matrix & ~np.eye(self.size, dtype=bool)

    def cover_matrix(self):
        lt = self.strict_matrix().astype(np.int32)
        return (lt > 0) & ((lt @ lt) == 0)

    def hasse_edges(self):
        """Covering pairs (lower, upper) in element order."""
        cov = self.cover_matrix()
        return [(self.elements[i], self.elements[j]) for i, j in zip(*np.nonzero(cov))]

    def mask(self, subset) -> np.ndarray:
        m = np.zeros(self.size, dtype=bool)
        for e in subset:
            m[self.idx(e)] = True
        return m

    def names(self, mask) -> frozenset:
        return frozenset(self.elements[i] for i in np.flatnonzero(mask))

    def dual(self) -> "FinitePoset":
        return FinitePoset.from_matrix(self.elements, self.matrix.T, check=False)

    def restrict(self, subset) -> "FinitePoset":
        keep = [e for e in self.elements if e in set(subset)]
        ix = [self.index[e] for e in keep]
        return FinitePoset.from_matrix(keep, self.matrix[np.ix_(ix, ix)], check=False)

    def relabel(self, mapping: Mapping[str, str]) -> "FinitePoset":
        return FinitePoset.from_matrix([mapping.get(e, e) for e in self.elements], self.matrix, check=False)

    def is_upset(self, subset) -> bool:
        m = self.mask(subset)
        return not np.any(self.matrix[m][:, ~m])

    def is_downset(self, subset) -> bool:
        m = self.mask(subset)
        return not np.any(self.matrix[~m][:, m])

    def maximal(self):
        lt = self.strict_matrix()
        return [e for i, e in enumerate(self.elements) if not lt[i].any()]

    def minimal(self):
        lt = self.strict_matrix()
        return [e for i, e in enumerate(self.elements) if not lt[:, i].any()]

    def __eq__(self, other):
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return set(self.elements) == set(other.elements) and self.leq == other.leq

    def __hash__(self):
        return hash((frozenset(self.elements), self.leq))

    def __repr__(self):
        rel = " ".join(f"{a}<{b}" for a, b in self.hasse_edges())
        return f"FinitePoset([{' '.join(self.elements)}] {rel})"


def _find_path(adj, src, dst):
    prev = {src: None}
    q = deque([src])
    while q:
        u = q.popleft()
        if u == dst:
            break
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v not in prev:
                prev[v] = u
                q.append(v)
    if dst not in prev:
        return None
    path = [dst]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def _check_partial_order(P: FinitePoset, generators=None):
    m = P.matrix
    n = P.size
    if n == 0:
        return
    if not m[np.arange(n), np.arange(n)].all():
        raise ValueError("order matrix is not reflexive")
    mi = m.astype(np.int32)
    if np.any(((mi @ mi) > 0) & ~m):
        raise ValueError("order matrix is not transitive")
    both = m & m.T & ~np.eye(n, dtype=bool)
    if both.any():
        i, j = map(int, np.argwhere(both)[0])
        adj = (generators if generators is not None else P.strict_matrix())
        p1 = _find_path(adj, i, j) or [i, j]
        p2 = _find_path(adj, j, i) or [j, i]
        cycle = [P.elements[k] for k in p1 + p2[1:]]
        raise AntisymmetryViolation(cycle)


def validate_poset(elements: Iterable[str], relation: Iterable[tuple]) -> FinitePoset:
    """Reflexive-transitive closure of a generating relation, checked antisymmetric."""
    elements = [str(e) for e in elements]
    index = {e: i for i, e in enumerate(elements)}
    if len(index) != len(elements):
        raise ValueError("duplicate element identifiers")
    n = len(elements)
    gen = np.zeros((n, n), dtype=bool)
    for a, b in relation:
        if a not in index:
            raise UnknownElement(f"unknown element {a!r}")
        if b not in index:
            raise UnknownElement(f"unknown element {b!r}")
        gen[index[a], index[b]] = True
    clo = reflexive_transitive_closure(gen)
    both = clo & clo.T & ~np.eye(n, dtype=bool)
    if both.any():
        i, j = map(int, np.argwhere(both)[0])
        g = gen & ~np.eye(n, dtype=bool)
        p1 = _find_path(g, i, j)
        p2 = _find_path(g, j, i)
        raise AntisymmetryViolation([elements[k] for k in p1 + p2[1:]])
    return FinitePoset.from_matrix(elements, clo, check=False)


def closure(P: FinitePoset, subset, direction: str) -> frozenset:
    """Up- or down-closure of a subset."""
    m = P.mask(subset)
    if direction == "up":
        out = P.matrix[m].any(axis=0)
    elif direction == "down":
        out = P.matrix[:, m].any(axis=1)
    else:
        raise ValueError("direction must be 'up' or 'down'")
    return P.names(out)


@dataclass(frozen=True)
class MonotoneMap:
    source: FinitePoset
    target: FinitePoset
    assignment: Mapping[str, str]

    def __post_init__(self):
        for e in self.source.elements:
            if e not in self.assignment:
                raise UnknownElement(f"map undefined on {e!r}")
            self.target.idx(self.assignment[e])
        for a, b in self.source.leq:
            if not self.target.le(self.assignment[a], self.assignment[b]):
                raise ValueError(f"map is not monotone on {a} <= {b}")

    def __call__(self, e):
        return self.assignment[e]


def is_order_embedding(m: MonotoneMap) -> bool:
    """Injective and order-reflecting (monotone is already enforced)."""
    S, T, f = m.source, m.target, m.assignment
    if len(set(f[e] for e in S.elements)) != S.size:
        return False
    src = [f[e] for e in S.elements]
    ix = np.array([T.idx(e) for e in src], dtype=int)
    return bool(np.array_equal(T.matrix[np.ix_(ix, ix)], S.matrix))


def find_iso(P: FinitePoset, Q: FinitePoset) -> MonotoneMap | None:
    """Backtracking isomorphism search with up/down-degree signatures."""
    if P.size != Q.size:
        return None
    n = P.size
    sigP = list(zip(P.matrix.sum(0), P.matrix.sum(1)))
    sigQ = list(zip(Q.matrix.sum(0), Q.matrix.sum(1)))
    if sorted(sigP) != sorted(sigQ):
        return None
    order = sorted(range(n), key=lambda i: (sum(1 for s in sigP if s == sigP[i]), i))
    cand = {i: [j for j in range(n) if sigQ[j] == sigP[i]] for i in range(n)}
    PM, QM = P.matrix, Q.matrix
    f = [-1] * n
    used = [False] * n

    def ok(i, j, depth):
        for d in range(depth):
            a = order[d]
            b = f[a]
            if PM[i, a] != QM[j, b] or PM[a, i] != QM[b, j]:
                return False
        return True

    def rec(depth):
        if depth == n:
            return True
        i = order[depth]
        for j in cand[i]:
            if not used[j] and ok(i, j, depth):
                f[i] = j
                used[j] = True
                if rec(depth + 1):
                    return True
                used[j] = False
                f[i] = -1
        return False

    if not rec(0):
        return None
    return MonotoneMap(P, Q, {P.elements[i]: Q.elements[f[i]] for i in range(n)})


def disjoint_union(P: FinitePoset, Q: FinitePoset, left="l.", right="r.") -> FinitePoset:
    n, m = P.size, Q.size
    M = np.zeros((n + m, n + m), dtype=bool)
    M[:n, :n] = P.matrix
    M[n:, n:] = Q.matrix
    return FinitePoset.from_matrix([left + e for e in P.elements] + [right + e for e in Q.elements], M, check=False)


def down_up_sum(P: FinitePoset, D, Q: FinitePoset, U, left="l.", right="r.") -> FinitePoset:
    """Disjoint union plus d <= u for every d in D (a downset of P) and u in U (an upset of Q)."""
    if not P.is_downset(D):
        raise ValueError("D is not a downset")
    if not Q.is_upset(U):
        raise ValueError("U is not an upset")
    M = disjoint_union(P, Q, left, right).matrix.copy()
    n = P.size
    M[np.ix_(np.flatnonzero(P.mask(D)), np.flatnonzero(Q.mask(U)) + n)] = True
    return FinitePoset.from_matrix([left + e for e in P.elements] + [right + e for e in Q.elements], M, check=False)


def linear_sum(P: FinitePoset, Q: FinitePoset, left="l.", right="r.") -> FinitePoset:
    return down_up_sum(P, P.elements, Q, Q.elements, left, right)
