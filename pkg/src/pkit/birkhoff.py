"""Finite distributive lattices as lattices of upsets of a finite poset.

Elements are Python ints used as bitsets over the base poset's element
order; join is ``|`` and meet is ``&``.  The base poset is the dual space:
a point is a prime filter, and an element ``a`` corresponds to the set of
prime filters containing it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import NotALattice, NotDistributive, NotFilter, NotIdeal, SizeLimit, UnknownElement
from .order import FinitePoset, MonotoneMap, find_iso, is_order_embedding, validate_poset

DEFAULT_UPSET_LIMIT = 2 ** 20


def _bits(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)


def _mask(bits) -> int:
    return sum(1 << int(i) for i in np.flatnonzero(bits))


def upsets_of(P: FinitePoset, limit: int = DEFAULT_UPSET_LIMIT) -> list[int]:
    """All upsets of P as bitmasks, in a deterministic order."""
    n = P.size
    strict_up = [_mask(P.matrix[i] & (np.arange(n) != i)) for i in range(n)]
    # an element's strict uppers are decided before it
    order = sorted(range(n), key=lambda i: (bin(strict_up[i]).count("1"), i))
    out = []
    stack = [(0, 0)]
    while stack:
        depth, cur = stack.pop()
        if depth == n:
            out.append(cur)
            if len(out) > limit:
                raise SizeLimit(f"more than {limit} upsets")
            continue
        i = order[depth]
        stack.append((depth + 1, cur))
        if strict_up[i] & ~cur == 0:
            stack.append((depth + 1, cur | (1 << i)))
    return sorted(out, key=lambda m: (bin(m).count("1"), m))


class FiniteDistLattice:
    """Upsets of ``base`` closed under the lattice operations."""

    def __init__(self, base: FinitePoset, elements: Iterable[int], labels=None, code=None):
        self.base = base
        self.code = dict(code) if code else {}     # original element -> bitmask, when canonicalized
        self.n = base.size
        self.elements = tuple(sorted(set(elements), key=lambda m: (bin(m).count("1"), m)))
        self._set = frozenset(self.elements)
        self.labels = dict(labels) if labels else {}
        self.top = (1 << self.n) - 1
        self.bottom = 0

    def __len__(self):
        return len(self.elements)

    def __contains__(self, a):
        return a in self._set

    def _check(self, a):
        if a not in self._set:
            raise UnknownElement(f"{a!r} is not an element of the lattice")
        return a

    def meet(self, a, b):
        return self._check(a) & self._check(b)

    def join(self, a, b):
        return self._check(a) | self._check(b)

    def le(self, a, b) -> bool:
        return a & ~b == 0

    def names(self, a) -> frozenset:
        return frozenset(self.base.elements[i] for i in range(self.n) if (a >> i) & 1)

    def element(self, names) -> int:
        """The element whose upset is ``names``."""
        a = 0
        for e in names:
            a |= 1 << self.base.idx(e)
        return self._check(a)

    def label(self, a) -> str:
        if a in self.labels:
            return self.labels[a]
        if a == 0:
            return "∅"
        return "{" + ",".join(e for i, e in enumerate(self.base.elements) if (a >> i) & 1) + "}"

    def by_label(self, name):
        for a in self.elements:
            if self.label(a) == name:
                return a
        raise UnknownElement(f"no lattice element labelled {name!r}")

    def down_of(self, mask: int) -> int:
        b = _bits(mask, self.n)
        return _mask(self.base.matrix[:, b].any(axis=1)) if self.n else 0

    def as_poset(self) -> FinitePoset:
        labs = [self.label(a) for a in self.elements]
        E = np.array(self.elements, dtype=object)
        m = np.array([[self.le(a, b) for b in E] for a in E], dtype=bool).reshape(len(E), len(E))
        return FinitePoset.from_matrix(labs, m, check=False)

    def __repr__(self):
        return f"FiniteDistLattice({len(self)} elements over {self.base.size} points)"


def upset_lattice(P: FinitePoset, limit: int = DEFAULT_UPSET_LIMIT) -> FiniteDistLattice:
    return FiniteDistLattice(P, upsets_of(P, limit))


def _lower_covers(elements, le):
    covers = {}
    for a in elements:
        below = [b for b in elements if b != a and le(b, a)]
        covers[a] = [b for b in below if not any(c != b and le(b, c) for c in below)]
    return covers


def join_irreducibles(L: FiniteDistLattice) -> FinitePoset:
    """Join-irreducible elements ordered as their prime filters: j <= k iff k <=_L j."""
    cov = _lower_covers(L.elements, L.le)
    js = [a for a in L.elements if len(cov[a]) == 1]
    m = np.array([[L.le(k, j) for k in js] for j in js], dtype=bool).reshape(len(js), len(js))
    return FinitePoset.from_matrix([L.label(j) for j in js], m, check=False)


def round_trip(L: FiniteDistLattice):
    """(J, iso) where iso: L -> upsets of J sends a to the join-irreducibles below it."""
    J = join_irreducibles(L)
    js = [L.by_label(e) for e in J.elements]
    UJ = upset_lattice(J)
    src = L.as_poset()
    tgt = UJ.as_poset()
    assign = {}
    for a in L.elements:
        m = 0
        for i, j in enumerate(js):
            if L.le(j, a):
                m |= 1 << i
        assign[L.label(a)] = UJ.label(m)
    iso = MonotoneMap(src, tgt, assign)
    if not (is_order_embedding(iso) and len(UJ) == len(L)):
        raise AssertionError("round trip map is not an isomorphism")
    return J, iso


def heyting_arrow(L: FiniteDistLattice, a: int, b: int) -> int:
    """Largest c with c & a <= b, computed as X minus the downset of a\\b."""
    L._check(a), L._check(b)
    c = L.top & ~L.down_of(a & ~b)
    return L._check(c)


@dataclass(frozen=True)
class IdealOrFilter:
    lattice: FiniteDistLattice
    kind: str
    members: frozenset

    def __post_init__(self):
        L, S = self.lattice, self.members
        if self.kind not in ("ideal", "filter"):
            raise ValueError("kind must be 'ideal' or 'filter'")
        err = NotIdeal if self.kind == "ideal" else NotFilter
        if not S:
            raise err("empty")
        for a in S:
            L._check(a)
        for a in L.elements:
            for s in S:
                inside = L.le(a, s) if self.kind == "ideal" else L.le(s, a)
                if inside and a not in S:
                    raise err(f"not {'down' if self.kind == 'ideal' else 'up'}-closed at {L.label(a)}")
        for s in S:
            for t in S:
                c = (s | t) if self.kind == "ideal" else (s & t)
                if c not in S:
                    raise err(f"not closed under {'joins' if self.kind == 'ideal' else 'meets'}")

    def __contains__(self, a):
        return a in self.members

    def generator(self) -> int:
        """Largest (ideal) or least (filter) member."""
        out = 0 if self.kind == "ideal" else self.lattice.top
        for a in self.members:
            out = (out | a) if self.kind == "ideal" else (out & a)
        return out


def principal_ideal(L, a) -> IdealOrFilter:
    return IdealOrFilter(L, "ideal", frozenset(c for c in L.elements if L.le(c, a)))


def principal_filter(L, a) -> IdealOrFilter:
    return IdealOrFilter(L, "filter", frozenset(c for c in L.elements if L.le(a, c)))


def ideal_I_ab(L: FiniteDistLattice, a: int, b: int) -> IdealOrFilter:
    """The ideal {c : c & a <= b}."""
    L._check(a), L._check(b)
    return IdealOrFilter(L, "ideal", frozenset(c for c in L.elements if L.le(c & a, b)))


def is_principal(i: IdealOrFilter) -> bool:
    return i.generator() in i.members


def correspond_ideal(L: FiniteDistLattice, i: IdealOrFilter) -> frozenset:
    """Open upset (union) for an ideal, closed upset (intersection) for a filter."""
    return L.names(i.generator())


def ideal_of_upset(L: FiniteDistLattice, names) -> IdealOrFilter:
    v = L.element(names) if names else 0
    return IdealOrFilter(L, "ideal", frozenset(c for c in L.elements if L.le(c, v)))


def filter_of_upset(L: FiniteDistLattice, names) -> IdealOrFilter:
    f = 0
    for e in names:
        f |= 1 << L.base.idx(e)
    return IdealOrFilter(L, "filter", frozenset(c for c in L.elements if L.le(f, c)))


def all_ideals(L: FiniteDistLattice) -> list[IdealOrFilter]:
    """Join-closed nonempty downsets of the lattice order."""
    P = L.as_poset()
    out = []
    for m in upsets_of(P.dual()):
        S = frozenset(L.elements[i] for i in range(len(L)) if (m >> i) & 1)
        if S and all((s | t) in S for s in S for t in S):
            out.append(IdealOrFilter(L, "ideal", S))
    return out


def all_filters(L: FiniteDistLattice) -> list[IdealOrFilter]:
    P = L.as_poset()
    out = []
    for m in upsets_of(P):
        S = frozenset(L.elements[i] for i in range(len(L)) if (m >> i) & 1)
        if S and all((s & t) in S for s in S for t in S):
            out.append(IdealOrFilter(L, "filter", S))
    return out


# abstract lattices -------------------------------------------------------


def _bound_tables(P: FinitePoset):
    """join[i, j] and meet[i, j] as element indices, or NotALattice."""
    n = P.size
    M = P.matrix
    join = np.full((n, n), -1, dtype=int)
    meet = np.full((n, n), -1, dtype=int)
    for i in range(n):
        for j in range(n):
            ub = M[i] & M[j]
            lub = [k for k in np.flatnonzero(ub) if not np.any(ub & ~M[k])]
            lb = M[:, i] & M[:, j]
            glb = [k for k in np.flatnonzero(lb) if not np.any(lb & ~M[:, k])]
            if not lub or not glb:
                raise NotALattice(f"{P.elements[i]} and {P.elements[j]} have no "
                                  f"{'join' if not lub else 'meet'}")
            join[i, j], meet[i, j] = lub[0], glb[0]
    return join, meet


def find_m3_n5(P: FinitePoset, join, meet):
    """A forbidden sublattice (name, elements) or None."""
    n = P.size
    M = P.matrix
    for a, b, c in combinations(range(n), 3):
        o, i = meet[a, b], join[a, b]
        if (meet[a, c] == o and meet[b, c] == o and join[a, c] == i and join[b, c] == i
                and len({o, i, a, b, c}) == 5):
            return "M3", [P.elements[k] for k in (o, a, b, c, i)]
    for a in range(n):
        for c in range(n):
            if a == c or not M[a, c]:
                continue
            for b in range(n):
                if M[a, b] or M[b, a] or M[c, b] or M[b, c]:
                    continue
                if join[a, b] == join[c, b] and meet[a, b] == meet[c, b]:
                    return "N5", [P.elements[k] for k in (meet[a, b], a, c, b, join[a, b])]
    return None


def distributive_law_holds(join, meet) -> bool:
    n = join.shape[0]
    for a in range(n):
        lhs = meet[a][join]                       # a & (b | c)
        rhs = join[meet[a][:, None], meet[a][None, :]]   # (a & b) | (a & c)
        if not np.array_equal(lhs, rhs):
            return False
    return True


def lattice_from_order(elements, relation) -> FiniteDistLattice:
    """Validate an abstract lattice (given by a generating order) and canonicalize it."""
    P = validate_poset(elements, relation)
    if P.size == 0:
        raise NotALattice("empty")
    join, meet = _bound_tables(P)
    bad = find_m3_n5(P, join, meet)
    law = distributive_law_holds(join, meet)
    if bad is not None or not law:
        if bad is None:
            raise NotDistributive("distributive law fails")
        raise NotDistributive(f"contains {bad[0]} on {' '.join(bad[1])}", bad)
    return lattice_from_elements(P.elements, lambda x, y: P.le(x, y))


def lattice_from_elements(elements, le) -> FiniteDistLattice:
    """Canonical upset form of a finite distributive lattice given by its order."""
    elements = list(elements)
    cov = _lower_covers(elements, le)
    js = [a for a in elements if len(cov[a]) == 1]
    m = np.array([[le(k, j) for k in js] for j in js], dtype=bool).reshape(len(js), len(js))
    base = FinitePoset.from_matrix([str(j) for j in js], m, check=False)
    code = {}
    for a in elements:
        mk = 0
        for i, j in enumerate(js):
            if le(j, a):
                mk |= 1 << i
        code[a] = mk
    if len(set(code.values())) != len(elements):
        raise NotDistributive("elements are not determined by the join-irreducibles below them")
    return FiniteDistLattice(base, code.values(), {v: str(k) for k, v in code.items()}, code)


def lattices_isomorphic(L: FiniteDistLattice, M: FiniteDistLattice):
    return find_iso(L.as_poset(), M.as_poset())
