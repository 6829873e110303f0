"""Finitely presented ordered spaces over products of omega+1.

A presentation is a finite list of parts, each a copy of (omega+1)^k with
k <= 2 carrying the product topology, plus an order rule given in clause
form: for each ordered pair of parts (p, q) a formula saying when p(u) <= q(v).
Reflexivity is built in, so clauses only need to describe the strict part
(they may also repeat the diagonal).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any

import numpy as np

from . import rules as R
from .errors import ArityMismatch, AxiomFailure, FragmentViolation, UnknownPart
from .nat import OMEGA, check_nat, fmt
from .order import FinitePoset

MAX_ARITY = 2


@dataclass(frozen=True)
class PointName:
    part: str
    coords: tuple = ()

    def __str__(self):
        if not self.coords:
            return self.part
        return f"{self.part}({','.join(fmt(c) for c in self.coords)})"

    def is_isolated(self) -> bool:
        return all(c is not OMEGA for c in self.coords)

    def to_json(self):
        return {"part": self.part, "coords": ["omega" if c is OMEGA else c for c in self.coords]}


def pt(part, *coords) -> PointName:
    return PointName(part, tuple(coords))


class PointSet:
    """All points with finite coordinates <= level (plus omega), array-backed.

    Within a part, points are listed in C-order over coordinate indices
    0..level, level+1 (= omega), so membership arrays reshape directly to
    (level+2,)*arity.
    """

    def __init__(self, space: "SpacePresentation", level: int):
        self.space = space
        self.level = level
        self.offsets = {}
        self.val = {}
        self.om = {}
        n = 0
        side = level + 2
        for p, k in space.parts:
            m = side ** k
            idx = np.indices((side,) * k).reshape(k, -1).T if k else np.zeros((1, 0), int)
            self.om[p] = idx == level + 1
            self.val[p] = np.where(self.om[p], 0, idx).astype(np.int64)
            self.offsets[p] = (n, n + m)
            n += m
        self.size = n

    def part_slice(self, p) -> slice:
        a, b = self.offsets[p]
        return slice(a, b)

    def index(self, point: PointName) -> int:
        a, _ = self.offsets[point.part]
        side = self.level + 2
        i = 0
        for c in point.coords:
            if c is OMEGA:
                ci = self.level + 1
            elif c > self.level:
                raise IndexError(f"{point} is outside level {self.level}")
            else:
                ci = c
            i = i * side + ci
        return a + i

    def point(self, i: int) -> PointName:
        for p, (a, b) in self.offsets.items():
            if a <= i < b:
                j = int(i) - a
                k = self.space.arity(p)
                side = self.level + 2
                cs = []
                for _ in range(k):
                    cs.append(j % side)
                    j //= side
                cs = tuple(OMEGA if c == self.level + 1 else c for c in reversed(cs))
                return PointName(p, cs)
        raise IndexError(i)

    def points(self):
        return [self.point(i) for i in range(self.size)]

    def isolated_mask(self):
        out = np.ones(self.size, bool)
        for p, _ in self.space.parts:
            out[self.part_slice(p)] = ~self.om[p].any(axis=1) if self.om[p].shape[1] else True
        return out


@dataclass(eq=False)
class SpacePresentation:
    """Parts and clause-form order rule.  Structural equality ignores the name."""

    name: str
    parts: tuple
    clauses: tuple
    provenance: Any = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.parts = tuple((str(p), int(k)) for p, k in self.parts)
        names = [p for p, _ in self.parts]
        if len(set(names)) != len(names):
            raise ValueError("duplicate part names")
        for p, k in self.parts:
            if not 0 <= k <= MAX_ARITY:
                raise ArityMismatch(f"part {p} has arity {k}; supported arities are 0..{MAX_ARITY}")
        ar = dict(self.parts)
        merged = {}
        for src, dst, f in self.clauses:
            if src not in ar:
                raise UnknownPart(f"unknown part {src!r}")
            if dst not in ar:
                raise UnknownPart(f"unknown part {dst!r}")
            for c in R.formula_coords(f):
                lim = ar[src] if c.var == "u" else ar[dst]
                if c.index >= lim:
                    raise ArityMismatch(f"clause {src}->{dst} uses {c.var}{c.index}")
            for a in R.atoms(f):
                if isinstance(a, R.PartPair):
                    raise FragmentViolation("clause formulas must not mention parts")
            merged[(src, dst)] = R.disj(merged.get((src, dst), R.FALSE), f)
        self.clauses = tuple((s, d, f) for (s, d), f in merged.items() if not isinstance(f, R.FalseF))
        self.clause_map = {(s, d): f for s, d, f in self.clauses}

    # structure
    def arity(self, part) -> int:
        for p, k in self.parts:
            if p == part:
                return k
        raise UnknownPart(f"unknown part {part!r}")

    @property
    def part_names(self):
        return [p for p, _ in self.parts]

    @property
    def c_max(self) -> int:
        cs = [c for _, _, f in self.clauses for c in R.formula_consts(f)]
        return max(cs, default=0)

    @property
    def max_arity(self) -> int:
        return max((k for _, k in self.parts), default=0)

    @property
    def window_bound(self) -> int:
        """Default small-model window: c_max + 3 * max_arity + 3."""
        return self.c_max + 3 * self.max_arity + 3

    def __eq__(self, other):
        if not isinstance(other, SpacePresentation):
            return NotImplemented
        return self.parts == other.parts and set(self.clauses) == set(other.clauses)

    def __hash__(self):
        return hash((self.parts, frozenset(self.clauses)))

    def check_point(self, point: PointName) -> PointName:
        k = self.arity(point.part)
        if len(point.coords) != k:
            raise ArityMismatch(f"{point.part} has arity {k}, got {len(point.coords)} coordinates")
        for c in point.coords:
            check_nat(c)
        return point

    # order evaluation
    def eval_order(self, u: PointName, v: PointName) -> bool:
        """u <= v, by scalar evaluation of the rule."""
        self.check_point(u)
        self.check_point(v)
        if u == v:
            return True
        f = self.clause_map.get((u.part, v.part))
        return f is not None and R.holds(f, u.coords, v.coords)

    def relation(self, us, vs) -> np.ndarray:
        """Vectorized u <= v for explicit point lists (matrix len(us) x len(vs))."""
        out = np.zeros((len(us), len(vs)), bool)
        by_u, by_v = {}, {}
        for i, u in enumerate(us):
            by_u.setdefault(u.part, []).append(i)
        for j, v in enumerate(vs):
            by_v.setdefault(v.part, []).append(j)

        def arrs(pts, ix, k):
            return [R.Ext(np.array([0 if pts[i].coords[c] is OMEGA else pts[i].coords[c] for i in ix], np.int64),
                          np.array([pts[i].coords[c] is OMEGA for i in ix])) for c in range(k)]

        for p, iu in by_u.items():
            kp = self.arity(p)
            for q, jv in by_v.items():
                kq = self.arity(q)
                U = [R.Ext(e.val[:, None], e.om[:, None]) for e in arrs(us, iu, kp)]
                V = [R.Ext(e.val[None, :], e.om[None, :]) for e in arrs(vs, jv, kq)]
                blk = np.zeros((len(iu), len(jv)), bool)
                f = self.clause_map.get((p, q))
                if f is not None:
                    blk |= np.broadcast_to(R.vec(f, U, V), blk.shape)
                if p == q:
                    eq = np.ones(blk.shape, bool)
                    for a, b in zip(U, V):
                        eq &= R.ext_eq(a, b)
                    blk |= eq
                out[np.ix_(iu, jv)] = blk
        return out

    def pointset(self, level: int) -> PointSet:
        key = ("ps", level)
        if key not in self._cache:
            self._cache[key] = PointSet(self, level)
        return self._cache[key]

    def order_block(self, row_level: int, col_level: int) -> np.ndarray:
        """Matrix of u <= v for u in pointset(row_level), v in pointset(col_level)."""
        key = ("blk", row_level, col_level)
        blocks = self._cache.setdefault("blocks", {})
        if key in blocks:
            return blocks[key]
        A, B = self.pointset(row_level), self.pointset(col_level)
        out = np.zeros((A.size, B.size), bool)
        for p, kp in self.parts:
            ra = A.part_slice(p)
            U = [R.Ext(A.val[p][:, i][:, None], A.om[p][:, i][:, None]) for i in range(kp)]
            for q, kq in self.parts:
                cb = B.part_slice(q)
                V = [R.Ext(B.val[q][:, i][None, :], B.om[q][:, i][None, :]) for i in range(kq)]
                shape = (ra.stop - ra.start, cb.stop - cb.start)
                f = self.clause_map.get((p, q))
                blk = None
                if f is not None:
                    blk = np.broadcast_to(R.vec(f, U, V), shape)
                if p == q:
                    eq = np.ones(shape, bool)
                    for a, b in zip(U, V):
                        eq &= R.ext_eq(a, b)
                    blk = eq if blk is None else (blk | eq)
                if blk is not None:
                    out[ra, cb] = blk
        out.setflags(write=False)
        if len(blocks) >= 3:
            blocks.pop(next(iter(blocks)))
        blocks[key] = out
        return out

    def __repr__(self):
        return f"SpacePresentation({self.name}: {', '.join(f'{p}/{k}' for p, k in self.parts)})"


@dataclass
class Truncation:
    poset: FinitePoset
    points: list            # PointName per poset element, in element order

    def element(self, point: PointName) -> str:
        return str(point)


def check_partial_order_matrix(M: np.ndarray, points):
    """Raise AxiomFailure with concrete points if M is not a partial order."""
    n = M.shape[0]
    both = M & M.T & ~np.eye(n, dtype=bool)
    if both.any():
        i, j = map(int, np.argwhere(both)[0])
        raise AxiomFailure("antisymmetry", "distinct points below each other", [points[i], points[j]])
    Mf = M.astype(np.float32)
    comp = (Mf @ Mf) > 0
    bad = comp & ~M
    if bad.any():
        i, k = map(int, np.argwhere(bad)[0])
        j = int(np.flatnonzero(M[i] & M[:, k])[0])
        raise AxiomFailure("transitivity", "rule is not transitive", [points[i], points[j], points[k]])


def truncate(S: SpacePresentation, n: int, check: bool = True) -> Truncation:
    """The finite subposet of points whose finite coordinates are <= n."""
    ps = S.pointset(n)
    M = np.array(S.order_block(n, n))
    points = ps.points()
    if check:
        check_partial_order_matrix(M, points)
    return Truncation(FinitePoset.from_matrix([str(p) for p in points], M, check=False), points)


def parse_point(text: str) -> PointName:
    """'main(3)', 'grid(1,omega)', 'y' or 'y()'."""
    text = text.strip()
    if "(" not in text:
        return PointName(text, ())
    part, rest = text.split("(", 1)
    rest = rest.rstrip()
    if not rest.endswith(")"):
        raise ValueError(f"bad point {text!r}")
    inner = rest[:-1].strip()
    coords = []
    if inner:
        for c in inner.split(","):
            c = c.strip()
            coords.append(OMEGA if c in ("omega", "ω", "w") else check_nat(int(c)))
    return PointName(part.strip(), tuple(coords))


def all_window_points(S: SpacePresentation, level: int):
    for p, k in S.parts:
        for cs in product(list(range(level + 1)) + [OMEGA], repeat=k):
            yield PointName(p, cs)
