"""Definable subsets of a presented space.

A ``SetDescriptor`` is a boolean combination of atoms (part membership,
coordinate equal to / at least a constant, coordinate is omega).  If every
constant is at most K, membership only depends on each coordinate's class
at threshold t = K+1: the exact values 0..t-1, "finite and >= t", and
omega.  ``Region`` stores a set as a boolean array over these classes per
part, which makes boolean operations, equality and topological tests exact.

Class index layout along each axis at threshold t:
    0 .. t-1   exact finite values
    t          finite values >= t   (the "tail")
    t+1        omega
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import ArityMismatch, UnknownPart
from .nat import OMEGA, fmt


# descriptor AST -----------------------------------------------------------


class SetDescriptor:
    def __and__(self, other):
        return DAnd((self, other))

    def __or__(self, other):
        return DOr((self, other))

    def __invert__(self):
        return DNot(self)


@dataclass(frozen=True)
class DTrue(SetDescriptor):
    pass


@dataclass(frozen=True)
class DFalse(SetDescriptor):
    pass


@dataclass(frozen=True)
class InPart(SetDescriptor):
    part: str


@dataclass(frozen=True)
class CoordEq(SetDescriptor):
    index: int
    value: int


@dataclass(frozen=True)
class CoordGeq(SetDescriptor):
    """Coordinate >= value; omega satisfies every such atom."""
    index: int
    value: int


@dataclass(frozen=True)
class CoordIsOmega(SetDescriptor):
    index: int


@dataclass(frozen=True)
class DAnd(SetDescriptor):
    items: tuple


@dataclass(frozen=True)
class DOr(SetDescriptor):
    items: tuple


@dataclass(frozen=True)
class DNot(SetDescriptor):
    item: SetDescriptor


@dataclass(frozen=True)
class Limit(SetDescriptor):
    """Points with at least one omega coordinate (the non-isolated points)."""
    pass


ALL = DTrue()
NONE = DFalse()


def d_consts(d) -> list[int]:
    if isinstance(d, (CoordEq, CoordGeq)):
        return [d.value]
    if isinstance(d, (DAnd, DOr)):
        return [c for x in d.items for c in d_consts(x)]
    if isinstance(d, DNot):
        return d_consts(d.item)
    return []


def d_parts(d) -> set:
    if isinstance(d, InPart):
        return {d.part}
    if isinstance(d, (DAnd, DOr)):
        return set().union(*(d_parts(x) for x in d.items)) if d.items else set()
    if isinstance(d, DNot):
        return d_parts(d.item)
    return set()


def rename_parts(d, fn):
    if isinstance(d, InPart):
        return InPart(fn(d.part))
    if isinstance(d, DAnd):
        return DAnd(tuple(rename_parts(x, fn) for x in d.items))
    if isinstance(d, DOr):
        return DOr(tuple(rename_parts(x, fn) for x in d.items))
    if isinstance(d, DNot):
        return DNot(rename_parts(d.item, fn))
    return d


def descriptor_eval(d, part: str, coords: tuple, arity: int | None = None) -> bool:
    """Membership of a point; short-circuits so guarded atoms never see bad coordinates."""
    if arity is None:
        arity = len(coords)
    if isinstance(d, DTrue):
        return True
    if isinstance(d, DFalse):
        return False
    if isinstance(d, InPart):
        return part == d.part
    if isinstance(d, Limit):
        return any(c is OMEGA for c in coords)
    if isinstance(d, (CoordEq, CoordGeq, CoordIsOmega)):
        if d.index >= arity:
            raise ArityMismatch(f"coordinate {d.index} on part {part} of arity {arity}")
        c = coords[d.index]
        if isinstance(d, CoordIsOmega):
            return c is OMEGA
        if isinstance(d, CoordEq):
            return c is not OMEGA and c == d.value
        return c is OMEGA or c >= d.value
    if isinstance(d, DAnd):
        return all(descriptor_eval(x, part, coords, arity) for x in d.items)
    if isinstance(d, DOr):
        return any(descriptor_eval(x, part, coords, arity) for x in d.items)
    if isinstance(d, DNot):
        return not descriptor_eval(d.item, part, coords, arity)
    raise TypeError(d)


def descriptor_str(d, top=True) -> str:
    if isinstance(d, DTrue):
        return "all"
    if isinstance(d, DFalse):
        return "none"
    if isinstance(d, Limit):
        return "limit"
    if isinstance(d, InPart):
        return f"in({d.part})"
    if isinstance(d, CoordEq):
        return f"eq({d.index},{d.value})"
    if isinstance(d, CoordGeq):
        return f"geq({d.index},{d.value})"
    if isinstance(d, CoordIsOmega):
        return f"isomega({d.index})"
    if isinstance(d, DNot):
        return "!" + descriptor_str(d.item, False)
    sep = " & " if isinstance(d, DAnd) else " | "
    if not d.items:
        return "all" if isinstance(d, DAnd) else "none"
    s = sep.join(descriptor_str(x, False) for x in d.items)
    return s if top or len(d.items) == 1 else f"({s})"


# regions ------------------------------------------------------------------


def class_of(x, t: int) -> int:
    if x is OMEGA:
        return t + 1
    return min(x, t)


def class_rep(i: int, t: int):
    """A representative value of class i (the tail is represented by t)."""
    return OMEGA if i == t + 1 else i


def point_str(part, coords) -> str:
    if not coords:
        return part
    return f"{part}({','.join(fmt(c) for c in coords)})"


class Region:
    """An exact definable subset: per part a bool array of shape (t+2,)*arity."""

    __slots__ = ("parts", "t", "arrays", "_key")

    def __init__(self, parts, t: int, arrays: dict):
        self.parts = tuple(parts)
        self.t = int(t)
        self.arrays = {}
        for p, k in self.parts:
            a = np.asarray(arrays[p], dtype=bool)
            if a.shape != (self.t + 2,) * k:
                raise ValueError(f"bad array shape {a.shape} for part {p}")
            a = a.copy()
            a.setflags(write=False)
            self.arrays[p] = a
        self._key = None

    # constructors
    @classmethod
    def empty(cls, parts, t=0):
        return cls(parts, t, {p: np.zeros((t + 2,) * k, bool) for p, k in parts})

    @classmethod
    def total(cls, parts, t=0):
        return cls(parts, t, {p: np.ones((t + 2,) * k, bool) for p, k in parts})

    @classmethod
    def from_descriptor(cls, parts, d: SetDescriptor) -> "Region":
        parts = tuple(parts)
        known = {p for p, _ in parts}
        for p in d_parts(d):
            if p not in known:
                raise UnknownPart(f"unknown part {p!r}")
        cs = d_consts(d)
        t = (max(cs) + 1) if cs else 0
        arrays = {}
        for p, k in parts:
            a = np.zeros((t + 2,) * k, bool)
            for cell in product(range(t + 2), repeat=k):
                a[cell] = descriptor_eval(d, p, tuple(class_rep(i, t) for i in cell), k)
            arrays[p] = a
        return cls(parts, t, arrays)

    @classmethod
    def from_points(cls, parts, points) -> "Region":
        """Finite set of points given as (part, coords) pairs."""
        pts = list(points)
        fin = [c for _, cs in pts for c in cs if c is not OMEGA]
        t = max(fin) + 1 if fin else 0
        arrays = {p: np.zeros((t + 2,) * k, bool) for p, k in parts}
        ar = dict(parts)
        for p, cs in pts:
            if p not in ar:
                raise UnknownPart(f"unknown part {p!r}")
            if len(cs) != ar[p]:
                raise ArityMismatch(f"{p} has arity {ar[p]}")
            arrays[p][tuple(class_of(c, t) for c in cs)] = True
        return cls(parts, t, arrays)

    # threshold changes
    def refine(self, t2: int) -> "Region":
        if t2 == self.t:
            return self
        if t2 < self.t:
            raise ValueError("refine can only raise the threshold")
        m = np.array([min(i, self.t) for i in range(t2 + 1)] + [self.t + 1])
        arrays = {}
        for p, k in self.parts:
            a = self.arrays[p]
            arrays[p] = a[np.ix_(*([m] * k))] if k else a
        return Region(self.parts, t2, arrays)

    def canonical(self) -> "Region":
        """Same set at the least threshold that represents it."""
        arrays = {p: self.arrays[p] for p, _ in self.parts}
        t = self.t
        while t > 0:
            ok = True
            for p, k in self.parts:
                a = arrays[p]
                for ax in range(k):
                    if not np.array_equal(a.take(t - 1, axis=ax), a.take(t, axis=ax)):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
            for p, k in self.parts:
                a = arrays[p]
                for ax in range(k):
                    a = np.delete(a, t, axis=ax)
                arrays[p] = a
            t -= 1
        return Region(self.parts, t, arrays)

    def _aligned(self, other):
        if self.parts != other.parts:
            raise ValueError("regions live on different spaces")
        t = max(self.t, other.t)
        return self.refine(t), other.refine(t), t

    # boolean algebra
    def _op(self, other, fn):
        a, b, t = self._aligned(other)
        return Region(self.parts, t, {p: fn(a.arrays[p], b.arrays[p]) for p, _ in self.parts})

    def __or__(self, other):
        return self._op(other, np.logical_or)

    def __and__(self, other):
        return self._op(other, np.logical_and)

    def __sub__(self, other):
        return self._op(other, lambda x, y: x & ~y)

    def __invert__(self):
        return Region(self.parts, self.t, {p: ~self.arrays[p] for p, _ in self.parts})

    def __le__(self, other):
        return (self - other).is_empty()

    def __eq__(self, other):
        if not isinstance(other, Region):
            return NotImplemented
        if self.parts != other.parts:
            return False
        a, b, _ = self._aligned(other)
        return all(np.array_equal(a.arrays[p], b.arrays[p]) for p, _ in self.parts)

    def __hash__(self):
        if self._key is None:
            c = self.canonical()
            self._key = hash((self.parts, c.t, tuple(c.arrays[p].tobytes() for p, _ in c.parts)))
        return self._key

    def is_empty(self) -> bool:
        return not any(self.arrays[p].any() for p, _ in self.parts)

    def is_total(self) -> bool:
        return all(self.arrays[p].all() for p, _ in self.parts)

    def contains(self, part, coords) -> bool:
        ar = dict(self.parts)
        if part not in ar:
            raise UnknownPart(f"unknown part {part!r}")
        if len(coords) != ar[part]:
            raise ArityMismatch(f"{part} has arity {ar[part]}")
        return bool(self.arrays[part][tuple(class_of(c, self.t) for c in coords)])

    def is_finite(self) -> bool:
        """Only finitely many points: no tail cells."""
        t = self.t
        for p, k in self.parts:
            a = self.arrays[p]
            for ax in range(k):
                if a.take(t, axis=ax).any():
                    return False
        return True

    # topology
    def is_open(self) -> bool:
        """Every member with omega coordinates J has its J-tail neighbours inside."""
        t = self.t
        for p, k in self.parts:
            a = self.arrays[p]
            for r in range(1, k + 1):
                for J in _subsets(k, r):
                    sel_om = tuple(t + 1 if ax in J else slice(None) for ax in range(k))
                    sel_tail = tuple(t if ax in J else slice(None) for ax in range(k))
                    if np.any(a[sel_om] & ~a[sel_tail]):
                        return False
        return True

    def is_closed(self) -> bool:
        return (~self).is_open()

    def is_clopen(self) -> bool:
        return self.is_open() and self.is_closed()

    def first_non_open_point(self):
        """(part, cell, axis) with cell inside and its axis-tail neighbour outside, axis single."""
        t = self.t
        for p, k in self.parts:
            a = self.arrays[p]
            for cell in product(range(t + 2), repeat=k):
                if not a[cell]:
                    continue
                for ax in range(k):
                    if cell[ax] == t + 1:
                        nb = cell[:ax] + (t,) + cell[ax + 1:]
                        if not a[nb]:
                            return p, cell, ax
        return None

    # vectorized membership on a PointSet
    def mask(self, ps) -> np.ndarray:
        out = np.zeros(ps.size, dtype=bool)
        for p, k in self.parts:
            sl = ps.part_slice(p)
            if sl.stop == sl.start:
                continue
            a = self.arrays[p]
            if k == 0:
                out[sl] = bool(a)
                continue
            val, om = ps.val[p], ps.om[p]
            cls = np.where(om, self.t + 1, np.minimum(val, self.t))
            out[sl] = a[tuple(cls[:, i] for i in range(k))]
        return out

    def cells(self):
        """Member cells as (part, class tuple)."""
        for p, k in self.parts:
            a = self.arrays[p]
            for cell in product(range(self.t + 2), repeat=k):
                if a[cell]:
                    yield p, cell

    def to_descriptor(self) -> SetDescriptor:
        """Normal form: per part, a union of boxes built from coordinate runs."""
        r = self.canonical()
        t = r.t
        disjuncts = []
        for p, k in r.parts:
            a = r.arrays[p]
            if not a.any():
                continue
            if a.all():
                disjuncts.append(InPart(p))
                continue
            if k == 1:
                for conj in _runs_to_atoms(0, set(np.flatnonzero(a)), t):
                    disjuncts.append(_mkand([InPart(p)] + conj))
            elif k == 2:
                groups = {}
                for i in range(t + 2):
                    key = tuple(np.flatnonzero(a[i]))
                    if key:
                        groups.setdefault(key, set()).add(i)
                for cols, rows in groups.items():
                    for rc in _runs_to_atoms(0, rows, t):
                        for cc in _runs_to_atoms(1, set(cols), t):
                            disjuncts.append(_mkand([InPart(p)] + rc + cc))
            else:
                for cell in product(range(t + 2), repeat=k):
                    if a[cell]:
                        atoms = [InPart(p)]
                        for ax, c in enumerate(cell):
                            atoms += _runs_to_atoms(ax, {c}, t)[0]
                        disjuncts.append(_mkand(atoms))
        if not disjuncts:
            return NONE
        return disjuncts[0] if len(disjuncts) == 1 else DOr(tuple(disjuncts))

    def describe(self) -> str:
        return descriptor_str(self.to_descriptor())

    def finite_points(self):
        """Members as point strings when the region is finite (no tails)."""
        if not self.is_finite():
            raise ValueError("region is infinite")
        out = []
        t = self.t
        for p, cell in self.cells():
            out.append(point_str(p, tuple(class_rep(i, t) for i in cell)))
        return out

    def __repr__(self):
        return f"Region({self.describe()})"


def _subsets(k, r):
    from itertools import combinations
    return [set(c) for c in combinations(range(k), r)]


def _mkand(atoms):
    atoms = [a for a in atoms if not isinstance(a, DTrue)]
    if not atoms:
        return ALL
    return atoms[0] if len(atoms) == 1 else DAnd(tuple(atoms))


def _runs_to_atoms(ax, classes: set, t: int) -> list[list]:
    """Disjoint conjunction lists covering the given classes on one axis."""
    cls = sorted(int(c) for c in classes)
    if cls == list(range(t + 2)):
        return [[]]
    runs = []
    for c in cls:
        if runs and runs[-1][1] == c - 1:
            runs[-1][1] = c
        else:
            runs.append([c, c])
    out = []
    for a, b in runs:
        if b == t + 1 and a == t + 1:
            out.append([CoordIsOmega(ax)])
        elif b == t + 1:
            out.append([CoordGeq(ax, a)] if a > 0 else [])
        elif b == t:
            atoms = [DNot(CoordIsOmega(ax))]
            if a > 0:
                atoms.insert(0, CoordGeq(ax, a))
            out.append(atoms)
        elif a == b:
            out.append([CoordEq(ax, a)])
        else:
            atoms = [DNot(CoordGeq(ax, b + 1))]
            if a > 0:
                atoms.insert(0, CoordGeq(ax, a))
            out.append(atoms)
    return out
