"""Order-rule formulas over omega+1 coordinates.

A rule compares the coordinates of a lower point ``u`` with those of an
upper point ``v``.  Terms are restricted to a linear fragment: a coordinate,
a constant, omega, a coordinate plus a constant or a coordinate, or a
coordinate minus a constant.  Sums follow omega-absorbing arithmetic.

Every formula has two evaluators: ``holds`` works on scalar NatOmega
values, ``vec`` on numpy arrays of (value, is_omega) pairs with
broadcasting.  The two are kept deliberately separate so tests can check
one against the other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import FragmentViolation
from .nat import OMEGA, omega_add


# terms --------------------------------------------------------------------


@dataclass(frozen=True)
class Coord:
    var: str      # "u" (lower point) or "v" (upper point)
    index: int


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class OmegaConst:
    pass


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: Const


def check_term(t):
    """Raise FragmentViolation unless ``t`` lies in the linear fragment."""
    if isinstance(t, (Coord, Const, OmegaConst)):
        if isinstance(t, Const) and t.value < 0:
            raise FragmentViolation("negative constant")
        return
    if isinstance(t, Add):
        kinds = {type(t.left), type(t.right)}
        if kinds <= {Coord, Const} and Coord in kinds:
            return
        raise FragmentViolation("a sum must be coordinate+constant or coordinate+coordinate")
    if isinstance(t, Sub):
        if isinstance(t.left, Coord) and isinstance(t.right, Const):
            return
        raise FragmentViolation("only coordinate-constant differences are allowed")
    raise FragmentViolation(f"term {t!r} is outside the linear fragment")


def term_consts(t):
    if isinstance(t, Const):
        return [t.value]
    if isinstance(t, (Add, Sub)):
        return term_consts(t.left) + term_consts(t.right)
    return []


def term_coords(t):
    if isinstance(t, Coord):
        return [t]
    if isinstance(t, (Add, Sub)):
        return term_coords(t.left) + term_coords(t.right)
    return []


def swap_term(t):
    if isinstance(t, Coord):
        return Coord("v" if t.var == "u" else "u", t.index)
    if isinstance(t, Add):
        return Add(swap_term(t.left), swap_term(t.right))
    if isinstance(t, Sub):
        return Sub(swap_term(t.left), t.right)
    return t


def eval_term(t, u, v):
    if isinstance(t, Coord):
        return (u if t.var == "u" else v)[t.index]
    if isinstance(t, Const):
        return t.value
    if isinstance(t, OmegaConst):
        return OMEGA
    if isinstance(t, Add):
        return omega_add(eval_term(t.left, u, v), eval_term(t.right, u, v))
    if isinstance(t, Sub):
        a = eval_term(t.left, u, v)
        return OMEGA if a is OMEGA else a - t.right.value
    raise TypeError(t)


class Ext(NamedTuple):
    """Vectorized NatOmega: finite value (garbage where om) and omega flag."""
    val: object
    om: object


def vec_term(t, U, V) -> Ext:
    if isinstance(t, Coord):
        return (U if t.var == "u" else V)[t.index]
    if isinstance(t, Const):
        return Ext(np.int64(t.value), np.False_)
    if isinstance(t, OmegaConst):
        return Ext(np.int64(0), np.True_)
    if isinstance(t, Add):
        a, b = vec_term(t.left, U, V), vec_term(t.right, U, V)
        return Ext(a.val + b.val, a.om | b.om)
    if isinstance(t, Sub):
        a = vec_term(t.left, U, V)
        return Ext(a.val - t.right.value, a.om)
    raise TypeError(t)


def term_str(t, names=None):
    if isinstance(t, Coord):
        if names:
            return names[t.var][t.index]
        return f"{t.var}{t.index}"
    if isinstance(t, Const):
        return str(t.value)
    if isinstance(t, OmegaConst):
        return "omega"
    if isinstance(t, Add):
        return f"{term_str(t.left, names)} + {term_str(t.right, names)}"
    if isinstance(t, Sub):
        return f"{term_str(t.left, names)} - {term_str(t.right, names)}"
    raise TypeError(t)


# formulas -----------------------------------------------------------------


CMP_OPS = ("==", "!=", "<=", "<", ">=", ">")


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class And:
    items: tuple


@dataclass(frozen=True)
class Or:
    items: tuple


@dataclass(frozen=True)
class Not:
    item: object


@dataclass(frozen=True)
class Cmp:
    op: str
    lhs: object
    rhs: object

    def __post_init__(self):
        if self.op not in CMP_OPS:
            raise FragmentViolation(f"unknown comparison {self.op!r}")
        check_term(self.lhs)
        check_term(self.rhs)


@dataclass(frozen=True)
class PartPair:
    """True iff the lower point lies in part ``src`` and the upper one in ``dst``."""
    src: str
    dst: str


TRUE = TrueF()
FALSE = FalseF()


def conj(*fs):
    items = []
    for f in fs:
        if isinstance(f, FalseF):
            return FALSE
        if isinstance(f, TrueF):
            continue
        items.extend(f.items if isinstance(f, And) else [f])
    if not items:
        return TRUE
    return items[0] if len(items) == 1 else And(tuple(items))


def disj(*fs):
    items = []
    for f in fs:
        if isinstance(f, TrueF):
            return TRUE
        if isinstance(f, FalseF):
            continue
        items.extend(f.items if isinstance(f, Or) else [f])
    if not items:
        return FALSE
    return items[0] if len(items) == 1 else Or(tuple(items))


def neg(f):
    if isinstance(f, TrueF):
        return FALSE
    if isinstance(f, FalseF):
        return TRUE
    if isinstance(f, Not):
        return f.item
    return Not(f)


def _cmp_scalar(op, a, b):
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op == "<=":
        return a <= b
    if op == "<":
        return a < b
    if op == ">=":
        return b <= a
    return b < a


def holds(f, u, v, parts=None) -> bool:
    """Scalar evaluation; ``parts`` = (src, dst) is needed only for PartPair atoms."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, And):
        return all(holds(g, u, v, parts) for g in f.items)
    if isinstance(f, Or):
        return any(holds(g, u, v, parts) for g in f.items)
    if isinstance(f, Not):
        return not holds(f.item, u, v, parts)
    if isinstance(f, Cmp):
        return _cmp_scalar(f.op, eval_term(f.lhs, u, v), eval_term(f.rhs, u, v))
    if isinstance(f, PartPair):
        return parts == (f.src, f.dst)
    raise TypeError(f)


def ext_le(a: Ext, b: Ext):
    return b.om | (~a.om & (a.val <= b.val))


def ext_lt(a: Ext, b: Ext):
    return ~a.om & (b.om | (a.val < b.val))


def ext_eq(a: Ext, b: Ext):
    return (a.om & b.om) | (~a.om & ~b.om & (a.val == b.val))


def _cmp_vec(op, a, b):
    if op == "==":
        return ext_eq(a, b)
    if op == "!=":
        return ~ext_eq(a, b)
    if op == "<=":
        return ext_le(a, b)
    if op == "<":
        return ext_lt(a, b)
    if op == ">=":
        return ext_le(b, a)
    return ext_lt(b, a)


def vec(f, U, V):
    """Vectorized evaluation; U, V are lists of Ext per coordinate."""
    if isinstance(f, TrueF):
        return np.True_
    if isinstance(f, FalseF):
        return np.False_
    if isinstance(f, And):
        out = np.True_
        for g in f.items:
            out = out & vec(g, U, V)
        return out
    if isinstance(f, Or):
        out = np.False_
        for g in f.items:
            out = out | vec(g, U, V)
        return out
    if isinstance(f, Not):
        return ~vec(f.item, U, V)
    if isinstance(f, Cmp):
        return _cmp_vec(f.op, vec_term(f.lhs, U, V), vec_term(f.rhs, U, V))
    raise TypeError(f"cannot vectorize {f!r}")


def specialize(f, src, dst):
    """Resolve PartPair atoms for a fixed pair of parts."""
    if isinstance(f, PartPair):
        return TRUE if (f.src, f.dst) == (src, dst) else FALSE
    if isinstance(f, And):
        return conj(*(specialize(g, src, dst) for g in f.items))
    if isinstance(f, Or):
        return disj(*(specialize(g, src, dst) for g in f.items))
    if isinstance(f, Not):
        return neg(specialize(f.item, src, dst))
    return f


def swap(f):
    """Exchange the roles of u and v (used for order duals)."""
    if isinstance(f, Cmp):
        return Cmp(f.op, swap_term(f.lhs), swap_term(f.rhs))
    if isinstance(f, And):
        return And(tuple(swap(g) for g in f.items))
    if isinstance(f, Or):
        return Or(tuple(swap(g) for g in f.items))
    if isinstance(f, Not):
        return Not(swap(f.item))
    if isinstance(f, PartPair):
        return PartPair(f.dst, f.src)
    return f


def atoms(f):
    if isinstance(f, (And, Or)):
        for g in f.items:
            yield from atoms(g)
    elif isinstance(f, Not):
        yield from atoms(f.item)
    else:
        yield f


def formula_consts(f):
    out = []
    for a in atoms(f):
        if isinstance(a, Cmp):
            out += term_consts(a.lhs) + term_consts(a.rhs)
    return out


def formula_coords(f):
    out = []
    for a in atoms(f):
        if isinstance(a, Cmp):
            out += term_coords(a.lhs) + term_coords(a.rhs)
    return out


def formula_str(f, names=None, top=True):
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Cmp):
        return f"{term_str(f.lhs, names)} {f.op} {term_str(f.rhs, names)}"
    if isinstance(f, Not):
        return f"not ({formula_str(f.item, names, False)})"
    if isinstance(f, PartPair):
        return f"[{f.src}->{f.dst}]"
    sep = " and " if isinstance(f, And) else " or "
    s = sep.join(formula_str(g, names, False) for g in f.items)
    return s if top else f"({s})"
