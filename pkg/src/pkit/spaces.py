"""Built-in spaces and the combinators that build new presentations.

Combinators rename parts apart with the prefixes ``l.`` and ``r.``.
Descriptors handed to ``down_up_sum`` are written over the parts of the
corresponding summand and get renamed along with it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rules as R
from .descriptors import (ALL, CoordIsOmega, DAnd, DFalse, DNot, DOr, DTrue, InPart, Limit, Region,
                          SetDescriptor, CoordEq, CoordGeq, rename_parts)
from .engine import as_region, is_downset, is_upset
from .errors import ArityMismatch, NotClosedDownset, NotClosedUpset, UnknownAtom
from .order import FinitePoset
from .presentation import SpacePresentation

u0, u1 = R.Coord("u", 0), R.Coord("u", 1)
v0, v1 = R.Coord("v", 0), R.Coord("v", 1)
OMEGA_T = R.OmegaConst()


def _cmp(op, a, b):
    return R.Cmp(op, a, b)


# expression AST -------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Finite:
    poset: FinitePoset
    name: str = "P"


@dataclass(frozen=True)
class Dual:
    arg: object


@dataclass(frozen=True)
class Union:
    left: object
    right: object


@dataclass(frozen=True)
class LinearSum:
    left: object
    right: object


@dataclass(frozen=True)
class DownUpSum:
    left: object
    D: SetDescriptor
    right: object
    U: SetDescriptor


@dataclass(frozen=True)
class Custom:
    """A presentation defined directly (for example by a ``space`` block)."""
    name: str


def expr_str(e) -> str:
    from .descriptors import descriptor_str
    if isinstance(e, Atom):
        return e.name
    if isinstance(e, Finite):
        return f"finite({e.name})"
    if isinstance(e, Custom):
        return e.name
    if isinstance(e, Dual):
        return f"dual({expr_str(e.arg)})"
    if isinstance(e, Union):
        return f"union({expr_str(e.left)}, {expr_str(e.right)})"
    if isinstance(e, LinearSum):
        return f"lsum({expr_str(e.left)}, {expr_str(e.right)})"
    if isinstance(e, DownUpSum):
        return (f"dsum({expr_str(e.left)}, {descriptor_str(e.D)}, "
                f"{expr_str(e.right)}, {descriptor_str(e.U)})")
    return str(e)


# atoms ---------------------------------------------------------------------


def _z(kind):
    if kind == 1:
        mm = _cmp("<=", v0, u0)
    elif kind == 2:
        mm = R.disj(_cmp("==", u0, v0), _cmp("==", u0, OMEGA_T))
    else:
        mm = R.FALSE
    clauses = [("main", "y", _cmp("==", u0, OMEGA_T))]
    if not isinstance(mm, R.FalseF):
        clauses.insert(0, ("main", "main", mm))
    return (("main", 1), ("y", 0)), clauses


def _atom_def(name):
    if name == "point":
        return (("pt", 0),), []
    if name in ("z1", "z2", "z3"):
        return _z(int(name[1]))
    if name == "chain_fan":
        return (("main", 1),), [("main", "main", _cmp("<=", v0, u0))]
    if name == "antichain_fan":
        return (("main", 1),), []
    if name == "grid":
        s = R.Add(v0, v1)
        return (("grid", 2),), [("grid", "grid", R.conj(_cmp(">=", u0, s), _cmp(">=", u1, s)))]
    if name == "example_e1":
        return (("P", 1), ("Q", 1)), [
            ("P", "P", _cmp("<=", v0, u0)),
            ("Q", "Q", _cmp("<=", v0, u0)),
            ("Q", "P", _cmp("<=", v0, u0)),
        ]
    if name == "example_e2":
        return (("C", 1), ("D", 1)), [("C", "D", _cmp("==", u0, v0))]
    raise UnknownAtom(f"unknown atom {name!r}")


ATOM_NAMES = ("point", "z1", "z2", "z3", "chain_fan", "antichain_fan", "grid", "example_e1", "example_e2")

ATOM_ALIASES = {
    "Z1": "z1", "Z2": "z2", "Z3": "z3", "E1": "example_e1", "E2": "example_e2",
    "pt": "point", "point": "point", "grid": "grid", "chain_fan": "chain_fan",
    "antichain_fan": "antichain_fan", "z1": "z1", "z2": "z2", "z3": "z3",
    "example_e1": "example_e1", "example_e2": "example_e2",
}


_ATOM_CACHE = {}


def atom(name: str) -> SpacePresentation:
    key = ATOM_ALIASES.get(name, name)
    if key not in _ATOM_CACHE:
        parts, clauses = _atom_def(key)
        _ATOM_CACHE[key] = SpacePresentation(key, parts, tuple(clauses), Atom(key))
    return _ATOM_CACHE[key]


def finite_space(P: FinitePoset, name="P") -> SpacePresentation:
    """Each element becomes an arity-0 part; the rule lists the strict order."""
    parts = tuple((e, 0) for e in P.elements)
    clauses = tuple((a, b, R.TRUE) for a, b in sorted(P.leq) if a != b)
    return SpacePresentation(f"finite({name})", parts, clauses, Finite(P, name))


# combinators ---------------------------------------------------------------


def _prefix_clauses(S, pre):
    return [(pre + s, pre + d, f) for s, d, f in S.clauses]


def order_dual(S: SpacePresentation) -> SpacePresentation:
    clauses = tuple((d, s, R.swap(f)) for s, d, f in S.clauses)
    prov = S.provenance.arg if isinstance(S.provenance, Dual) else Dual(S.provenance)
    name = S.name[5:-1] if S.name.startswith("dual(") and isinstance(S.provenance, Dual) else f"dual({S.name})"
    return SpacePresentation(name, S.parts, clauses, prov)


def disjoint_union(A: SpacePresentation, B: SpacePresentation) -> SpacePresentation:
    parts = tuple(("l." + p, k) for p, k in A.parts) + tuple(("r." + p, k) for p, k in B.parts)
    clauses = tuple(_prefix_clauses(A, "l.") + _prefix_clauses(B, "r."))
    return SpacePresentation(f"union({A.name}, {B.name})", parts, clauses, Union(A.provenance, B.provenance))


def descriptor_formula(d: SetDescriptor, part: str, arity: int, var: str):
    """Rule formula for 'point of part with coordinates var lies in d'."""
    if isinstance(d, DTrue):
        return R.TRUE
    if isinstance(d, DFalse):
        return R.FALSE
    if isinstance(d, InPart):
        return R.TRUE if d.part == part else R.FALSE
    if isinstance(d, Limit):
        return R.disj(*(_cmp("==", R.Coord(var, i), OMEGA_T) for i in range(arity)))
    if isinstance(d, (CoordEq, CoordGeq, CoordIsOmega)):
        if d.index >= arity:
            raise ArityMismatch(f"coordinate {d.index} on part {part}")
        c = R.Coord(var, d.index)
        if isinstance(d, CoordIsOmega):
            return _cmp("==", c, OMEGA_T)
        if isinstance(d, CoordEq):
            return _cmp("==", c, R.Const(d.value))
        return _cmp(">=", c, R.Const(d.value))
    if isinstance(d, DAnd):
        out = R.TRUE
        for x in d.items:
            out = R.conj(out, descriptor_formula(x, part, arity, var))
            if isinstance(out, R.FalseF):
                break
        return out
    if isinstance(d, DOr):
        out = R.FALSE
        for x in d.items:
            out = R.disj(out, descriptor_formula(x, part, arity, var))
            if isinstance(out, R.TrueF):
                break
        return out
    if isinstance(d, DNot):
        return R.neg(descriptor_formula(d.item, part, arity, var))
    raise TypeError(d)


def _as_descriptor(S, d):
    if isinstance(d, Region):
        return d.to_descriptor()
    return d


def down_up_sum(A: SpacePresentation, D, B: SpacePresentation, U) -> SpacePresentation:
    """Disjoint union plus d <= u for d in D (closed downset of A), u in U (closed upset of B)."""
    rD, rU = as_region(A, D), as_region(B, U)
    if not (rD.is_closed() and is_downset(A, rD)):
        raise NotClosedDownset(f"{rD.describe()} is not a closed downset of {A.name}")
    if not (rU.is_closed() and is_upset(B, rU)):
        raise NotClosedUpset(f"{rU.describe()} is not a closed upset of {B.name}")
    dD, dU = _as_descriptor(A, D), _as_descriptor(B, U)
    base = disjoint_union(A, B)
    cross = []
    for p, kp in A.parts:
        fd = descriptor_formula(dD, p, kp, "u")
        if isinstance(fd, R.FalseF):
            continue
        for q, kq in B.parts:
            fu = descriptor_formula(dU, q, kq, "v")
            f = R.conj(fd, fu)
            if not isinstance(f, R.FalseF):
                cross.append(("l." + p, "r." + q, f))
    from .descriptors import descriptor_str
    name = f"dsum({A.name}, {descriptor_str(dD)}, {B.name}, {descriptor_str(dU)})"
    return SpacePresentation(name, base.parts, base.clauses + tuple(cross),
                             DownUpSum(A.provenance, dD, B.provenance, dU))


def linear_sum(A: SpacePresentation, B: SpacePresentation) -> SpacePresentation:
    S = down_up_sum(A, ALL, B, ALL)
    S.name = f"lsum({A.name}, {B.name})"
    S.provenance = LinearSum(A.provenance, B.provenance)
    return S


def total(S):
    return Region.total(S.parts)


def compile_expr(e) -> SpacePresentation:
    if isinstance(e, SpacePresentation):
        return e
    if isinstance(e, Atom):
        return atom(e.name)
    if isinstance(e, Finite):
        return finite_space(e.poset, e.name)
    if isinstance(e, Dual):
        return order_dual(compile_expr(e.arg))
    if isinstance(e, Union):
        return disjoint_union(compile_expr(e.left), compile_expr(e.right))
    if isinstance(e, LinearSum):
        return linear_sum(compile_expr(e.left), compile_expr(e.right))
    if isinstance(e, DownUpSum):
        return down_up_sum(compile_expr(e.left), e.D, compile_expr(e.right), e.U)
    raise TypeError(f"cannot compile {e!r}")


def limit_point_region(S: SpacePresentation) -> Region:
    return as_region(S, Limit())


def z_points(i: int):
    """Named points of Z_i: (x, y, z_n factory)."""
    from .nat import OMEGA
    from .presentation import PointName
    return PointName("main", (OMEGA,)), PointName("y"), (lambda n: PointName("main", (n,)))


def builtin_suite():
    """Every built-in atom and its order dual."""
    out = []
    for n in ATOM_NAMES:
        S = atom(n)
        out.append(S)
        out.append(order_dual(S))
    return out
