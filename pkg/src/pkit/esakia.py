"""Esakia, p-space and co-Heyting verdicts with forbidden-configuration witnesses.

A presented Priestley space is Esakia iff the downset of every basic clopen
cylinder is open.  When that fails, a copy of one of Z1, Z2, Z3 sits inside
the space with a clopen neighbourhood U of the image of y whose downset
meets the copy only in {x, y}.  Two independent routes produce such copies:

* ``find_forbidden_configuration`` starts from a failing cylinder C, picks a
  limit point x of the closed-but-not-open set down(C), a sequence z_n -> x
  outside down(C) and a point y of C above x, and classifies the eventual
  shape of the sequence;
* ``search_configurations`` enumerates small candidate configurations
  directly from the definition, without looking at any failing cylinder.

Every witness goes through ``verify_forbidden_configuration`` before it is
returned; the verifier checks the order pattern by scalar evaluation and
the neighbourhood condition by explicit witness search.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .descriptors import Region, SetDescriptor, class_rep, descriptor_str
from .engine import (as_region, blocks, cell_system, closure_many, cross_level, implication_matrix,
                     is_upset, resolve_window)
from .errors import SearchExhausted, ValidationInconclusive
from .nat import OMEGA, to_json
from .order import reflexive_transitive_closure
from .presentation import PointName, SpacePresentation
from .spaces import order_dual


# witness types ---------------------------------------------------------------


@dataclass(frozen=True)
class SequenceFamily:
    """Points of ``part`` equal to ``base`` except coordinate ``vary`` = offset + n."""
    part: str
    base: tuple
    vary: int
    offset: int = 0

    def limit(self) -> PointName:
        return PointName(self.part, self.base)

    def point(self, n: int) -> PointName:
        cs = list(self.base)
        cs[self.vary] = self.offset + n
        return PointName(self.part, tuple(cs))

    def contains(self, p: PointName) -> bool:
        if p.part != self.part or len(p.coords) != len(self.base):
            return False
        for i, (a, b) in enumerate(zip(p.coords, self.base)):
            if i == self.vary:
                if a is OMEGA or a < self.offset:
                    return False
            elif a != b:
                return False
        return True

    def to_json(self):
        return {"part": self.part, "base": [to_json(c) for c in self.base],
                "vary": self.vary, "offset": self.offset}


@dataclass(frozen=True)
class Embedding:
    """A map Z_kind -> S (or from the order dual of Z_kind when ``dual``)."""
    kind: int
    x: PointName
    y: PointName
    z: SequenceFamily
    dual: bool = False

    def to_json(self):
        return {"kind": self.kind, "dual": self.dual, "x": str(self.x), "y": str(self.y),
                "z": self.z.to_json(), "z0": str(self.z.point(0)), "z1": str(self.z.point(1))}


@dataclass(frozen=True)
class ConfigurationWitness:
    pattern: int
    embedding: Embedding
    U: SetDescriptor
    upset: bool = False          # p-configuration: U is required to be an upset

    def to_json(self):
        d = {"pattern": self.pattern, "U": descriptor_str(self.U), "upset": self.upset}
        d.update(self.embedding.to_json())
        return d


@dataclass
class Verdict:
    holds: bool
    window: int
    witness: Region | None = None       # failing clopen set C
    closure: Region | None = None       # its non-clopen down- (or up-) closure
    configuration: ConfigurationWitness | None = None
    detail: str = ""

    def __bool__(self):
        return self.holds

    def to_json(self):
        d = {"holds": self.holds, "window": self.window}
        if self.witness is not None:
            d["witness"] = self.witness.describe()
            d["closure"] = self.closure.describe() if self.closure is not None else None
        if self.configuration is not None:
            d["configuration"] = self.configuration.to_json()
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass
class Diagnosis:
    ok: bool
    problems: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


# expected order patterns -----------------------------------------------------


def z_pattern_matrix(kind: int, n_z: int, dual=False) -> np.ndarray:
    """Order of [x, y, z_0 .. z_{n-1}] in Z_kind (transposed for its dual)."""
    n = 2 + n_z
    M = np.eye(n, dtype=bool)
    M[0, 1] = True
    if kind in (1, 2):
        M[0, 2:] = True
    if kind == 1:
        for i in range(n_z):
            for j in range(i + 1, n_z):
                M[2 + j, 2 + i] = True      # later points lie below earlier ones
    return M.T.copy() if dual else M


# cylinder verdicts -----------------------------------------------------------


def _first_failure(S, sets, direction, w, cross_check):
    closes = closure_many(S, sets, direction, w, cross_check)
    for C, D in zip(sets, closes):
        if not D.is_clopen():
            return C, D
    return None


def _generated_upsets(S, w):
    """Clopen upsets generated by the basic cylinders at window w, deduplicated."""
    cs = cell_system(S, w + 1)
    imp = implication_matrix(cs, upward=True, closed=True, open_=True)
    reach = reflexive_transitive_closure(imp)
    out, seen = [], set()
    for b in blocks(S, w):
        m = reach[cs.mask_of(b)].any(axis=0)
        key = m.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(cs.region(m))
    return out


def _verdict(S, kind, window, cross_check):
    w = resolve_window(S, window)
    cc = config.resolve_cross_check(cross_check)
    if kind == "esakia":
        fail = _first_failure(S, blocks(S, w), "down", w, cc)
    elif kind == "p":
        fail = _first_failure(S, _generated_upsets(S, w), "down", w, cc)
    elif kind == "co":
        fail = _first_failure(S, blocks(S, w), "up", w, cc)
    else:
        raise ValueError(kind)
    if fail is None:
        return Verdict(True, w)
    C, D = fail
    return Verdict(False, w, C, D, detail=f"closure of {C.describe()} is {D.describe()}, not clopen")


def is_esakia(S: SpacePresentation, window=None, cross_check=None) -> Verdict:
    """Downsets of basic clopen cylinders are clopen; cross-checked against the direct search."""
    v = _verdict(S, "esakia", window, cross_check)
    if config.resolve_cross_check(cross_check):
        found = search_configurations(S, v.window)
        if v.holds and found is not None:
            raise ValidationInconclusive(f"{S.name}: cylinders say Esakia but a configuration exists")
        if not v.holds and found is None:
            raise ValidationInconclusive(f"{S.name}: cylinder {v.witness.describe()} fails but the "
                                         f"direct search finds no configuration")
    if not v.holds:
        v.configuration = configuration_from_failure(S, v.witness, v.closure, v.window)
    return v


def is_p_space(S: SpacePresentation, window=None, cross_check=None) -> Verdict:
    v = _verdict(S, "p", window, cross_check)
    if config.resolve_cross_check(cross_check):
        found = search_configurations(S, v.window, upset=True)
        if v.holds != (found is None):
            raise ValidationInconclusive(f"{S.name}: p-space verdict disagrees with the direct search")
    if not v.holds:
        v.configuration = configuration_from_failure(S, v.witness, v.closure, v.window, upset=True)
    return v


def is_coheyting_space(S: SpacePresentation, window=None, cross_check=None) -> Verdict:
    """Upsets of basic clopen cylinders are clopen (computed directly, not through the dual)."""
    v = _verdict(S, "co", window, cross_check)
    if not v.holds:
        D = order_dual(S)
        cfg = configuration_from_failure(D, v.witness, v.closure, v.window)
        e = cfg.embedding
        v.configuration = ConfigurationWitness(cfg.pattern, Embedding(e.kind, e.x, e.y, e.z, dual=True),
                                               cfg.U, cfg.upset)
    return v


def is_biheyting_space(S: SpacePresentation, window=None, cross_check=None) -> Verdict:
    a = is_esakia(S, window, cross_check)
    if not a.holds:
        return a
    return is_coheyting_space(S, window, cross_check)


# proof-guided extraction -----------------------------------------------------


def _analysis_length(S, t, w):
    return max(t, w) + 2 * S.c_max + 12


def _margin(S):
    return S.c_max + 4


def _classify(zz, xz, zx, lo, hi):
    """Pattern of the z-block [lo, hi] relative to x: 1, 2, 3 or None."""
    sub = zz[lo:hi + 1, lo:hi + 1]
    n = sub.shape[0]
    off = ~np.eye(n, dtype=bool)
    if np.any(zx[lo:hi + 1]):
        return None
    desc = np.tril(np.ones((n, n), bool), -1)
    if np.array_equal(sub & off, desc) and xz[lo:hi + 1].all():
        return 1
    if not (sub & off).any():
        if xz[lo:hi + 1].all():
            return 2
        if not xz[lo:hi + 1].any():
            return 3
    return None


def _least_offset(zz, xz, zx, good, pattern, L, margin):
    """Least o with every index in [o, L] good and [o, L] of the given pattern."""
    if not good[L - margin:].all():
        return None
    best = None
    for o in range(L - margin, -1, -1):
        if not good[o]:
            break
        if _classify(zz, xz, zx, o, L) != pattern:
            break
        best = o
    return best


def _box_around(S, y: PointName, t: int) -> Region:
    """Cylinder: y's finite coordinates exactly, omega coordinates widened to [t, omega]."""
    arrays = {p: np.zeros((t + 2,) * k, bool) for p, k in S.parts}
    sel = []
    for c in y.coords:
        if c is OMEGA:
            sel.append([t, t + 1])
        else:
            if c >= t:
                raise ValueError("finite coordinate beyond the cylinder threshold")
            sel.append([c])
    arrays[y.part][np.ix_(*sel)] = True
    return Region(S.parts, t, arrays)


def _neighbourhood(S, y: PointName, C: Region | None, upset: bool, t: int) -> Region:
    fin = [c for c in y.coords if c is not OMEGA]
    t = max([t] + [c + 1 for c in fin])
    if y.is_isolated():
        U = Region.from_points(S.parts, [(y.part, y.coords)])
    else:
        U = _box_around(S, y, t)
    if C is not None:
        U = U & C
    if upset:
        tt = max(U.t, C.t if C is not None else 0)
        cs = cell_system(S, tt)
        imp = implication_matrix(cs, upward=True, closed=True, open_=True)
        reach = reflexive_transitive_closure(imp)
        U = cs.region(reach[cs.mask_of(U)].any(axis=0))
    return U.canonical()


def configuration_from_failure(S, C: Region, D: Region, window=None, upset=False) -> ConfigurationWitness:
    """Build a forbidden configuration from a clopen C whose downset D is not open."""
    w = resolve_window(S, window)
    loc = D.first_non_open_point()
    if loc is None:
        raise ValidationInconclusive("closure is open; nothing to extract")
    part, cell, ax = loc
    xs = tuple(class_rep(c, D.t) for c in cell)
    x = PointName(part, xs)
    L = _analysis_length(S, max(C.t, D.t), w)
    ps = S.pointset(L)
    cand = [p for p, m in zip(ps.points(), C.mask(ps)) if m]
    cand.sort(key=lambda p: not p.is_isolated())
    above = S.relation([x], cand)[0] if cand else np.zeros(0, bool)
    ys = [p for p, a in zip(cand, above) if a and p != x]
    if not ys:
        raise ValidationInconclusive(f"no point of {C.describe()} above {x}")
    zs = [PointName(part, xs[:ax] + (v,) + xs[ax + 1:]) for v in range(L + 1)]
    zz = S.relation(zs, zs)
    xz = S.relation([x], zs)[0]
    zx = S.relation(zs, [x])[:, 0]
    inD = np.array([D.contains(z.part, z.coords) for z in zs])
    margin = _margin(S)
    for y in ys:
        yz = S.relation([y], zs)[0]
        zy = S.relation(zs, [y])[:, 0]
        good = ~inD & ~yz & ~zy
        pat = _classify(zz, xz, zx, L - margin, L)
        if pat is None:
            continue
        o = _least_offset(zz, xz, zx, good, pat, L, margin)
        if o is None:
            continue
        U = _neighbourhood(S, y, C, upset, C.t)
        fam = SequenceFamily(part, x.coords, ax, o)
        wit = ConfigurationWitness(pat, Embedding(pat, x, y, fam), U.to_descriptor(), upset)
        diag = verify_forbidden_configuration(S, wit, w)
        if diag.ok:
            return wit
    raise SearchExhausted(f"no classifiable sequence below {x} outside {D.describe()}")


def find_forbidden_configuration(S: SpacePresentation, window=None) -> ConfigurationWitness | None:
    """None iff every basic cylinder has an open downset."""
    v = _verdict(S, "esakia", window, False)
    if v.holds:
        return None
    return configuration_from_failure(S, v.witness, v.closure, v.window)


def find_p_configuration(S: SpacePresentation, window=None) -> ConfigurationWitness | None:
    v = _verdict(S, "p", window, False)
    if v.holds:
        return None
    return configuration_from_failure(S, v.witness, v.closure, v.window, upset=True)


# direct search ---------------------------------------------------------------


def search_configurations(S: SpacePresentation, window=None, upset=False) -> ConfigurationWitness | None:
    """Search candidate configurations straight from the definition.

    Candidates: x an omega-point at window w, z_n obtained by letting one
    omega coordinate of x run through the integers, y a point above x at
    window w, and U the smallest cylinder (or cylinder-generated clopen upset)
    around y at threshold w+1.  The first verified candidate is returned.
    """
    w = resolve_window(S, window)
    L = _analysis_length(S, w + 1, w)
    margin = _margin(S)
    ps = S.pointset(L)
    M = S.order_block(L, L)
    win = [p for p in S.pointset(w).points()]
    omega_pts = [p for p in win if not p.is_isolated()]
    cands = sorted(win, key=lambda p: (not p.is_isolated(), S.part_names.index(p.part)))
    for x in omega_pts:
        ix = ps.index(x)
        for ax, c in enumerate(x.coords):
            if c is not OMEGA:
                continue
            zs = [PointName(x.part, x.coords[:ax] + (v,) + x.coords[ax + 1:]) for v in range(L + 1)]
            iz = np.array([ps.index(z) for z in zs])
            zz = M[np.ix_(iz, iz)]
            xz = M[ix, iz]
            zx = M[iz, ix]
            pat = _classify(zz, xz, zx, L - margin, L)
            if pat is None:
                continue
            for y in cands:
                if y == x:
                    continue
                iy = ps.index(y)
                if not M[ix, iy]:
                    continue
                base_good = ~M[iy, iz] & ~M[iz, iy]
                if not base_good[L - margin:].all():
                    continue
                U = _neighbourhood(S, y, None, upset, w + 1)
                nz = _outside_downset(S, zs, U)
                good = base_good & nz
                o = _least_offset(zz, xz, zx, good, pat, L, margin)
                if o is None:
                    continue
                fam = SequenceFamily(x.part, x.coords, ax, o)
                wit = ConfigurationWitness(pat, Embedding(pat, x, y, fam), U.to_descriptor(), upset)
                if verify_forbidden_configuration(S, wit, w).ok:
                    return wit
    return None


def _region_points(S, U: Region, level: int):
    ps = S.pointset(level)
    m = U.mask(ps)
    return [ps.point(i) for i in np.flatnonzero(m)]


def _outside_downset(S, zs, U: Region) -> np.ndarray:
    """For each z: no point of U (with coordinates up to a witness bound) lies above it."""
    top = max((c for z in zs for c in z.coords if c is not OMEGA), default=0)
    level = 2 * max(top, U.t) + S.c_max + 2
    us = _region_points(S, U, level)
    if not us:
        return np.ones(len(zs), bool)
    return ~S.relation(zs, us).any(axis=1)


# verifiers -------------------------------------------------------------------


def _test_indices(S, e: Embedding, w):
    K = max(w, e.z.offset) + S.c_max + 4
    return list(range(K + 1)) + [K + 5, 2 * K + 7, 4 * K + 11]


def verify_embedding(S: SpacePresentation, e: Embedding, window=None) -> Diagnosis:
    """Order embedding of Z_kind (or its dual) with z_n converging to x and y apart."""
    w = resolve_window(S, window)
    probs = []
    try:
        for p in (e.x, e.y, e.z.limit()):
            S.check_point(p)
    except Exception as exc:            # unknown part or arity
        return Diagnosis(False, [str(exc)])
    if e.z.base[e.z.vary] is not OMEGA:
        probs.append("family does not vary an omega coordinate")
    if e.x != e.z.limit():
        probs.append("x is not the limit of the z family")
    if e.y == e.x:
        probs.append("x and y coincide")
    if e.z.contains(e.y):
        probs.append("y lies on the z family")
    if probs:
        return Diagnosis(False, probs)
    idx = _test_indices(S, e, w)
    pts = [e.x, e.y] + [e.z.point(n) for n in idx]
    got = np.array([[S.eval_order(a, b) for b in pts] for a in pts], bool)
    want = z_pattern_matrix(e.kind, len(idx), e.dual)
    if not np.array_equal(got, want):
        i, j = map(int, np.argwhere(got != want)[0])
        probs.append(f"order mismatch at {pts[i]} <= {pts[j]}: expected {bool(want[i, j])}")
    return Diagnosis(not probs, probs)


def verify_forbidden_configuration(S: SpacePresentation, wit: ConfigurationWitness, window=None) -> Diagnosis:
    w = resolve_window(S, window)
    e = wit.embedding
    diag = verify_embedding(S, e, w)
    probs = list(diag.problems)
    if e.kind != wit.pattern:
        probs.append("pattern and embedding kind differ")
    try:
        U = as_region(S, wit.U)
    except Exception as exc:
        return Diagnosis(False, probs + [f"bad neighbourhood: {exc}"])
    if not U.is_clopen():
        probs.append("U is not clopen")
    if not U.contains(e.y.part, e.y.coords):
        probs.append("U does not contain y")
    if wit.upset and not is_upset(S, U):
        probs.append("U is not an upset")
    if probs:
        return Diagnosis(False, probs)
    zs = [e.z.point(n) for n in _test_indices(S, e, w)]
    out = _outside_downset(S, zs, U)
    if not out.all():
        n = int(np.flatnonzero(~out)[0])
        probs.append(f"{zs[n]} lies below a point of U")
    return Diagnosis(not probs, probs)


def embedding_from_json(d) -> Embedding:
    from .nat import from_json
    z = d["z"]
    fam = SequenceFamily(z["part"], tuple(from_json(c) for c in z["base"]), z["vary"], z.get("offset", 0))
    from .presentation import parse_point
    return Embedding(d["kind"], parse_point(d["x"]), parse_point(d["y"]), fam, d.get("dual", False))
