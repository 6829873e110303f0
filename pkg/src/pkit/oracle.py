"""Brute-force ground truth for the finite and windowed machinery.

Everything here is deliberately naive: small posets are enumerated
exhaustively, lattice statements are checked over all elements, and window
decisions are compared against plain matrix computations on truncations.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .birkhoff import (all_filters, all_ideals, correspond_ideal, heyting_arrow, ideal_I_ab,
                       round_trip, upset_lattice, upsets_of)
from .descriptors import Region
from .engine import blocks, closure_many, implication_matrix, cell_system, is_upset, resolve_window
from .errors import SizeLimit
from .lattices import dual_of_ifp_matches_sum, ideal_filter_product
from .order import FinitePoset, find_iso, reflexive_transitive_closure
from .presentation import SpacePresentation, truncate

MAX_ENUM = 6


@dataclass
class EnumerationReport:
    name: str
    size: int | None = None
    count: int = 0
    tallies: dict = field(default_factory=dict)     # statement -> [passed, failed]
    failures: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    seconds: float = 0.0

    def record(self, statement, ok, exhibit=None):
        t = self.tallies.setdefault(statement, [0, 0])
        t[0 if ok else 1] += 1
        if not ok and len(self.failures) < 20:
            self.failures.append({"statement": statement, "exhibit": exhibit})

    @property
    def ok(self):
        return all(f == 0 for _, f in self.tallies.values())

    def to_json(self, timing=True):
        out = {"sweep": self.name, "size": self.size, "count": self.count,
               "tallies": {k: {"pass": p, "fail": f} for k, (p, f) in self.tallies.items()},
               "failures": self.failures, "notes": self.notes, "ok": self.ok}
        if timing:
            out["seconds"] = round(self.seconds, 3)
        return out


# poset enumeration -------------------------------------------------------------


def _signature(P: FinitePoset):
    M = P.strict_matrix()
    degs = sorted(zip(M.sum(axis=0).tolist(), M.sum(axis=1).tolist()))
    return (P.size, int(P.cover_matrix().sum()), tuple(degs))


@lru_cache(maxsize=None)
def _posets(n: int) -> tuple:
    """Posets on e0..e{n-1} up to isomorphism; each extends a smaller one by a new maximal element."""
    if n == 0:
        return (FinitePoset.from_matrix([], np.zeros((0, 0), bool), check=False),)
    names = [f"e{i}" for i in range(n)]
    out, buckets = [], {}
    for Q in _posets(n - 1):
        for down in upsets_of(Q.dual()):
            M = np.zeros((n, n), bool)
            M[: n - 1, : n - 1] = Q.matrix
            M[n - 1, n - 1] = True
            for i in range(n - 1):
                M[i, n - 1] = bool((down >> i) & 1)
            P = FinitePoset.from_matrix(names, M, check=False)
            sig = _signature(P)
            bucket = buckets.setdefault(sig, [])
            if any(find_iso(P, R) is not None for R in bucket):
                continue
            bucket.append(P)
            out.append(P)
    return tuple(out)


def enumerate_posets(n: int) -> list[FinitePoset]:
    """All posets on n elements up to isomorphism, in a fixed order."""
    if not 1 <= n <= MAX_ENUM:
        raise SizeLimit(f"poset enumeration supports 1 <= n <= {MAX_ENUM}")
    return list(_posets(n))


# Birkhoff ----------------------------------------------------------------------


def check_birkhoff(P: FinitePoset, rep: EnumerationReport):
    L = upset_lattice(P)
    try:
        J, _iso = round_trip(L)
        ok = find_iso(J, P) is not None
    except AssertionError:
        ok = False
    rep.record("round_trip", ok, repr(P.leq))

    E = np.array(L.elements, dtype=np.int64)
    down_ok = True
    ideal_ok = True
    for a in L.elements:
        for b in L.elements:
            c = heyting_arrow(L, a, b)
            # residuation by brute force: x & a <= b iff x <= c, for every x
            lhs = ((E & a) & ~b) == 0
            rhs = (E & ~c) == 0
            if not np.array_equal(lhs, rhs):
                down_ok = False
            # the ideal {x : x & a <= b} corresponds to X minus the downset of a \ b
            want = L.names(L.top & ~L.down_of(a & ~b))
            if correspond_ideal(L, ideal_I_ab(L, a, b)) != want:
                ideal_ok = False
    rep.record("residuation", down_ok, repr(P.leq))
    rep.record("ideal_complement", ideal_ok, repr(P.leq))


def sweep_birkhoff(n: int) -> EnumerationReport:
    if not 1 <= n <= 5:
        raise SizeLimit("the Birkhoff sweep supports 1 <= n <= 5")
    t0 = time.perf_counter()
    rep = EnumerationReport("birkhoff", n)
    for P in enumerate_posets(n):
        rep.count += 1
        check_birkhoff(P, rep)
    rep.seconds = time.perf_counter() - t0
    return rep


# ideal-filter duality -----------------------------------------------------------


def sweep_ifp_duality(maxJ: int = 3) -> EnumerationReport:
    """All factor pairs with at most maxJ join-irreducibles, all ideals of L and filters of M."""
    if not 0 <= maxJ <= 3:
        raise SizeLimit("the ideal-filter sweep supports maxJ <= 3")
    t0 = time.perf_counter()
    rep = EnumerationReport("ifp", maxJ)
    bases = [P for n in range(maxJ + 1) for P in _posets(n)]
    lats = [upset_lattice(P) for P in bases]
    ideals = [all_ideals(L) for L in lats]
    filters = [all_filters(M) for M in lats]
    for i, L in enumerate(lats):
        for j, M in enumerate(lats):
            for I in ideals[i]:
                for F in filters[j]:
                    rep.count += 1
                    ex = {"L": i, "M": j, "I": sorted(L.label(a) for a in I.members),
                          "F": sorted(M.label(a) for a in F.members)}
                    try:
                        ideal_filter_product(L, I, M, F)
                        rep.record("sublattice", True)
                    except AssertionError:
                        rep.record("sublattice", False, ex)
                        continue
                    ok, _ = dual_of_ifp_matches_sum(L, I, M, F)
                    rep.record("dual_matches_sum", ok, ex)
    rep.notes["factors"] = len(lats)
    rep.seconds = time.perf_counter() - t0
    return rep


# truncation stability -----------------------------------------------------


def _pointwise_closure(T: np.ndarray, member: np.ndarray, direction: str) -> np.ndarray:
    if direction == "down":
        return (T & member[None, :]).any(axis=1)
    return (T & member[:, None]).any(axis=0)


def _pointwise_clopen(S: SpacePresentation, m: int, member: np.ndarray) -> bool:
    """Membership at every limit point agrees with the box of large finite values (m) around it."""
    ps = S.pointset(m)
    for p, k in S.parts:
        if k == 0:
            continue
        a = member[ps.part_slice(p)].reshape((m + 2,) * k)
        # slab-wise omega == m on each axis gives it for every set of axes
        for ax in range(k):
            if not np.array_equal(np.take(a, [m + 1], axis=ax), np.take(a, [m], axis=ax)):
                return False
    return True


def _threshold_ok(r: Region, m: int) -> bool:
    return r.t <= m


def sweep_truncation_stability(S: SpacePresentation, levels_=None, window=None) -> EnumerationReport:
    """Window decisions at B against plain matrix computations on truncate(S, m)."""
    t0 = time.perf_counter()
    B = resolve_window(S, window)
    levels_ = sorted(set(levels_ or (B, B + 1, 2 * B + 4)))
    rep = EnumerationReport("stability", None)
    rep.notes["space"] = S.name
    rep.notes["window"] = B
    rep.notes["levels"] = levels_
    k = max(0, (B - 1) // 2)
    sets = blocks(S, k)
    cs = cell_system(S, k + 1, B)
    reach = reflexive_transitive_closure(implication_matrix(cs, upward=True, closed=True, open_=True))
    ups = []
    seen = set()
    for b in sets:
        mk = reach[cs.mask_of(b)].any(axis=0)
        if mk.tobytes() not in seen:
            seen.add(mk.tobytes())
            ups.append(cs.region(mk))
    family = sets + ups
    downs = closure_many(S, family, "down", B, False)
    upc = closure_many(S, family, "up", B, False)
    rep.count = len(family)
    skipped = 0
    for m in levels_:
        T = truncate(S, m).poset.matrix
        ps = S.pointset(m)
        for C, D, U in zip(family, downs, upc):
            cm = C.mask(ps)
            for direction, R in (("down", D), ("up", U)):
                pw = _pointwise_closure(T, cm, direction)
                rep.record(f"{direction}set_of", bool(np.array_equal(pw, R.mask(ps))),
                           {"level": m, "set": C.describe()})
                if _threshold_ok(R, m):
                    rep.record("is_clopen", R.is_clopen() == _pointwise_clopen(S, m, pw),
                               {"level": m, "set": R.describe()})
                else:
                    skipped += 1
            up_pw = not np.any(T[np.ix_(cm, ~cm)])
            rep.record("is_upset", is_upset(S, C, B) == up_pw, {"level": m, "set": C.describe()})
            if _threshold_ok(C, m):
                rep.record("is_clopen", C.is_clopen() == _pointwise_clopen(S, m, cm),
                           {"level": m, "set": C.describe()})
            else:
                skipped += 1
    # cylinder verdicts at window B, decided pointwise on the largest level
    m = levels_[-1]
    T = truncate(S, m).poset.matrix
    ps = S.pointset(m)
    bl = blocks(S, B)
    if all(b.t <= m for b in bl):
        for b, D in zip(bl, closure_many(S, bl, "down", B, False)):
            if D.t > m:
                skipped += 1
                continue
            pw = _pointwise_closure(T, b.mask(ps), "down")
            rep.record("esakia_cylinder", D.is_clopen() == _pointwise_clopen(S, m, pw),
                       {"level": m, "set": b.describe()})
    rep.notes["skipped_thresholds"] = skipped
    rep.seconds = time.perf_counter() - t0
    return rep
