"""Window computations on presented spaces.

Boolean structure and topology of definable sets are exact (see
``descriptors.Region``).  What needs a finite window is the order: whether
some point of one cell lies below some point of another, and the down- or
up-closure of a definable set.  These are computed on finite truncations:

* samples: points with finite coordinates <= s, where membership is read off;
* witnesses: points with finite coordinates <= N = 2s + c_max + 2, searched
  for a point of the set above (or below) each sample.

The closure is then read back as a Region by locating the coordinate value
after which every sampled row is constant.  If no such value leaves a
margin of confirming samples, NotExpressible is raised.  With cross-checking
on, the computation is repeated at window 2w+4 and must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import config
from .birkhoff import upsets_of
from .descriptors import Region, SetDescriptor, class_rep
from .errors import AxiomFailure, NotExpressible, SizeLimit, ValidationInconclusive
from .nat import OMEGA
from .order import FinitePoset, reflexive_transitive_closure
from .presentation import PointName, SpacePresentation, check_partial_order_matrix
from . import rules as R


def resolve_window(S: SpacePresentation, window=None) -> int:
    if window is None:
        env = config.env_window()
        return env if env is not None else S.window_bound
    w = int(window)
    if w < 0:
        raise ValueError("window must be nonnegative")
    return w


def cross_level(w: int) -> int:
    return 2 * w + 4


def as_region(S: SpacePresentation, d) -> Region:
    if isinstance(d, Region):
        if d.parts != S.parts:
            raise ValueError("region belongs to a different space")
        return d
    if isinstance(d, SetDescriptor):
        return Region.from_descriptor(S.parts, d)
    if isinstance(d, PointName):
        return Region.from_points(S.parts, [(d.part, d.coords)])
    raise TypeError(f"not a set: {d!r}")


def levels(S: SpacePresentation, w: int, t: int):
    """(sample level, witness level) for sets of threshold t at window w."""
    s = w + 2 * t + S.c_max + 2
    return s, 2 * s + S.c_max + 2


def _margin(S):
    return S.c_max + 3


def extract_region(S: SpacePresentation, member: np.ndarray, s: int) -> Region:
    ps = S.pointset(s)
    arrays = {}
    for p, k in S.parts:
        arrays[p] = member[ps.part_slice(p)].reshape((s + 2,) * k)
    r = Region(S.parts, s, arrays).canonical()
    if r.t > s - _margin(S):
        raise NotExpressible(f"no stable tail below sample level {s} (threshold {r.t})")
    return r


def _closure_batch(S: SpacePresentation, regions, w: int, direction: str):
    if not regions:
        return []
    t = max(r.t for r in regions)
    s, N = levels(S, w, t)
    wit = S.pointset(N)
    W = np.stack([r.mask(wit) for r in regions], axis=1).astype(np.float32)
    if direction == "down":
        blk = S.order_block(s, N).astype(np.float32)
        M = blk @ W
    else:
        blk = S.order_block(N, s).astype(np.float32)
        M = blk.T @ W
    hit = M > 0
    return [extract_region(S, hit[:, i], s) for i in range(len(regions))]


def closure_many(S: SpacePresentation, sets, direction="down", window=None, cross_check=None):
    """Down- (or up-) closures of several definable sets at once."""
    w = resolve_window(S, window)
    regions = [as_region(S, d) for d in sets]
    out = _closure_batch(S, regions, w, direction)
    if config.resolve_cross_check(cross_check):
        again = _closure_batch(S, regions, cross_level(w), direction)
        for a, b, r in zip(out, again, regions):
            if a != b:
                raise ValidationInconclusive(
                    f"{direction}-closure of {r.describe()} differs between window {w} and {cross_level(w)}")
    for a, r in zip(out, regions):
        if not r <= a:
            raise ValidationInconclusive("closure does not contain its argument")
    return out


def downset_of(S: SpacePresentation, d, window=None, cross_check=None) -> Region:
    return closure_many(S, [d], "down", window, cross_check)[0]


def upset_of(S: SpacePresentation, d, window=None, cross_check=None) -> Region:
    return closure_many(S, [d], "up", window, cross_check)[0]


def is_clopen(S: SpacePresentation, d) -> bool:
    return as_region(S, d).is_clopen()


def is_open(S, d) -> bool:
    return as_region(S, d).is_open()


def is_closed(S, d) -> bool:
    return as_region(S, d).is_closed()


# cells ---------------------------------------------------------------------


@dataclass
class CellSystem:
    """All cells at threshold t and the relation 'some point of A <= some point of B'."""
    space: SpacePresentation
    t: int
    cells: list                 # (part, class tuple)
    index: dict
    rel: np.ndarray

    def region(self, mask) -> Region:
        arrays = {p: np.zeros((self.t + 2,) * k, bool) for p, k in self.space.parts}
        for i in np.flatnonzero(mask):
            p, c = self.cells[i]
            arrays[p][c] = True
        return Region(self.space.parts, self.t, arrays)

    def mask_of(self, r: Region) -> np.ndarray:
        r = r.refine(self.t) if r.t <= self.t else None
        if r is None:
            raise ValueError("region is finer than the cell system")
        return np.array([bool(r.arrays[p][c]) for p, c in self.cells])

    def rep(self, i) -> PointName:
        p, c = self.cells[i]
        return PointName(p, tuple(class_rep(x, self.t) for x in c))


def cell_level(S: SpacePresentation, t: int) -> int:
    """Sample level at which cell-to-cell order relations are decided."""
    return 2 * t + S.c_max + 4


def cell_system(S: SpacePresentation, t: int, window=None) -> CellSystem:
    s = cell_level(S, t) if window is None else max(cell_level(S, t), int(window))
    key = ("cells", t, s)
    if key in S._cache:
        return S._cache[key]
    cells = [(p, c) for p, k in S.parts for c in product(range(t + 2), repeat=k)]
    index = {c: i for i, c in enumerate(cells)}
    ps = S.pointset(s)
    ids = np.zeros(ps.size, dtype=np.int64)
    for p, k in S.parts:
        sl = ps.part_slice(p)
        if k == 0:
            ids[sl] = index[(p, ())]
            continue
        cls = np.where(ps.om[p], t + 1, np.minimum(ps.val[p], t))
        base = index[(p, (0,) * k)]
        ids[sl] = base + np.ravel_multi_index(tuple(cls[:, i] for i in range(k)), (t + 2,) * k)
    C = np.zeros((ps.size, len(cells)), np.float32)
    C[np.arange(ps.size), ids] = 1.0
    M = S.order_block(s, s).astype(np.float32)
    rel = (C.T @ (M @ C)) > 0
    cs = CellSystem(S, t, cells, index, rel)
    S._cache[key] = cs
    return cs


def _swap_class(c, ax, new):
    return c[:ax] + (new,) + c[ax + 1:]


def implication_matrix(cs: CellSystem, upward=False, downward=False, closed=False, open_=False):
    n = len(cs.cells)
    imp = np.zeros((n, n), bool)
    if upward:
        imp |= cs.rel
    if downward:
        imp |= cs.rel.T
    t = cs.t
    for i, (p, c) in enumerate(cs.cells):
        for ax, x in enumerate(c):
            if closed and x == t:
                imp[i, cs.index[(p, _swap_class(c, ax, t + 1))]] = True
            if open_ and x == t + 1:
                imp[i, cs.index[(p, _swap_class(c, ax, t))]] = True
    return imp


def closed_families(imp: np.ndarray, limit=None):
    """All node sets closed under i in S => j in S whenever imp[i, j]; as bool masks."""
    limit = config.CATALOG_LIMIT if limit is None else limit
    n = imp.shape[0]
    reach = reflexive_transitive_closure(imp)
    comp = -np.ones(n, int)
    reps = []
    for i in range(n):
        if comp[i] < 0:
            members = np.flatnonzero(reach[i] & reach[:, i])
            comp[members] = len(reps)
            reps.append(i)
    Q = reach[np.ix_(reps, reps)]
    P = FinitePoset.from_matrix([str(i) for i in range(len(reps))], Q, check=False)
    try:
        fams = upsets_of(P, limit)
    except SizeLimit:
        raise SizeLimit(f"more than {limit} sets in the catalog") from None
    out = []
    for m in fams:
        chosen = np.array([(m >> comp[i]) & 1 for i in range(n)], bool)
        out.append(chosen)
    return out


def clopen_upsets_catalog(S: SpacePresentation, W: int, limit=None, window=None):
    """Clopen upsets definable with constants <= W, deduplicated, smallest first."""
    cs = cell_system(S, W + 1, window)
    imp = implication_matrix(cs, upward=True, closed=True, open_=True)
    return [cs.region(m) for m in closed_families(imp, limit)]


def closed_downsets_catalog(S: SpacePresentation, W: int, limit=None, window=None):
    """Closed downsets definable with constants <= W."""
    cs = cell_system(S, W + 1, window)
    imp = implication_matrix(cs, downward=True, closed=True)
    return [cs.region(m) for m in closed_families(imp, limit)]


def closed_upsets_catalog(S: SpacePresentation, W: int, limit=None, window=None):
    cs = cell_system(S, W + 1, window)
    imp = implication_matrix(cs, upward=True, closed=True)
    return [cs.region(m) for m in closed_families(imp, limit)]


def is_upset(S: SpacePresentation, d, window=None) -> bool:
    r = as_region(S, d)
    cs = cell_system(S, r.t, window)
    m = cs.mask_of(r)
    return not np.any(cs.rel[np.ix_(m, ~m)])


def is_downset(S: SpacePresentation, d, window=None) -> bool:
    r = as_region(S, d)
    cs = cell_system(S, r.t, window)
    m = cs.mask_of(r)
    return not np.any(cs.rel[np.ix_(~m, m)])


def smallest_clopen_upset(S: SpacePresentation, d, window=None) -> Region:
    """Least union-of-blocks upset containing d (blocks at d's threshold)."""
    r = as_region(S, d)
    cs = cell_system(S, r.t, window)
    imp = implication_matrix(cs, upward=True, closed=True, open_=True)
    reach = reflexive_transitive_closure(imp)
    m = reach[cs.mask_of(r)].any(axis=0)
    return cs.region(m)


# blocks --------------------------------------------------------------------


def blocks(S: SpacePresentation, w: int):
    """Basic clopen cylinders at window w: products of {c} (c <= w) and [w+1, omega]."""
    t = w + 1
    out = []
    for p, k in sorted(S.parts, key=lambda pk: pk[1]):      # lower-dimensional parts first
        for atoms in product(range(w + 2), repeat=k):
            a = np.zeros((t + 2,) * k, bool)
            sel = tuple([x] if x <= w else [t, t + 1] for x in atoms)
            a[np.ix_(*sel)] = True
            arrays = {q: np.zeros((t + 2,) * kq, bool) for q, kq in S.parts}
            arrays[p] = a
            out.append(Region(S.parts, t, arrays))
    return out


def block_of(point: PointName, w: int):
    return point.part, tuple(w + 1 if c is OMEGA or c > w else c for c in point.coords)


# validation ----------------------------------------------------------------


@dataclass
class ValidationReport:
    space: str
    window: int
    checked_levels: list
    checks: dict = field(default_factory=dict)

    @property
    def ok(self):
        return all(self.checks.values())

    def to_json(self):
        return {"space": self.space, "window": self.window, "levels": self.checked_levels,
                "checks": self.checks, "ok": self.ok}


def _window_arrays(S, p, k, w):
    vals = list(range(w + 1)) + [OMEGA]
    cs = list(product(vals, repeat=k))
    val = np.array([[0 if x is OMEGA else x for x in c] for c in cs], np.int64).reshape(len(cs), k)
    om = np.array([[x is OMEGA for x in c] for c in cs], bool).reshape(len(cs), k)
    return cs, val, om


def _rel(S, p, q, Uv, Uo, Vv, Vo):
    kp, kq = Uv.shape[1], Vv.shape[1]
    U = [R.Ext(Uv[:, i][:, None], Uo[:, i][:, None]) for i in range(kp)]
    V = [R.Ext(Vv[:, i][None, :], Vo[:, i][None, :]) for i in range(kq)]
    shape = (Uv.shape[0], Vv.shape[0])
    out = np.zeros(shape, bool)
    f = S.clause_map.get((p, q))
    if f is not None:
        out |= np.broadcast_to(R.vec(f, U, V), shape)
    if p == q:
        eq = np.ones(shape, bool)
        for a, b in zip(U, V):
            eq &= R.ext_eq(a, b)
        out |= eq
    return out


def _order_closed_counterexample(S: SpacePresentation, w: int):
    """Sampled test that the order is closed in X x X: unrelated pairs keep unrelated neighbours."""
    L = w + 1
    probe = [L, L + 1, 2 * L + 2, 4 * L + 5]
    for p, kp in S.parts:
        cu, Uv, Uo = _window_arrays(S, p, kp, w)
        for q, kq in S.parts:
            if kp + kq == 0:
                continue
            cv, Vv, Vo = _window_arrays(S, q, kq, w)
            for pu in product([False, True], repeat=kp):
                iu = np.flatnonzero((Uo == np.array(pu, bool)).all(axis=1)) if kp else np.arange(len(cu))
                if len(iu) == 0:
                    continue
                for pv in product([False, True], repeat=kq):
                    iv = np.flatnonzero((Vo == np.array(pv, bool)).all(axis=1)) if kq else np.arange(len(cv))
                    if len(iv) == 0:
                        continue
                    omega_pos = [i for i, x in enumerate(pu + pv) if x]
                    if not omega_pos:
                        continue
                    base = _rel(S, p, q, Uv[iu], Uo[iu], Vv[iv], Vo[iv])
                    if base.all():
                        continue
                    for r in range(1, len(omega_pos) + 1):
                        from itertools import combinations
                        for J in combinations(omega_pos, r):
                            for vals in product(probe, repeat=r):
                                Uv2, Uo2 = Uv[iu].copy(), Uo[iu].copy()
                                Vv2, Vo2 = Vv[iv].copy(), Vo[iv].copy()
                                for j, x in zip(J, vals):
                                    if j < kp:
                                        Uv2[:, j], Uo2[:, j] = x, False
                                    else:
                                        Vv2[:, j - kp], Vo2[:, j - kp] = x, False
                                new = _rel(S, p, q, Uv2, Uo2, Vv2, Vo2)
                                bad = ~base & new
                                if bad.any():
                                    a, b = map(int, np.argwhere(bad)[0])
                                    u = PointName(p, cu[iu[a]])
                                    v = PointName(q, cv[iv[b]])
                                    u2 = PointName(p, tuple(OMEGA if o else int(x) for x, o in zip(Uv2[a], Uo2[a])))
                                    v2 = PointName(q, tuple(OMEGA if o else int(x) for x, o in zip(Vv2[b], Vo2[b])))
                                    return [u, v, u2, v2]
    return None


def _separation_counterexample(S: SpacePresentation, w: int):
    """x not <= y must be witnessed by the least block-union upset around x missing y."""
    t = w + 1
    cs = cell_system(S, t)
    bl = {}
    for i, (p, c) in enumerate(cs.cells):
        bl.setdefault((p, tuple(min(x, t) for x in c)), []).append(i)
    keys = list(bl)
    kix = {k: j for j, k in enumerate(keys)}
    nb = len(keys)
    A = np.zeros((len(cs.cells), nb), np.float32)
    for j, k in enumerate(keys):
        A[bl[k], j] = 1
    brel = (A.T @ cs.rel.astype(np.float32) @ A) > 0
    reach = reflexive_transitive_closure(brel)
    ps = S.pointset(w)
    leq = S.order_block(w, w)
    bidx = np.zeros(ps.size, int)
    for i in range(ps.size):
        bidx[i] = kix[block_of(ps.point(i), w)]
    bad = ~leq & reach[np.ix_(bidx, bidx)]
    if bad.any():
        i, j = map(int, np.argwhere(bad)[0])
        return [ps.point(i), ps.point(j)]
    return None


def _validate_at(S: SpacePresentation, w: int, report: ValidationReport):
    tr_points = S.pointset(w).points()
    M = S.order_block(w, w)
    check_partial_order_matrix(np.asarray(M), tr_points)
    report.checks[f"partial_order@{w}"] = True
    bad = _order_closed_counterexample(S, w)
    if bad:
        raise AxiomFailure("order-closed", f"{bad[0]} is not below {bad[1]} but neighbours "
                                           f"{bad[2]} <= {bad[3]}", bad)
    report.checks[f"order_closed@{w}"] = True
    bad = _separation_counterexample(S, w)
    if bad:
        raise AxiomFailure("separation", f"no clopen upset contains {bad[0]} and misses {bad[1]}", bad)
    report.checks[f"separation@{w}"] = True


def validate_presentation(S: SpacePresentation, window=None, cross_check=None) -> ValidationReport:
    w = resolve_window(S, window)
    levels_ = [w]
    if config.resolve_cross_check(cross_check):
        levels_.append(cross_level(w))
    report = ValidationReport(S.name, w, levels_)
    failures = []
    for lv in levels_:
        try:
            _validate_at(S, lv, report)
        except AxiomFailure as e:
            failures.append((lv, e))
    if failures and len(failures) < len(levels_):
        raise ValidationInconclusive(
            f"validation of {S.name} disagrees between levels: " + str(failures[0][1]))
    if failures:
        raise failures[0][1]
    return report
