"""Lattices built from spaces: ideal-filter products and represented lattices.

A represented lattice is the catalog of clopen upsets of a presented space
definable with constants up to a window W.  Countable lattices are never
materialized beyond such catalogs; everything else is done with Regions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .birkhoff import (FiniteDistLattice, IdealOrFilter, correspond_ideal, join_irreducibles,
                       lattice_from_elements)
from .descriptors import Region
from .engine import as_region, clopen_upsets_catalog, downset_of, is_upset, resolve_window
from .errors import NotFilter, NotIdeal, ValidationInconclusive
from .esakia import Embedding, verify_embedding
from .nat import OMEGA
from .order import FinitePoset, down_up_sum, find_iso, is_order_embedding, MonotoneMap
from .presentation import SpacePresentation
from .spaces import atom


# ideal-filter products ---------------------------------------------------------


@dataclass
class IdealFilterProduct:
    L: FiniteDistLattice
    I: IdealOrFilter
    M: FiniteDistLattice
    F: IdealOrFilter
    pairs: list                 # (l, m) members in a fixed order
    lattice: FiniteDistLattice  # canonical form; lattice.code maps pair -> upset

    def label(self, pair) -> str:
        l, m = pair
        return f"({self.L.label(l)},{self.M.label(m)})"


def ideal_filter_product(L: FiniteDistLattice, I: IdealOrFilter, M: FiniteDistLattice,
                         F: IdealOrFilter) -> IdealFilterProduct:
    """The pairs (l, m) with l in I or m in F, as a bounded sublattice of L x M."""
    if I.kind != "ideal" or I.lattice is not L:
        raise NotIdeal("I must be an ideal of L")
    if F.kind != "filter" or F.lattice is not M:
        raise NotFilter("F must be a filter of M")
    pairs = [(l, m) for l in L.elements for m in M.elements if l in I or m in F]
    S = set(pairs)
    if (L.bottom, M.bottom) not in S or (L.top, M.top) not in S:
        raise AssertionError("product lost a bound")
    for a in pairs:
        for b in pairs:
            if (a[0] | b[0], a[1] | b[1]) not in S or (a[0] & b[0], a[1] & b[1]) not in S:
                raise AssertionError("not closed under the lattice operations")
    le = lambda a, b: L.le(a[0], b[0]) and M.le(a[1], b[1])
    lat = lattice_from_elements(pairs, le)
    return IdealFilterProduct(L, I, M, F, pairs, lat)


def dual_of_ifp_matches_sum(L, I, M, F):
    """(ok, iso): dual of the product against the down-up sum of the duals, plus the gamma check."""
    prod = ideal_filter_product(L, I, M, F)
    X, Y = L.base, M.base
    V = correspond_ideal(L, I)
    D = [x for x in X.elements if x not in V]
    U = sorted(correspond_ideal(M, F), key=Y.idx)
    summ = down_up_sum(X, D, Y, U)
    J = join_irreducibles(prod.lattice)
    iso = find_iso(summ, J)
    if iso is None:
        return False, None
    # gamma(l, m) = alpha(l) u beta(m) must be a lattice isomorphism onto the upsets of the sum
    n = X.size
    gam = {}
    for pr in prod.pairs:
        l, m = pr
        gam[pr] = l | (m << n)          # bits of the sum: X first, then Y
    if len(set(gam.values())) != len(prod.pairs):
        return False, iso
    ups = set(gam.values())
    sumP = summ
    for g in ups:
        bits = np.array([(g >> i) & 1 for i in range(sumP.size)], bool)
        if np.any(sumP.matrix[bits][:, ~bits]):
            return False, iso
    from .birkhoff import upsets_of
    if set(upsets_of(sumP)) != ups:
        return False, iso
    for a in prod.pairs:
        for b in prod.pairs:
            j = (a[0] | b[0], a[1] | b[1])
            mt = (a[0] & b[0], a[1] & b[1])
            if gam[j] != gam[a] | gam[b] or gam[mt] != gam[a] & gam[b]:
                return False, iso
    return True, iso


# represented lattices --------------------------------------------------------


@dataclass
class RepresentedLattice:
    space: SpacePresentation
    window: int
    elements: list

    def __contains__(self, r):
        return any(r == e for e in self.elements)

    def to_json(self, max_order_pairs=None):
        els = [e.describe() for e in self.elements]
        order = []
        n = len(self.elements)
        for i in range(n):
            for j in range(n):
                if i != j and self.elements[i] <= self.elements[j]:
                    order.append([i, j])
        ji = []
        for i in range(n):
            below = [j for j in range(n) if j != i and self.elements[j] <= self.elements[i]]
            covers = [j for j in below if not any(k != j and self.elements[j] <= self.elements[k] for k in below)]
            ji.append(len(covers) == 1)
        return {"space": self.space.name, "window": self.window, "size": n,
                "elements": els, "order": order, "join_irreducible": ji}


def represented_lattice(S: SpacePresentation, W: int, limit=None) -> RepresentedLattice:
    return RepresentedLattice(S, W, clopen_upsets_catalog(S, W, limit))


@dataclass
class OpenUpsetIdeal:
    space: SpacePresentation
    region: Region

    def __eq__(self, other):
        return isinstance(other, OpenUpsetIdeal) and self.region == other.region


def _element(R: RepresentedLattice, a) -> Region:
    r = as_region(R.space, a)
    return r


def ideal_descriptor_Iab(R: RepresentedLattice, a, b, window=None, cross_check=None) -> OpenUpsetIdeal:
    """The open upset X minus the downset of (a minus b)."""
    S = R.space
    A, B = _element(R, a), _element(R, b)
    down = downset_of(S, A - B, window, cross_check)
    ideal = ~down
    if not ideal.is_open() or not is_upset(S, ideal):
        raise ValidationInconclusive("complement of a closed downset is not an open upset")
    return OpenUpsetIdeal(S, ideal.canonical())


def arrow_exists(R: RepresentedLattice, a, b, window=None, cross_check=None):
    """The relative pseudo-complement a -> b as a clopen upset, or None."""
    r = ideal_descriptor_Iab(R, a, b, window, cross_check).region
    return r if r.is_clopen() else None


def catalog_ideal(R: RepresentedLattice, a, b) -> Region:
    """Union of the catalog elements c with c & a <= b."""
    A, B = _element(R, a), _element(R, b)
    out = Region.empty(R.space.parts)
    for c in R.elements:
        if (c & A) <= B:
            out = out | c
    return out


def image_of_ideal_under_dual_map(S: SpacePresentation, e: Embedding, ideal, window=None) -> OpenUpsetIdeal:
    """Preimage of an ideal (open upset of S) along e: Z_kind -> S, as a Region over Z_kind."""
    diag = verify_embedding(S, e, window)
    if not diag.ok:
        raise ValueError("not a verified embedding: " + "; ".join(diag.problems))
    reg = ideal.region if isinstance(ideal, OpenUpsetIdeal) else as_region(S, ideal)
    Z = atom(f"z{e.kind}")
    if e.dual:
        from .spaces import order_dual
        Z = order_dual(Z)
    # e(z_n) has coordinate offset + n on the varying axis; membership is constant
    # once offset + n reaches the region threshold
    t = max(0, reg.t - e.z.offset)
    main = np.zeros(t + 2, bool)
    for n in range(t + 1):
        p = e.z.point(n)
        main[n] = reg.contains(p.part, p.coords)
    main[t + 1] = reg.contains(e.x.part, e.x.coords)
    y = np.array(reg.contains(e.y.part, e.y.coords))
    return OpenUpsetIdeal(Z, Region(Z.parts, t, {"main": main, "y": y}).canonical())


def fixed_ideal_c0(kind: int, dual=False) -> Region:
    """Z_kind minus {x, y}: the ideal of c_kind -> 0, fixed independently of the engine."""
    Z = atom(f"z{kind}")
    if dual:
        from .spaces import order_dual
        Z = order_dual(Z)
    return Region(Z.parts, 0, {"main": np.array([True, False]), "y": np.array(False)})


def non_heyting_certificate(R: RepresentedLattice, e: Embedding, a, b, window=None) -> bool:
    """True iff the ideal of a -> b pulls back along e to the ideal of c -> 0 on Z_kind."""
    ideal = ideal_descriptor_Iab(R, a, b, window)
    img = image_of_ideal_under_dual_map(R.space, e, ideal, window)
    return img.region == fixed_ideal_c0(e.kind, e.dual)


def identity_embedding(kind: int) -> Embedding:
    from .esakia import SequenceFamily
    from .presentation import PointName
    return Embedding(kind, PointName("main", (OMEGA,)), PointName("y"), SequenceFamily("main", (OMEGA,), 0, 0))
