import numpy as np
import pytest
from hypothesis import given, strategies as st

from pkit import descriptors as D
from pkit.descriptors import Region
from pkit.errors import ArityMismatch, UnknownPart
from pkit.nat import OMEGA
from pkit.spaces import atom

from strategies import nat_omega

PARTS = (("a", 0), ("b", 1), ("c", 2))
ARITY = dict(PARTS)


def guarded(part):
    k = ARITY[part]
    atoms = [st.just(D.ALL)]
    if k:
        atoms += [st.builds(D.CoordEq, st.integers(0, k - 1), st.integers(0, 4)),
                  st.builds(D.CoordGeq, st.integers(0, k - 1), st.integers(0, 4)),
                  st.builds(D.CoordIsOmega, st.integers(0, k - 1)), st.just(D.Limit())]
    body = st.recursive(st.one_of(atoms), lambda s: st.one_of(
        st.builds(lambda x, y: x & y, s, s), st.builds(lambda x, y: x | y, s, s),
        st.builds(lambda x: ~x, s)), max_leaves=4)
    return body.map(lambda b: D.InPart(part) & b)


descriptors = st.lists(st.sampled_from(list(ARITY)).flatmap(guarded), min_size=0, max_size=3).map(
    lambda ds: D.DOr(tuple(ds)) if ds else D.NONE)


@st.composite
def regions(draw):
    t = draw(st.integers(0, 3))
    arrays = {p: np.array(draw(st.lists(st.booleans(), min_size=(t + 2) ** k, max_size=(t + 2) ** k)),
                          bool).reshape((t + 2,) * k) for p, k in PARTS}
    return Region(PARTS, t, arrays)


@st.composite
def points(draw):
    p = draw(st.sampled_from(list(ARITY)))
    return p, tuple(draw(nat_omega) for _ in range(ARITY[p]))


@given(descriptors, st.lists(points(), min_size=1, max_size=10))
def test_region_membership_matches_descriptor(d, pts):
    r = Region.from_descriptor(PARTS, d)
    for p, cs in pts:
        assert r.contains(p, cs) == D.descriptor_eval(d, p, cs)


@given(regions())
def test_normal_form_round_trip(r):
    back = Region.from_descriptor(PARTS, r.to_descriptor())
    assert back == r
    assert r.canonical() == r and r.canonical().t <= r.t
    assert hash(r.refine(r.t + 2)) == hash(r)


@given(regions(), regions(), regions())
def test_boolean_algebra_laws(x, y, z):
    assert ~(x | y) == (~x & ~y)
    assert x & (y | z) == (x & y) | (x & z)
    assert (x - y) == (x & ~y)
    assert (x <= y) == ((x | y) == y)
    assert (x | ~x).is_total() and (x & ~x).is_empty()


@given(regions())
def test_topology_by_complement(r):
    assert r.is_closed() == (~r).is_open()
    if r.is_finite():
        # finite sets are open exactly when they avoid limit points
        lim = Region.from_descriptor(PARTS, D.Limit())
        assert r.is_open() == (r & lim).is_empty()
    if r.first_non_open_point() is not None:
        assert not r.is_open()


@given(regions(), st.integers(0, 6))
def test_vectorized_mask_matches_contains(r, level):
    from pkit.presentation import SpacePresentation
    S = SpacePresentation("t", PARTS, ())
    ps = S.pointset(level)
    m = r.mask(ps)
    for i in range(ps.size):
        q = ps.point(i)
        assert m[i] == r.contains(q.part, q.coords)


def test_open_closed_examples_on_z1():
    Z = atom("z1")
    y = Region.from_points(Z.parts, [("y", ())])
    x = Region.from_points(Z.parts, [("main", (OMEGA,))])
    assert y.is_clopen()
    assert x.is_closed() and not x.is_open()
    tail = Region.from_descriptor(Z.parts, D.InPart("main") & D.CoordGeq(0, 3))
    assert tail.is_clopen() and not tail.is_finite()
    assert (Region.from_descriptor(Z.parts, D.InPart("main")) - x).is_open()
    assert not (Region.from_descriptor(Z.parts, D.InPart("main")) - x).is_closed()


def test_descriptor_strings_and_errors():
    d = D.InPart("main") & (D.CoordEq(0, 2) | ~D.CoordIsOmega(0))
    assert D.descriptor_str(d) == "in(main) & (eq(0,2) | !isomega(0))"
    assert D.d_consts(d) == [2] and D.d_parts(d) == {"main"}
    with pytest.raises(UnknownPart):
        Region.from_descriptor(PARTS, D.InPart("zz"))
    with pytest.raises(ArityMismatch):
        Region.from_descriptor(PARTS, D.CoordEq(1, 0))
    with pytest.raises(ArityMismatch):
        Region.from_points(PARTS, [("b", (1, 2))])
    assert Region.from_points(PARTS, [("c", (1, OMEGA)), ("a", ())]).finite_points() == ["a", "c(1,ω)"]
