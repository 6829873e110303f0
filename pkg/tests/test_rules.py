import numpy as np
import pytest
from hypothesis import given, strategies as st

from pkit import rules as R
from pkit.errors import FragmentViolation
from pkit.nat import OMEGA

from strategies import nat_omega

COORDS = [R.Coord(v, i) for v in "uv" for i in range(2)]

terms = st.one_of(
    st.sampled_from(COORDS),
    st.builds(R.Const, st.integers(0, 6)),
    st.just(R.OmegaConst()),
    st.builds(R.Add, st.sampled_from(COORDS), st.builds(R.Const, st.integers(0, 4))),
    st.builds(lambda a, b: R.Add(a, b), st.sampled_from(COORDS), st.sampled_from(COORDS)),
    st.builds(R.Sub, st.sampled_from(COORDS), st.builds(R.Const, st.integers(0, 3))),
)

cmps = st.builds(R.Cmp, st.sampled_from(R.CMP_OPS), terms, terms)

formulas = st.recursive(
    st.one_of(cmps, st.just(R.TRUE), st.just(R.FALSE)),
    lambda sub: st.one_of(
        st.builds(lambda xs: R.And(tuple(xs)), st.lists(sub, min_size=2, max_size=3)),
        st.builds(lambda xs: R.Or(tuple(xs)), st.lists(sub, min_size=2, max_size=3)),
        st.builds(R.Not, sub)),
    max_leaves=6)

points = st.tuples(nat_omega, nat_omega)


def as_ext(vals):
    return [R.Ext(np.array([0 if x is OMEGA else x for x in col]), np.array([x is OMEGA for x in col]))
            for col in zip(*vals)]


@given(formulas, st.lists(st.tuples(points, points), min_size=1, max_size=8))
def test_scalar_and_vectorized_evaluators_agree(f, pairs):
    us = [u for u, _ in pairs]
    vs = [v for _, v in pairs]
    got = np.broadcast_to(R.vec(f, as_ext(us), as_ext(vs)), (len(pairs),))
    want = [R.holds(f, u, v) for u, v in pairs]
    assert got.tolist() == want


@given(formulas, points, points)
def test_swap_exchanges_roles(f, u, v):
    assert R.holds(R.swap(f), u, v) == R.holds(f, v, u)
    assert R.swap(R.swap(f)) == f


@given(formulas, points, points)
def test_simplifying_constructors_preserve_meaning(f, u, v):
    g = R.conj(f, R.TRUE)
    h = R.disj(f, R.FALSE)
    assert R.holds(g, u, v) == R.holds(h, u, v) == R.holds(f, u, v)
    assert R.holds(R.neg(R.neg(f)), u, v) == R.holds(f, u, v)


def test_omega_arithmetic_in_rules():
    s = R.Add(R.Coord("v", 0), R.Coord("v", 1))
    geq = R.Cmp(">=", R.Coord("u", 0), s)
    assert R.holds(geq, (OMEGA, OMEGA), (1, OMEGA))        # omega >= 1 + omega
    assert not R.holds(geq, (1, OMEGA), (OMEGA, 3))        # 1 >= omega fails


def test_fragment_rejections():
    u0, u1, v0 = R.Coord("u", 0), R.Coord("u", 1), R.Coord("v", 0)
    with pytest.raises(FragmentViolation):
        R.check_term(R.Add(R.Add(u0, u1), v0))             # three-coordinate sum
    with pytest.raises(FragmentViolation):
        R.check_term(R.Sub(u0, v0))                        # coordinate differences
    with pytest.raises(FragmentViolation):
        R.Cmp("=~", u0, v0)
    with pytest.raises(FragmentViolation):
        R.check_term(R.Const(-1))
    with pytest.raises(FragmentViolation):
        R.check_term(R.Add(R.Const(1), R.Const(2)))


def test_formula_metadata():
    f = R.conj(R.Cmp("<=", R.Coord("v", 0), R.Add(R.Coord("u", 0), R.Const(4))),
               R.Cmp("==", R.Coord("u", 1), R.Const(7)))
    assert sorted(R.formula_consts(f)) == [4, 7]
    assert {(c.var, c.index) for c in R.formula_coords(f)} == {("v", 0), ("u", 0), ("u", 1)}
    assert R.formula_str(f) == "v0 <= u0 + 4 and u1 == 7"


def test_part_pairs_specialize():
    f = R.disj(R.PartPair("a", "b"), R.Cmp("==", R.Coord("u", 0), R.Const(0)))
    assert R.specialize(f, "a", "b") == R.TRUE
    assert R.specialize(f, "b", "a") == R.Cmp("==", R.Coord("u", 0), R.Const(0))
    assert R.holds(f, (5,), (5,), ("a", "b")) and not R.holds(f, (5,), (5,), ("b", "a"))
