import numpy as np
import pytest
from hypothesis import given, strategies as st

from pkit.errors import AntisymmetryViolation, UnknownElement
from pkit.order import (FinitePoset, MonotoneMap, closure, disjoint_union, down_up_sum, find_iso,
                        is_order_embedding, linear_sum, validate_poset)
from pkit.presentation import truncate
from pkit.spaces import atom, down_up_sum as space_dsum
from pkit.descriptors import ALL, Limit

from strategies import posets, posets_with_subset

CHAIN3 = validate_poset(["a", "b", "c"], [("a", "b"), ("b", "c")])
CHAIN2 = validate_poset(["a", "b"], [("a", "b")])
ANTI2 = validate_poset(["a", "b"], [])


def test_singleton_poset():
    P = validate_poset(["a"], [])
    assert P.leq == {("a", "a")}


def test_two_cycle_is_named():
    with pytest.raises(AntisymmetryViolation) as e:
        validate_poset(["a", "b"], [("a", "b"), ("b", "a")])
    assert set(e.value.cycle) >= {"a", "b"}


def test_longer_cycle_is_named():
    with pytest.raises(AntisymmetryViolation) as e:
        validate_poset(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")])
    assert set(e.value.cycle) == {"a", "b", "c"}


def test_unknown_element():
    with pytest.raises(UnknownElement):
        validate_poset(["a"], [("a", "b")])


def test_z3_one_point_truncation():
    P = validate_poset(["x", "y", "z0"], [("x", "y")])
    T = truncate(atom("z3"), 0).poset
    assert P.relabel({"x": "main(ω)", "z0": "main(0)"}) == T


def test_closure_on_chain():
    assert closure(CHAIN3, {"b"}, "up") == {"b", "c"}
    assert closure(CHAIN3, {"b"}, "down") == {"a", "b"}
    with pytest.raises(UnknownElement):
        closure(CHAIN3, {"q"}, "up")


def test_down_of_y_in_z1_truncation():
    T = truncate(atom("z1"), 2).poset
    assert closure(T, {"y"}, "down") == {"main(ω)", "y"}


def test_find_iso_small():
    assert find_iso(CHAIN2, CHAIN2) is not None
    assert find_iso(CHAIN2, ANTI2) is None


def test_antichain_fan_sum_is_z3_up_to_truncation():
    S = space_dsum(atom("antichain_fan"), Limit(), atom("point"), ALL)
    for n in range(0, 7):
        assert find_iso(truncate(S, n).poset, truncate(atom("z3"), n).poset) is not None


def test_chain_fan_sum_is_z1_up_to_truncation():
    S = space_dsum(atom("chain_fan"), Limit(), atom("point"), ALL)
    for n in range(0, 7):
        assert find_iso(truncate(S, n).poset, truncate(atom("z1"), n).poset) is not None


def test_monotone_map_checked():
    with pytest.raises(ValueError):
        MonotoneMap(CHAIN2, CHAIN2, {"a": "b", "b": "a"})


def test_order_embedding_examples():
    ident = MonotoneMap(CHAIN3, CHAIN3, {e: e for e in CHAIN3.elements})
    assert is_order_embedding(ident)
    point = validate_poset(["*"], [])
    assert not is_order_embedding(MonotoneMap(ANTI2, point, {"a": "*", "b": "*"}))


def test_z1_into_example_e1_truncation():
    # x -> Q(omega), y -> P(omega), z_n -> Q(n)
    Z = truncate(atom("z1"), 3).poset
    E = truncate(atom("example_e1"), 3).poset
    assign = {"main(ω)": "Q(ω)", "y": "P(ω)"}
    assign.update({f"main({n})": f"Q({n})" for n in range(4)})
    assert is_order_embedding(MonotoneMap(Z, E, assign))


def test_finite_combinators():
    s = linear_sum(ANTI2, CHAIN2)
    assert s.le("l.a", "r.a") and s.le("l.b", "r.b") and not s.le("l.a", "l.b")
    u = disjoint_union(CHAIN2, CHAIN2)
    assert u.size == 4 and not u.le("l.a", "r.b")
    d = down_up_sum(CHAIN2, {"a"}, CHAIN2, {"b"})
    assert d.le("l.a", "r.b") and not d.le("l.b", "r.b") and not d.le("l.a", "r.a")


def test_hasse_edges_of_chain():
    assert sorted(CHAIN3.hasse_edges()) == [("a", "b"), ("b", "c")]


@given(posets_with_subset())
def test_closure_idempotent(ps):
    P, S = ps
    for d in ("up", "down"):
        c = closure(P, S, d)
        assert closure(P, c, d) == c
        assert S <= c


@given(posets_with_subset(), st.data())
def test_closure_distributes_over_union(ps, data):
    P, S = ps
    T = frozenset(data.draw(st.sets(st.sampled_from(P.elements)))) if P.size else frozenset()
    for d in ("up", "down"):
        assert closure(P, S | T, d) == closure(P, S, d) | closure(P, T, d)


@given(posets(5), st.permutations(range(5)))
def test_find_iso_symmetric_and_finds_relabellings(P, perm):
    perm = [i for i in perm if i < P.size]
    names = {e: f"q{perm[i]}" for i, e in enumerate(P.elements)}
    Q = P.relabel(names)
    m = find_iso(P, Q)
    assert m is not None and is_order_embedding(m)
    assert find_iso(Q, P) is not None


@given(posets(6))
def test_validate_is_idempotent(P):
    assert validate_poset(P.elements, P.leq) == P


@given(posets(6))
def test_dual_involution(P):
    assert P.dual().dual() == P
    assert all(P.le(a, b) == P.dual().le(b, a) for a in P.elements for b in P.elements)
