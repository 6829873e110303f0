import pytest
from hypothesis import given, settings, strategies as st

from pkit import descriptors as D
from pkit.engine import closed_downsets_catalog, closed_upsets_catalog
from pkit.esakia import (ConfigurationWitness, Embedding, SequenceFamily, embedding_from_json,
                         find_forbidden_configuration, find_p_configuration, is_biheyting_space,
                         is_coheyting_space, is_esakia, is_p_space, search_configurations,
                         verify_embedding, verify_forbidden_configuration)
from pkit.nat import OMEGA
from pkit.presentation import pt
from pkit.spaces import atom, builtin_suite, down_up_sum, order_dual

W = OMEGA
SUITE = builtin_suite()
NOT_ESAKIA = {"z1": 1, "z2": 2, "z3": 3}


@pytest.mark.parametrize("S", SUITE, ids=[S.name for S in SUITE])
def test_verdicts_on_builtin_suite(S):
    base = S.name[5:-1] if S.name.startswith("dual(") else S.name
    dual = S.name.startswith("dual(")
    v, co = is_esakia(S), is_coheyting_space(S)
    expect = NOT_ESAKIA.get(base)
    if expect is None:
        assert v.holds and co.holds and is_biheyting_space(S).holds
        return
    bad, good = (co, v) if dual else (v, co)
    assert good.holds and not bad.holds
    assert bad.configuration.pattern == expect
    assert bad.configuration.embedding.dual == dual
    assert not bad.closure.is_clopen() and bad.witness.is_clopen()


@pytest.mark.parametrize("name,pattern", sorted(NOT_ESAKIA.items()))
def test_witnesses_verify_and_round_trip(name, pattern):
    S = atom(name)
    for wit in (find_forbidden_configuration(S), find_p_configuration(S), search_configurations(S)):
        assert wit.pattern == pattern
        assert verify_forbidden_configuration(S, wit).ok
        assert embedding_from_json(wit.embedding.to_json()) == wit.embedding


def test_e1_embeds_z1_without_a_neighbourhood():
    E1 = atom("E1")
    e = Embedding(1, pt("Q", W), pt("P", W), SequenceFamily("Q", (W,), 0, 0))
    assert verify_embedding(E1, e).ok
    moved = Embedding(1, pt("Q", W), pt("P", 0), SequenceFamily("Q", (W,), 0, 0))
    assert not verify_embedding(E1, moved).ok
    for U in (D.InPart("P") & D.CoordGeq(0, 3), D.InPart("P"), D.ALL):
        diag = verify_forbidden_configuration(E1, ConfigurationWitness(1, e, U))
        assert not diag.ok and "lies below a point of U" in diag.problems[0]
    assert is_esakia(E1).holds


def test_e2_embeds_z3_without_a_neighbourhood():
    E2 = atom("E2")
    e = Embedding(3, pt("C", W), pt("D", W), SequenceFamily("C", (W,), 0, 0))
    assert verify_embedding(E2, e).ok
    assert not verify_forbidden_configuration(E2, ConfigurationWitness(3, e, D.InPart("D") & D.CoordGeq(0, 2))).ok
    assert is_esakia(E2).holds


def test_grid_embeds_z2_without_a_neighbourhood():
    G = atom("grid")
    e = Embedding(2, pt("grid", W, W), pt("grid", 1, W), SequenceFamily("grid", (W, W), 1, 1))
    assert verify_embedding(G, e).ok
    assert not verify_embedding(G, Embedding(1, e.x, e.y, e.z)).ok
    point_U = ConfigurationWitness(2, e, D.CoordEq(0, 1) & D.CoordIsOmega(1))
    assert verify_forbidden_configuration(G, point_U).problems == ["U is not clopen"]
    box_U = ConfigurationWitness(2, e, D.CoordEq(0, 1) & D.CoordGeq(1, 3))
    assert not verify_forbidden_configuration(G, box_U).ok


def test_malformed_embeddings():
    Z1 = atom("z1")
    assert not verify_embedding(Z1, Embedding(1, pt("main", 3), pt("y"), SequenceFamily("main", (3,), 0))).ok
    assert not verify_embedding(Z1, Embedding(1, pt("main", W), pt("main", W),
                                              SequenceFamily("main", (W,), 0))).ok
    assert not verify_embedding(Z1, Embedding(1, pt("nope", W), pt("y"), SequenceFamily("nope", (W,), 0))).ok


def _dsums():
    A = [atom(n) for n in ("z1", "z2", "z3", "chain_fan", "point")]
    out = []
    for a in A:
        for d in closed_downsets_catalog(a, 0)[1:4]:
            for b in A[:3]:
                for u in closed_upsets_catalog(b, 0)[1:3]:
                    out.append((a, d, b, u))
    return out


DSUMS = _dsums()


@settings(max_examples=25)
@given(st.sampled_from(DSUMS))
def test_esakia_implies_p_space_and_dual_consistency(args):
    S = down_up_sum(*args)
    e, p = is_esakia(S), is_p_space(S)
    if e.holds:
        assert p.holds
    if not p.holds:
        assert not e.holds
    assert is_coheyting_space(S).holds == is_esakia(order_dual(S)).holds
    if not e.holds:
        assert verify_forbidden_configuration(S, e.configuration).ok
