"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line."""

import json
import time
from contextlib import contextmanager

import numpy as np
import pytest

from pkit import cli
from pkit import descriptors as D
from pkit.birkhoff import principal_filter, principal_ideal, upset_lattice
from pkit.descriptors import Region
from pkit.engine import (as_region, closed_downsets_catalog, closed_upsets_catalog, is_upset)
from pkit.esakia import (Embedding, SequenceFamily, find_forbidden_configuration, is_coheyting_space,
                         is_esakia, is_p_space, verify_embedding, verify_forbidden_configuration)
from pkit.lattices import (arrow_exists, dual_of_ifp_matches_sum, identity_embedding,
                           ideal_filter_product, non_heyting_certificate, represented_lattice)
from pkit.nat import OMEGA
from pkit.oracle import enumerate_posets, sweep_birkhoff, sweep_ifp_duality, sweep_truncation_stability
from pkit.order import validate_poset
from pkit.presentation import PointName, pt, truncate
from pkit.spaces import ATOM_NAMES, atom, builtin_suite, down_up_sum, finite_space, order_dual

W = OMEGA
SUITE = builtin_suite()


@contextmanager
def criterion(capsys, n, title, budget):
    t0 = time.perf_counter()
    try:
        yield
        dt = time.perf_counter() - t0
        assert dt < budget, f"criterion {n} took {dt:.1f} s, budget {budget} s"
    except BaseException as exc:
        dt = time.perf_counter() - t0
        with capsys.disabled():
            print(f"\nACCEPTANCE {n} FAIL  {title}  ({dt:.2f} s / {budget} s): {exc}")
        raise
    with capsys.disabled():
        print(f"\nACCEPTANCE {n} PASS  {title}  ({dt:.2f} s / {budget} s)")


def cli_json(capsys, *argv):
    code = cli.main(list(argv) + ["--json"])
    return code, json.loads(capsys.readouterr().out)


# a verifier that only uses truncation matrices --------------------------------


def brute_force_configuration(S, pattern, x, y, z: SequenceFamily, U, upset):
    """Order pattern and neighbourhood condition checked on one large truncation."""
    n_z = 12
    level = max(z.offset + n_z, 6) * 2 + S.c_max + 4
    T = truncate(S, level)
    idx = {p: i for i, p in enumerate(T.points)}
    M = T.poset.matrix
    zs = [idx[z.point(n)] for n in range(n_z)]
    ix, iy = idx[x], idx[y]
    if not M[ix, iy] or M[iy, ix]:
        return False
    for a, i in enumerate(zs):
        if M[i, iy] or M[iy, i] or M[i, ix]:
            return False
        if M[ix, i] != (pattern in (1, 2)):
            return False
        for b, j in enumerate(zs):
            want = a == b or (pattern == 1 and a >= b)
            if M[i, j] != want:
                return False
    reg = as_region(S, U)
    inU = reg.mask(S.pointset(level))
    if not inU[iy]:
        return False
    if upset and np.any(M[np.ix_(inU, ~inU)]):
        return False
    return not np.any(M[np.ix_(zs, np.flatnonzero(inU))])


# 1 ---------------------------------------------------------------------------


@pytest.mark.parametrize("name,pattern", [("Z1", 1), ("Z2", 2), ("Z3", 3)])
def test_1_forbidden_configuration_regression(capsys, name, pattern):
    with criterion(capsys, 1, f"find-config {name} gives pattern {pattern} with U = {{y}}", 1.0):
        code, rep = cli_json(capsys, "find-config", name)
        wit = rep["witness"]
        assert code == 1 and wit["pattern"] == pattern and wit["verified"]
        S = atom(name)
        assert as_region(S, find_forbidden_configuration(S).U) == Region.from_points(S.parts, [("y", ())])
        assert wit["U"] == "in(y)" and wit["y"] == "y"
        z = wit["z"]
        fam = SequenceFamily(z["part"], tuple(W if c == "omega" else c for c in z["base"]), z["vary"], z["offset"])
        assert brute_force_configuration(S, pattern, PointName("main", (W,)), PointName("y"), fam,
                                         D.InPart("y"), False)


# 2 ---------------------------------------------------------------------------


def _capped_catalog(S, cap=48):
    """Closed downsets at the largest window <= B whose catalog has at most ``cap`` members."""
    best = None
    for w in range(S.window_bound + 1):
        cat = closed_downsets_catalog(S, w, limit=4 * cap)
        if len(cat) > cap:
            break
        best = cat
    return best or []


def coherence_suite():
    out = list(SUITE)
    for n in ATOM_NAMES:
        if n == "grid":
            continue
        A = atom(n)
        for d in _capped_catalog(A):
            out.append(down_up_sum(A, d, atom("point"), D.ALL))
    return out


def test_2_esakia_iff_configuration(capsys):
    with criterion(capsys, 2, "is_esakia = no iff a forbidden configuration exists", 30.0):
        suite = coherence_suite()
        assert len(suite) >= 30
        bad = []
        failing = 0
        for S in suite:
            v = is_esakia(S, cross_check=True)
            wit = find_forbidden_configuration(S)
            if v.holds != (wit is None):
                bad.append(S.name)
            if wit is not None:
                failing += 1
                assert verify_forbidden_configuration(S, wit).ok
        assert not bad, bad
        assert 0 < failing < len(suite)


# 3 ---------------------------------------------------------------------------


def test_3_down_up_sum_clopen_criterion(capsys):
    with criterion(capsys, 3, "Esakia(X +_D point) iff D clopen", 60.0):
        spaces = [atom("chain_fan"), atom("antichain_fan"), atom("grid")]
        spaces += [finite_space(P, f"P{i}") for i, P in enumerate(enumerate_posets(4))]
        assert len(spaces) == 19
        count = clopen = 0
        for X in spaces:
            w = 0 if X.name == "grid" else X.window_bound
            for d in closed_downsets_catalog(X, w):
                S = down_up_sum(X, d, atom("point"), D.ALL)
                got = is_esakia(S, cross_check=True).holds
                assert got == d.is_clopen(), (X.name, d.describe())
                count += 1
                clopen += d.is_clopen()
        assert 0 < clopen < count


# 4 ---------------------------------------------------------------------------


def test_4_example_spaces(capsys):
    with criterion(capsys, 4, "E1, E2, grid are Esakia and carry the expected embeddings", 10.0):
        for name in ("E1", "E2", "grid"):
            code, rep = cli_json(capsys, "check", name)
            assert code == 0 and rep["verdict"] == "holds"
            code, rep = cli_json(capsys, "find-config", name)
            assert code == 0 and rep["verdict"] == "none"
        e1 = Embedding(1, pt("Q", W), pt("P", W), SequenceFamily("Q", (W,), 0, 0))
        e2 = Embedding(3, pt("C", W), pt("D", W), SequenceFamily("C", (W,), 0, 0))
        # y -> (1, omega), z_i -> (omega, i + 1), x -> (omega, omega)
        eg = Embedding(2, pt("grid", W, W), pt("grid", 1, W), SequenceFamily("grid", (W, W), 1, 1))
        for name, e in (("E1", e1), ("E2", e2), ("grid", eg)):
            assert verify_embedding(atom(name), e).ok
        assert [str(eg.z.point(i)) for i in range(3)] == ["grid(ω,1)", "grid(ω,2)", "grid(ω,3)"]


# 5 ---------------------------------------------------------------------------


def test_5_non_heyting_exhibits(capsys):
    with criterion(capsys, 5, "missing negations on the lattices of Z1, Z2, Z3", 10.0):
        R1 = represented_lattice(atom("z1"), 2)
        y1 = Region.from_points(R1.space.parts, [("y", ())])
        empty = Region.empty(R1.space.parts)
        assert arrow_exists(R1, y1, empty) is None
        assert non_heyting_certificate(R1, identity_embedding(1), y1, empty)

        R2 = represented_lattice(atom("z2"), 3)
        empty = Region.empty(R2.space.parts)
        finite = [c for c in R2.elements if c.is_finite() and not c.is_empty()]
        assert len(finite) == 2 ** 5 - 1           # subsets of {z_0..z_3, y}
        for c in finite:
            assert arrow_exists(R2, c, empty) is None
        y2 = Region.from_points(R2.space.parts, [("y", ())])
        assert non_heyting_certificate(R2, identity_embedding(2), y2, empty)

        R3 = represented_lattice(atom("z3"), 3)
        empty = Region.empty(R3.space.parts)
        with_y = [c for c in R3.elements if c.is_finite() and c.contains("y", ())]
        assert len(with_y) == 2 ** 4               # F subset of {z_0..z_3}, plus y
        for c in with_y:
            assert arrow_exists(R3, c, empty) is None
        cofinite = [c for c in R3.elements if c.contains("main", (W,)) and not c.is_total()]
        assert cofinite and all(arrow_exists(R3, c, empty) is not None for c in cofinite)
        y3 = Region.from_points(R3.space.parts, [("y", ())])
        assert non_heyting_certificate(R3, identity_embedding(3), y3, empty)


# 6 ---------------------------------------------------------------------------


def test_6_birkhoff_sweep(capsys):
    with criterion(capsys, 6, "Birkhoff round trip and residuation for n <= 5", 20.0):
        counts = []
        for n in range(1, 6):
            rep = sweep_birkhoff(n)
            assert rep.ok, rep.failures
            counts.append(rep.count)
        assert counts == [1, 2, 5, 16, 63]
        T = truncate(atom("z1"), 2).poset
        L = upset_lattice(T)
        up = lambda n: {f"main({k})" for k in range(n + 1)}
        want = [set(), {"y"}] + [up(n) for n in range(3)] + [up(n) | {"y"} for n in range(3)] + [set(T.elements)]
        assert len(L) == 9 and {L.names(a) for a in L.elements} == {frozenset(s) for s in want}


# 7 ---------------------------------------------------------------------------


def test_7_ideal_filter_duality(capsys):
    with criterion(capsys, 7, "ideal-filter products are dual to down-up sums", 60.0):
        rep = sweep_ifp_duality(3)
        assert rep.ok and rep.count > 0, rep.failures
        L = upset_lattice(validate_poset(["p", "q"], []))
        M = upset_lattice(validate_poset(["a"], []))
        I, F = principal_ideal(L, L.element({"p"})), principal_filter(M, M.top)
        X = ideal_filter_product(L, I, M, F)
        assert sorted(X.label(x) for x in X.pairs) == sorted(
            ["(∅,∅)", "({p},∅)", "(∅,{a})", "({p},{a})", "({q},{a})", "({p,q},{a})"])
        ok, iso = dual_of_ifp_matches_sum(L, I, M, F)
        assert ok and iso is not None


# 8 ---------------------------------------------------------------------------


def test_8_window_soundness(capsys):
    with criterion(capsys, 8, "truncation stability at levels B, B+1, 2B+4", 60.0):
        for S in SUITE:
            rep = sweep_truncation_stability(S)
            B = S.window_bound
            assert rep.notes["levels"] == [B, B + 1, 2 * B + 4]
            assert rep.ok, (S.name, rep.failures)


# 9 ---------------------------------------------------------------------------


def test_9_p_space_and_co_heyting(capsys):
    with criterion(capsys, 9, "p-space failures with upset U; co-Heyting mirrors Esakia of the dual", 10.0):
        for name, pattern in (("z1", 1), ("z2", 2), ("z3", 3)):
            S = atom(name)
            v = is_p_space(S, cross_check=True)
            cfg = v.configuration
            assert not v.holds and cfg.pattern == pattern and cfg.upset
            assert is_upset(S, as_region(S, cfg.U))
            assert verify_forbidden_configuration(S, cfg).ok
            e = cfg.embedding
            assert brute_force_configuration(S, pattern, e.x, e.y, e.z, cfg.U, True)
        for S in SUITE:
            assert is_coheyting_space(S).holds == is_esakia(order_dual(S)).holds
