import pytest
from hypothesis import given, strategies as st

from pkit.nat import OMEGA, check_nat, fmt, from_json, is_omega, omega_add, to_json

nat_omega = st.one_of(st.integers(0, 50), st.just(OMEGA))


def test_omega_add_examples():
    assert omega_add(2, 3) == 5
    assert omega_add(OMEGA, 3) is OMEGA
    assert omega_add(OMEGA, OMEGA) is OMEGA


def test_omega_above_every_natural():
    assert OMEGA > 10 ** 9 and not OMEGA < 5 and OMEGA >= OMEGA
    assert 3 < OMEGA and not OMEGA <= 7
    assert sorted([OMEGA, 2, 0]) == [0, 2, OMEGA]


def test_json_and_format():
    assert to_json(OMEGA) == "omega" and from_json("omega") is OMEGA
    assert to_json(4) == 4 and from_json(4) == 4
    assert fmt(OMEGA) == "ω" and fmt(3) == "3"
    assert is_omega(OMEGA) and not is_omega(0)


def test_check_nat_rejects_negatives():
    with pytest.raises(ValueError):
        check_nat(-1)


@given(nat_omega, nat_omega, nat_omega)
def test_add_commutative_associative_monotone(a, b, c):
    assert omega_add(a, b) == omega_add(b, a)
    assert omega_add(omega_add(a, b), c) == omega_add(a, omega_add(b, c))
    if a <= b:
        assert omega_add(a, c) <= omega_add(b, c)
