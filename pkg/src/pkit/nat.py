"""The ordinal omega+1 = {0, 1, 2, ..., omega}.

Finite values are plain ints; ``OMEGA`` is a singleton that compares above
every int, so mixed lists sort naturally.
"""

from __future__ import annotations

from typing import Union


class _Omega:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OMEGA"

    def __str__(self):
        return "ω"

    def __reduce__(self):
        return (_Omega, ())

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("pkit-omega")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


OMEGA = _Omega()

NatOmega = Union[int, _Omega]


def is_omega(x) -> bool:
    return x is OMEGA


def check_nat(x) -> NatOmega:
    if x is OMEGA:
        return x
    if isinstance(x, bool) or not isinstance(x, int) or x < 0:
        raise ValueError(f"not an element of omega+1: {x!r}")
    return x


def omega_add(a: NatOmega, b: NatOmega) -> NatOmega:
    """Natural sum: omega absorbs everything."""
    if a is OMEGA or b is OMEGA:
        return OMEGA
    return a + b


def fmt(x: NatOmega) -> str:
    return "ω" if x is OMEGA else str(x)


def to_json(x: NatOmega):
    return "omega" if x is OMEGA else x


def from_json(x) -> NatOmega:
    if x in ("omega", "ω"):
        return OMEGA
    return check_nat(x)
