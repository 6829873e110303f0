"""Shared hypothesis strategies."""

import numpy as np
from hypothesis import strategies as st

from pkit.nat import OMEGA
from pkit.order import FinitePoset, reflexive_transitive_closure


@st.composite
def posets(draw, max_size=6, min_size=0):
    """Random finite posets: a random DAG on 0..n-1 (edges i -> j only for i < j), closed up."""
    n = draw(st.integers(min_size, max_size))
    m = np.zeros((n, n), bool)
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = draw(st.booleans())
    names = [f"p{i}" for i in range(n)]
    return FinitePoset.from_matrix(names, reflexive_transitive_closure(m), check=False)


@st.composite
def posets_with_subset(draw, max_size=6):
    P = draw(posets(max_size))
    sub = draw(st.sets(st.sampled_from(P.elements))) if P.size else set()
    return P, frozenset(sub)


nat_omega = st.one_of(st.integers(0, 12), st.just(OMEGA))
