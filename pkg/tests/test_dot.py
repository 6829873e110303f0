import re

import pytest

from pkit.birkhoff import upset_lattice
from pkit.dot import dot_stats, emit_dot
from pkit.errors import SizeLimit
from pkit.lattices import represented_lattice
from pkit.presentation import truncate
from pkit.spaces import atom


def edges(text):
    labels = dict(re.findall(r'(n\d+) \[label="([^"]*)"', text))
    return {(labels[a], labels[b]) for a, b in re.findall(r"(n\d+) -> (n\d+);", text)}


def test_point_is_one_node():
    assert dot_stats(emit_dot(atom("point"), 2)) == (1, 0)


def test_z1_depth_two_hasse_diagram():
    text = emit_dot(atom("z1"), 2)
    assert dot_stats(text) == (5, 4)
    assert edges(text) == {("main(ω)", "y"), ("main(ω)", "main(2)"), ("main(2)", "main(1)"),
                           ("main(1)", "main(0)")}
    assert text.count("doublecircle") == 1 and 'limit="true"' in text


def test_lattice_of_z1_truncation():
    L = upset_lattice(truncate(atom("z1"), 2).poset)
    nodes, n_edges = dot_stats(emit_dot(L))
    assert nodes == 9
    # inclusion covers of the nine upsets: a ladder of two 4-chains plus the top
    assert n_edges == 11


def test_catalog_rendering_and_determinism():
    R = represented_lattice(atom("z1"), 1)
    a, b = emit_dot(R), emit_dot(R)
    assert a == b and dot_stats(a)[0] == len(R.elements)


def test_size_limit():
    with pytest.raises(SizeLimit):
        emit_dot(atom("grid"), 60)
