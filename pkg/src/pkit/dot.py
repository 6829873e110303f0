"""Graphviz DOT output for Hasse diagrams of truncations and finite lattices."""

from __future__ import annotations

import re

import numpy as np

from .birkhoff import FiniteDistLattice
from .errors import SizeLimit
from .lattices import RepresentedLattice
from .order import FinitePoset
from .presentation import SpacePresentation, Truncation, truncate

MAX_NODES = 2000


def _quote(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _digraph(name, labels, covers, limit_mask=None) -> str:
    n = len(labels)
    if n > MAX_NODES:
        raise SizeLimit(f"{n} nodes exceed the rendering limit of {MAX_NODES}")
    lines = [f"digraph {_quote(name)} {{", "  rankdir=BT;", "  node [shape=circle, fontsize=10];"]
    for i, lab in enumerate(labels):
        attrs = [f"label={_quote(lab)}"]
        if limit_mask is not None and limit_mask[i]:
            attrs += ["shape=doublecircle", 'limit="true"']
        lines.append(f"  n{i} [{', '.join(attrs)}];")
    for i, j in covers:
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _cover_pairs(M: np.ndarray):
    n = M.shape[0]
    S = M & ~np.eye(n, dtype=bool)
    C = S & ~((S.astype(np.int32) @ S.astype(np.int32)) > 0)
    return [(int(i), int(j)) for i, j in np.argwhere(C)]


def poset_dot(P: FinitePoset, name="P", limit_mask=None) -> str:
    return _digraph(name, P.elements, _cover_pairs(P.matrix), limit_mask)


def truncation_dot(T: Truncation, name="T") -> str:
    lim = [not p.is_isolated() for p in T.points]
    return poset_dot(T.poset, name, lim)


def lattice_dot(L, name="L") -> str:
    if isinstance(L, FiniteDistLattice):
        return poset_dot(L.as_poset(), name)
    if isinstance(L, RepresentedLattice):
        els = L.elements
        M = np.array([[a <= b for b in els] for a in els], bool).reshape(len(els), len(els))
        return _digraph(name, [e.describe() for e in els], _cover_pairs(M))
    raise TypeError(L)


def emit_dot(item, depth: int | None = None, name=None) -> str:
    """DOT for a presentation (its truncation at ``depth``), a poset, or a lattice."""
    if isinstance(item, SpacePresentation):
        n = item.window_bound if depth is None else depth
        side = n + 2
        size = sum(side ** k for _, k in item.parts)
        if size > MAX_NODES:
            raise SizeLimit(f"truncation at {n} has {size} points")
        return truncation_dot(truncate(item, n), name or item.name)
    if isinstance(item, Truncation):
        return truncation_dot(item, name or "T")
    if isinstance(item, FinitePoset):
        return poset_dot(item, name or "P")
    return lattice_dot(item, name or "L")


def dot_stats(text: str):
    """(nodes, edges) of emitted DOT text."""
    nodes = sum(1 for line in text.splitlines() if re.match(r"\s*n\d+ \[", line))
    edges = sum(1 for line in text.splitlines() if "->" in line)
    return nodes, edges
