"""Closed-form parameter matching and certified isomorphism against the
line-graph families (triangular and square-lattice graphs)."""

from __future__ import annotations

from math import isqrt
from typing import Optional

import networkx as nx
import numpy as np

from .core import ColorMatrix
from .generators import lattice_graph, triangular_graph


def triangular_parameters(m: int) -> tuple[int, int, int, int]:
    return (m * (m - 1) // 2, 2 * (m - 2), m - 2, 4)


def lattice_parameters(m: int) -> tuple[int, int, int, int]:
    return (m * m, 2 * (m - 1), m - 2, 2)


def match_family(n: int, k: int, lam: int, mu: int) -> list:
    """Which line-graph families share these strongly-regular parameters."""
    matches = []
    m = (1 + isqrt(1 + 8 * n)) // 2
    if m >= 4 and triangular_parameters(m) == (n, k, lam, mu):
        matches.append(("triangular", m))
    m = isqrt(n)
    if m >= 2 and lattice_parameters(m) == (n, k, lam, mu):
        matches.append(("lattice", m))
    return matches


def graph_of_color(m: ColorMatrix, color: int) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(m.n))
    rows, cols = np.nonzero(m.cells == color)
    g.add_edges_from((int(u), int(v)) for u, v in zip(rows, cols) if u < v)
    return g


def family_graph(kind: str, m: int) -> nx.Graph:
    gi = triangular_graph(m) if kind == "triangular" else lattice_graph(m)
    g = nx.Graph()
    g.add_nodes_from(range(gi.n))
    g.add_edges_from(gi.edges)
    return g


def certified_isomorphism(g1: nx.Graph, g2: nx.Graph) -> Optional[dict]:
    """An explicit isomorphism g1 -> g2, or None.

    Cheap invariants (degree multiset, triangle multiset, and for small
    graphs the clique number) refute most parameter twins before the
    backtracking matcher runs.
    """
    if g1.number_of_nodes() != g2.number_of_nodes():
        return None
    if sorted(d for _, d in g1.degree()) != sorted(d for _, d in g2.degree()):
        return None
    if sorted(nx.triangles(g1).values()) != sorted(nx.triangles(g2).values()):
        return None
    if g1.number_of_nodes() <= 128:
        w1 = max((len(c) for c in nx.find_cliques(g1)), default=0)
        w2 = max((len(c) for c in nx.find_cliques(g2)), default=0)
        if w1 != w2:
            return None
    matcher = nx.algorithms.isomorphism.GraphMatcher(g1, g2)
    if matcher.is_isomorphic():
        return {int(a): int(b) for a, b in matcher.mapping.items()}
    return None
