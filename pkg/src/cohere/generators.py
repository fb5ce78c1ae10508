"""Constructors for named configurations and for configurations derived from
graphs and permutation groups."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .core import ColorMatrix, Configuration, canonicalize, is_homogeneous


@dataclass(frozen=True)
class GraphInput:
    """A simple undirected graph: vertex count plus a set of unordered edges."""

    n: int
    edges: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one vertex")
        norm = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {e} out of range")
            key = (min(u, v), max(u, v))
            if key in norm:
                raise ValueError(f"duplicate edge {key}")
            norm.add(key)
        object.__setattr__(self, "edges", frozenset(norm))

    @staticmethod
    def from_pairs(n: int, pairs) -> "GraphInput":
        return GraphInput(n=n, edges=frozenset((min(u, v), max(u, v)) for u, v in pairs))


@dataclass(frozen=True)
class PermutationList:
    """Generators of a permutation group on {0..n-1}, in image notation."""

    n: int
    generators: tuple

    def __post_init__(self):
        gens = []
        for g in self.generators:
            arr = np.asarray(g, dtype=np.int64)
            if arr.shape != (self.n,) or not np.array_equal(np.sort(arr), np.arange(self.n)):
                raise ValueError(f"not a permutation of 0..{self.n - 1}: {g}")
            gens.append(tuple(int(x) for x in arr))
        object.__setattr__(self, "generators", tuple(gens))


def from_graph(g: GraphInput) -> Configuration:
    """The rank <= 3 configuration of a graph: diagonal, edges, non-edges.

    The edge color is 1 and the non-edge color 2; unused colors are dropped
    with the remaining ones renumbered densely. Coherence is not assumed.
    """
    n = g.n
    cells = np.full((n, n), 2, dtype=np.int64)
    np.fill_diagonal(cells, 0)
    for u, v in g.edges:
        cells[u, v] = 1
        cells[v, u] = 1
    used = np.unique(cells)
    remap = np.zeros(3, dtype=np.int64)
    for new, old in enumerate(used):
        remap[old] = new
    m = ColorMatrix(remap[cells])
    return Configuration(matrix=m, homogeneous=True)


def _line_graph_of(vertices: list, incident) -> GraphInput:
    n = len(vertices)
    edges = {
        (a, b)
        for a in range(n)
        for b in range(a + 1, n)
        if incident(vertices[a], vertices[b])
    }
    return GraphInput(n=n, edges=frozenset(edges))


def triangular_graph(m: int) -> GraphInput:
    """Line graph of the complete graph on m points; vertices are the
    2-subsets in lexicographic pair order."""
    if m < 4:
        raise ValueError("triangular graphs need m >= 4")
    pairs = list(itertools.combinations(range(m), 2))
    return _line_graph_of(pairs, lambda a, b: bool(set(a) & set(b)))


def triangular(m: int) -> Configuration:
    return from_graph(triangular_graph(m))


def lattice_graph(m: int) -> GraphInput:
    """Line graph of the balanced complete bipartite graph: the m x m rook's
    graph, vertices in row-major (row, column) order."""
    if m < 2:
        raise ValueError("lattice graphs need m >= 2")
    cells = [(i, j) for i in range(m) for j in range(m)]
    return _line_graph_of(cells, lambda a, b: a[0] == b[0] or a[1] == b[1])


def lattice(m: int) -> Configuration:
    return from_graph(lattice_graph(m))


def _colex_subsets(m: int, k: int) -> list:
    return sorted(itertools.combinations(range(m), k), key=lambda s: s[::-1])


def johnson(m: int, k: int = 3) -> Configuration:
    """Vertices are the k-subsets of an m-element domain (colex order);
    the color of (A, B) is |A minus B|. Rank k+1 when m >= 2k."""
    if k < 1 or m < 2 * k:
        raise ValueError("johnson needs m >= 2k >= 2")
    subsets = [frozenset(s) for s in _colex_subsets(m, k)]
    n = len(subsets)
    cells = np.zeros((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            cells[a, b] = len(subsets[a] - subsets[b])
    return Configuration(matrix=ColorMatrix(cells), homogeneous=True)


def hamming(d: int, m: int) -> Configuration:
    """Vertices are words of length d over an m-letter alphabet (numeric
    order); the color of a pair is its Hamming distance. Rank d+1."""
    if d < 1 or m < 2:
        raise ValueError("hamming needs d >= 1 and m >= 2")
    words = np.array(list(itertools.product(range(m), repeat=d)), dtype=np.int64)
    cells = (words[:, None, :] != words[None, :, :]).sum(axis=2)
    return Configuration(matrix=ColorMatrix(cells), homogeneous=True)


def complement_configuration(cfg: Configuration) -> Configuration:
    """Swap the edge and non-edge colors of a rank-3 graph configuration."""
    m = cfg.matrix
    if m.r != 3:
        raise ValueError(f"complement needs rank 3, got rank {m.r}")
    star = m.pairing()
    if star is None or star[1] != 1 or star[2] != 2:
        raise ValueError("complement needs a graph configuration (symmetric colors)")
    if not is_homogeneous(m):
        raise ValueError("complement needs a homogeneous graph configuration")
    swap = np.array([0, 2, 1], dtype=np.int64)
    return Configuration(matrix=m.relabel_colors(swap), homogeneous=True)


def orbital_configuration(perms: PermutationList) -> Configuration:
    """Colors are the orbits of the generated group acting on ordered pairs,
    found by connected components of pair space under the generators; no
    group-theoretic machinery beyond that is used. Always a configuration;
    coherence is checked downstream, never assumed."""
    n = perms.n
    total = n * n
    idx = np.arange(total, dtype=np.int64)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    for g in perms.generators:
        arr = np.asarray(g, dtype=np.int64)
        image = (arr[:, None] * n + arr[None, :]).ravel()  # (u,v) -> (g(u), g(v))
        rows.append(idx)
        cols.append(image)
    if rows:
        graph = sp.coo_matrix(
            (np.ones(len(rows) * total), (np.concatenate(rows), np.concatenate(cols))),
            shape=(total, total),
        )
        _, labels = csgraph.connected_components(graph, directed=True, connection="weak")
    else:
        labels = idx.copy()
    cells = labels.reshape(n, n)
    m = canonicalize(ColorMatrix(cells))
    return Configuration(matrix=m)


def random_graph(n: int, p: float, seed: int) -> GraphInput:
    """Seeded Erdos-Renyi graph; the workhorse behind the stable-coloring
    exercises on unstructured input."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    mask = rng.random((n, n)) < p
    edges = {(u, v) for u in range(n) for v in range(u + 1, n) if mask[u, v]}
    return GraphInput(n=n, edges=frozenset(edges))


def parse_edge_list(text: str) -> GraphInput:
    """Edge-list text: first line `n`, then one `u v` pair per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError("empty edge list")
    n = int(lines[0])
    pairs = []
    for ln in lines[1:]:
        u, v = (int(t) for t in ln.split())
        pairs.append((u, v))
    return GraphInput.from_pairs(n, pairs)


def parse_permutations(text: str) -> PermutationList:
    """One permutation per line in image notation `p(0) p(1) ... p(n-1)`."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    gens = [tuple(int(t) for t in ln.split()) for ln in lines if ln]
    if not gens:
        raise ValueError("no permutations given")
    n = len(gens[0])
    return PermutationList(n=n, generators=tuple(gens))
