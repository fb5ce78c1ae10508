"""Vertex refinement, stable-coloring refinement of pair colors,
individualization, and the completely-splits predicate.

Naive vertex refinement never touches edge colors: a vertex's new class
encodes its old class plus, for every (vertex-class, edge-color) pair, how
many other vertices realize it. The pair-color refinement replaces each pair
color with that color plus the multiset of two-step walk color pairs through
every third vertex, iterated until the rank stops growing; its fixed points
are exactly the coherent configurations.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .core import ColorMatrix, Configuration, MAX_COLORS


@dataclass(frozen=True)
class VertexColoring:
    """A partition of the vertices into dense classes 0..k-1."""

    classes: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.classes, dtype=np.int64)
        k = arr.max() + 1 if arr.size else 0
        present = np.bincount(arr, minlength=k)
        if (present == 0).any():
            raise ValueError("class indices must be dense")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "classes", arr)

    @property
    def n(self) -> int:
        return len(self.classes)

    @property
    def num_classes(self) -> int:
        return int(self.classes.max()) + 1

    def of(self, u: int) -> int:
        return int(self.classes[u])

    def is_discrete(self) -> bool:
        return self.num_classes == self.n

    def __eq__(self, other):
        return isinstance(other, VertexColoring) and np.array_equal(
            self.classes, other.classes
        )

    def __hash__(self):
        return hash(self.classes.tobytes())


@dataclass(frozen=True)
class RefinementTrace:
    rounds: int
    class_counts: tuple[int, ...]  # per round, starting with the input count
    fixed_point: bool


def initial_coloring(m: ColorMatrix) -> VertexColoring:
    """Classes given by diagonal colors, ranked by color index so the result
    is invariant under vertex relabeling."""
    diag = np.diagonal(m.cells).astype(np.int64)
    distinct = np.unique(diag)
    rank = np.zeros(int(distinct.max()) + 1, dtype=np.int64)
    for pos, c in enumerate(distinct):
        rank[c] = pos
    return VertexColoring(rank[diag])


def _refine_arrays(cells: np.ndarray, classes: np.ndarray):
    """One-shot refinement loop over raw arrays; returns (classes, counts).

    Each round sorts the per-vertex key rows and renumbers classes by
    (previous class, least signature): np.unique over rows assigns dense ids
    in exactly that lexicographic order.
    """
    n = cells.shape[0]
    r = int(cells.max()) + 1
    counts = [int(classes.max()) + 1]
    while True:
        k = int(classes.max()) + 1
        keys = classes[None, :] * r + cells  # keys[u, v] = (class(v), color(u,v))
        keys[np.arange(n), np.arange(n)] = k * r  # drop v == u uniformly
        keys.sort(axis=1)
        combined = np.empty((n, n + 1), dtype=np.int64)
        combined[:, 0] = classes
        combined[:, 1:] = keys
        uniq, inverse = np.unique(combined, axis=0, return_inverse=True)
        if uniq.shape[0] == k:
            return classes, counts
        classes = inverse.astype(np.int64)
        counts.append(uniq.shape[0])


def naive_refine(
    m: ColorMatrix, initial: Optional[VertexColoring] = None
) -> tuple[VertexColoring, RefinementTrace]:
    """Refine vertex classes to stability; edge colors never change.

    The initial coloring must respect diagonal colors (vertices with distinct
    diagonal colors in distinct classes); by default it is exactly the
    diagonal-color partition. Classes are renumbered after every round by
    (previous class, least signature), which makes the result canonical under
    vertex relabeling.
    """
    if initial is None:
        initial = initial_coloring(m)
    if initial.n != m.n:
        raise ValueError("coloring size does not match the matrix")
    # distinct diagonal colors must not share a class
    diag = np.diagonal(m.cells)
    for cls in range(initial.num_classes):
        members = np.flatnonzero(initial.classes == cls)
        if len(np.unique(diag[members])) > 1:
            raise ValueError("initial coloring merges distinct diagonal colors")

    classes, counts = _refine_arrays(m.cells.astype(np.int64), initial.classes.copy())
    trace = RefinementTrace(
        rounds=len(counts) - 1, class_counts=tuple(counts), fixed_point=True
    )
    return VertexColoring(classes), trace


def individualize(coloring: VertexColoring, s: Iterable[int]) -> VertexColoring:
    """Move each vertex of s into a fresh singleton class; every other class
    is unchanged as a set (ids are re-densified in order)."""
    vertices = sorted(set(int(v) for v in s))
    arr = coloring.classes.copy()
    k = coloring.num_classes
    for offset, v in enumerate(vertices):
        arr[v] = k + offset
    _, dense = np.unique(arr, return_inverse=True)
    return VertexColoring(dense)


def _as_matrix(cfg: Union[Configuration, ColorMatrix]) -> ColorMatrix:
    return cfg.matrix if isinstance(cfg, Configuration) else cfg


def refine_with_individualization(
    cfg: Union[Configuration, ColorMatrix], s: Iterable[int]
) -> tuple[VertexColoring, RefinementTrace]:
    m = _as_matrix(cfg)
    start = individualize(initial_coloring(m), s)
    return naive_refine(m, start)


def completely_splits(cfg: Union[Configuration, ColorMatrix], s: Iterable[int]) -> bool:
    """True iff individualizing s and refining leaves every vertex alone in
    its class."""
    coloring, _ = refine_with_individualization(cfg, s)
    return coloring.is_discrete()


def wl_refine(m: ColorMatrix) -> tuple[ColorMatrix, int]:
    """Refine pair colors to the coarsest stable (coherent) refinement.

    Returns the stable matrix and the number of rank-increasing rounds.
    Colors are renumbered every round by (diagonal-first, previous color,
    least signature); the output is therefore canonical under vertex
    relabeling and a second application is the identity.
    """
    cells = m.cells.astype(np.int64)
    n = m.n
    # axiom (i) keeps diagonal and off-diagonal colors apart, so this flag is
    # constant on every class: it puts diagonal classes first in the order
    offdiag = (~np.eye(n, dtype=bool)).ravel().astype(np.int64)
    rounds = 0
    while True:
        r = int(cells.max()) + 1
        new, new_r = _wl_round(cells, r, offdiag)
        if new_r == r:
            if new_r > MAX_COLORS:
                raise ValueError(f"stable rank {new_r} exceeds {MAX_COLORS}")
            return ColorMatrix(new), rounds
        cells = new
        rounds += 1


def _wl_round(cells: np.ndarray, r: int, offdiag: np.ndarray):
    """One pair-color refinement round with canonical renumbering.

    The signature of (u, v) is the row (offdiag, c(u,v), sorted walk keys
    c(u,w)*r + c(w,v)); rows are compared as big-endian bytes, whose
    lexicographic order equals numeric order, so ids come out sorted by
    (diagonal-first, previous color, least signature).
    """
    n = cells.shape[0]
    ct = np.ascontiguousarray(cells.T)
    row_bytes: list = []
    block = max(1, (1 << 23) // max(n * n * 8, 1))  # ~8 MB key blocks
    for start in range(0, n, block):
        stop = min(n, start + block)
        keys = (cells[start:stop] * r)[:, None, :] + ct[None, :, :]
        keys = keys.reshape(-1, n)
        keys.sort(axis=1)
        combined = np.empty((keys.shape[0], n + 2), dtype=np.int64)
        combined[:, 0] = offdiag[start * n : stop * n]
        combined[:, 1] = cells[start:stop].ravel()
        combined[:, 2:] = keys
        be = np.ascontiguousarray(combined.astype(">u8"))
        row_bytes.extend(be[t].tobytes() for t in range(be.shape[0]))
    ids = {b: i for i, b in enumerate(sorted(set(row_bytes)))}
    new = np.fromiter(map(ids.__getitem__, row_bytes), dtype=np.int64, count=n * n)
    return new.reshape(n, n), len(ids)


@dataclass(frozen=True)
class BaseBound:
    size: int
    bound: int  # n ** size, exact arbitrary-precision


def base_size_bound(cfg: Union[Configuration, ColorMatrix], s: Iterable[int]) -> BaseBound:
    """The order bound n^|S| that a splitting set S certifies; rejects sets
    that do not completely split."""
    m = _as_matrix(cfg)
    vertices = sorted(set(int(v) for v in s))
    if not completely_splits(m, vertices):
        raise ValueError("set does not completely split the configuration")
    return BaseBound(size=len(vertices), bound=m.n ** len(vertices))
