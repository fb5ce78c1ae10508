"""Core data model for configurations.

A configuration is a coloring of the ordered pairs of a vertex set such that
(i) diagonal and off-diagonal cells never share a color, and (ii) every color
has a paired color obtained by transposing. It is coherent when, for every
ordered color triple (i, j, k), the number of two-step walks u -> w -> v with
colors (j, k) depends only on the color i of (u, v), not on the pair itself.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

MAX_COLORS = 65535  # color indices are stored as uint16


class CcmFormatError(ValueError):
    """Raised for malformed .ccm text."""


@dataclass(frozen=True)
class ColorMatrix:
    """Dense coloring of V x V; the universal substrate for every module.

    `cells[u, v]` is the color of the ordered pair (u, v). Colors must be
    dense in 0..r-1. The array is frozen after construction and safe to share.
    """

    cells: np.ndarray

    def __post_init__(self):
        a = self.cells
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"color matrix must be square, got {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("need at least one vertex")
        if a.min() < 0:
            raise ValueError("negative color index")
        r = int(a.max()) + 1
        if r > MAX_COLORS:
            raise ValueError(f"color count {r} exceeds {MAX_COLORS}")
        present = np.bincount(a.ravel(), minlength=r)
        if (present == 0).any():
            missing = int(np.flatnonzero(present == 0)[0])
            raise ValueError(f"colors are not dense: {missing} never occurs")
        a = np.ascontiguousarray(a, dtype=np.uint16)
        a.setflags(write=False)
        object.__setattr__(self, "cells", a)

    @property
    def n(self) -> int:
        return self.cells.shape[0]

    @property
    def r(self) -> int:
        return int(self.cells.max()) + 1

    def cell(self, u: int, v: int) -> int:
        return int(self.cells[u, v])

    def diagonal_colors(self) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unique(np.diagonal(self.cells)))

    def pairing(self) -> Optional[np.ndarray]:
        """The map i -> i* with cell(u,v)=i iff cell(v,u)=i*, or None."""
        star = np.full(self.r, -1, dtype=np.int64)
        c = self.cells.ravel()
        ct = self.cells.T.ravel()
        for i in range(self.r):
            partners = np.unique(ct[c == i])
            if len(partners) != 1:
                return None
            star[i] = partners[0]
        if not (star[star] == np.arange(self.r)).all():
            return None
        return star

    def permuted(self, perm: np.ndarray) -> "ColorMatrix":
        """Relabel vertices: vertex u of self becomes perm[u] of the result."""
        inv = np.argsort(np.asarray(perm))
        return ColorMatrix(self.cells[np.ix_(inv, inv)])

    def relabel_colors(self, mapping: np.ndarray) -> "ColorMatrix":
        """Apply an old-color -> new-color bijection to every cell."""
        mapping = np.asarray(mapping)
        return ColorMatrix(mapping[self.cells.astype(np.int64)])

    def __eq__(self, other) -> bool:
        return isinstance(other, ColorMatrix) and np.array_equal(self.cells, other.cells)

    def __hash__(self):
        return hash((self.n, self.r, self.cells.tobytes()))


@dataclass(frozen=True)
class Violation:
    """A broken configuration axiom, with a concrete witness."""

    axiom: str  # "diagonal-separation" | "pairing"
    witness: tuple
    detail: str


@dataclass(frozen=True)
class ValidationResult:
    ok: bool
    violations: tuple[Violation, ...] = ()


def validate_configuration(m: ColorMatrix) -> ValidationResult:
    """Check the two configuration axioms; violations are data, not errors."""
    cells = m.cells
    n = m.n
    violations: list[Violation] = []

    diag = np.diagonal(cells)
    off = cells.copy()
    np.fill_diagonal(off, MAX_COLORS)
    off_colors = set(np.unique(off)) - {MAX_COLORS}
    shared = sorted(set(int(c) for c in np.unique(diag)) & {int(c) for c in off_colors})
    for c in shared:
        u = int(np.flatnonzero(diag == c)[0])
        vw = np.argwhere(off == c)[0]
        violations.append(
            Violation(
                axiom="diagonal-separation",
                witness=((u, u), (int(vw[0]), int(vw[1]))),
                detail=f"color {c} appears on the diagonal and at an off-diagonal cell",
            )
        )

    c_flat = cells.ravel()
    ct_flat = cells.T.ravel()
    for i in range(m.r):
        pos = np.flatnonzero(c_flat == i)
        partners = ct_flat[pos]
        distinct = np.unique(partners)
        if len(distinct) > 1:
            a = int(pos[np.flatnonzero(partners == distinct[0])[0]])
            b = int(pos[np.flatnonzero(partners == distinct[1])[0]])
            violations.append(
                Violation(
                    axiom="pairing",
                    witness=(divmod(a, n), divmod(b, n)),
                    detail=(
                        f"color {i} transposes to both {int(distinct[0])} and "
                        f"{int(distinct[1])}"
                    ),
                )
            )

    return ValidationResult(ok=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class CoherenceWitness:
    """Two pairs of the same color whose two-step walk counts differ."""

    color: int
    walk_colors: tuple[int, int]  # (j, k) with differing counts
    pair_a: tuple[int, int]
    pair_b: tuple[int, int]
    count_a: int
    count_b: int


class CoherenceError(ValueError):
    """Input is a configuration but not coherent; carries a witness."""

    def __init__(self, witness: CoherenceWitness):
        self.witness = witness
        super().__init__(
            f"pairs {witness.pair_a} and {witness.pair_b} share color "
            f"{witness.color} but have {witness.count_a} vs {witness.count_b} "
            f"walks of colors {witness.walk_colors}"
        )


@dataclass(frozen=True)
class StructureConstants:
    """The walk-count tensor p(i,j,k) of a coherent configuration.

    Stored sparsely (one dict of (j,k) -> count per color i): stable colorings
    of generic graphs can reach rank n^2, where a dense r^3 tensor is hopeless.
    """

    n: int
    r: int
    degrees: np.ndarray           # out-degree of each color's constituent
    star: np.ndarray              # pairing i -> i*
    table: tuple[dict, ...] = field(repr=False)  # table[i][(j, k)] = p(i,j,k)

    def p(self, i: int, j: int, k: int) -> int:
        return self.table[i].get((j, k), 0)

    def dense(self) -> np.ndarray:
        """Full (r, r, r) tensor; only sensible for small rank."""
        out = np.zeros((self.r, self.r, self.r), dtype=np.int64)
        for i, d in enumerate(self.table):
            for (j, k), v in d.items():
                out[i, j, k] = v
        return out

    def degree(self, i: int) -> int:
        return int(self.degrees[i])


def _walk_keys(cells: np.ndarray, u: int, v: int, r: int) -> np.ndarray:
    """Encoded (c(u,w), c(w,v)) over all w, as c(u,w)*r + c(w,v)."""
    return cells[u].astype(np.int64) * r + cells[:, v].astype(np.int64)


def compute_structure_constants(m: ColorMatrix) -> StructureConstants:
    """Count two-step walks per color, verifying every pair against its
    color's representative; raises CoherenceError with the first mismatch
    found in row-major order.
    """
    check = validate_configuration(m)
    if not check.ok:
        raise ValueError(f"not a configuration: {check.violations[0].detail}")
    star = m.pairing()
    assert star is not None  # pairing axiom just verified

    cells = m.cells.astype(np.int64)
    n, r = m.n, m.r
    ct = np.ascontiguousarray(cells.T)

    rep_pair: dict[int, tuple[int, int]] = {}
    rep_bytes: dict[int, bytes] = {}
    for u in range(n):
        keys = ct + (cells[u] * r)[None, :]  # keys[v, w] = c(u,w)*r + c(w,v)
        sor = np.sort(keys, axis=1)
        row = cells[u]
        for v in range(n):
            i = int(row[v])
            b = sor[v].tobytes()
            if i not in rep_bytes:
                rep_bytes[i] = b
                rep_pair[i] = (u, v)
            elif rep_bytes[i] != b:
                ru, rv = rep_pair[i]
                ha = Counter(_walk_keys(m.cells, ru, rv, r).tolist())
                hb = Counter(keys[v].tolist())
                bad = min(k for k in set(ha) | set(hb) if ha.get(k, 0) != hb.get(k, 0))
                raise CoherenceError(
                    CoherenceWitness(
                        color=i,
                        walk_colors=(bad // r, bad % r),
                        pair_a=(ru, rv),
                        pair_b=(u, v),
                        count_a=ha.get(bad, 0),
                        count_b=hb.get(bad, 0),
                    )
                )

    table: list[dict] = [dict() for _ in range(r)]
    degrees = np.zeros(r, dtype=np.int64)
    for i, (u, v) in rep_pair.items():
        vals, counts = np.unique(_walk_keys(m.cells, u, v, r), return_counts=True)
        table[i] = {
            (int(k) // r, int(k) % r): int(c) for k, c in zip(vals, counts)
        }
        degrees[i] = int(np.count_nonzero(m.cells[u] == i))

    return StructureConstants(n=n, r=r, degrees=degrees, star=star, table=tuple(table))


@dataclass
class Configuration:
    """A color matrix plus whatever has been verified about it so far.

    The three flags are tri-state: True/False once checked, None before.
    `constants` is only ever set after a successful coherence verification.
    """

    matrix: ColorMatrix
    constants: Optional[StructureConstants] = None
    homogeneous: Optional[bool] = None
    coherent: Optional[bool] = None
    primitive: Optional[bool] = None

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def r(self) -> int:
        return self.matrix.r

    def ensure_constants(self) -> StructureConstants:
        if self.constants is None:
            self.constants = compute_structure_constants(self.matrix)
            self.coherent = True
        return self.constants

    def check_homogeneous(self) -> bool:
        if self.homogeneous is None:
            self.homogeneous = is_homogeneous(self.matrix)
        return self.homogeneous

    def check_primitive(self) -> bool:
        if self.primitive is None:
            self.primitive = is_primitive(self).primitive
        return self.primitive


def configuration(m: ColorMatrix) -> Configuration:
    return Configuration(matrix=m)


def is_homogeneous(m: ColorMatrix) -> bool:
    """True iff all vertices share one diagonal color."""
    return len(m.diagonal_colors()) == 1


@dataclass(frozen=True)
class PrimitivityResult:
    primitive: bool
    disconnected_color: Optional[int] = None
    strong_components: Optional[tuple[tuple[int, ...], ...]] = None
    weak_components: Optional[tuple[tuple[int, ...], ...]] = None


def _components(labels: np.ndarray) -> tuple[tuple[int, ...], ...]:
    groups: dict[int, list[int]] = {}
    for v, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(v)
    return tuple(tuple(g) for _, g in sorted(groups.items()))


def is_primitive(cfg: Configuration) -> PrimitivityResult:
    """True iff every off-diagonal constituent digraph is strongly connected.

    On failure, reports the least disconnected color with its strong and weak
    component partitions. Rejects non-homogeneous input.
    """
    if not cfg.check_homogeneous():
        raise ValueError("primitivity is defined for homogeneous configurations only")
    m = cfg.matrix
    diag = m.cells[0, 0]
    for i in range(m.r):
        if i == diag:
            continue
        rows, cols = np.nonzero(m.cells == i)
        g = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(m.n, m.n))
        ncomp, labels = csgraph.connected_components(g, directed=True, connection="strong")
        if ncomp > 1:
            _, weak = csgraph.connected_components(g, directed=True, connection="weak")
            return PrimitivityResult(
                primitive=False,
                disconnected_color=i,
                strong_components=_components(labels),
                weak_components=_components(weak),
            )
    return PrimitivityResult(primitive=True)


@dataclass(frozen=True)
class ConstituentDigraph:
    """Adjacency view of a single color's digraph."""

    color: int
    adjacency: np.ndarray  # (n, n) bool, out-edges along rows

    def out_neighbors(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[u])

    def in_neighbors(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[:, u])

    def out_degree(self, u: int) -> int:
        return int(self.adjacency[u].sum())


def constituent_digraph(cfg: Configuration, i: int) -> ConstituentDigraph:
    """The color-i digraph; diagonal colors are rejected."""
    m = cfg.matrix
    if i in m.diagonal_colors():
        raise ValueError(f"color {i} is diagonal")
    if not (0 <= i < m.r):
        raise ValueError(f"color {i} out of range")
    return ConstituentDigraph(color=i, adjacency=m.cells == i)


def canonical_color_order(m: ColorMatrix) -> np.ndarray:
    """Old -> new color map: diagonal colors first, then by first occurrence
    in a row-major scan. Deterministic, used for I/O canonicalization."""
    flat = m.cells.ravel()
    _, first = np.unique(flat, return_index=True)
    diag_set = set(m.diagonal_colors())
    order = sorted(range(m.r), key=lambda c: (c not in diag_set, first[c]))
    mapping = np.empty(m.r, dtype=np.int64)
    for new, old in enumerate(order):
        mapping[old] = new
    return mapping


def canonicalize(m: ColorMatrix) -> ColorMatrix:
    return m.relabel_colors(canonical_color_order(m))


def dumps_ccm(m: ColorMatrix, comment: Optional[str] = None) -> str:
    lines = []
    if comment:
        for piece in comment.splitlines():
            lines.append(f"# {piece}")
    lines.append(f"{m.n} {m.r}")
    for u in range(m.n):
        lines.append(" ".join(str(int(c)) for c in m.cells[u]))
    return "\n".join(lines) + "\n"


def loads_ccm(text: str) -> ColorMatrix:
    rows: list[list[int]] = []
    header: Optional[tuple[int, int]] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError as e:
            raise CcmFormatError(f"line {lineno}: {e}") from None
        if header is None:
            if len(values) != 2:
                raise CcmFormatError(f"line {lineno}: expected 'n r' header")
            header = (values[0], values[1])
        else:
            rows.append(values)
    if header is None:
        raise CcmFormatError("empty input")
    n, r = header
    if len(rows) != n or any(len(row) != n for row in rows):
        raise CcmFormatError(f"expected {n} rows of {n} colors")
    cells = np.array(rows, dtype=np.int64)
    if cells.size and (cells.min() < 0 or cells.max() >= r):
        raise CcmFormatError("color index out of declared range")
    m = ColorMatrix(cells)
    if m.r != r:
        raise CcmFormatError(f"header declares {r} colors but {m.r} occur")
    return m


def save_ccm(m: ColorMatrix, path, comment: Optional[str] = None) -> None:
    with open(path, "w") as f:
        f.write(dumps_ccm(m, comment))


def load_ccm(path) -> ColorMatrix:
    with open(path) as f:
        return loads_ccm(f.read())
