"""Parameter extraction and finite-instance verification of the structural
inequalities satisfied by primitive coherent configurations.

Conventions: for a homogeneous coherent configuration of rank > 2, colors are
presented with the diagonal color as 0 and the maximum-degree color as 1.
A color is dominant when its degree is at least n/2 (then it is unique and
self-paired); the residual degree rho is n - n_1 - 1. The neighborhood
parameters mu and lambda_i are defined relative to a dominant color and the
checks that need them skip, with an explicit status, when no color qualifies.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .core import ColorMatrix, Configuration, StructureConstants


def _ensure_cfg(cfg: Union[Configuration, ColorMatrix]) -> Configuration:
    if isinstance(cfg, ColorMatrix):
        cfg = Configuration(matrix=cfg)
    return cfg


def _diag_color(m: ColorMatrix) -> int:
    return int(m.cells[0, 0])


def distinguishing_number(cfg: Union[Configuration, ColorMatrix], i: int) -> int:
    """Number of vertices seeing the two ends of a color-i pair differently.

    Computed from the walk tensor as n minus the number of vertices w with
    c(w,u) = c(w,v); equals the direct count for every representative pair.
    """
    cfg = _ensure_cfg(cfg)
    sc = cfg.ensure_constants()
    if i in cfg.matrix.diagonal_colors():
        raise ValueError(f"color {i} is diagonal")
    same = sum(sc.p(i, int(sc.star[j]), j) for j in range(sc.r))
    return sc.n - same


@dataclass(frozen=True)
class ParameterProfile:
    """Per-configuration scalars, presented with color 1 of maximum degree."""

    n: int
    r: int
    degrees: np.ndarray          # by original color id
    star: np.ndarray             # pairing, original ids
    order: np.ndarray            # order[new] = original id (0 = diagonal)
    rank_of: np.ndarray          # inverse of order
    diag: int                    # original id of the diagonal color
    max_color: int               # original id renumbered to 1
    rho: int                      # n - n_1 - 1
    dominant: Optional[int]      # original id with 2*degree >= n, if any
    dominant_boundary: bool      # degree exactly n/2
    mu: Optional[int]
    lam: Optional[dict]          # original nondominant color -> lambda_i
    distinguishing: np.ndarray   # D by original color id (diagonal entry 0)

    def degree_new(self, new_index: int) -> int:
        return int(self.degrees[self.order[new_index]])

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "degrees_by_new_color": [self.degree_new(i) for i in range(self.r)],
            "color_order_new_to_original": [int(c) for c in self.order],
            "pairing_original": [int(c) for c in self.star],
            "rho": self.rho,
            "dominant_original": None if self.dominant is None else int(self.dominant),
            "dominant_boundary": self.dominant_boundary,
            "mu": self.mu,
            "lambda_by_original_color": (
                None if self.lam is None else {str(k): v for k, v in sorted(self.lam.items())}
            ),
            "distinguishing_by_original_color": [int(x) for x in self.distinguishing],
        }


def profile(cfg: Union[Configuration, ColorMatrix]) -> ParameterProfile:
    """Extract every scalar parameter exactly from the walk tensor.

    Requires a coherent homogeneous configuration of rank > 2 (rank 2 is the
    complete graph, for which none of this is meaningful). Primitivity is not
    required here; it is recorded by the callers that need it.
    """
    cfg = _ensure_cfg(cfg)
    if not cfg.check_homogeneous():
        raise ValueError("profile needs a homogeneous configuration")
    if cfg.r <= 2:
        raise ValueError("profile needs rank > 2")
    sc = cfg.ensure_constants()
    m = cfg.matrix
    n, r = sc.n, sc.r
    diag = _diag_color(m)
    nondiag = [i for i in range(r) if i != diag]

    max_color = max(nondiag, key=lambda i: (int(sc.degrees[i]), -i))
    rest = sorted((i for i in nondiag if i != max_color),
                  key=lambda i: (-int(sc.degrees[i]), i))
    order = np.array([diag, max_color] + rest, dtype=np.int64)
    rank_of = np.empty(r, dtype=np.int64)
    for new, old in enumerate(order):
        rank_of[old] = new

    n1 = int(sc.degrees[max_color])
    rho = n - n1 - 1
    dominant = max_color if 2 * n1 >= n else None
    boundary = 2 * n1 == n

    mu = None
    lam = None
    if dominant is not None:
        nond = [i for i in nondiag if i != dominant]
        mu = sum(sc.p(dominant, i, j) for i in nond for j in nond)
        lam = {i: sum(sc.p(i, i, k) for k in nond) for i in nond}

    dist = np.zeros(r, dtype=np.int64)
    for i in nondiag:
        dist[i] = distinguishing_number(cfg, i)

    return ParameterProfile(
        n=n, r=r, degrees=sc.degrees.copy(), star=sc.star.copy(),
        order=order, rank_of=rank_of, diag=diag, max_color=max_color,
        rho=rho, dominant=dominant, dominant_boundary=boundary,
        mu=mu, lam=lam, distinguishing=dist,
    )


@dataclass(frozen=True)
class DominantView:
    """Parameters relative to a designated dominant color.

    The designated color plays the role of the non-edge side: the residual
    graph collects every other off-diagonal color. The designation defaults
    to the threshold-dominant color but the clique machinery may designate
    any symmetric color; whether the threshold actually holds is recorded.
    """

    dominant: int
    threshold_dominant: bool
    nondominant: tuple
    rho: int
    mu: int
    lam: dict
    adjacency: np.ndarray = field(repr=False)  # residual-graph adjacency

    def neighbors(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[u])


def dominant_view(cfg: Union[Configuration, ColorMatrix], dominant: int) -> DominantView:
    cfg = _ensure_cfg(cfg)
    sc = cfg.ensure_constants()
    m = cfg.matrix
    diag = _diag_color(m)
    if dominant == diag:
        raise ValueError("the diagonal color cannot be designated dominant")
    if int(sc.star[dominant]) != dominant:
        raise ValueError(f"designated dominant color {dominant} is not symmetric")
    nond = tuple(i for i in range(sc.r) if i not in (diag, dominant))
    rho = int(sum(sc.degrees[i] for i in nond))
    mu = sum(sc.p(dominant, i, j) for i in nond for j in nond)
    lam = {i: sum(sc.p(i, i, k) for k in nond) for i in nond}
    adjacency = np.isin(m.cells, np.array(nond, dtype=np.uint16))
    adjacency.setflags(write=False)
    return DominantView(
        dominant=dominant,
        threshold_dominant=2 * int(sc.degrees[dominant]) >= sc.n,
        nondominant=nond, rho=rho, mu=mu, lam=lam, adjacency=adjacency,
    )


@dataclass(frozen=True)
class SphereTable:
    """Distance layers of one color's digraph from one source."""

    color: int
    source: int
    layers: tuple                 # layers[d] = tuple of vertices at distance d
    dist_by_color: np.ndarray     # distance per pair color, -1 if unreachable
    unreachable: tuple

    @property
    def eccentricity(self) -> int:
        return len(self.layers) - 1

    def sphere(self, delta: int) -> tuple:
        return self.layers[delta] if delta < len(self.layers) else ()

    def sizes(self) -> tuple:
        return tuple(len(layer) for layer in self.layers)


def _bfs_layers(adj: np.ndarray, source: int) -> np.ndarray:
    n = adj.shape[0]
    dist = np.full(n, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.zeros(n, dtype=bool)
    frontier[source] = True
    seen = frontier.copy()
    d = 0
    while frontier.any():
        nxt = adj[frontier].any(axis=0) & ~seen
        d += 1
        dist[nxt] = d
        seen |= nxt
        frontier = nxt
    return dist


def spheres(cfg: Union[Configuration, ColorMatrix], i: int, u: int) -> SphereTable:
    """Breadth-first layers of the color-i digraph from u, plus the induced
    color -> distance table, verified to be single-valued from this source."""
    cfg = _ensure_cfg(cfg)
    m = cfg.matrix
    if i in m.diagonal_colors():
        raise ValueError(f"color {i} is diagonal")
    adj = m.cells == i
    dist = _bfs_layers(adj, u)
    ecc = int(dist.max())
    layers = tuple(
        tuple(int(v) for v in np.flatnonzero(dist == d)) for d in range(ecc + 1)
    )
    unreachable = tuple(int(v) for v in np.flatnonzero(dist < 0))

    by_color = np.full(m.r, -2, dtype=np.int64)
    row = m.cells[u]
    for j in range(m.r):
        members = np.flatnonzero(row == j)
        if len(members) == 0:
            by_color[j] = -2
            continue
        vals = np.unique(dist[members])
        if len(vals) > 1:
            raise ValueError(
                f"distance in color {i} is not determined by pair color {j}: "
                f"values {sorted(int(x) for x in vals)} from source {u}"
            )
        by_color[j] = int(vals[0])
    return SphereTable(
        color=i, source=u, layers=layers, dist_by_color=by_color,
        unreachable=unreachable,
    )


def distance_by_color(cfg: Union[Configuration, ColorMatrix], i: int) -> np.ndarray:
    """dist_i(j) for every color j, taken from source 0."""
    return spheres(cfg, i, 0).dist_by_color


@dataclass(frozen=True)
class CheckItem:
    name: str
    status: str            # "pass" | "fail" | "skip"
    detail: str = ""
    witnesses: tuple = ()


@dataclass(frozen=True)
class CheckReport:
    items: tuple

    @property
    def ok(self) -> bool:
        return all(item.status != "fail" for item in self.items)

    def failures(self) -> tuple:
        return tuple(item for item in self.items if item.status == "fail")

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "items": [
                {
                    "name": it.name,
                    "status": it.status,
                    "detail": it.detail,
                    "witnesses": [list(map(str, w)) if isinstance(w, tuple) else str(w)
                                  for w in it.witnesses],
                }
                for it in self.items
            ],
        }


def _pcc_or_skip(cfg: Configuration) -> Optional[CheckItem]:
    if not cfg.check_homogeneous():
        return CheckItem("preconditions", "skip", "not homogeneous")
    if cfg.r <= 2:
        return CheckItem("preconditions", "skip", "rank 2")
    try:
        cfg.ensure_constants()
    except Exception as e:
        return CheckItem("preconditions", "skip", f"not coherent: {e}")
    if not cfg.check_primitive():
        return CheckItem("preconditions", "skip", "not primitive")
    return None


def check_growth_of_spheres(
    cfg: Union[Configuration, ColorMatrix],
    sources: Optional[Sequence[int]] = None,
    seed: int = 0,
    sample_threshold: int = 500,
    sample_size: int = 32,
) -> CheckReport:
    """Sphere-size product bound: whenever dist_i(j) = delta >= 3, every
    1 <= alpha <= delta-2 satisfies |sphere(alpha+1)| * |sphere(delta-alpha)|
    >= n_i * n_j. Exhaustive over sources up to `sample_threshold` vertices,
    seeded sampling above. A violation falsifies the implementation."""
    cfg = _ensure_cfg(cfg)
    skip = _pcc_or_skip(cfg)
    if skip is not None:
        return CheckReport(items=(skip,))
    sc = cfg.ensure_constants()
    m = cfg.matrix
    diag = _diag_color(m)
    n = m.n

    if sources is None:
        if n <= sample_threshold:
            sources = range(n)
        else:
            rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
            sources = sorted(int(x) for x in rng.choice(n, size=sample_size, replace=False))

    violations = []
    checked = 0
    vacuous = True
    for i in range(m.r):
        if i == diag:
            continue
        adj = m.cells == i
        for u in sources:
            dist = _bfs_layers(adj, u)
            sizes = np.bincount(dist[dist >= 0])
            row = m.cells[u]
            for j in range(m.r):
                if j == diag:
                    continue
                members = np.flatnonzero(row == j)
                if len(members) == 0:
                    continue
                delta = int(dist[members[0]])
                if delta < 3:
                    continue
                vacuous = False
                for alpha in range(1, delta - 1):
                    checked += 1
                    lhs = int(sizes[alpha + 1]) * int(sizes[delta - alpha])
                    rhs = int(sc.degrees[i]) * int(sc.degrees[j])
                    if lhs < rhs:
                        violations.append((i, j, u, alpha, lhs, rhs))
    if violations:
        item = CheckItem(
            "sphere-growth", "fail",
            f"{len(violations)} of {checked} instances violated",
            tuple(violations[:16]),
        )
    else:
        detail = "vacuous: no color pair at distance >= 3" if vacuous else f"{checked} instances"
        item = CheckItem("sphere-growth", "pass", detail)
    return CheckReport(items=(item,))


def check_diameter_lemma(
    cfg: Union[Configuration, ColorMatrix], epsilon: float = 0.1
) -> CheckReport:
    """Dominant-pair distance: with a dominant color and small residual degree
    the conclusion is dist_i(dominant) = 2 for every nondominant i and degree
    n_i >= sqrt(n-1) throughout. The asymptotic hypothesis is reified as
    rho < (1 - epsilon) * n^(2/3) and only ever reported, never enforced."""
    cfg = _ensure_cfg(cfg)
    skip = _pcc_or_skip(cfg)
    if skip is not None:
        return CheckReport(items=(skip,))
    p = profile(cfg)
    if p.dominant is None:
        return CheckReport(
            items=(CheckItem("dominant-distance", "skip", "hypothesis absent: no dominant color"),)
        )
    m = cfg.matrix
    hypo = p.rho < (1 - epsilon) * p.n ** (2 / 3)

    nond = [i for i in range(p.r) if i not in (p.diag, p.dominant)]
    dist_ok = True
    dist_values = {}
    for i in nond:
        table = distance_by_color(cfg, i)
        dist_values[i] = int(table[p.dominant])
        if table[p.dominant] != 2:
            dist_ok = False
    degree_ok = all(
        int(p.degrees[i]) ** 2 >= p.n - 1 for i in range(p.r) if i != p.diag
    )
    conclusion = dist_ok and degree_ok
    quadrant = f"hypothesis={'met' if hypo else 'unmet'}, conclusion={'holds' if conclusion else 'fails'}"
    status = "pass" if conclusion or not hypo else "fail"
    detail = (
        f"{quadrant}; rho={p.rho}, (1-eps)n^(2/3)={(1 - epsilon) * p.n ** (2 / 3):.2f}, "
        f"distances={dist_values}"
    )
    return CheckReport(items=(CheckItem("dominant-distance", status, detail),))


def _subsets_for_degree_transfer(nondiag: Sequence[int]) -> list:
    if len(nondiag) <= 12:
        out = []
        k = len(nondiag)
        for mask in range(1, 1 << k):
            out.append(tuple(nondiag[t] for t in range(k) if mask >> t & 1))
        return out
    singles = [(i,) for i in nondiag]
    return singles + [tuple(nondiag)]


def check_identities(cfg: Union[Configuration, ColorMatrix]) -> CheckReport:
    """The exact identity and inequality battery for a primitive coherent
    configuration: tensor symmetries, distinguishing-number bounds, and the
    dominant-color neighborhood bound. Everything is instantiated
    exhaustively over applicable indices; any failure is a build-failing bug.
    """
    cfg = _ensure_cfg(cfg)
    skip = _pcc_or_skip(cfg)
    if skip is not None:
        return CheckReport(items=(skip,))
    sc = cfg.ensure_constants()
    p = profile(cfg)
    m = cfg.matrix
    n, r, diag = p.n, p.r, p.diag
    nondiag = [i for i in range(r) if i != diag]
    star = sc.star
    D = p.distinguishing
    items = []

    # Tensor identities: degree pairing, transpose symmetry, degree exchange,
    # and row sums.
    bad = []
    for i in range(r):
        if sc.degrees[i] != sc.degrees[star[i]]:
            bad.append(("degree-pairing", i))
    for i in range(r):
        for (j, k), v in sc.table[i].items():
            if sc.p(int(star[i]), int(star[k]), int(star[j])) != v:
                bad.append(("transpose", i, j, k))
            if int(sc.degrees[i]) * v != int(sc.degrees[j]) * sc.p(j, i, int(star[k])):
                bad.append(("degree-exchange", i, j, k))
    for i in range(r):
        for k in range(r):
            row = sum(sc.p(i, j, k) for j in range(r))
            col = sum(sc.p(i, k, j) for j in range(r))
            if row != sc.degrees[k] or col != sc.degrees[k]:
                bad.append(("row-sum", i, k, row, col, int(sc.degrees[k])))
    items.append(
        CheckItem("tensor-identities", "fail" if bad else "pass",
                  f"{len(bad)} violations" if bad else "all triples", tuple(bad[:16]))
    )

    # Degree-weighted average of distinguishing numbers.
    lhs = sum(int(D[j]) * int(sc.degrees[j]) for j in nondiag)
    rhs = (p.rho + 2) * (n - 1)
    items.append(
        CheckItem("avg-distinguishing", "pass" if lhs >= rhs else "fail",
                  f"sum D(j)n_j = {lhs} vs (rho+2)(n-1) = {rhs}")
    )

    # Some color distinguishes more than rho pairs.
    dmax = max(int(D[i]) for i in nondiag)
    items.append(
        CheckItem("exists-large-distinguisher", "pass" if dmax > p.rho else "fail",
                  f"max D = {dmax}, rho = {p.rho}")
    )

    # Distance scaling: D(j) <= dist_i(j) * D(i).
    bad = []
    for i in nondiag:
        table = distance_by_color(cfg, i)
        for j in nondiag:
            if table[j] < 0:
                bad.append(("unreachable", i, j))
            elif int(D[j]) > int(table[j]) * int(D[i]):
                bad.append((i, j, int(D[j]), int(table[j]), int(D[i])))
    items.append(
        CheckItem("distance-scaling", "fail" if bad else "pass",
                  f"{len(bad)} violations" if bad else "all color pairs", tuple(bad[:16]))
    )

    # Degree product: n_i * D(i) >= n - 1.
    bad = [
        (i, int(sc.degrees[i]), int(D[i]))
        for i in nondiag
        if int(sc.degrees[i]) * int(D[i]) < n - 1
    ]
    items.append(
        CheckItem("degree-distinguishing-product", "fail" if bad else "pass",
                  f"{len(bad)} violations" if bad else "all colors", tuple(bad[:16]))
    )

    # Dominant-pair common-neighborhood bound: mu * n_1 <= rho^2.
    if p.dominant is None:
        items.append(CheckItem("common-neighborhood-bound", "skip",
                               "hypothesis absent: no dominant color"))
    else:
        n1 = int(sc.degrees[p.dominant])
        ok = p.mu * n1 <= p.rho**2
        items.append(
            CheckItem("common-neighborhood-bound", "pass" if ok else "fail",
                      f"mu = {p.mu}, rho^2/n_1 = {p.rho ** 2}/{n1}")
        )

    # Degree transfer: small-degree colors are bounded by the largest
    # distinguishing number of any chosen color set.
    bad = []
    tested = 0
    for subset in _subsets_for_degree_transfer(nondiag):
        tested += 1
        n_i = sum(int(sc.degrees[i]) for i in subset)
        small = [j for j in nondiag if 2 * int(sc.degrees[j]) <= n_i]
        lhs = sum(int(sc.degrees[j]) for j in small)
        rhs = 2 * max(int(D[i]) for i in subset)
        if lhs > rhs:
            bad.append((subset, lhs, rhs))
    items.append(
        CheckItem("degree-transfer", "fail" if bad else "pass",
                  f"{len(bad)} of {tested} subsets violated" if bad else f"{tested} subsets",
                  tuple(bad[:16]))
    )

    # Triangle bounds on distinguishing numbers over supported triples.
    bad = []
    for i in nondiag:
        for (j, k), v in sc.table[i].items():
            if v <= 0 or j == diag or k == diag:
                continue
            if not (int(D[j]) - int(D[k]) <= int(D[i]) <= int(D[j]) + int(D[k])):
                bad.append((i, j, k, int(D[i]), int(D[j]), int(D[k])))
    items.append(
        CheckItem("distinguishing-triangle", "fail" if bad else "pass",
                  f"{len(bad)} violations" if bad else "all supported triples",
                  tuple(bad[:16]))
    )

    return CheckReport(items=tuple(items))
