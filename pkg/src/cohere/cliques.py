"""Clique structure of the residual (nondominant) graph: greedy local clique
partitions, geometry assembly with a uniformity score, the two-clique
classification, and good-triple counting.

A clique geometry is a family of maximal cliques covering every residual
edge exactly once; two members then share at most one vertex. Local clique
partitions exist under a degree/common-neighbor hypothesis and are stitched
into a geometry through a strongness condition and an endpoint-symmetry
check. At finite size, per-color clique counts are scored against
lambda_i + 1, the exact value in the line-graph families.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .analysis import DominantView, dominant_view, profile
from .core import ColorMatrix, Configuration
from .families import certified_isomorphism, family_graph, graph_of_color, match_family

_EPS = 1e-9


def _ensure_cfg(cfg: Union[Configuration, ColorMatrix]) -> Configuration:
    return cfg if isinstance(cfg, Configuration) else Configuration(matrix=cfg)


def _resolve_view(
    cfg: Configuration, dominant: Optional[int], view: Optional[DominantView]
) -> DominantView:
    if view is not None:
        return view
    if dominant is not None:
        return dominant_view(cfg, dominant)
    p = profile(cfg)
    if p.dominant is None:
        raise ValueError("no dominant color; designate one explicitly")
    return dominant_view(cfg, p.dominant)


@dataclass(frozen=True)
class NondominantGraph:
    """The graph of residual (nondominant) pairs, with its exact invariants
    verified: regular of valency rho, and any two vertices joined by the
    dominant color have exactly mu common neighbors."""

    n: int
    rho: int
    mu: int
    dominant: int
    adjacency: np.ndarray = field(repr=False)

    def neighbors(self, u: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[u])


def nondominant_graph(
    cfg: Union[Configuration, ColorMatrix],
    dominant: Optional[int] = None,
    view: Optional[DominantView] = None,
) -> NondominantGraph:
    cfg = _ensure_cfg(cfg)
    view = _resolve_view(cfg, dominant, view)
    a = view.adjacency
    degrees = a.sum(axis=1)
    if not (degrees == view.rho).all():
        bad = int(np.flatnonzero(degrees != view.rho)[0])
        raise ValueError(f"residual graph not {view.rho}-regular at vertex {bad}")
    common = (a.astype(np.int64) @ a.astype(np.int64))
    dom_pairs = cfg.matrix.cells == view.dominant
    if not (common[dom_pairs] == view.mu).all():
        where = np.argwhere(dom_pairs & (common != view.mu))[0]
        raise ValueError(
            f"dominant pair {tuple(int(x) for x in where)} has "
            f"{int(common[where[0], where[1]])} common neighbors, expected {view.mu}"
        )
    return NondominantGraph(
        n=cfg.n, rho=view.rho, mu=view.mu, dominant=view.dominant, adjacency=a
    )


@dataclass(frozen=True)
class MetschResult:
    status: str  # "ok" | "hypothesis-violation" | "partition-failure"
    cliques: tuple = ()
    detail: str = ""
    offending: tuple = ()

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def metsch_partition(
    adjacency: np.ndarray, lam: int, mu: int, tolerance: float = 0.25
) -> MetschResult:
    """Greedy partition of a graph into maximal cliques of order close to its
    regular degree.

    Hypotheses (checked, reported distinctly from partition failure): the
    graph is regular of degree `lam` and nonadjacent vertices share at most
    `mu` neighbors. Growth is deterministic: lowest-index seed, then the
    candidate with the most common neighbors among the remaining candidates,
    ties by index. The partition is accepted iff the cliques are disjoint,
    cover everything, and each has order >= (1 - tolerance) * lam.
    """
    a = np.asarray(adjacency, dtype=bool)
    k = a.shape[0]
    degrees = a.sum(axis=1)
    if k and not (degrees == lam).all():
        bad = int(np.flatnonzero(degrees != lam)[0])
        return MetschResult(
            status="hypothesis-violation",
            detail=f"vertex {bad} has degree {int(degrees[bad])}, expected {lam}",
        )
    common = a.astype(np.int64) @ a.astype(np.int64)
    nonadj = ~a & ~np.eye(k, dtype=bool)
    if k and (common[nonadj] > mu).any():
        u, v = np.argwhere(nonadj & (common > mu))[0]
        return MetschResult(
            status="hypothesis-violation",
            detail=(
                f"nonadjacent pair ({int(u)}, {int(v)}) has "
                f"{int(common[u, v])} > {mu} common neighbors"
            ),
        )

    assigned = np.zeros(k, dtype=bool)
    cliques: list = []
    floor = (1 - tolerance) * lam - _EPS
    for seed in range(k):
        if assigned[seed]:
            continue
        clique = [seed]
        cand = a[seed].copy()
        while cand.any():
            members = np.flatnonzero(cand)
            scores = a[np.ix_(members, members)].sum(axis=1)
            pick = int(members[int(np.argmax(scores))])
            clique.append(pick)
            cand &= a[pick]
            cand[pick] = False
        clique = sorted(clique)
        if assigned[clique].any():
            return MetschResult(
                status="partition-failure",
                cliques=tuple(tuple(c) for c in cliques),
                detail="grown clique overlaps an earlier one",
                offending=tuple(clique),
            )
        if len(clique) < floor:
            return MetschResult(
                status="partition-failure",
                cliques=tuple(tuple(c) for c in cliques),
                detail=f"clique of order {len(clique)} below (1-t)*{lam}",
                offending=tuple(clique),
            )
        assigned[clique] = True
        cliques.append(clique)
    return MetschResult(status="ok", cliques=tuple(tuple(c) for c in cliques))


@dataclass(frozen=True)
class LocalPartition:
    status: str  # "ok" | "hypothesis-violation" | "partition-failure" | "uniformity-failure"
    center: int
    colors: tuple
    cliques: tuple = ()     # global vertex ids, center excluded
    worst_deviation: float = 0.0
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def local_clique_partition(
    cfg: Union[Configuration, ColorMatrix],
    u: int,
    colors: Sequence[int],
    tolerance: float = 0.25,
    dominant: Optional[int] = None,
    view: Optional[DominantView] = None,
) -> LocalPartition:
    """Partition the union of the chosen color neighborhoods of u into maximal
    cliques of the residual graph, then score per-color counts.

    Per-color counts inside each clique must be 0 or within `tolerance` of
    lambda_i + 1 (the exact per-clique count in the line-graph families).
    Failures distinguish a broken hypothesis (irregular induced subgraph,
    lambda_i = 0) from a missing partition and from a uniformity miss.
    """
    cfg = _ensure_cfg(cfg)
    view = _resolve_view(cfg, dominant, view)
    colors = tuple(sorted(set(int(c) for c in colors)))
    if not colors:
        raise ValueError("need at least one color")
    if any(c not in view.nondominant for c in colors):
        raise ValueError(f"colors {colors} not nondominant for designation {view.dominant}")
    zero = [c for c in colors if view.lam[c] < 1]
    if zero:
        return LocalPartition(
            status="hypothesis-violation", center=u, colors=colors,
            detail=f"lambda is 0 for colors {zero}",
        )

    row = cfg.matrix.cells[u]
    members = np.flatnonzero(np.isin(row, np.array(colors, dtype=np.uint16)))
    induced = view.adjacency[np.ix_(members, members)]
    lam_sum = int(sum(view.lam[c] for c in colors))
    res = metsch_partition(induced, lam_sum, view.mu, tolerance)
    if res.status != "ok":
        return LocalPartition(
            status=res.status, center=u, colors=colors, detail=res.detail,
            cliques=tuple(tuple(int(members[x]) for x in c) for c in res.cliques),
        )

    cliques = tuple(tuple(int(members[x]) for x in c) for c in res.cliques)
    worst = 0.0
    for clique in cliques:
        sub = row[list(clique)]
        for c in colors:
            cnt = int(np.count_nonzero(sub == c))
            if cnt == 0:
                continue
            dev = abs(cnt / (view.lam[c] + 1) - 1.0)
            worst = max(worst, dev)
    if worst > tolerance + _EPS:
        return LocalPartition(
            status="uniformity-failure", center=u, colors=colors,
            cliques=cliques, worst_deviation=worst,
            detail=f"per-color count off by {worst:.3f} > {tolerance}",
        )
    return LocalPartition(
        status="ok", center=u, colors=colors, cliques=cliques, worst_deviation=worst
    )


def strong_partition_check(
    cfg: Union[Configuration, ColorMatrix],
    u: int,
    partition: Sequence[Sequence[int]],
    dominant: Optional[int] = None,
    view: Optional[DominantView] = None,
) -> tuple:
    """For each clique C of a local partition at u, is C + {u} maximal in the
    whole residual graph?"""
    cfg = _ensure_cfg(cfg)
    view = _resolve_view(cfg, dominant, view)
    a = view.adjacency
    out = []
    for clique in partition:
        group = list(clique) + [u]
        joined = a[:, group].all(axis=1)
        joined[group] = False
        out.append(not bool(joined.any()))
    return tuple(out)


@dataclass(frozen=True)
class CliqueGeometry:
    """Maximal cliques covering each residual edge exactly once."""

    cliques: tuple                # sorted vertex tuples
    incidence: tuple              # per vertex: indices into cliques
    dominant: int
    threshold_dominant: bool
    groups: tuple                 # color groups used for local partitions
    worst_deviation: float
    zero_count_colors: int
    tolerance: float

    @property
    def incidence_counts(self) -> tuple:
        return tuple(len(ix) for ix in self.incidence)

    def orders(self) -> tuple:
        return tuple(len(c) for c in self.cliques)

    def as_dict(self) -> dict:
        return {
            "cliques": [list(c) for c in self.cliques],
            "incidence": [list(ix) for ix in self.incidence],
            "dominant": self.dominant,
            "threshold_dominant": self.threshold_dominant,
            "groups": [list(g) for g in self.groups],
            "worst_deviation": self.worst_deviation,
            "zero_count_colors": self.zero_count_colors,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class GeometryFailure:
    stage: str  # "designation" | "local-partition" | "strongness" | "symmetry" | "uniqueness" | "uniformity"
    dominant: Optional[int]
    detail: str


@dataclass(frozen=True)
class GeometryResult:
    geometry: Optional[CliqueGeometry]
    failures: tuple

    @property
    def ok(self) -> bool:
        return self.geometry is not None

    def as_dict(self) -> dict:
        return {
            "ok": self.ok,
            "geometry": None if self.geometry is None else self.geometry.as_dict(),
            "failures": [
                {"stage": f.stage, "dominant": f.dominant, "detail": f.detail}
                for f in self.failures
            ],
        }


def _sample_vertices(n: int, cap: int) -> list:
    if n <= cap:
        return list(range(n))
    stride = max(1, n // cap)
    return list(range(0, n, stride))[:cap]


def _grow_color_groups(
    cfg: Configuration, view: DominantView, tolerance: float, samples: Sequence[int]
) -> tuple:
    """Partition the nondominant colors into maximal sets admitting joint
    local partitions, grown one color at a time in increasing degree."""
    sc = cfg.ensure_constants()
    ordered = sorted(view.nondominant, key=lambda c: (int(sc.degrees[c]), c))
    grouped: set = set()
    groups = []
    for i in ordered:
        if i in grouped:
            continue
        current = [i]
        for j in ordered:
            if j in grouped or j == i or j in current:
                continue
            trial = current + [j]
            if all(
                local_clique_partition(cfg, u, trial, tolerance, view=view).ok
                for u in samples
            ):
                current = trial
        groups.append(tuple(sorted(current)))
        grouped.update(current)
    return tuple(groups)


def _assemble_for_designation(
    cfg: Configuration,
    view: DominantView,
    tolerance: float,
    sample_cap: int,
    exhaustive: bool,
) -> Union[CliqueGeometry, GeometryFailure]:
    n = cfg.n
    cells = cfg.matrix.cells
    d = view.dominant

    if any(view.lam[c] < 1 for c in view.nondominant):
        zero = [c for c in view.nondominant if view.lam[c] < 1]
        return GeometryFailure("local-partition", d, f"lambda is 0 for colors {zero}")

    samples = list(range(n)) if exhaustive else _sample_vertices(n, sample_cap)
    groups = _grow_color_groups(cfg, view, tolerance, samples)

    key_of: dict = {}
    cliques_by_pair: dict = {}
    for u in range(n):
        row = cells[u]
        for group in groups:
            lp = local_clique_partition(cfg, u, group, tolerance, view=view)
            if not lp.ok:
                return GeometryFailure(
                    "local-partition", d, f"vertex {u}, colors {group}: {lp.detail or lp.status}"
                )
            strong = strong_partition_check(cfg, u, lp.cliques, view=view)
            if not all(strong):
                weak = lp.cliques[strong.index(False)]
                return GeometryFailure(
                    "strongness", d,
                    f"vertex {u}, colors {group}: clique {weak} plus center not maximal",
                )
            for clique in lp.cliques:
                key = frozenset(clique) | {u}
                for v in clique:
                    cliques_by_pair[(u, int(v))] = key

    for (u, v), key in cliques_by_pair.items():
        other = cliques_by_pair.get((v, u))
        if other != key:
            return GeometryFailure(
                "symmetry", d,
                f"clique at {u} through {v} differs from clique at {v} through {u}",
            )

    cliques = sorted({tuple(sorted(k)) for k in cliques_by_pair.values()})
    index = {frozenset(c): i for i, c in enumerate(cliques)}

    covered: dict = {}
    for c_idx, clique in enumerate(cliques):
        for a in clique:
            for b in clique:
                if a < b:
                    covered.setdefault((a, b), []).append(c_idx)
    adj = view.adjacency
    for u in range(n):
        for v in range(u + 1, n):
            if adj[u, v]:
                hit = covered.get((u, v), [])
                if len(hit) != 1:
                    return GeometryFailure(
                        "uniqueness", d,
                        f"residual edge ({u}, {v}) lies in {len(hit)} cliques",
                    )
    for i in range(len(cliques)):
        si = set(cliques[i])
        for j in range(i + 1, len(cliques)):
            if len(si & set(cliques[j])) > 1:
                return GeometryFailure(
                    "uniqueness", d, f"cliques {i} and {j} share more than one vertex"
                )

    worst = 0.0
    zero_flags = 0
    for clique in cliques:
        arr = np.array(clique)
        for u in clique:
            sub = cells[u][arr]
            for c in view.nondominant:
                cnt = int(np.count_nonzero(sub == c))
                if cnt == 0:
                    zero_flags += 1
                    continue
                worst = max(worst, abs(cnt / (view.lam[c] + 1) - 1.0))
    if worst > tolerance + _EPS:
        return GeometryFailure(
            "uniformity", d, f"worst per-color deviation {worst:.3f} > {tolerance}"
        )

    incidence: list = [[] for _ in range(n)]
    for c_idx, clique in enumerate(cliques):
        for v in clique:
            incidence[v].append(c_idx)
    return CliqueGeometry(
        cliques=tuple(tuple(int(x) for x in c) for c in cliques),
        incidence=tuple(tuple(ix) for ix in incidence),
        dominant=d,
        threshold_dominant=view.threshold_dominant,
        groups=groups,
        worst_deviation=worst,
        zero_count_colors=zero_flags,
        tolerance=tolerance,
    )


def assemble_geometry(
    cfg: Union[Configuration, ColorMatrix],
    tolerance: float = 0.25,
    dominant: Optional[int] = None,
    sample_cap: int = 32,
    exhaustive: bool = False,
) -> GeometryResult:
    """Assemble a clique geometry, searching dominant designations if needed.

    With no explicit designation, every symmetric off-diagonal color is tried
    in increasing degree order (the line-graph side of the acceptance families
    is found first); the designation actually used is recorded along with
    whether it meets the n/2 dominance threshold. Failures carry the stage
    reached for each attempted designation.
    """
    cfg = _ensure_cfg(cfg)
    sc = cfg.ensure_constants()
    if not cfg.check_homogeneous():
        raise ValueError("clique geometry needs a homogeneous configuration")
    diag = int(cfg.matrix.cells[0, 0])
    if dominant is not None:
        candidates = [dominant]
    else:
        candidates = sorted(
            (c for c in range(cfg.r) if c != diag and int(sc.star[c]) == c),
            key=lambda c: (int(sc.degrees[c]), c),
        )
    if not candidates:
        return GeometryResult(
            geometry=None,
            failures=(GeometryFailure("designation", None, "no symmetric color to designate"),),
        )
    failures = []
    for d in candidates:
        view = dominant_view(cfg, d)
        if not view.nondominant:
            failures.append(GeometryFailure("designation", d, "no residual colors"))
            continue
        out = _assemble_for_designation(cfg, view, tolerance, sample_cap, exhaustive)
        if isinstance(out, CliqueGeometry):
            return GeometryResult(geometry=out, failures=tuple(failures))
        failures.append(out)
    return GeometryResult(geometry=None, failures=tuple(failures))


@dataclass(frozen=True)
class TwoCliqueReport:
    all_in_exactly_two: bool
    incidence_min: int
    incidence_max: int
    rank: int
    branch: str                   # "rank3-family" | "rank4-nonsymmetric" | "inapplicable"
    family: Optional[str] = None  # "triangular" | "lattice"
    m: Optional[int] = None
    parameters_match: bool = False
    isomorphism_checked: bool = False
    isomorphic: Optional[bool] = None
    nonsymmetric_pair: Optional[bool] = None
    cliques_meet_once: Optional[bool] = None
    degree_consistent: Optional[bool] = None
    detail: str = ""

    def as_dict(self) -> dict:
        return {
            "all_in_exactly_two": self.all_in_exactly_two,
            "incidence_min": self.incidence_min,
            "incidence_max": self.incidence_max,
            "rank": self.rank,
            "branch": self.branch,
            "family": self.family,
            "m": self.m,
            "parameters_match": self.parameters_match,
            "isomorphism_checked": self.isomorphism_checked,
            "isomorphic": self.isomorphic,
            "nonsymmetric_pair": self.nonsymmetric_pair,
            "cliques_meet_once": self.cliques_meet_once,
            "degree_consistent": self.degree_consistent,
            "detail": self.detail,
        }


def _representative_walks(cells: np.ndarray, color: int, j: int, k: int) -> int:
    """Walk count at the first pair of the color; equals the tensor entry on
    coherent input and stays well-defined on plain configurations."""
    pos = np.argwhere(cells == color)
    u, v = int(pos[0][0]), int(pos[0][1])
    return int(np.count_nonzero((cells[u] == j) & (cells[:, v] == k)))


def two_clique_characterization(
    cfg: Union[Configuration, ColorMatrix], geometry: CliqueGeometry
) -> TwoCliqueReport:
    """Classify a configuration whose geometry has a vertex in at most two
    cliques: rank 3 must match one of the two line-graph families (certified
    by explicit isomorphism up to 100 vertices), rank 4 must carry a
    transpose-paired color pair with all cliques pairwise meeting once.

    Works from the matrix alone (representative walk counts), so it can
    classify plain configurations as well as verified coherent ones.
    """
    cfg = _ensure_cfg(cfg)
    star = cfg.matrix.pairing()
    if star is None:
        raise ValueError("not a configuration: no color pairing")
    cells64 = cfg.matrix.cells.astype(np.int64)
    degrees = np.bincount(cells64[0], minlength=cfg.r)
    counts = geometry.incidence_counts
    lo, hi = min(counts), max(counts)
    all_two = lo == 2 and hi == 2
    rank = cfg.r

    if lo > 2:
        return TwoCliqueReport(
            all_in_exactly_two=False, incidence_min=lo, incidence_max=hi,
            rank=rank, branch="inapplicable",
            detail="every vertex lies in more than two cliques",
        )

    diag = int(cfg.matrix.cells[0, 0])
    nond = [c for c in range(rank) if c not in (diag, geometry.dominant)]

    if rank == 3:
        c = nond[0]
        other = geometry.dominant
        k = int(sc.degrees[c])
        lam = sc.p(c, c, c)
        mu = sc.p(other, c, c)
        matches = match_family(cfg.n, k, lam, mu)
        if not matches:
            return TwoCliqueReport(
                all_in_exactly_two=all_two, incidence_min=lo, incidence_max=hi,
                rank=3, branch="rank3-family", parameters_match=False,
                detail=f"srg parameters ({cfg.n}, {k}, {lam}, {mu}) match neither family",
            )
        kind, m = matches[0]
        iso_checked = cfg.n <= 100
        isomorphic = None
        if iso_checked:
            mapping = certified_isomorphism(
                graph_of_color(cfg.matrix, c), family_graph(kind, m)
            )
            isomorphic = mapping is not None
        return TwoCliqueReport(
            all_in_exactly_two=all_two, incidence_min=lo, incidence_max=hi,
            rank=3, branch="rank3-family", family=kind, m=m,
            parameters_match=True, isomorphism_checked=iso_checked,
            isomorphic=isomorphic,
        )

    if rank == 4:
        c1, c2 = nond
        paired = int(sc.star[c1]) == c2
        meets = True
        for i in range(len(geometry.cliques)):
            si = set(geometry.cliques[i])
            for j in range(i + 1, len(geometry.cliques)):
                if len(si & set(geometry.cliques[j])) != 1:
                    meets = False
        m = len(geometry.cliques)
        degree_ok = m == int(sc.degrees[c1]) + 2 and m == int(sc.degrees[c2]) + 2
        return TwoCliqueReport(
            all_in_exactly_two=all_two, incidence_min=lo, incidence_max=hi,
            rank=4, branch="rank4-nonsymmetric", m=m,
            nonsymmetric_pair=paired, cliques_meet_once=meets,
            degree_consistent=degree_ok,
        )

    return TwoCliqueReport(
        all_in_exactly_two=all_two, incidence_min=lo, incidence_max=hi,
        rank=rank, branch="inapplicable", detail=f"rank {rank} out of scope",
    )


@dataclass(frozen=True)
class GoodTripleQuery:
    i: int
    j: int
    u: int
    v: int
    dominant: int
    q_count: int      # claw patterns rooted at u
    good_count: int   # those with no matching pattern at v


def _bit_rows(mask: np.ndarray) -> list:
    packed = np.packbits(mask, axis=1, bitorder="little")
    return [int.from_bytes(packed[u].tobytes(), "little") for u in range(mask.shape[0])]


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def count_good_triples(
    cfg: Union[Configuration, ColorMatrix],
    i: int,
    j: int,
    u: int,
    v: int,
    dominant: Optional[int] = None,
) -> GoodTripleQuery:
    """Count claw patterns present at u but absent at v.

    A pattern for u is a triple (w, x, y), x and y ordered, with c(u,w) = i,
    c(w,x) = c(w,y) = j, and (u,x), (u,y), (x,y) all dominant; it is good for
    (u, v) if no z has c(v,z) = i and c(z,x) = c(z,y) = j. Individualizing x
    and y of a good triple forces u and v apart under refinement.
    """
    cfg = _ensure_cfg(cfg)
    sc = cfg.ensure_constants()
    view = _resolve_view(cfg, dominant, None)
    d = view.dominant
    if i not in view.nondominant or j not in view.nondominant:
        raise ValueError(f"colors ({i}, {j}) must avoid the dominant designation {d}")
    cells = cfg.matrix.cells
    jstar = int(sc.star[j])

    rows_dom = _bit_rows(cells == d)
    rows_j = _bit_rows(cells == j)
    rows_jstar = _bit_rows(cells == jstar)
    row_i_v = _bit_rows(cells == i)[v]

    q_count = 0
    good_count = 0
    for w in np.flatnonzero(cells[u] == i):
        pool = rows_j[int(w)] & rows_dom[u]
        for x in _bits(pool):
            ys = pool & rows_dom[x]
            npairs = ys.bit_count()
            q_count += npairs
            if npairs == 0:
                continue
            blockers = row_i_v & rows_jstar[x]
            if blockers == 0:
                good_count += npairs
            else:
                for y in _bits(ys):
                    if blockers & rows_jstar[y] == 0:
                        good_count += 1
    return GoodTripleQuery(
        i=i, j=j, u=u, v=v, dominant=d, q_count=q_count, good_count=good_count
    )
