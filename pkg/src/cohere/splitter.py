"""Individualization-set construction strategies with a unified report.

Three mechanisms build splitting sets: random or greedy selection driven by
distinguishing numbers, random sampling sized for claw-pattern (good-triple)
coverage, and, when a geometry puts every vertex in exactly two cliques,
random sampling inside two cliques. `auto_split` recognizes the exceptional
families first and then dispatches on the residual degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .analysis import distinguishing_number, profile
from .cliques import CliqueGeometry, assemble_geometry, count_good_triples
from .core import ColorMatrix, Configuration
from .families import certified_isomorphism, family_graph, graph_of_color, match_family
from .refinement import refine_with_individualization

_STRATEGY_STREAMS = {"distinguishing": 1, "good-triples": 2, "two-clique": 3}


def _ensure_cfg(cfg: Union[Configuration, ColorMatrix]) -> Configuration:
    return cfg if isinstance(cfg, Configuration) else Configuration(matrix=cfg)


def _require_pcc(cfg: Configuration) -> None:
    cfg.ensure_constants()
    if not cfg.check_homogeneous():
        raise ValueError("splitting strategies need a homogeneous configuration")
    if not cfg.check_primitive():
        raise ValueError("splitting strategies need a primitive configuration")


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


@dataclass
class SplitReport:
    strategy: str
    individualized: tuple
    splits: bool
    rounds: int
    class_counts: tuple
    final_classes: int
    order_bound: Optional[int]
    seed: Optional[int]
    attempts: int
    exceptional: Optional[str] = None
    details: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.individualized)

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "individualized": [int(v) for v in self.individualized],
            "size": self.size,
            "splits": self.splits,
            "rounds": self.rounds,
            "class_counts": [int(c) for c in self.class_counts],
            "final_classes": self.final_classes,
            "order_bound": self.order_bound,
            "seed": self.seed,
            "attempts": self.attempts,
            "exceptional": self.exceptional,
            "details": self.details,
        }


def _report(
    cfg: Configuration,
    strategy: str,
    chosen: Sequence[int],
    seed: Optional[int],
    attempts: int,
    details: dict,
) -> SplitReport:
    s = tuple(sorted(int(x) for x in set(chosen)))
    coloring, trace = refine_with_individualization(cfg.matrix, s)
    splits = coloring.is_discrete()
    return SplitReport(
        strategy=strategy,
        individualized=s,
        splits=splits,
        rounds=trace.rounds,
        class_counts=trace.class_counts,
        final_classes=coloring.num_classes,
        order_bound=cfg.n ** len(s) if splits else None,
        seed=seed,
        attempts=attempts,
        details=details,
    )


@dataclass(frozen=True)
class ExceptionalReport:
    kind: str  # "complete" | "triangular" | "lattice" | "none"
    m: Optional[int] = None
    color: Optional[int] = None
    certified: bool = False
    isomorphism: Optional[tuple] = None
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "m": self.m,
            "color": self.color,
            "certified": self.certified,
            "isomorphism": None if self.isomorphism is None else list(self.isomorphism),
            "note": self.note,
        }


def recognize_exceptional(
    cfg: Union[Configuration, ColorMatrix], iso_limit: int = 300
) -> ExceptionalReport:
    """Identify the complete, triangular, or lattice families (or a complement
    of one, which is the same configuration with colors swapped).

    Rank 2 is the complete graph. At rank 3, each symmetric color is matched
    against the two closed-form parameter sets; a match is certified by an
    explicit isomorphism up to `iso_limit` vertices and reported as a
    parameter-only match above that. Parameter twins failing the isomorphism
    search (e.g. the lattice twin on 16 vertices) are reported as none.
    """
    cfg = _ensure_cfg(cfg)
    sc = cfg.ensure_constants()
    if not cfg.check_homogeneous():
        raise ValueError("recognition needs a homogeneous configuration")
    if cfg.r <= 2:
        return ExceptionalReport(kind="complete", m=cfg.n, certified=True)
    if cfg.r != 3:
        return ExceptionalReport(kind="none", note=f"rank {cfg.r}")

    diag = int(cfg.matrix.cells[0, 0])
    nond = [c for c in range(3) if c != diag]
    pseudo_notes = []
    for c in nond:
        if int(sc.star[c]) != c:
            continue
        other = nond[0] if nond[1] == c else nond[1]
        params = (cfg.n, int(sc.degrees[c]), sc.p(c, c, c), sc.p(other, c, c))
        for kind, m in match_family(*params):
            if cfg.n > iso_limit:
                return ExceptionalReport(
                    kind=kind, m=m, color=c, certified=False,
                    note="parameter match only; beyond isomorphism search limit",
                )
            mapping = certified_isomorphism(
                graph_of_color(cfg.matrix, c), family_graph(kind, m)
            )
            if mapping is not None:
                iso = tuple(mapping[u] for u in range(cfg.n))
                return ExceptionalReport(
                    kind=kind, m=m, color=c, certified=True, isomorphism=iso
                )
            pseudo_notes.append(f"pseudo-{kind}({m}) via color {c}")
    return ExceptionalReport(kind="none", note="; ".join(pseudo_notes))


def split_by_distinguishing(
    cfg: Union[Configuration, ColorMatrix],
    seed: int,
    attempt_budget: int = 8,
    max_doublings: int = 8,
) -> SplitReport:
    """Random sets sized by n ln n over the least distinguishing number, with
    doubling escalation, raced against a greedy pass that individualizes the
    vertex distinguishing the most same-class pairs. Reports the smaller
    successful set, or the best partial class count when the budget runs out.
    """
    cfg = _ensure_cfg(cfg)
    _require_pcc(cfg)
    sc = cfg.ensure_constants()
    n = cfg.n
    cells = cfg.matrix.cells.astype(np.int64)
    diag = int(cells[0, 0])
    zeta = min(distinguishing_number(cfg, i) for i in range(cfg.r) if i != diag)

    # Greedy: vertex maximizing the number of same-class pairs it splits.
    greedy: list = []
    best_partial = 0
    r = cfg.r
    while len(greedy) < n:
        coloring, _ = refine_with_individualization(cfg.matrix, greedy)
        best_partial = max(best_partial, coloring.num_classes)
        if coloring.is_discrete():
            break
        classes = coloring.classes
        k = coloring.num_classes
        sizes = np.bincount(classes, minlength=k)
        best_w, best_score = -1, 0
        in_set = set(greedy)
        for w in range(n):
            if w in in_set:
                continue
            counts = np.bincount(classes * r + cells[w], minlength=k * r).reshape(k, r)
            score = int((sizes * sizes - (counts * counts).sum(axis=1)).sum()) // 2
            if score > best_score:
                best_w, best_score = w, score
        if best_w < 0:
            break  # nothing splits anything further (complete-graph case)
        greedy.append(best_w)
    greedy_ok = bool(greedy) or n == 1
    greedy_coloring, _ = refine_with_individualization(cfg.matrix, greedy)
    greedy_ok = greedy_coloring.is_discrete()

    # Random with doubling escalation.
    base = n * math.log(max(n, 2)) / max(zeta, 1)
    random_set: Optional[list] = None
    attempts = 0
    scale = 1
    for doubling in range(max_doublings):
        size = min(n, math.ceil(scale * base))
        for a in range(attempt_budget):
            attempts += 1
            rng = _rng(seed, _STRATEGY_STREAMS["distinguishing"], doubling, a)
            s = sorted(int(x) for x in rng.choice(n, size=size, replace=False))
            coloring, _ = refine_with_individualization(cfg.matrix, s)
            best_partial = max(best_partial, coloring.num_classes)
            if coloring.is_discrete():
                random_set = s
                break
        if random_set is not None or size == n:
            break
        scale *= 2

    details = {
        "zeta": int(zeta),
        "greedy_size": len(greedy) if greedy_ok else None,
        "random_size": None if random_set is None else len(random_set),
        "best_partial_classes": int(best_partial),
    }
    candidates = []
    if greedy_ok:
        candidates.append(list(greedy))
    if random_set is not None:
        candidates.append(random_set)
    if candidates:
        chosen = min(candidates, key=len)
        return _report(cfg, "distinguishing", chosen, seed, attempts, details)
    out = _report(cfg, "distinguishing", list(range(n)), seed, attempts, details)
    out.splits = False  # budget exhausted; S=V result reported as failure data
    out.individualized = ()
    out.order_bound = None
    return out


def split_by_good_triples(
    cfg: Union[Configuration, ColorMatrix],
    i: int,
    j: int,
    seed: int,
    beta: float = 8.0,
    rounds: int = 8,
) -> SplitReport:
    """Include each vertex independently with probability scaled for
    claw-pattern coverage, doubling the scale on failure."""
    cfg = _ensure_cfg(cfg)
    _require_pcc(cfg)
    p = profile(cfg)
    if p.dominant is None:
        raise ValueError("good-triple splitting needs a dominant color")
    if i in (p.diag, p.dominant) or j in (p.diag, p.dominant):
        raise ValueError(f"colors ({i}, {j}) must be nondominant")
    n = cfg.n
    attempts = 0
    scale = beta
    last = None
    for k in range(rounds):
        prob = min(1.0, scale * math.sqrt(math.log(max(n, 2)) / n**1.5))
        attempts += 1
        rng = _rng(seed, _STRATEGY_STREAMS["good-triples"], k)
        s = sorted(int(x) for x in np.flatnonzero(rng.random(n) < prob))
        report = _report(
            cfg, "good-triples", s, seed, attempts,
            {"i": i, "j": j, "beta": scale, "probability": prob},
        )
        last = report
        if report.splits:
            return report
        scale *= 2
    assert last is not None
    last.details["exhausted"] = True
    return last


def split_two_clique(
    cfg: Union[Configuration, ColorMatrix],
    geometry: CliqueGeometry,
    seed: int,
    attempts: int = 8,
) -> SplitReport:
    """Sample inside the two largest cliques of an everywhere-two-clique
    geometry at rate 6 ln(n_c^2)/n_c per clique, then verify the two cliques
    split to singletons and the whole configuration follows."""
    cfg = _ensure_cfg(cfg)
    _require_pcc(cfg)
    counts = geometry.incidence_counts
    if min(counts) != 2 or max(counts) != 2:
        raise ValueError("two-clique splitting needs every vertex in exactly two cliques")
    ordered = sorted(geometry.cliques, key=lambda c: (-len(c), c))
    first, second = ordered[0], ordered[1]
    pool = sorted(set(first) | set(second))

    def rate(clique) -> float:
        nc = max(len(clique) - 1, 2)
        return min(1.0, 6.0 * math.log(nc * nc) / nc)

    last = None
    for a in range(attempts):
        rng = _rng(seed, _STRATEGY_STREAMS["two-clique"], a)
        s: set = set()
        for clique in (first, second):
            q = rate(clique)
            draws = rng.random(len(clique))
            s.update(v for v, x in zip(clique, draws) if x < q)
        report = _report(
            cfg, "two-clique", sorted(s), seed, a + 1,
            {"clique_orders": [len(first), len(second)], "rate": [rate(first), rate(second)]},
        )
        last = report
        if report.splits:
            coloring, _ = refine_with_individualization(cfg.matrix, report.individualized)
            classes = coloring.classes
            pool_classes = classes[pool]
            report.details["two_cliques_discrete"] = bool(
                len(set(int(c) for c in pool_classes)) == len(pool)
            )
            return report
    assert last is not None
    last.details["exhausted"] = True
    return last


def auto_split(
    cfg: Union[Configuration, ColorMatrix],
    seed: int,
    tolerance: float = 0.25,
) -> SplitReport:
    """Dispatch: recognize exceptional families, split by distinguishing
    numbers when the residual degree is large, otherwise try the geometry
    (two-clique sampling when it applies, claw-pattern sampling when cliques
    are plentiful or absent), falling back to distinguishing numbers."""
    cfg = _ensure_cfg(cfg)
    _require_pcc(cfg)
    trace: dict = {}

    rec = recognize_exceptional(cfg)
    trace["exceptional"] = rec.as_dict()
    if rec.kind != "none":
        return SplitReport(
            strategy="exceptional", individualized=(), splits=False, rounds=0,
            class_counts=(), final_classes=1, order_bound=None, seed=seed,
            attempts=0, exceptional=rec.kind,
            details={"decision_trace": trace, "m": rec.m},
        )

    p = profile(cfg)
    n = cfg.n
    threshold = n ** (2 / 3) * math.log(max(n, 3)) ** (-1 / 3)
    trace["rho"] = p.rho
    trace["threshold"] = threshold
    if p.rho >= threshold:
        trace["branch"] = "large-residual-degree"
        report = split_by_distinguishing(cfg, seed)
        report.details["decision_trace"] = trace
        return report

    geo = assemble_geometry(cfg, tolerance=tolerance)
    trace["geometry"] = {
        "ok": geo.ok,
        "failures": [f"{f.stage}({f.dominant}): {f.detail}" for f in geo.failures],
    }
    if geo.ok:
        counts = geo.geometry.incidence_counts
        trace["incidence"] = [min(counts), max(counts)]
        if min(counts) == 2 and max(counts) == 2:
            trace["branch"] = "two-clique"
            report = split_two_clique(cfg, geo.geometry, seed)
            report.details["decision_trace"] = trace
            return report

    if p.dominant is not None:
        nond = [c for c in range(cfg.r) if c not in (p.diag, p.dominant)]
        i_min = min(nond, key=lambda c: (int(p.degrees[c]), c))
        k_small = min(nond, key=lambda c: (p.lam[c], c))
        candidates = []
        for pair in ((i_min, int(p.star[k_small])), (i_min, int(p.star[i_min]))):
            if pair not in candidates:
                candidates.append(pair)
        trace["branch"] = "good-triples"
        trace["color_pairs"] = [list(c) for c in candidates]
        for i, j in candidates:
            report = split_by_good_triples(cfg, i, j, seed)
            if report.splits:
                report.details["decision_trace"] = trace
                return report
        trace["good_triples_exhausted"] = True
    else:
        trace["branch"] = "no-dominant-color"

    report = split_by_distinguishing(cfg, seed)
    trace["fallback"] = "distinguishing"
    report.details["decision_trace"] = trace
    return report
