"""Command-line surface: generate, validate, refine, analyze, detect
geometry, split, verify, and build the standard corpus.

Every subcommand can emit one JSON report of a single shape (kind
discriminator plus a result payload). Reports are deterministic given the
input digest, command, and seed: wall-clock timing goes to stderr only, and
the --threads knob never influences results. Exit codes: 0 success, 1 usage,
2 domain outcome (axiom violation, exceptional family), 3 attempt budget
exhausted, 4 I/O failure, 5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__
from .analysis import check_diameter_lemma, check_growth_of_spheres, check_identities, profile
from .cliques import assemble_geometry, count_good_triples, two_clique_characterization
from .core import (
    CcmFormatError,
    CoherenceError,
    ColorMatrix,
    Configuration,
    canonicalize,
    compute_structure_constants,
    dumps_ccm,
    loads_ccm,
    validate_configuration,
)
from .generators import (
    GraphInput,
    from_graph,
    hamming,
    johnson,
    lattice,
    orbital_configuration,
    parse_edge_list,
    parse_permutations,
    random_graph,
    triangular,
)
from .refinement import refine_with_individualization, wl_refine
from .splitter import auto_split, split_by_distinguishing, split_by_good_triples, split_two_clique

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_BUDGET = 3
EXIT_IO = 4
EXIT_INVARIANT = 5


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _read_matrix(path: str) -> tuple[ColorMatrix, str]:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot read {path}: {e}") from None
    digest = hashlib.sha256(data).hexdigest()
    try:
        return loads_ccm(data.decode()), digest
    except (CcmFormatError, UnicodeDecodeError) as e:
        raise CliError(EXIT_IO, f"bad .ccm file {path}: {e}") from None


def _write_text(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot write {path}: {e}") from None


def _emit_report(args, kind: str, result: dict, digest=None, seed=None) -> None:
    report = {
        "kind": kind,
        "version": __version__,
        "command": [str(t) for t in args._command_tokens],
        "seed": seed,
        "input_digest": digest,
        "result": result,
    }
    text = json.dumps(report, sort_keys=True, separators=(",", ":")) + "\n"
    target = getattr(args, "report", None)
    if target:
        _write_text(target, text)
    else:
        sys.stdout.write(text)


def _cmd_gen(args) -> int:
    family = args.family
    params = args.params
    try:
        if family == "triangular":
            cfg = triangular(int(params[0]))
        elif family == "lattice":
            cfg = lattice(int(params[0]))
        elif family == "johnson":
            m, k = int(params[0]), int(params[1]) if len(params) > 1 else 3
            cfg = johnson(m, k)
        elif family == "hamming":
            cfg = hamming(int(params[0]), int(params[1]))
        elif family == "complete":
            n = int(params[0])
            cfg = from_graph(GraphInput.from_pairs(
                n, [(a, b) for a in range(n) for b in range(a + 1, n)]))
        elif family == "graph":
            cfg = from_graph(parse_edge_list(Path(params[0]).read_text()))
        elif family == "orbital":
            cfg = orbital_configuration(parse_permutations(Path(params[0]).read_text()))
        else:
            raise CliError(EXIT_USAGE, f"unknown family {family!r}")
    except CliError:
        raise
    except OSError as e:
        raise CliError(EXIT_IO, str(e)) from None
    except (ValueError, IndexError) as e:
        raise CliError(EXIT_USAGE, f"bad parameters for {family}: {e}") from None
    m = canonicalize(cfg.matrix) if args.canonical else cfg.matrix
    text = dumps_ccm(m)
    if args.output:
        _write_text(args.output, text)
    else:
        sys.stdout.write(text)
    _emit_report(args, "gen", {"n": m.n, "r": m.r, "family": family,
                               "params": [str(p) for p in params]})
    return EXIT_OK


def _cmd_validate(args) -> int:
    m, digest = _read_matrix(args.input)
    res = validate_configuration(m)
    payload = {
        "ok": res.ok,
        "violations": [
            {"axiom": v.axiom, "witness": [list(w) for w in v.witness], "detail": v.detail}
            for v in res.violations
        ],
    }
    coherent = None
    witness = None
    if res.ok:
        try:
            compute_structure_constants(m)
            coherent = True
        except CoherenceError as e:
            coherent = False
            witness = {
                "color": e.witness.color,
                "walk_colors": list(e.witness.walk_colors),
                "pair_a": list(e.witness.pair_a),
                "pair_b": list(e.witness.pair_b),
                "counts": [e.witness.count_a, e.witness.count_b],
            }
    payload["coherent"] = coherent
    payload["coherence_witness"] = witness
    _emit_report(args, "validate", payload, digest=digest)
    if not res.ok:
        for v in res.violations:
            print(f"violation[{v.axiom}] {v.detail}: witness {v.witness}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


def _cmd_wl(args) -> int:
    m, digest = _read_matrix(args.input)
    out, rounds = wl_refine(m)
    text = dumps_ccm(out)
    if args.output:
        _write_text(args.output, text)
    else:
        sys.stdout.write(text)
    _emit_report(args, "wl", {"rounds": rounds, "rank_in": m.r, "rank_out": out.r},
                 digest=digest)
    return EXIT_OK


def _parse_vertices(spec: str) -> list:
    if not spec:
        return []
    return [int(tok) for tok in spec.split(",") if tok.strip() != ""]


def _cmd_refine(args) -> int:
    m, digest = _read_matrix(args.input)
    s = _parse_vertices(args.individualize)
    coloring, trace = refine_with_individualization(m, s)
    _emit_report(
        args, "refine",
        {
            "individualized": s,
            "rounds": trace.rounds,
            "class_counts": list(trace.class_counts),
            "classes": [int(c) for c in coloring.classes],
            "discrete": coloring.is_discrete(),
        },
        digest=digest,
    )
    return EXIT_OK


def _cmd_analyze(args) -> int:
    m, digest = _read_matrix(args.input)
    cfg = Configuration(matrix=m)
    try:
        p = profile(cfg)
    except (ValueError, CoherenceError) as e:
        raise CliError(EXIT_DOMAIN, f"profile unavailable: {e}") from None
    payload = p.as_dict()
    payload["primitive"] = cfg.check_primitive()
    _emit_report(args, "analyze", payload, digest=digest)
    return EXIT_OK


def _cmd_geometry(args) -> int:
    m, digest = _read_matrix(args.input)
    cfg = Configuration(matrix=m)
    try:
        res = assemble_geometry(cfg, tolerance=args.tolerance)
    except (ValueError, CoherenceError) as e:
        raise CliError(EXIT_DOMAIN, f"geometry unavailable: {e}") from None
    payload = res.as_dict()
    if res.ok:
        payload["two_clique"] = two_clique_characterization(cfg, res.geometry).as_dict()
    _emit_report(args, "geometry", payload, digest=digest)
    return EXIT_OK if res.ok else EXIT_DOMAIN


def _cmd_goodtriples(args) -> int:
    m, digest = _read_matrix(args.input)
    cfg = Configuration(matrix=m)
    try:
        q = count_good_triples(cfg, args.i, args.j, args.u, args.v,
                               dominant=args.dominant)
    except (ValueError, CoherenceError) as e:
        raise CliError(EXIT_DOMAIN, str(e)) from None
    _emit_report(
        args, "goodtriples",
        {"i": q.i, "j": q.j, "u": q.u, "v": q.v, "dominant": q.dominant,
         "claw_patterns": q.q_count, "good_triples": q.good_count},
        digest=digest,
    )
    print(f"claw patterns at u: {q.q_count}; good triples for (u, v): {q.good_count}")
    return EXIT_OK


def _cmd_split(args) -> int:
    m, digest = _read_matrix(args.input)
    cfg = Configuration(matrix=m)
    try:
        if args.strategy == "auto":
            rep = auto_split(cfg, seed=args.seed, tolerance=args.tolerance)
        elif args.strategy == "dist":
            rep = split_by_distinguishing(cfg, seed=args.seed)
        elif args.strategy == "goodtriples":
            if args.i is None or args.j is None:
                raise CliError(EXIT_USAGE, "goodtriples strategy needs -i and -j")
            rep = split_by_good_triples(cfg, args.i, args.j, seed=args.seed)
        else:
            geo = assemble_geometry(cfg, tolerance=args.tolerance)
            if not geo.ok:
                raise CliError(EXIT_DOMAIN, "no clique geometry; two-clique inapplicable")
            rep = split_two_clique(cfg, geo.geometry, seed=args.seed)
    except CliError:
        raise
    except (ValueError, CoherenceError) as e:
        raise CliError(EXIT_DOMAIN, str(e)) from None
    _emit_report(args, "split", rep.as_dict(), digest=digest, seed=args.seed)
    if rep.exceptional:
        print(f"exceptional family: {rep.exceptional}", file=sys.stderr)
        return EXIT_DOMAIN
    if not rep.splits:
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_verify(args) -> int:
    m, digest = _read_matrix(args.input)
    cfg = Configuration(matrix=m)
    wanted = args.lemmas.split(",") if args.lemmas else ["spheres", "diam", "identities"]
    payload = {}
    ok = True
    for name in wanted:
        name = name.strip()
        if name == "spheres":
            rep = check_growth_of_spheres(cfg, seed=args.seed)
        elif name == "diam":
            rep = check_diameter_lemma(cfg, epsilon=args.epsilon)
        elif name == "identities":
            rep = check_identities(cfg)
        else:
            raise CliError(EXIT_USAGE, f"unknown lemma set {name!r}")
        payload[name] = rep.as_dict()
        ok = ok and rep.ok
        for item in rep.items:
            print(f"{name}/{item.name}: {item.status} {item.detail}", file=sys.stderr)
    _emit_report(args, "verify", payload, digest=digest, seed=args.seed)
    return EXIT_OK if ok else EXIT_INVARIANT


def _corpus_members():
    for m in range(5, 13):
        yield f"triangular_{m}", triangular(m)
    for m in range(3, 11):
        yield f"lattice_{m}", lattice(m)
    for m in range(6, 11):
        yield f"johnson_{m}_3", johnson(m, 3)
    for m in range(2, 7):
        yield f"hamming_3_{m}", hamming(3, m)


def _cmd_corpus(args) -> int:
    out = Path(args.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise CliError(EXIT_IO, str(e)) from None
    manifest = []
    for name, cfg in _corpus_members():
        path = out / f"{name}.ccm"
        _write_text(str(path), dumps_ccm(cfg.matrix))
        manifest.append({"name": name, "n": cfg.n, "r": cfg.r, "kind": "family"})
    for idx in range(50):
        n = 8 + (idx * 7) % 53  # deterministic spread of sizes up to 60
        g = random_graph(n, 0.5, seed=args.seed * 1000 + idx)
        stable, _ = wl_refine(from_graph(g).matrix)
        name = f"random_wl_{idx:02d}"
        _write_text(str(out / f"{name}.ccm"), dumps_ccm(stable))
        manifest.append({"name": name, "n": stable.n, "r": stable.r, "kind": "random-wl"})
    _write_text(str(out / "manifest.json"),
                json.dumps(manifest, sort_keys=True, separators=(",", ":")) + "\n")
    _emit_report(args, "corpus", {"members": len(manifest), "directory": str(out)},
                 seed=args.seed)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cohere",
        description="Construct, validate, refine, and analyze coherent configurations.",
    )
    parser.add_argument("--version", action="version", version=f"cohere {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, seed_required=False, report=True, threads=True):
        if report:
            p.add_argument("--report", help="write the JSON report to this path")
        if threads:
            p.add_argument("--threads", type=int, default=0,
                           help="worker threads (results never depend on this)")
        if seed_required:
            p.add_argument("--seed", type=int, required=True,
                           help="RNG seed (mandatory: no wall-clock default)")

    p = sub.add_parser("gen", help="generate a named configuration")
    p.add_argument("family",
                   choices=["triangular", "lattice", "johnson", "hamming",
                            "complete", "graph", "orbital"])
    p.add_argument("params", nargs="+")
    p.add_argument("-o", "--output", help="output .ccm path (stdout if omitted)")
    p.add_argument("--canonical", action="store_true",
                   help="apply canonical color renumbering before writing")
    common(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("validate", help="check the configuration axioms and coherence")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("wl", help="refine pair colors to the stable configuration")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    common(p)
    p.set_defaults(func=_cmd_wl)

    p = sub.add_parser("refine", help="naive vertex refinement with individualization")
    p.add_argument("input")
    p.add_argument("--individualize", default="", help="comma-separated vertices")
    common(p)
    p.set_defaults(func=_cmd_refine)

    p = sub.add_parser("analyze", help="parameter profile")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("geometry", help="assemble a clique geometry")
    p.add_argument("input")
    p.add_argument("--tolerance", type=float, default=0.25)
    common(p)
    p.set_defaults(func=_cmd_geometry)

    p = sub.add_parser("goodtriples", help="count claw patterns and good triples")
    p.add_argument("input")
    p.add_argument("-i", type=int, required=True)
    p.add_argument("-j", type=int, required=True)
    p.add_argument("-u", type=int, required=True)
    p.add_argument("-v", type=int, required=True)
    p.add_argument("--dominant", type=int, default=None)
    common(p)
    p.set_defaults(func=_cmd_goodtriples)

    p = sub.add_parser("split", help="find an individualization set that splits")
    p.add_argument("input")
    p.add_argument("--strategy", choices=["auto", "dist", "goodtriples", "twoclique"],
                   default="auto")
    p.add_argument("-i", type=int, default=None)
    p.add_argument("-j", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=0.25)
    common(p, seed_required=True)
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("verify", help="run the lemma checks")
    p.add_argument("input")
    p.add_argument("--lemmas", default="spheres,diam,identities")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("corpus", help="generate the standard desk-scale corpus")
    p.add_argument("-o", "--output", required=True)
    common(p, seed_required=True)
    p.set_defaults(func=_cmd_corpus)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    # the report must not depend on thread count, so --threads is stripped
    cleaned = []
    skip_next = False
    for t in argv:
        if skip_next:
            skip_next = False
            continue
        if t == "--threads":
            skip_next = True
            continue
        if t.startswith("--threads="):
            continue
        cleaned.append(t)
    args._command_tokens = cleaned
    started = time.monotonic()
    try:
        code = args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except AssertionError as e:  # internal invariant trap
        print(f"invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    finally:
        elapsed = time.monotonic() - started
        print(f"[cohere] {elapsed:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
