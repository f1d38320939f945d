"""Command-line front end: every subcommand emits one JSON report on stdout.

Reports are machine-first: sorted keys, exact rationals as "p/q" strings,
tool version, the fully resolved configuration, and the seed (null when the
command has none).  Human-readable tables go to stderr under --verbose.
Exit status: 0 = success/pass, 1 = property failure, 2 = usage or input
error (argparse uses 2 on its own).
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .colorings import (
    check_levels_bichromatic,
    check_pairing_disjointness,
    coloring_from_text,
    h_set,
    levels_coloring,
    pairing_coloring,
    random_coloring,
    residue_splitting,
    zdensity_coloring,
)
from .errors import GameProtocolError, HlbenchError, ParseError
from .game import parse_strategy_id, play, transcript_to_json
from .ideals import (
    NatSet,
    column_profile,
    density_profile,
    gridset_from_text,
    interval_count,
    max_antichain_weight,
    minimal_elements,
    natset_from_text,
    nodeset_from_text,
    phi,
    phi_bar_profile,
    summable_weight,
)
from .katetov import (
    builtin_names,
    builtin_witness,
    check_morphism,
    counterexample_names,
    counterexample_witness,
    parse_ideal_text,
    parse_morphism_text,
    report_to_json,
)
from .search import (
    SearchBudget,
    brute_force_max,
    certificate_to_json,
    search_best,
    verify_certificate,
    zdensity_band_check,
)
from .treecore import format_node, tree_from_text


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from None


def _config_of(args: argparse.Namespace) -> dict:
    skip = {"func", "verbose"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _report(args: argparse.Namespace, command: str, body: dict) -> dict:
    return {
        "tool": "hlbench",
        "version": __version__,
        "command": command,
        "config": _config_of(args),
        "seed": getattr(args, "seed", None),
        **body,
    }


def _emit(report: dict, verbose_lines: list[str], verbose: bool) -> None:
    print(json.dumps(report, sort_keys=True, indent=2))
    if verbose:
        for line in verbose_lines:
            print(line, file=sys.stderr)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_hset(args) -> int:
    coloring = coloring_from_text(_read(args.coloring))
    tree = tree_from_text(_read(args.tree))
    levels = h_set(coloring, tree)
    body = {"depth": tree.depth, "levels": list(levels.as_tuple())}
    _emit(_report(args, "hset", body), [f"H = {list(levels.as_tuple())}"], args.verbose)
    return 0


def cmd_zdensity(args) -> int:
    inst = zdensity_coloring(args.nmax)
    bands = []
    lines = []
    pairs = 0
    all_pass = True
    for n in range(1, inst.n_max + 1):
        table = inst.band_tables[n]
        bijection_ok = sorted(table.values()) == sorted(
            tuple((m >> j) & 1 for j in range(n)) for m in range(1 << n)
        ) and len(table) == 1 << n
        checks = []
        for k in range(1, n + 1):
            for subset in itertools.combinations(range(n), k):
                (check,) = zdensity_band_check(inst, {n: subset})
                pairs += 1
                all_pass = all_pass and check.passed and bijection_ok
                checks.append(
                    {
                        "selection": list(check.selection),
                        "expected": check.expected,
                        "actual": check.actual,
                        "pass": check.passed,
                    }
                )
                lines.append(
                    f"band {n} J={list(subset)}: expected {check.expected} actual {check.actual} "
                    f"{'PASS' if check.passed else 'FAIL'}"
                )
        bands.append({"band": n, "bijection_ok": bijection_ok, "checks": checks})
    body = {
        "n_max": inst.n_max,
        "depth": inst.depth,
        "bands": bands,
        "pairs_checked": pairs,
        "all_pass": all_pass,
    }
    _emit(_report(args, "zdensity", body), lines, args.verbose)
    return 0 if all_pass else 1


def _search_coloring(args):
    if args.coloring is not None:
        coloring = coloring_from_text(_read(args.coloring))
        if args.depth is not None and args.depth != coloring.depth:
            raise ParseError(f"--depth {args.depth} contradicts coloring depth {coloring.depth}")
        return coloring
    if args.depth is None:
        raise ParseError("--depth is required with --seed")
    return random_coloring(args.depth, args.seed)


def cmd_search(args, mode: str) -> int:
    coloring = _search_coloring(args)
    budget = SearchBudget(
        height=args.height,
        min_levels=args.min_levels,
        node_budget=args.budget,
        workers=args.workers,
    )
    result = search_best(coloring, budget, mode)
    verified = verify_certificate(coloring, result.certificate)
    body = {
        "mode": mode,
        "depth": coloring.depth,
        "m": result.best_levels,
        "explored": result.explored,
        "complete": result.complete,
        "verified": verified,
        "certificate": certificate_to_json(result.certificate),
    }
    ok = verified and result.complete and result.best_levels >= args.min_levels
    lines = [f"m = {result.best_levels} (explored {result.explored}, complete={result.complete})"]
    if args.oracle:
        oracle = brute_force_max(coloring, budget, mode)
        body["oracle_m"] = oracle.best_levels
        body["oracle_match"] = (
            oracle.best_levels == result.best_levels
            and certificate_to_json(oracle.certificate) == body["certificate"]
        )
        ok = ok and body["oracle_match"]
        lines.append(f"oracle m* = {oracle.best_levels} match={body['oracle_match']}")
    _emit(_report(args, f"search[{mode}]", body), lines, args.verbose)
    return 0 if ok else 1


def cmd_pairing(args) -> int:
    base_levels = _parse_int_list(args.base_levels)
    coloring, system = pairing_coloring(base_levels, args.cap, args.depth)
    checks = check_pairing_disjointness(coloring, system)
    all_pass = all(ch.passed for ch in checks)
    body = {
        "depth": system.depth,
        "base_levels": list(system.base_levels),
        "matchings": [
            {
                "index": ch.index,
                "base_level": ch.base_level,
                "pairs": [list(pair) for pair in system.matchings[ch.index]],
                "level_set": sorted(system.level_sets[ch.index]),
                "trees_checked": ch.trees_checked,
                "pass": ch.passed,
            }
            for ch in checks
        ],
        "trees_checked": sum(ch.trees_checked for ch in checks),
        "all_pass": all_pass,
    }
    lines = [
        f"matching {ch.index} (level {ch.base_level}): {ch.trees_checked} trees "
        f"{'PASS' if ch.passed else 'FAIL'}"
        for ch in checks
    ]
    _emit(_report(args, "pairing", body), lines, args.verbose)
    return 0 if all_pass else 1


def cmd_levels(args) -> int:
    assignment = residue_splitting(args.max_len, args.depth)
    coloring = levels_coloring(assignment, args.depth)
    checks = check_levels_bichromatic(coloring, assignment)
    all_pass = all(ch.passed for ch in checks)
    body = {
        "depth": args.depth,
        "domain_size": len(assignment.domain),
        "assignments": [
            {"t": format_node(t), "levels": sorted(assignment.sets[i])}
            for i, t in enumerate(assignment.domain)
            if assignment.sets[i]
        ],
        "checks": [
            {
                "t": format_node(ch.node),
                "level": ch.level,
                "zero_side_bad": ch.zero_side_bad,
                "one_side_bad": ch.one_side_bad,
                "pass": ch.passed,
            }
            for ch in checks
        ],
        "all_pass": all_pass,
    }
    lines = [
        f"t={format_node(ch.node)} level {ch.level}: {'PASS' if ch.passed else 'FAIL'}" for ch in checks
    ]
    _emit(_report(args, "levels", body), lines, args.verbose)
    return 0 if all_pass else 1


def cmd_profile(args) -> int:
    text = _read(args.input)
    head = text.split(None, 1)[0] if text.split() else ""
    lines: list[str] = []
    code = 0
    if head == "natset":
        nat = natset_from_text(text)
        body = {
            "kind": "natset",
            "bound": nat.bound,
            "size": len(nat.members),
            "density_dyadic": [_frac(d) for d in density_profile(nat, "dyadic")],
            "density_natural": [_frac(d) for d in density_profile(nat, "natural")],
            "summable_weight": _frac(summable_weight(nat)),
        }
        if args.ell is not None:
            if args.threshold is None:
                raise ParseError("--threshold is required with --ell")
            count = interval_count(nat, args.ell, args.threshold, args.cmp)
            body["interval"] = {
                "ell": args.ell,
                "threshold": args.threshold,
                "cmp": args.cmp,
                "count": count,
            }
        lines.append(f"|A| = {len(nat.members)} in [0, {nat.bound})")
    elif head == "gridset":
        grid = gridset_from_text(text)
        body = {
            "kind": "gridset",
            "bound": grid.bound,
            "size": len(grid.cells),
            "column_profile": list(column_profile(grid)),
        }
        lines.append(f"|E| = {len(grid.cells)} in [0, {grid.bound})^2")
    elif head == "nodeset":
        nodes = nodeset_from_text(text)
        phi_value = phi(nodes)
        antichain = max_antichain_weight(nodes)
        body = {
            "kind": "nodeset",
            "depth": nodes.depth,
            "size": len(nodes.nodes),
            "minimal_elements": [format_node(s) for s in minimal_elements(nodes).sorted_nodes()],
            "phi": _frac(phi_value),
            "max_antichain_weight": _frac(antichain),
            "phi_equals_antichain": phi_value == antichain,
            "phi_bar_profile": [_frac(v) for v in phi_bar_profile(nodes, nodes.depth)],
        }
        code = 0 if phi_value == antichain else 1
        lines.append(f"phi = {_frac(phi_value)}")
    else:
        raise ParseError(f"unknown input kind {head!r} (want natset/gridset/nodeset)", 1)
    _emit(_report(args, "profile", body), lines, args.verbose)
    return code


def cmd_game(args) -> int:
    coloring = coloring_from_text(_read(args.coloring)) if args.coloring else None
    transcript = play(
        args.horizon,
        parse_strategy_id(args.p1),
        parse_strategy_id(args.p2),
        args.window,
        coloring=coloring,
        seed=args.seed,
    )
    outcome = NatSet.of(transcript.outcome, args.window)
    body = {
        "transcript": transcript_to_json(transcript),
        "k_profile": {
            "density_dyadic": [_frac(d) for d in density_profile(outcome, "dyadic")],
            "summable_weight": _frac(summable_weight(outcome)),
        },
    }
    lines = [
        f"round {i}: |I|={len(r.forbidden)} k={r.pick}" for i, r in enumerate(transcript.rounds)
    ]
    lines.append(f"K = {sorted(transcript.outcome)}")
    _emit(_report(args, "game", body), lines, args.verbose)
    return 0


def cmd_katetov(args) -> int:
    if args.list:
        body = {"builtins": list(builtin_names()), "counterexamples": list(counterexample_names())}
        _emit(_report(args, "katetov", body), [], args.verbose)
        return 0
    if args.builtin:
        witness = builtin_witness(args.builtin)
    elif args.counterexample:
        witness = counterexample_witness(args.counterexample)
    else:
        if not (args.morphism and args.source and args.target):
            raise ParseError("need --builtin, --counterexample, or --morphism with --source/--target")
        source = parse_ideal_text(_read(args.source))
        target = parse_ideal_text(_read(args.target))
        morphism = parse_morphism_text(_read(args.morphism), target.ground, source.ground)
        report = check_morphism(morphism, source, target)
        body = {"witness": None, **report_to_json(report)}
        _emit(_report(args, "katetov", body), [f"pass = {report.passed}"], args.verbose)
        return 0 if report.passed else 1
    report = check_morphism(witness.morphism, witness.source, witness.target)
    body = {"witness": witness.name, "note": witness.note, **report_to_json(report)}
    lines = [f"{witness.name}: pass = {report.passed}"]
    for violation in report.violations:
        lines.append(f"  violation {violation.generator}: {violation.measure}")
    _emit(_report(args, "katetov", body), lines, args.verbose)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _parse_int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok != ""]
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hlbench",
        description="Finite workbench for tree colorings, subtree search, ideal statistics, and games.",
    )
    parser.add_argument("--version", action="version", version=f"hlbench {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--verbose", action="store_true", help="human-readable tables on stderr")

    p = sub.add_parser("hset", help="monochromatic level set of a coloring on a tree")
    p.add_argument("--coloring", required=True, help="coloring file")
    p.add_argument("--tree", required=True, help="tree file")
    common(p)
    p.set_defaults(func=cmd_hset)

    p = sub.add_parser("zdensity", help="slowly branching instance with exhaustive band checks")
    p.add_argument("--nmax", type=int, required=True, help="largest band index")
    common(p)
    p.set_defaults(func=cmd_zdensity)

    for name, mode in (("search", "uniform"), ("search-levels", "by_levels")):
        p = sub.add_parser(name, help=f"best {mode} certificate search")
        p.add_argument("--depth", type=int, help="tree depth (required with --seed)")
        p.add_argument("--height", type=int, required=True, help="embedding height")
        p.add_argument("--seed", type=int, default=0, help="seed for a random coloring")
        p.add_argument("--coloring", help="coloring file instead of a seeded coloring")
        p.add_argument("--budget", type=int, default=1_000_000, help="node budget")
        p.add_argument("--min-levels", type=int, default=1, dest="min_levels")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--oracle", action="store_true", help="cross-check against the exhaustive oracle")
        common(p)
        p.set_defaults(func=lambda a, m=mode: cmd_search(a, m))

    p = sub.add_parser("pairing", help="pairing coloring with exhaustive disjointness checks")
    p.add_argument("--base-levels", required=True, dest="base_levels", help="comma-separated levels")
    p.add_argument("--cap", type=int, default=3, help="matchings kept per level")
    p.add_argument("--depth", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_pairing)

    p = sub.add_parser("levels", help="splitting-level coloring with bichromatic slice checks")
    p.add_argument("--max-len", type=int, required=True, dest="max_len")
    p.add_argument("--depth", type=int, required=True)
    common(p)
    p.set_defaults(func=cmd_levels)

    p = sub.add_parser("profile", help="ideal statistics of a natset/gridset/nodeset file")
    p.add_argument("--input", required=True)
    p.add_argument("--ell", type=int, help="interval length for interval counts")
    p.add_argument("--threshold", type=int)
    p.add_argument("--cmp", choices=("ge", "gt"), default="ge")
    common(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("game", help="play the evasion game and profile the outcome set")
    p.add_argument("--p1", required=True, help="player I strategy id")
    p.add_argument("--p2", required=True, help="player II strategy id")
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--coloring", help="coloring file for the tree-builder strategy")
    common(p)
    p.set_defaults(func=cmd_game)

    p = sub.add_parser("katetov", help="check a morphism file or a builtin witness")
    p.add_argument("--builtin", help="builtin witness name")
    p.add_argument("--counterexample", help="builtin counterexample name")
    p.add_argument("--morphism", help="morphism file")
    p.add_argument("--source", help="source ideal presentation file")
    p.add_argument("--target", help="target ideal presentation file")
    p.add_argument("--list", action="store_true", help="list builtin names")
    common(p)
    p.set_defaults(func=cmd_katetov)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GameProtocolError as exc:
        print(f"hlbench: protocol error: {exc}", file=sys.stderr)
        return 1
    except HlbenchError as exc:
        print(f"hlbench: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"hlbench: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
