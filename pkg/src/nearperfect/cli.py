"""``nearperfect`` command line: solve, gen, verify, oracle, bench.

Exit codes: 0 success, 1 I/O, parse or parameter error, 2 a result that
fails its check (bound missed, tree invalid).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .bench import load_suite, run_suite, summarize, write_csv
from .formats import TreeParseError, read_edges, terminal_labels, to_dot, write_edges
from .generator import GenerationError, plant
from .instance import MatrixParseError, TerminalMatrix, load_matrix, normalize
from .oracle import OracleLimitError, exact_steiner, verify
from .solver import SolverConfig, solve

EXIT_OK, EXIT_ERROR, EXIT_CHECK = 0, 1, 2


class CLIError(Exception):
    pass


def _read_matrix(path: str) -> TerminalMatrix:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return load_matrix(data)
    except MatrixParseError as exc:
        raise CLIError(f"{path}: {exc}") from None


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise CLIError(f"cannot write {path}: {exc.strerror}") from None


def cmd_solve(args) -> int:
    m = _read_matrix(args.input)
    m_norm, cmap = normalize(m)
    try:
        cfg = SolverConfig(seed=args.seed, restarts_per_q=args.restarts, q_override=args.q, mode=args.mode)
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    t0 = time.perf_counter()
    report = solve(m_norm, cfg)
    total = time.perf_counter() - t0
    tree = cmap.lift_forest(report.forest)
    valid = verify(tree, m).valid
    summary = summarize(
        Path(args.input).stem, m, m_norm, report, report.mst_cost, valid=valid, seed=args.seed, total=total
    )
    emits = args.emit or (["edges"] if args.out else [])
    if emits and not args.out and set(emits) != {"json"}:
        raise CLIError("--emit edges/dot needs --out")
    for fmt in dict.fromkeys(emits):
        if fmt == "edges":
            _write(Path(f"{args.out}.edges"), write_edges(tree))
        elif fmt == "dot":
            _write(Path(f"{args.out}.dot"), to_dot(tree, m.rows, terminal_labels(m)))
        elif fmt == "json" and args.out:
            _write(Path(f"{args.out}.json"), summary.to_json() + "\n")
    print(summary.to_json())
    if not valid:
        return EXIT_CHECK
    return EXIT_OK if summary.met_bound else EXIT_CHECK


def cmd_gen(args) -> int:
    try:
        inst = plant(args.d, args.q, args.n, args.seed)
    except GenerationError as exc:
        raise CLIError(str(exc)) from None
    _write(Path(args.out), inst.matrix.to_text())
    if args.witness:
        _write(Path(args.witness), write_edges(inst.witness))
    print(json.dumps({
        "d": inst.d, "q_planted": inst.q_planted, "n": inst.matrix.n, "seed": inst.seed,
        "witness_cost": inst.witness.cost,
    }))
    return EXIT_OK


def cmd_verify(args) -> int:
    m = _read_matrix(args.input)
    try:
        text = Path(args.tree).read_text()
    except OSError as exc:
        raise CLIError(f"cannot read {args.tree}: {exc.strerror}") from None
    try:
        tree = read_edges(text, m.d)
    except TreeParseError as exc:
        raise CLIError(f"{args.tree}: {exc}") from None
    if not tree.edges and len(set(m.rows)) == 1:
        tree.nodes.add(m.rows[0])      # an empty edge list is the one-node tree
    report = verify(tree, m)
    print(json.dumps(report.to_json()))
    return EXIT_OK if report.valid else EXIT_CHECK


def cmd_oracle(args) -> int:
    m = _read_matrix(args.input)
    m_norm, _ = normalize(m)
    try:
        tree = exact_steiner(m_norm, max_dim=args.max_dim, max_terminals=args.max_terminals)
    except OracleLimitError as exc:
        raise CLIError(str(exc)) from None
    print(json.dumps({"cost": tree.cost, "q": tree.cost - m_norm.d}))
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        text = Path(args.suite).read_text()
        configs = load_suite(text)
    except OSError as exc:
        raise CLIError(f"cannot read {args.suite}: {exc.strerror}") from None
    except (ValueError, TypeError) as exc:
        raise CLIError(f"{args.suite}: {exc}") from None
    try:
        results = run_suite(configs, args.seeds, workers=args.workers, with_oracle=args.oracle)
    except GenerationError as exc:
        raise CLIError(str(exc)) from None
    try:
        with open(args.csv, "w", newline="") as fh:
            write_csv(results, fh)
    except OSError as exc:
        raise CLIError(f"cannot write {args.csv}: {exc.strerror}") from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nearperfect", description="Near-perfect phylogeny toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="build a phylogeny for a matrix")
    s.add_argument("--input", required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--restarts", type=int, default=10)
    s.add_argument("--q", type=int, default=None, help="fix the excess instead of estimating it")
    s.add_argument("--mode", choices=("simple", "general"), default="general")
    s.add_argument("--out", help="output prefix; files get .edges/.dot/.json suffixes")
    s.add_argument("--emit", action="append", choices=("json", "edges", "dot"))
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="write a planted instance")
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--q", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--witness")
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", help="audit an edge-list tree against a matrix")
    v.add_argument("--input", required=True)
    v.add_argument("--tree", required=True)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="exact minimum cost for a small matrix")
    o.add_argument("--input", required=True)
    o.add_argument("--max-dim", type=int, default=10)
    o.add_argument("--max-terminals", type=int, default=10)
    o.set_defaults(func=cmd_oracle)

    b = sub.add_parser("bench", help="run a planted benchmark suite")
    b.add_argument("--suite", required=True)
    b.add_argument("--seeds", type=int, default=5)
    b.add_argument("--csv", required=True)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--oracle", action="store_true", help="also record exact costs where feasible")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
