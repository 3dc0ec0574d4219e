"""Command line interface.

Exit codes: 0 ok, 1 invalid input or negative verdict, 2 checker/oracle
disagreement, 3 budget exhausted.  Proof arguments are JSON files or
``fixture:NAME`` for one of the built-in encodings.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

from . import cutelim, fixtures, icsets, progress, randgen
from .formula import FormulaSyntaxError, FreeVariableError, parse_formula
from .proof import (ProofGraph, SchemaError, export_dot, identity_proof, load_proof,
                    save_proof, tree_from_json, tree_to_json, validate_local, validate_tree)

OK, INVALID, DISAGREE, BUDGET = 0, 1, 2, 3


def _color(code: str, text: str, stream) -> str:
    if os.environ.get("MUMALL_COLOR", "1") == "0" or not stream.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _status(ok: bool, text: str) -> None:
    print(_color("32" if ok else "31", text, sys.stderr), file=sys.stderr)


def _load_doc(arg: str):
    if arg.startswith("fixture:"):
        name = arg.split(":", 1)[1]
        if name not in fixtures.FIXTURES:
            raise SystemExit(f"unknown fixture {name!r}; known: {', '.join(fixtures.FIXTURES)}")
        return save_proof(fixtures.fixture(name))
    return json.loads(Path(arg).read_text())


def _load_graph(arg: str) -> ProofGraph:
    return load_proof(_load_doc(arg))


def _write(obj, fmt: str, out: str | None) -> None:
    if fmt == "dot":
        text = export_dot(obj)
    else:
        doc = save_proof(obj) if isinstance(obj, ProofGraph) else tree_to_json(obj)
        text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


# --------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    doc = _load_doc(args.proof)
    if isinstance(doc, dict) and "nodes" in doc:
        defects = [{"node": n, "defect": d} for n, d in validate_local(load_proof(doc))]
    else:
        defects = [{"position": list(p), "defect": d} for p, d in validate_tree(tree_from_json(doc))]
    print(json.dumps({"valid": not defects, "defects": len(defects)}))
    if defects:
        print(json.dumps(defects, indent=2), file=sys.stderr)
        _status(False, "invalid")
        return INVALID
    _status(True, "locally valid")
    return OK


def cmd_progress(args) -> int:
    g = _load_graph(args.proof)
    defects = validate_local(g)
    if defects:
        print(json.dumps([{"node": n, "defect": d} for n, d in defects]), file=sys.stderr)
        return INVALID
    v = progress.check_progressivity(g, tiebreak=args.tiebreak)
    out = {"verdict": v.to_json()}
    code = OK if v.progressing else INVALID
    if args.oracle:
        o = progress.brute_force_progressivity(g, args.bound, tiebreak=args.tiebreak)
        out["oracle"] = o.to_json()
        if o.progressing != v.progressing:
            print(json.dumps(out, indent=2))
            _status(False, "checker and oracle disagree")
            return DISAGREE
    print(json.dumps(out, indent=2))
    _status(v.progressing, progress.verdict_summary(v))
    return code


def cmd_id(args) -> int:
    try:
        phi = parse_formula(args.formula)
    except (FormulaSyntaxError, FreeVariableError) as exc:
        print(str(exc), file=sys.stderr)
        return INVALID
    _write(identity_proof(phi), args.format, args.output)
    return OK


def cmd_normalize(args) -> int:
    g = _load_graph(args.proof)
    if validate_local(g):
        print("input is not locally valid", file=sys.stderr)
        return INVALID
    state = cutelim.start(g, auto_wrap=not args.no_id_wrap, strategy=args.strategy,
                          keep_source_cuts=args.keep_cuts)
    events = []
    try:
        for ev in state.run(args.budget, args.depth):
            events.append(ev)
    except cutelim.BudgetExhausted as exc:
        if args.events:
            Path(args.events).write_text(cutelim.events_to_jsonl(events))
        print(json.dumps({"status": "budget exhausted", "events": len(events),
                          "depthLog": exc.depth_log}), file=sys.stderr)
        _status(False, "budget exhausted")
        return BUDGET
    if args.events:
        Path(args.events).write_text(cutelim.events_to_jsonl(events))
    prefix = cutelim.emit_prefix(state, args.depth)
    _write(prefix, args.format, args.emit)
    _status(True, f"stable at depth {args.depth} after {len(events)} events")
    return OK


def _subgraph_arg(text: str) -> list[str]:
    path = Path(text)
    if path.exists():
        ids = json.loads(path.read_text())
    elif text.lstrip().startswith("["):
        ids = json.loads(text)
    else:
        ids = [t for t in text.split(",") if t]
    if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
        raise SchemaError("/subgraph", "expected a list of node ids")
    return ids


def cmd_ic_verify(args) -> int:
    g = _load_graph(args.proof)
    keep = _subgraph_arg(args.subgraph) if args.subgraph else list(g.nodes)
    try:
        rep = icsets.verify_ic_candidate(g, keep, args.bound)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return INVALID
    doc = rep.to_json()
    if args.witness:
        w = icsets.external_progressivity_witness(g, keep, args.bound)
        doc["externalWitness"] = None if w is None else {
            "branch": w[0].to_json(), "origin": list(w[1].origin)}
    print(json.dumps(doc, indent=2))
    _status(rep.ok, doc["status"])
    return OK if rep.ok else INVALID


def cmd_covering(args) -> int:
    g = _load_graph(args.proof)
    strategy, selector = args.strategy, args.path
    if args.path in ("first", "last", "alternate"):
        strategy, selector = args.path, "left"
    state = cutelim.start(g, auto_wrap=args.id_wrap, strategy=strategy)
    events = []
    try:
        for ev in state.run(args.steps):
            events.append(ev)
    except cutelim.BudgetExhausted:
        pass
    src = state.g
    try:
        trace = icsets.frontier_evolution(events, selector)
        cov = icsets.covering(src, events, selector)
    except icsets.SelectorExhausted as exc:
        print(str(exc), file=sys.stderr)
        return INVALID
    print(json.dumps({
        "events": len(events), "proper": trace.proper, "terminated": trace.terminated,
        "positions": sorted(list(p) for p in cov.positions),
        "subgraph": sorted(cov.nodes),
    }, indent=2))
    return OK


def cmd_fixtures(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in fixtures.FIXTURES:
        ext = "dot" if args.format == "dot" else "json"
        _write(fixtures.fixture(name), args.format, str(out / f"{name}.{ext}"))
    return OK


def cmd_random(args) -> int:
    rng = random.Random(args.seed)
    if args.kind == "graph":
        obj = randgen.random_graph(rng)
    elif args.kind == "cutfree":
        obj = randgen.random_cut_free_graph(rng)
    else:
        obj = randgen.random_cut_tree(rng)
    _write(obj, args.format, args.output)
    return OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mumall", description="Cyclic proofs for muMALL.")
    p.add_argument("--seed", type=int, default=0, help="seed for random generation (default 0)")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="local validity of a proof graph or tree")
    c.add_argument("proof")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("progress", help="decide progressivity")
    c.add_argument("proof")
    c.add_argument("--oracle", action="store_true", help="also run the brute-force oracle")
    c.add_argument("--bound", type=int, default=None, help="oracle lasso bound")
    c.add_argument("--tiebreak", choices=("lex", "revlex"), default="lex")
    c.set_defaults(func=cmd_progress)

    c = sub.add_parser("id", help="identity proof of a formula")
    c.add_argument("--formula", required=True)
    c.add_argument("-o", "--output")
    c.add_argument("--format", choices=("json", "dot"), default="json")
    c.set_defaults(func=cmd_id)

    c = sub.add_parser("normalize", help="productive cut elimination to a depth")
    c.add_argument("proof")
    c.add_argument("--depth", type=int, default=8)
    c.add_argument("--budget", type=int, default=100_000)
    c.add_argument("--no-id-wrap", action="store_true")
    c.add_argument("--keep-cuts", action="store_true", help="copy the input's cuts instead of eliminating them")
    c.add_argument("--strategy", choices=cutelim.STRATEGIES, default=None)
    c.add_argument("--emit", help="write the prefix here instead of standard output")
    c.add_argument("--events", help="write the event log (JSON lines) here")
    c.add_argument("--format", choices=("json", "dot"), default="json")
    c.set_defaults(func=cmd_normalize)

    c = sub.add_parser("ic-verify", help="bounded IC-set check of a subgraph")
    c.add_argument("proof")
    c.add_argument("--subgraph", help="node ids: comma list, JSON list, or a JSON file")
    c.add_argument("--bound", type=int, default=20)
    c.add_argument("--witness", action="store_true", help="also search a good external thread")
    c.set_defaults(func=cmd_ic_verify)

    c = sub.add_parser("covering", help="covering of one multicut reduction path")
    c.add_argument("proof")
    c.add_argument("--steps", type=int, default=500)
    c.add_argument("--path", default="left",
                   help="first|last|alternate (scheduling) or left|right|alt|<bits> (splits)")
    c.add_argument("--strategy", choices=cutelim.STRATEGIES, default="first")
    c.add_argument("--id-wrap", action="store_true", help="run on the identity-wrapped proof")
    c.set_defaults(func=cmd_covering)

    c = sub.add_parser("fixtures", help="write the built-in fixtures")
    c.add_argument("--out", default="fixtures")
    c.add_argument("--format", choices=("json", "dot"), default="json")
    c.set_defaults(func=cmd_fixtures)

    c = sub.add_parser("random", help="a seeded random proof graph or cut tree")
    c.add_argument("--kind", choices=("graph", "cutfree", "tree"), default="graph")
    c.add_argument("-o", "--output")
    c.add_argument("--format", choices=("json", "dot"), default="json")
    c.set_defaults(func=cmd_random)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
