"""Command-line interface.

Exit codes: 0 success, 1 usage or I/O error, 2 parse or well-formedness
error, 3 truncated chase or inconclusive check.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import bench_dt, bench_lubm, run_pipeline
from .chase import (
    ChaseConfig,
    chase,
    critical_instance,
    rulesets_equivalent,
    universal_equivalent,
)
from .generate import deep_taxonomy, lubm_like
from .io import load_formula, load_program, load_rules, read_text, write_output
from .model import RDF_TYPE, Constant, ModelError, RuleSet, Triple, conjoin
from .oracle import BudgetExceeded, OracleError, distinguishing_interpretation
from .parser import ParseError, parse_n3, serialize_n3, serialize_rules
from .pnf import to_pnf
from .translate import (
    TranslationError,
    atom_to_triple,
    instance_to_formula,
    instance_to_rules,
    inverse_translate,
    translate_set,
)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


class _Inconclusive(Exception):
    pass


def _atom_key(a):
    return (a.predicate, tuple((0, x.key) if isinstance(x, Constant) else (1, x.id)
                               for x in a.args))


def _header_and_body(text: str) -> tuple:
    head, sep, body = text.partition("\n\n")
    if sep and all(line.startswith("@prefix") for line in head.splitlines()):
        return head + "\n\n", body
    return "", text


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_parse(args):
    path = Path(args.file)
    if path.suffix == ".erl" or args.format == "erl":
        write_output(serialize_rules(load_rules(path)), args.output)
    else:
        write_output(serialize_n3(load_formula(path)), args.output)


def cmd_pnf(args):
    pieces = to_pnf(load_formula(args.file))
    header, _ = _header_and_body(serialize_n3(pieces.union()))
    blocks = [_header_and_body(serialize_n3(p))[1].rstrip("\n") for p in pieces]
    write_output(header + "\n\n".join(blocks) + ("\n" if blocks else ""), args.output)


def cmd_translate(args):
    if args.to == "rules":
        rs = translate_set(to_pnf(load_formula(args.file)))
        if args.facts_split:
            facts = RuleSet(tuple(r for r in rs if r.is_fact))
            write_output(serialize_rules(facts), args.facts_split)
            rs = RuleSet(tuple(rs.proper_rules))
        write_output(serialize_rules(rs), args.output)
    else:
        write_output(serialize_n3(inverse_translate(load_rules(args.file))), args.output)


def _query_term(tok: str):
    if tok.startswith("?"):
        return None
    if tok == "a":
        return Constant(RDF_TYPE)
    t = parse_n3(f"<urn:q> <urn:q> {tok} .", source="--query").conjuncts[0]
    return t.object


def cmd_chase(args):
    rules = load_program(args.files)
    extra = load_program(args.facts or [])
    if any(not r.is_fact for r in extra):
        raise ModelError("--facts files must contain ground facts only")
    db = [a for r in extra for a in r.head]
    cfg = ChaseConfig(max_steps=args.max_steps, max_nulls=args.max_nulls,
                      strategy=args.strategy, facts_as_rules=args.facts_as_rules)
    inst, rep = chase(rules, db, cfg)
    atoms = sorted(inst, key=_atom_key)
    if args.query:
        pattern = [_query_term(t) for t in args.query]
        rows = []
        for a in atoms:
            t = atom_to_triple(a)
            if all(p is None or p == x for p, x in zip(pattern, t)):
                rows.append(t)
        text = serialize_n3(rows)
    elif args.format == "erl":
        text = serialize_rules(instance_to_rules(atoms))
    else:
        text = serialize_n3(instance_to_formula(atoms))
    write_output(text, args.output)
    print(f"% chase {rep.status}: {rep.atoms} atoms, {rep.derived} derived, "
          f"{rep.nulls} nulls, {rep.steps} steps"
          + (f" ({rep.reason})" if rep.reason else ""), file=sys.stderr)
    if not rep.complete:
        raise _Inconclusive("chase truncated")


def cmd_eq_n3(args):
    f, g = load_formula(args.a), load_formula(args.b)
    try:
        m = distinguishing_interpretation(f, g, spares=args.spares,
                                          method=args.method, budget=args.budget)
    except BudgetExceeded as e:
        raise _Inconclusive(str(e)) from e
    if m is None:
        print("equivalent")
        return
    print("not equivalent")
    print("% distinguishing interpretation:")
    print(serialize_n3([Triple(*t) for t in sorted(m.triples, key=lambda t: tuple(c.key for c in t))])
          .rstrip("\n") or "% (no triples)")


def cmd_eq_rules(args):
    rs1, rs2 = load_rules(args.a), load_rules(args.b)
    cfg = ChaseConfig(max_steps=args.max_steps, max_nulls=args.max_nulls)
    if args.critical:
        db = critical_instance(list(rs1) + list(rs2))
        verdict = universal_equivalent(rs1, rs2, db, cfg)
    elif args.database:
        db = [a for r in load_program(args.database) for a in r.head]
        verdict = universal_equivalent(rs1, rs2, db, cfg)
    else:
        verdict = rulesets_equivalent(rs1, rs2, cfg)
    if verdict is None:
        print("inconclusive")
        raise _Inconclusive("chase truncated")
    print("equivalent" if verdict else "not equivalent")


def cmd_gen(args):
    if args.dataset == "dt":
        facts, rules = deep_taxonomy(args.depth)
        if args.facts_out:
            write_output(serialize_n3(facts), args.facts_out)
            write_output(serialize_n3(rules), args.output)
        else:
            write_output(serialize_n3(conjoin(facts, rules)), args.output)
        return
    rules, facts = lubm_like(args.facts, seed=args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "rules.erl").write_text(serialize_rules(rules), encoding="utf-8")
    (out / "rules.n3").write_text(serialize_n3(inverse_translate(rules)), encoding="utf-8")
    by_pred = {}
    for a in facts:
        by_pred.setdefault(a.predicate, []).append(a)
    for pred in sorted(by_pred):
        rows = sorted(by_pred[pred], key=_atom_key)
        lines = [",".join(x.value[len("http://www.example.org#"):] for x in a.args)
                 for a in rows]
        (out / f"{pred}.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_bench(args):
    cfg = ChaseConfig(max_steps=args.max_steps, max_nulls=args.max_nulls)
    if args.dataset == "dt":
        report, _ = bench_dt(args.depth, cfg)
    elif args.dataset == "lubm":
        report, _ = bench_lubm(args.facts, args.seed, cfg)
    else:
        data = [a for r in load_program(args.data or []) for a in r.head]
        report, _ = run_pipeline(args.file, read_text(args.file), data, cfg)
    print(report.to_json())
    if report.status != "complete":
        raise _Inconclusive("chase truncated")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _limits(p):
    p.add_argument("--max-steps", type=int, default=10**7, help="rule applications before giving up")
    p.add_argument("--max-nulls", type=int, default=10**6, help="nulls before giving up")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="n3ex", description="Existential N3 toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and re-serialize an .n3 or .erl file")
    p.add_argument("file")
    p.add_argument("--format", choices=("n3", "erl"), default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("pnf", help="print the piece normal form, one block per piece")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_pnf)

    p = sub.add_parser("translate", help="N3 to existential rules or back")
    p.add_argument("file")
    p.add_argument("--to", choices=("rules", "n3"), required=True)
    p.add_argument("--facts-split", metavar="FILE", help="write ground facts to FILE")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("chase", help="run the chase and print the result")
    p.add_argument("files", nargs="+", help=".n3, .erl, .csv or .tsv inputs")
    p.add_argument("--facts", nargs="+", help="ground database files")
    p.add_argument("--strategy", choices=("restricted", "oblivious"), default="restricted")
    p.add_argument("--facts-as-rules", action="store_true",
                   help="apply facts as body-less rules instead of loading them")
    p.add_argument("--format", choices=("n3", "erl"), default="n3")
    p.add_argument("--query", nargs=3, metavar=("S", "P", "O"),
                   help="print only matching triples; ? is a wildcard")
    p.add_argument("-o", "--output")
    _limits(p)
    p.set_defaults(func=cmd_chase)

    p = sub.add_parser("eq-n3", help="model-theoretic equivalence on a finite universe")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--spares", type=int, default=2)
    p.add_argument("--method", choices=("auto", "enumerate", "sat"), default="auto")
    p.add_argument("--budget", type=int, default=2**18)
    p.set_defaults(func=cmd_eq_n3)

    p = sub.add_parser("eq-rules", help="equivalence of rule sets via the chase")
    p.add_argument("a")
    p.add_argument("b")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--database", nargs="+", help="compare universal models over this data")
    g.add_argument("--critical", action="store_true", help="compare over the critical instance")
    _limits(p)
    p.set_defaults(func=cmd_eq_rules)

    p = sub.add_parser("gen", help="generate benchmark data")
    gsub = p.add_subparsers(dest="dataset", required=True)
    q = gsub.add_parser("dt", help="Deep Taxonomy")
    q.add_argument("--depth", type=int, required=True)
    q.add_argument("--facts-out", help="write the fact separately to this file")
    q.add_argument("-o", "--output")
    q = gsub.add_parser("lubm", help="LUBM-shaped rules and CSV data")
    q.add_argument("--facts", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time parse, normalize, translate and reason")
    bsub = p.add_subparsers(dest="dataset", required=True)
    q = bsub.add_parser("dt")
    q.add_argument("--depth", type=int, default=1000)
    _limits(q)
    q = bsub.add_parser("lubm")
    q.add_argument("--facts", type=int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    _limits(q)
    q = bsub.add_parser("file")
    q.add_argument("file", help="N3 document")
    q.add_argument("--data", nargs="+", help="ground data files")
    _limits(q)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        args.func(args)
    except ParseError as e:
        print(e, file=sys.stderr)
        return EXIT_PARSE
    except (ModelError, TranslationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except _Inconclusive as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (OSError, OracleError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
