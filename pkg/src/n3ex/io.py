"""Loading formulae, rule sets and databases from files."""
from __future__ import annotations

import csv
from pathlib import Path

from .model import EXAMPLE_NS, Atom, Constant, ExRule, RuleSet
from .parser import parse_n3, parse_rules
from .translate import translate_formula

N3_SUFFIXES = (".n3", ".ttl")
RULE_SUFFIXES = (".erl", ".rls", ".dlog")
TABLE_SUFFIXES = (".csv", ".tsv")


def read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def load_formula(path):
    """Parse an N3 file."""
    return parse_n3(read_text(path), source=str(path))


def csv_term(value: str) -> Constant:
    """``<iri>`` is an IRI, ``"text"`` a literal, anything else ``:value``."""
    value = value.strip()
    if value.startswith("<") and value.endswith(">"):
        return Constant(value[1:-1])
    if len(value) >= 2 and value.startswith('"') and value.endswith('"'):
        return Constant(value[1:-1], "literal")
    return Constant(EXAMPLE_NS + value)


def load_table(path) -> list:
    """Ground atoms from a CSV/TSV file named after their predicate."""
    path = Path(path)
    delim = "\t" if path.suffix == ".tsv" else ","
    pred = path.stem
    with path.open(newline="", encoding="utf-8") as fh:
        return [Atom(pred, tuple(csv_term(v) for v in row))
                for row in csv.reader(fh, delimiter=delim) if row]


def load_rules(path) -> RuleSet:
    """A rule set from ``.erl`` text, an N3 document (translated through its
    piece normal form) or a CSV/TSV table of facts."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix in N3_SUFFIXES:
        return translate_formula(load_formula(path))
    if suffix in TABLE_SUFFIXES:
        return RuleSet(tuple(ExRule((), (a,)) for a in load_table(path)))
    return parse_rules(read_text(path), source=str(path))


def load_program(paths) -> RuleSet:
    out = RuleSet(())
    for p in paths:
        out = out + load_rules(p)
    return out


def write_output(text: str, path=None) -> None:
    if path is None or str(path) == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
