"""Translation between piece normal forms and existential rule sets.

Every triple ``s p o`` becomes the atom ``tr(s, p, o)``; universal variables
become universally quantified rule variables and blank nodes existential
ones.  The inverse direction also accepts unary and binary atoms, which are
mapped to ``a rdf:type :p`` and ``a :p b`` respectively.
"""
from __future__ import annotations

from .iso import connected_index_groups
from .model import (
    EXAMPLE_NS,
    RDF_TYPE,
    TR,
    Atom,
    Conjunction,
    Constant,
    ExRule,
    Existential,
    Implication,
    Null,
    RuleSet,
    Triple,
    Universal,
    Variable,
    flat_conjuncts,
)
from .pnf import PieceSet, to_pnf


class TranslationError(ValueError):
    pass


def term_translate(t):
    if isinstance(t, Universal):
        return Variable(t.label, "universal")
    if isinstance(t, Existential):
        return Variable(t.label, "existential")
    if isinstance(t, Constant):
        return t
    raise TranslationError(f"cannot translate {t!r}")


def _tr(triple: Triple) -> Atom:
    return Atom(TR, tuple(term_translate(x) for x in triple))


def translate_atomic_piece(piece) -> ExRule:
    triples = flat_conjuncts(piece)
    if not all(isinstance(t, Triple) for t in triples):
        raise TranslationError("an atomic piece holds triples only")
    return ExRule((), tuple(_tr(t) for t in triples))


def translate_rule_piece(rule: Implication) -> ExRule:
    for t in rule.body:
        for x in t:
            if isinstance(x, Existential):
                raise TranslationError(
                    f"rule is not normalized: blank node {x} in its body"
                )
    return ExRule(tuple(_tr(t) for t in rule.body), tuple(_tr(t) for t in rule.head))


def translate_piece(piece) -> ExRule:
    if isinstance(piece, Implication):
        return translate_rule_piece(piece)
    return translate_atomic_piece(piece)


def translate_set(pieces) -> RuleSet:
    """The union of the translated pieces."""
    return RuleSet(tuple(translate_piece(p) for p in pieces))


def translate_formula(f) -> RuleSet:
    return translate_set(to_pnf(f))


# ---------------------------------------------------------------------------
# Inverse direction
# ---------------------------------------------------------------------------


def _inv_term(x):
    if isinstance(x, Constant):
        return x
    if isinstance(x, Variable):
        return Existential(x.label) if x.is_existential else Universal(x.label)
    if isinstance(x, Null):
        return Existential(f"n{x.id}")
    raise TranslationError(f"cannot translate term {x!r}")


def predicate_iri(name: str) -> Constant:
    return Constant(EXAMPLE_NS + name)


def atom_to_triple(a: Atom, term=_inv_term) -> Triple:
    """Canonical triple of a ``tr``, binary or unary atom."""
    if a.predicate == TR and a.arity == 3:
        return Triple(*(term(x) for x in a.args))
    if a.arity == 2:
        return Triple(term(a.args[0]), predicate_iri(a.predicate), term(a.args[1]))
    if a.arity == 1:
        return Triple(term(a.args[0]), Constant(RDF_TYPE), predicate_iri(a.predicate))
    raise TranslationError(
        f"predicate {a.predicate}/{a.arity} has no triple form "
        f"(only tr/3, binary and unary predicates translate)"
    )


def tr_encode_atom(a: Atom) -> Atom:
    if a.predicate == TR:
        return a
    s, p, o = atom_to_triple(a, term=lambda x: x)
    return Atom(TR, (s, p, o))


def tr_encode(rs) -> RuleSet:
    """Rewrite unary and binary atoms as ``tr`` atoms."""
    return RuleSet(tuple(
        ExRule(tuple(map(tr_encode_atom, r.body)), tuple(map(tr_encode_atom, r.head)))
        for r in rs
    ))


def inverse_translate(rs) -> Conjunction:
    """N3 rendering of a rule set.

    Rules with a body become implications; body-less rules become top-level
    triples, with their existential variables renamed apart because
    top-level blank nodes co-refer across the whole document.
    """
    out = []
    top_labels = set()
    for r in rs:
        if r.body:
            out.append(Implication(
                tuple(atom_to_triple(a) for a in r.body),
                tuple(atom_to_triple(a) for a in r.head),
            ))
            continue
        renaming = {}
        for x in sorted(r.existentials, key=lambda v: v.label):
            label = x.label
            k = 0
            while label in top_labels:
                k += 1
                label = f"{x.label}_{k}"
            top_labels.add(label)
            renaming[x] = Existential(label)
        for a in r.head:
            out.append(atom_to_triple(a, term=lambda x: renaming.get(x) or _inv_term(x)))
    return Conjunction(tuple(out))


def instance_to_formula(atoms) -> Conjunction:
    """Ground atoms as triples; nulls become blank nodes ``_:n<k>``."""
    return Conjunction(tuple(atom_to_triple(a) for a in atoms))


def instance_to_rules(atoms) -> RuleSet:
    """Ground atoms as facts, null-connected groups as body-less rules."""
    atoms = list(atoms)
    ground = [a for a in atoms if not any(isinstance(x, Null) for x in a.args)]
    with_nulls = [a for a in atoms if any(isinstance(x, Null) for x in a.args)]
    rules = [ExRule((), (a,)) for a in ground]
    for group in connected_index_groups([a.args for a in with_nulls]):
        head = tuple(
            Atom(with_nulls[i].predicate, tuple(
                Variable(f"n{x.id}", "existential") if isinstance(x, Null) else x
                for x in with_nulls[i].args))
            for i in group
        )
        rules.append(ExRule((), head))
    return RuleSet(tuple(rules))


__all__ = [
    "PieceSet",
    "TranslationError",
    "atom_to_triple",
    "instance_to_formula",
    "instance_to_rules",
    "inverse_translate",
    "term_translate",
    "tr_encode",
    "tr_encode_atom",
    "translate_atomic_piece",
    "translate_formula",
    "translate_piece",
    "translate_rule_piece",
    "translate_set",
]
