"""Term and formula data model shared by the N3 side and the rule side.

N3 side: :class:`Constant`, :class:`Existential` (blank node),
:class:`Universal` (``?x``), :class:`Triple`, :class:`Implication` and
:class:`Conjunction`.  A top-level triple is an atomic formula; inside an
implication a tuple of triples is an *expression*.

Rule side: :class:`Variable`, :class:`Null`, :class:`Atom`, :class:`ExRule`
and :class:`RuleSet`.  Constants are shared between both sides.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

EXAMPLE_NS = "http://www.example.org#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
RDF_TYPE = RDF_NS + "type"

TR = "tr"


class ModelError(ValueError):
    """Raised when a value violates a data-model invariant."""


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Constant:
    """An IRI or a literal.  ``value`` is the full IRI or the unescaped text."""

    value: str
    kind: str = "iri"

    def __post_init__(self):
        if not self.value and self.kind == "iri":
            raise ModelError("IRI constants must be non-empty")
        if self.kind not in ("iri", "literal"):
            raise ModelError(f"unknown constant kind {self.kind!r}")

    @property
    def key(self) -> str:
        """Compact hashable encoding used by the chase engine."""
        if self.kind == "iri":
            return "<" + self.value
        return '"' + self.value

    @staticmethod
    def from_key(key: str) -> "Constant":
        if key[0] == "<":
            return Constant(key[1:], "iri")
        return Constant(key[1:], "literal")

    def __str__(self):
        if self.kind == "iri":
            return f"<{self.value}>"
        return '"' + escape_string(self.value) + '"'


@dataclass(frozen=True, slots=True)
class Existential:
    """Blank node ``_:label``."""

    label: str

    def __post_init__(self):
        if not self.label:
            raise ModelError("blank node labels must be non-empty")

    def __str__(self):
        return f"_:{self.label}"


@dataclass(frozen=True, slots=True)
class Universal:
    """Universal variable ``?label``."""

    label: str

    def __post_init__(self):
        if not self.label:
            raise ModelError("universal variable labels must be non-empty")

    def __str__(self):
        return f"?{self.label}"


N3Term = Union[Constant, Existential, Universal]
VarTerm = Union[Existential, Universal]


def iri(local: str, ns: str = EXAMPLE_NS) -> Constant:
    return Constant(ns + local)


def literal(text: str) -> Constant:
    return Constant(text, "literal")


def escape_string(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


# ---------------------------------------------------------------------------
# Formulae
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Triple:
    subject: N3Term
    predicate: N3Term
    object: N3Term

    def terms(self) -> tuple[N3Term, N3Term, N3Term]:
        return (self.subject, self.predicate, self.object)

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))

    def __str__(self):
        return f"{self.subject} {self.predicate} {self.object}."


Expression = tuple  # tuple[Triple, ...]; a non-empty conjunction of triples


@dataclass(frozen=True, slots=True)
class GraphTerm:
    """A rule part ``{e}`` seen as a component of an implication."""

    triples: tuple


@dataclass(frozen=True, slots=True)
class Implication:
    body: tuple
    head: tuple

    def __post_init__(self):
        if not self.body or not self.head:
            raise ModelError("implication body and head must be non-empty")
        for t in self.body + self.head:
            if not isinstance(t, Triple):
                raise ModelError(f"rule parts hold triples only, got {t!r}")

    def __str__(self):
        b = " ".join(str(t) for t in self.body)
        h = " ".join(str(t) for t in self.head)
        return f"{{{b}}}=>{{{h}}}."


@dataclass(frozen=True, slots=True)
class Conjunction:
    """Flattened, order-preserving conjunction of atomic formulae and rules."""

    conjuncts: tuple = ()

    def __post_init__(self):
        for c in self.conjuncts:
            if isinstance(c, Triple):
                for t in c:
                    if isinstance(t, Universal):
                        raise ModelError(
                            f"universal variable {t} outside an implication"
                        )
            elif not isinstance(c, Implication):
                raise ModelError(f"not a conjunct: {c!r}")

    def __iter__(self):
        return iter(self.conjuncts)

    def __len__(self):
        return len(self.conjuncts)

    def __str__(self):
        return " ".join(str(c) for c in self.conjuncts)


Formula = Union[Triple, Implication, Conjunction]
ComponentItem = Union[Constant, Existential, Universal, GraphTerm]


def conjoin(*formulae) -> Conjunction:
    """Conjunction of the given formulae, flattened."""
    out = []
    for f in formulae:
        if isinstance(f, Conjunction):
            out.extend(f.conjuncts)
        elif isinstance(f, (Triple, Implication)):
            out.append(f)
        else:
            out.extend(conjoin(*f).conjuncts)
    return Conjunction(tuple(out))


def conjuncts(f) -> tuple:
    if isinstance(f, Conjunction):
        return f.conjuncts
    if isinstance(f, (Triple, Implication)):
        return (f,)
    if isinstance(f, tuple):
        return f
    raise TypeError(f"not a formula: {f!r}")


def components(f) -> set:
    """Non-nested terms of ``f``; an implication contributes its two parts."""
    if isinstance(f, Triple):
        return {f.subject, f.predicate, f.object}
    if isinstance(f, Implication):
        return {GraphTerm(f.body), GraphTerm(f.head)}
    if isinstance(f, (Conjunction, tuple, list)):
        out = set()
        for c in f:
            out |= components(c)
        return out
    raise TypeError(f"not a formula or expression: {f!r}")


def apply(x, sigma: Mapping):
    """Apply a substitution at component level.

    Implications are opaque: they come back unchanged.
    """
    if not sigma:
        return x
    if isinstance(x, (Existential, Universal)):
        return sigma.get(x, x)
    if isinstance(x, Constant):
        return x
    if isinstance(x, Triple):
        return Triple(
            sigma.get(x.subject, x.subject),
            sigma.get(x.predicate, x.predicate),
            sigma.get(x.object, x.object),
        )
    if isinstance(x, Conjunction):
        return Conjunction(tuple(apply(c, sigma) for c in x.conjuncts))
    if isinstance(x, tuple):
        return tuple(apply(c, sigma) for c in x)
    return x


def is_well_formed(rule: Implication) -> bool:
    """No universal variable occurs in the head without occurring in the body."""
    return not any(
        isinstance(t, Universal)
        for t in components(rule.head) - components(rule.body)
    )


def free_existentials(f) -> set:
    return {t for t in components(f) if isinstance(t, Existential)}


def universals(f) -> set:
    """Universal variables of ``f``; those of a rule are collected from its
    body and head, since their quantifier spans the whole implication."""
    if isinstance(f, tuple) and all(isinstance(t, Triple) for t in f):
        return {t for t in components(f) if isinstance(t, Universal)}
    out = set()
    for c in flat_conjuncts(f):
        triples = c.body + c.head if isinstance(c, Implication) else (c,)
        out.update(x for t in triples for x in t if isinstance(x, Universal))
    return out


def flat_conjuncts(f) -> list:
    """Top-level conjuncts of a formula or of a collection of formulae."""
    if isinstance(f, (Triple, Implication)):
        return [f]
    if isinstance(f, Conjunction):
        return list(f.conjuncts)
    out = []
    for g in f:
        out.extend(flat_conjuncts(g))
    return out


def constants(f) -> set:
    """All constants anywhere in ``f``, including inside rule parts."""
    out = set()
    for c in flat_conjuncts(f):
        triples = (c,) if isinstance(c, Triple) else c.body + c.head
        for t in triples:
            out.update(x for x in t if isinstance(x, Constant))
    return out


def variables_in(triples: Iterable[Triple]) -> list:
    """Variables in order of first occurrence."""
    seen = {}
    for t in triples:
        for x in t:
            if isinstance(x, (Existential, Universal)):
                seen.setdefault(x, None)
    return list(seen)


# ---------------------------------------------------------------------------
# Rule side
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Variable:
    label: str
    quantifier: str = "universal"

    def __post_init__(self):
        if self.quantifier not in ("universal", "existential"):
            raise ModelError(f"bad quantifier {self.quantifier!r}")
        if not self.label:
            raise ModelError("variable labels must be non-empty")

    @property
    def is_existential(self) -> bool:
        return self.quantifier == "existential"

    def __str__(self):
        return ("!" if self.is_existential else "?") + self.label


@dataclass(frozen=True, slots=True)
class Null:
    id: int

    def __str__(self):
        return f"_:n{self.id}"


RuleTerm = Union[Constant, Variable, Null]


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: str
    args: tuple

    def __post_init__(self):
        if not self.predicate:
            raise ModelError("empty predicate name")
        if self.predicate == TR and len(self.args) != 3:
            raise ModelError(f"tr takes exactly 3 arguments, got {len(self.args)}")

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def is_ground(self) -> bool:
        return all(not isinstance(a, Variable) for a in self.args)

    def __str__(self):
        return f"{self.predicate}({', '.join(map(str, self.args))})"


GroundAtom = Atom


def tr(s, p, o) -> Atom:
    return Atom(TR, (s, p, o))


@dataclass(frozen=True)
class ExRule:
    """``forall x. body -> exists z. head``; an empty body makes it unconditional."""

    body: tuple
    head: tuple
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.head:
            raise ModelError("rule head must be non-empty")
        body_vars = set()
        for a in self.body:
            for t in a.args:
                if isinstance(t, Null):
                    raise ModelError("nulls cannot occur in rules")
                if isinstance(t, Variable):
                    if t.is_existential:
                        raise ModelError(f"existential variable {t} in rule body")
                    body_vars.add(t)
        for a in self.head:
            for t in a.args:
                if isinstance(t, Null):
                    raise ModelError("nulls cannot occur in rules")
                if isinstance(t, Variable) and not t.is_existential and t not in body_vars:
                    raise ModelError(
                        f"unsafe rule: head variable {t} does not occur in the body"
                    )

    @property
    def frontier(self) -> frozenset:
        body_vars = {t for a in self.body for t in a.args if isinstance(t, Variable)}
        return frozenset(
            t for a in self.head for t in a.args if isinstance(t, Variable) and t in body_vars
        )

    @property
    def existentials(self) -> frozenset:
        return frozenset(
            t for a in self.head for t in a.args
            if isinstance(t, Variable) and t.is_existential
        )

    @property
    def universals(self) -> frozenset:
        return frozenset(t for a in self.body for t in a.args if isinstance(t, Variable))

    @property
    def is_fact(self) -> bool:
        return not self.body and all(a.is_ground for a in self.head)

    def __str__(self):
        head = ", ".join(map(str, self.head))
        if self.is_fact:
            return f"{head} ."
        return f"{', '.join(map(str, self.body))} -> {head} ."


@dataclass(frozen=True)
class RuleSet:
    rules: tuple = ()

    def __post_init__(self):
        arities = {}
        for r in self.rules:
            for a in r.body + r.head:
                known = arities.setdefault(a.predicate, a.arity)
                if known != a.arity:
                    raise ModelError(
                        f"predicate {a.predicate} used with arities {known} and {a.arity}"
                    )

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)

    @property
    def facts(self) -> list:
        return [a for r in self.rules if r.is_fact for a in r.head]

    @property
    def proper_rules(self) -> list:
        return [r for r in self.rules if not r.is_fact]

    def __add__(self, other: "RuleSet") -> "RuleSet":
        return RuleSet(self.rules + other.rules)


class Substitution(dict):
    """Finite map from variable terms to terms."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        for k in self:
            if not isinstance(k, (Existential, Universal)):
                raise ModelError(f"substitution domain holds variables only, got {k}")
