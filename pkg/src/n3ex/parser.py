"""Reading and writing the N3 fragment (``.n3``) and the rule format (``.erl``).

N3 surface syntax accepted::

    @prefix ex: <http://example.org/> .
    :lucy :knows _:x .
    {?x :knows :tom} => {?x :knows _:y. _:y :name "Tom"} .

Rule syntax (``%`` starts a comment)::

    tr(?x, :knows, :tom) -> tr(?x, :knows, !y), tr(!y, :name, "Tom") .
     -> tr(:lucy, :knows, !x) .
    tr(:a, :b, :c) .
    src_advisor(Student441, Professor8) .

``?x`` is universal, ``!y`` existential.  A bare identifier in argument
position abbreviates the default-namespace name ``:identifier``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    EXAMPLE_NS,
    RDF_NS,
    RDF_TYPE,
    RDFS_NS,
    XSD_NS,
    Atom,
    Conjunction,
    Constant,
    ExRule,
    Existential,
    Implication,
    ModelError,
    Null,
    RuleSet,
    Triple,
    Universal,
    Variable,
    escape_string,
    flat_conjuncts,
)

DEFAULT_PREFIXES = {
    "": EXAMPLE_NS,
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
    "xsd": XSD_NS,
}


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int
    line: int
    column: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("span start after end")

    @classmethod
    def at(cls, text: str, start: int, end: int) -> "SourceSpan":
        line = text.count("\n", 0, start) + 1
        column = start - (text.rfind("\n", 0, start) + 1) + 1
        return cls(start, end, line, column)


class ParseError(Exception):
    """Malformed input.  ``kind`` is lexical, syntactic or well-formedness."""

    def __init__(self, message: str, span: SourceSpan, kind: str = "syntactic",
                 source: str | None = None):
        self.message = message or "parse error"
        self.span = span
        self.kind = kind
        self.source = source
        super().__init__(str(self))

    def __str__(self):
        where = f"{self.source}:" if self.source else ""
        return (f"{where}{self.span.line}:{self.span.column}: "
                f"{self.kind} error: {self.message}")


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PN_LOCAL = r"[A-Za-z0-9_](?:[\w\-.]*[\w\-])?"
_TOKEN_SPEC = [
    ("IRIREF", r"<[^<>\"{}|^`\\\s]*>"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"'),
    ("PREFIX", r"@prefix\b"),
    ("IMPLIES", r"=>"),
    ("ARROW", r"->"),
    ("BNODE", r"_:" + _PN_LOCAL),
    ("UVAR", r"\?[A-Za-z_][\w\-]*"),
    ("EVAR", r"![A-Za-z_][\w\-]*"),
    ("PNAME", r"(?:[A-Za-z][\w\-]*)?:(?:" + _PN_LOCAL + r")?"),
    ("IDENT", r"[A-Za-z_][\w\-]*"),
    ("PUNCT", r"[{}(),.]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{k}>{v})" for k, v in _TOKEN_SPEC))
_SKIP = {"#": re.compile(r"(?:\s+|#[^\n]*)+"), "%": re.compile(r"(?:\s+|%[^\n]*)+")}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int


def tokenize(text: str, comment: str = "#", source: str | None = None) -> list:
    skip = _SKIP[comment]
    pos, out = 0, []
    n = len(text)
    while True:
        m = skip.match(text, pos)
        if m:
            pos = m.end()
        if pos >= n:
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(
                f"unexpected character {text[pos]!r}",
                SourceSpan.at(text, pos, pos + 1), "lexical", source,
            )
        kind = m.lastgroup
        tok_text = m.group()
        if kind == "PUNCT":
            kind = tok_text
        out.append(Token(kind, tok_text, pos, m.end()))
        pos = m.end()
    out.append(Token("EOF", "", n, n))
    return out


_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", "b": "\b", "f": "\f",
            '"': '"', "'": "'", "\\": "\\"}
_ESC_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)")


def _unescape(body: str) -> str:
    def repl(m):
        e = m.group(1)
        if e[0] in "uU" and len(e) > 1:
            return chr(int(e[1:], 16))
        if e in _ESCAPES:
            return _ESCAPES[e]
        raise ValueError(e)
    return _ESC_RE.sub(repl, body)


class _Reader:
    """Token cursor shared by both grammars."""

    def __init__(self, text: str, comment: str, source: str | None):
        self.text = text
        self.source = source
        self.toks = tokenize(text, comment, source)
        self.i = 0
        self.prefixes = dict(DEFAULT_PREFIXES)

    @property
    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def span(self, tok: Token) -> SourceSpan:
        return SourceSpan.at(self.text, tok.start, tok.end)

    def error(self, msg: str, tok: Token, kind: str = "syntactic") -> ParseError:
        return ParseError(msg, self.span(tok), kind, self.source)

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.next()
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise self.error(f"expected {what or kind!r}, found {found!r}", tok)
        return tok

    def prefix_directive(self):
        self.expect("PREFIX")
        name = self.expect("PNAME", "prefix name")
        if not name.text.endswith(":"):
            raise self.error(f"bad prefix name {name.text!r}", name)
        target = self.expect("IRIREF", "IRI")
        self.expect(".", ".")
        self.prefixes[name.text[:-1]] = target.text[1:-1]

    def constant(self, tok: Token) -> Constant:
        if tok.kind == "IRIREF":
            return Constant(tok.text[1:-1])
        if tok.kind == "PNAME":
            pfx, _, local = tok.text.partition(":")
            if pfx not in self.prefixes:
                raise self.error(f"undeclared prefix {pfx + ':'!r}", tok)
            return Constant(self.prefixes[pfx] + local)
        if tok.kind == "STRING":
            try:
                return Constant(_unescape(tok.text[1:-1]), "literal")
            except ValueError as exc:
                raise self.error(f"bad escape sequence \\{exc}", tok, "lexical")
        raise self.error(f"expected a constant, found {tok.text!r}", tok)


# ---------------------------------------------------------------------------
# N3
# ---------------------------------------------------------------------------


def _fresh_label(label: str, used: set) -> str:
    if label not in used:
        return label
    k = 1
    while f"{label}_{k}" in used:
        k += 1
    return f"{label}_{k}"


class _N3Parser(_Reader):
    def __init__(self, text, source):
        super().__init__(text, "#", source)
        # raw label -> scopes it occurs in; scope 0 is the top level and each
        # rule part is its own scope
        self.label_scopes = {}
        scope = depth = 0
        for t in self.toks:
            if t.kind == "{":
                scope += 1
                depth = scope
            elif t.kind == "}":
                depth = 0
            elif t.kind == "BNODE":
                self.label_scopes.setdefault(t.text[2:], set()).add(depth)
        self.used_labels = set(self.label_scopes)

    def term(self, in_rule: bool, position: int):
        tok = self.next()
        if tok.kind == "BNODE":
            return Existential(tok.text[2:]), tok
        if tok.kind == "UVAR":
            if not in_rule:
                raise self.error(
                    f"universal variable {tok.text} outside an implication", tok
                )
            return Universal(tok.text[1:]), tok
        if tok.kind == "IDENT" and tok.text == "a":
            if position != 1:
                raise self.error("'a' is only allowed in predicate position", tok)
            return Constant(RDF_TYPE), tok
        if tok.kind in ("IRIREF", "PNAME", "STRING"):
            return self.constant(tok), tok
        found = tok.text or "end of input"
        raise self.error(f"expected a term, found {found!r}", tok)

    def triple(self, in_rule: bool):
        s, st = self.term(in_rule, 0)
        p, pt = self.term(in_rule, 1)
        o, ot = self.term(in_rule, 2)
        return Triple(s, p, o), (st, pt, ot)

    def expression(self):
        self.expect("{", "{")
        triples, toks = [], []
        while True:
            if self.peek.kind == "}":
                break
            t, tt = self.triple(True)
            triples.append(t)
            toks.append(tt)
            if self.peek.kind == ".":
                self.next()
                continue
            if self.peek.kind != "}":
                raise self.error(
                    f"expected '.' or '}}', found {self.peek.text or 'end of input'!r}",
                    self.peek,
                )
        close = self.expect("}", "}")
        if not triples:
            raise self.error("empty rule part", close)
        return self._rename_part(triples), toks

    def _rename_part(self, triples):
        renaming = {}
        for t in triples:
            for x in t:
                if isinstance(x, Existential) and x not in renaming:
                    if len(self.label_scopes[x.label]) == 1:
                        renaming[x] = x
                        continue
                    new = _fresh_label(x.label, self.used_labels)
                    self.used_labels.add(new)
                    renaming[x] = Existential(new)
        return tuple(
            Triple(*(renaming.get(x, x) for x in t)) for t in triples
        )

    def implication(self):
        body, _ = self.expression()
        self.expect("IMPLIES", "=>")
        head, head_toks = self.expression()
        self.expect(".", ".")
        body_vars = {x for t in body for x in t if isinstance(x, Universal)}
        for t, toks in zip(head, head_toks):
            for x, tok in zip(t, toks):
                if isinstance(x, Universal) and x not in body_vars:
                    raise self.error(
                        f"universal variable {x} occurs in the rule head but not "
                        f"in its body", tok, "well-formedness",
                    )
        return Implication(body, head)

    def parse(self) -> Conjunction:
        # Rule parts were renamed apart from every raw label, so top-level
        # blank nodes keep their names and co-refer document-wide.
        out = []
        while self.peek.kind != "EOF":
            if self.peek.kind == "PREFIX":
                self.prefix_directive()
            elif self.peek.kind == "{":
                out.append(self.implication())
            else:
                t, _ = self.triple(False)
                self.expect(".", ".")
                out.append(t)
        return Conjunction(tuple(out))


def parse_n3(text: str, source: str | None = None) -> Conjunction:
    """Parse an N3 document into a conjunction of atomic formulae and rules."""
    return _N3Parser(text, source).parse()


def _compact(value: str, prefixes: dict) -> str | None:
    best = None
    for pfx, ns in prefixes.items():
        if value.startswith(ns) and (best is None or len(ns) > len(prefixes[best])):
            local = value[len(ns):]
            if local == "" or re.fullmatch(_PN_LOCAL, local):
                best = pfx
    if best is None:
        return None
    return f"{best}:{value[len(prefixes[best]):]}"


class _Writer:
    def __init__(self, prefixes: dict | None):
        self.prefixes = dict(DEFAULT_PREFIXES if prefixes is None else prefixes)
        self.used = set()

    def constant(self, c: Constant) -> str:
        if c.kind == "literal":
            return '"' + escape_string(c.value) + '"'
        short = _compact(c.value, self.prefixes)
        if short is None:
            return f"<{c.value}>"
        self.used.add(short.partition(":")[0])
        return short

    def header(self) -> str:
        lines = [f"@prefix {p}: <{self.prefixes[p]}> ." for p in sorted(self.used)]
        return "\n".join(lines) + ("\n\n" if lines else "")


def _n3_term(w: _Writer, x) -> str:
    if isinstance(x, Constant):
        return w.constant(x)
    if isinstance(x, Null):
        return f"_:n{x.id}"
    return str(x)


def _n3_triple(w: _Writer, t: Triple) -> str:
    return " ".join(_n3_term(w, x) for x in t)


def serialize_n3(f, prefixes: dict | None = None) -> str:
    """Render a formula (or a collection of formulae) as an N3 document."""
    w = _Writer(prefixes)
    lines = []
    for c in flat_conjuncts(f):
        if isinstance(c, Triple):
            lines.append(_n3_triple(w, c) + " .")
        else:
            body = " . ".join(_n3_triple(w, t) for t in c.body)
            head = " . ".join(_n3_triple(w, t) for t in c.head)
            lines.append(f"{{ {body} }} => {{ {head} }} .")
    return w.header() + "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Rule format
# ---------------------------------------------------------------------------


class _RuleParser(_Reader):
    def __init__(self, text, source):
        super().__init__(text, "%", source)
        self.arities = {}

    def arg(self):
        tok = self.next()
        if tok.kind == "UVAR":
            return Variable(tok.text[1:], "universal")
        if tok.kind == "EVAR":
            return Variable(tok.text[1:], "existential")
        if tok.kind == "IDENT":
            return Constant(self.prefixes[""] + tok.text)
        if tok.kind in ("IRIREF", "PNAME", "STRING"):
            return self.constant(tok)
        found = tok.text or "end of input"
        raise self.error(f"expected an argument, found {found!r}", tok)

    def atom(self) -> Atom:
        name = self.expect("IDENT", "predicate name")
        self.expect("(", "(")
        args = [self.arg()]
        while self.peek.kind == ",":
            self.next()
            args.append(self.arg())
        self.expect(")", ")")
        known = self.arities.setdefault(name.text, len(args))
        if known != len(args):
            raise self.error(
                f"predicate {name.text} used with arity {len(args)}, "
                f"previously {known}", name,
            )
        try:
            return Atom(name.text, tuple(args))
        except ModelError as exc:
            raise self.error(str(exc), name)

    def atoms(self) -> list:
        out = [self.atom()]
        while self.peek.kind == ",":
            self.next()
            out.append(self.atom())
        return out

    def statement(self) -> ExRule:
        start = self.peek
        if self.peek.kind == "ARROW":
            self.next()
            body, head = [], self.atoms()
        else:
            body = self.atoms()
            if self.peek.kind == "ARROW":
                self.next()
                head = self.atoms()
            else:
                body, head = [], body
        self.expect(".", ".")
        try:
            return ExRule(tuple(body), tuple(head))
        except ModelError as exc:
            span = SourceSpan.at(self.text, start.start, self.toks[self.i - 1].end)
            raise ParseError(str(exc), span, "well-formedness", self.source)

    def parse(self) -> RuleSet:
        rules = []
        while self.peek.kind != "EOF":
            if self.peek.kind == "PREFIX":
                self.prefix_directive()
            else:
                rules.append(self.statement())
        return RuleSet(tuple(rules))


def parse_rules(text: str, source: str | None = None) -> RuleSet:
    """Parse ``.erl`` text.  Facts are body-less rules without variables."""
    return _RuleParser(text, source).parse()


def _erl_term(w: _Writer, x) -> str:
    if isinstance(x, Constant):
        return w.constant(x)
    if isinstance(x, Null):
        return f"!n{x.id}"
    return str(x)


def _erl_atom(w: _Writer, a: Atom) -> str:
    return f"{a.predicate}({', '.join(_erl_term(w, x) for x in a.args)})"


def serialize_rules(rs, prefixes: dict | None = None) -> str:
    w = _Writer(prefixes)
    lines = []
    for r in rs:
        head = ", ".join(_erl_atom(w, a) for a in r.head)
        if r.is_fact:
            lines.append(f"{head} .")
        elif not r.body:
            lines.append(f"-> {head} .")
        else:
            body = ", ".join(_erl_atom(w, a) for a in r.body)
            lines.append(f"{body} -> {head} .")
    return w.header() + "\n".join(lines) + ("\n" if lines else "")
