"""Benchmark and test-corpus generators.

* :func:`deep_taxonomy` -- one membership fact and a chain of subclass rules,
  three per level, of which only the ``N`` branch continues.
* :func:`lubm_like` -- unary/binary facts and rules shaped like LUBM: a class
  hierarchy, property hierarchy, domain/range/inverse rules and rules with
  existential heads.
* :func:`random_formula` / :func:`mutate` -- small random formulae for
  property tests of the normal form and the translation.
"""
from __future__ import annotations

import random

from .model import (
    RDF_TYPE,
    Atom,
    Conjunction,
    Constant,
    ExRule,
    Existential,
    Implication,
    RuleSet,
    Triple,
    Universal,
    Variable,
    conjoin,
    iri,
)
from .pnf import to_pnf

A = Constant(RDF_TYPE)


def deep_taxonomy(depth: int) -> tuple:
    """``(facts, rules)`` of the Deep Taxonomy benchmark at ``depth`` levels."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    x = Universal("x")
    facts = Conjunction((Triple(iri("i"), A, iri("N0")),))
    rules = []
    for k in range(depth):
        body = (Triple(x, A, iri(f"N{k}")),)
        for cls in ("N", "I", "J"):
            rules.append(Implication(body, (Triple(x, A, iri(f"{cls}{k + 1}")),)))
    return facts, Conjunction(tuple(rules))


# ---------------------------------------------------------------------------
# LUBM-shaped synthetic data
# ---------------------------------------------------------------------------


def _v(name):
    return Variable(name, "universal")


def lubm_like_rules(n_classes: int = 24, n_props: int = 12, n_existential: int = 50,
                    n_targets: int = 8, seed: int = 0) -> RuleSet:
    """Rules over unary ``Class*``/``Target*`` and binary ``prop*``/``exrel*``.

    Existential rules put their fresh value into a private ``exrel<k>``
    relation and a ``Target`` class; nothing derives source classes from
    targets, so the chase terminates.
    """
    rng = random.Random(seed)
    x, y, z = _v("x"), _v("y"), _v("z")
    ey = Variable("y", "existential")
    rules = []
    for i in range(1, n_classes):
        rules.append(ExRule((Atom(f"Class{i}", (x,)),), (Atom(f"Class{(i - 1) // 3}", (x,)),)))
    half = n_props // 2
    for i in range(half, n_props):
        rules.append(ExRule((Atom(f"prop{i}", (x, y)),), (Atom(f"prop{i - half}", (x, y)),)))
    for i in range(n_props):
        d = rng.randrange(n_classes)
        rules.append(ExRule((Atom(f"prop{i}", (x, y)),), (Atom(f"Class{d}", (x,)),)))
    for i in range(0, n_props, 2):
        r = rng.randrange(n_classes)
        rules.append(ExRule((Atom(f"prop{i}", (x, y)),), (Atom(f"Class{r}", (y,)),)))
    rules.append(ExRule((Atom("prop0", (x, y)),), (Atom("prop1", (y, x)),)))
    rules.append(ExRule((Atom("prop2", (x, y)),), (Atom("prop3", (y, x)),)))
    for i in range(1, n_targets):
        rules.append(ExRule((Atom(f"Target{i}", (x,)),), (Atom("Target0", (x,)),)))
    leaf_start = n_classes // 3
    for k in range(n_existential):
        c = rng.randrange(leaf_start, n_classes)
        head = (Atom(f"exrel{k}", (x, ey)), Atom(f"Target{k % n_targets}", (ey,)))
        if k % 3 == 2:
            body = (Atom(f"Class{c}", (x,)), Atom(f"prop{rng.randrange(n_props)}", (x, z)))
        else:
            body = (Atom(f"Class{c}", (x,)),)
        rules.append(ExRule(body, head))
    return RuleSet(tuple(rules))


def lubm_like_facts(n_facts: int, n_classes: int = 24, n_props: int = 12,
                    seed: int = 0) -> list:
    """``n_facts`` ground unary/binary atoms over ``n_facts // 4`` individuals."""
    rng = random.Random(seed)
    n_ind = max(2, n_facts // 4)
    inds = [Constant(f"http://www.example.org#ind{i}") for i in range(n_ind)]
    seen = set()
    out = []
    while len(out) < n_facts:
        if len(out) % 4 == 0:
            a = Atom(f"Class{rng.randrange(n_classes)}", (rng.choice(inds),))
        else:
            a = Atom(f"prop{rng.randrange(n_props)}", (rng.choice(inds), rng.choice(inds)))
        if a not in seen:
            seen.add(a)
            out.append(a)
    return out


def lubm_like(n_facts: int, seed: int = 0, **kw) -> tuple:
    """``(rules, facts)``: a LUBM-shaped rule set and database."""
    return lubm_like_rules(seed=seed, **kw), lubm_like_facts(n_facts, seed=seed)


# ---------------------------------------------------------------------------
# Random formulae
# ---------------------------------------------------------------------------


def random_formula(rng: random.Random, n_constants: int = 3, max_rules: int = 2,
                   max_triples: int = 4, blank_labels: int = 3,
                   p_var_predicate: float = 0.15) -> Conjunction:
    """A random well-formed formula.

    At most ``max_triples`` triples overall and ``max_rules`` implications.
    Blank-node labels are distinct per scope, as the parser leaves them.
    """
    consts = [iri(f"c{i}") for i in range(n_constants)]
    budget = rng.randint(1, max_triples)
    n_rules = rng.randint(0, min(max_rules, budget // 2))
    n_top = budget - 2 * n_rules if n_rules else budget
    n_top = rng.randint(0 if n_rules else 1, n_top)

    def term(pool_vars, position):
        p_var = p_var_predicate if position == 1 else 0.45
        if pool_vars and rng.random() < p_var:
            return rng.choice(pool_vars)
        return rng.choice(consts)

    def triples(n, pool_vars):
        return tuple(Triple(term(pool_vars, 0), term(pool_vars, 1), term(pool_vars, 2))
                     for _ in range(n))

    top_blanks = [Existential(f"b{i}") for i in range(blank_labels)]
    parts = list(triples(n_top, top_blanks))
    spare = budget - n_top - 2 * n_rules
    for r in range(n_rules):
        nb = 1 + (1 if spare > 0 and rng.random() < 0.5 else 0)
        spare -= nb - 1
        nh = 1 + (1 if spare > 0 and rng.random() < 0.5 else 0)
        spare -= nh - 1
        us = [Universal(n) for n in ("x", "y")]
        body_blanks = [Existential(f"r{r}b{i}") for i in range(2)]
        head_blanks = [Existential(f"r{r}h{i}") for i in range(2)]
        body = triples(nb, us + body_blanks[: rng.randint(0, 2)])
        body_us = sorted({x for t in body for x in t if isinstance(x, Universal)},
                         key=lambda u: u.label)
        head = triples(nh, body_us + head_blanks[: rng.randint(0, 2)])
        parts.append(Implication(body, head))
    rng.shuffle(parts)
    return Conjunction(tuple(parts))


def mutate(rng: random.Random, f: Conjunction, n_constants: int = 3) -> Conjunction:
    """A variant of ``f`` that may or may not be equivalent to it."""
    items = list(f.conjuncts)
    consts = [iri(f"c{i}") for i in range(n_constants)]
    choice = rng.randrange(8)
    if choice == 0:
        return to_pnf(f).union()
    if choice == 1 and len(items) > 1:
        del items[rng.randrange(len(items))]
    elif choice == 2:
        items.append(rng.choice(items))
    elif choice == 3:
        items.append(Triple(rng.choice(consts), rng.choice(consts), rng.choice(consts)))
    elif choice == 4:
        # generalize one constant of a top-level triple into a blank node
        tops = [i for i, c in enumerate(items) if isinstance(c, Triple)]
        if tops:
            i = rng.choice(tops)
            t = list(items[i])
            t[rng.choice((0, 2))] = Existential("m0")
            items[i] = Triple(*t)
    elif choice == 5:
        rules = [i for i, c in enumerate(items) if isinstance(c, Implication)]
        if rules:
            i = rng.choice(rules)
            r = items[i]
            if len(r.head) > 1:
                items[i] = Implication(r.body, r.head[:1])
            else:
                items[i] = Implication(r.body + (Triple(*(rng.choice(consts) for _ in range(3))),), r.head)
    elif choice == 6:
        rng.shuffle(items)
    else:
        # rename blank nodes consistently
        ren = {}
        def sub(x):
            if isinstance(x, Existential):
                return ren.setdefault(x, Existential(f"q{len(ren)}"))
            return x
        items = [Triple(*map(sub, c)) if isinstance(c, Triple) else c for c in items]
    return conjoin(items)
