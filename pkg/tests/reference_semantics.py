"""A literal, recursive implementation of the N3 satisfaction clauses.

Written independently of ``n3ex.oracle``: formulae are converted to nested
tuples and every clause is transcribed directly, with no indexing or
query planning.

    ("triple", s, p, o) | ("and", f, g) | ("rule", body, head)

where body and head are tuples of triples.  Terms are ("c", value),
("e", label) or ("u", label).
"""
from itertools import product

from n3ex.model import Constant, Existential, Implication, Triple, Universal, flat_conjuncts


def _term(x):
    if isinstance(x, Constant):
        return ("c", x)
    if isinstance(x, Existential):
        return ("e", x.label)
    if isinstance(x, Universal):
        return ("u", x.label)
    raise TypeError(x)


def _triple(t):
    return ("triple",) + tuple(_term(x) for x in t)


def to_tree(f):
    """Binary conjunction tree of a formula."""
    items = []
    for c in flat_conjuncts(f):
        if isinstance(c, Triple):
            items.append(_triple(c))
        elif isinstance(c, Implication):
            items.append(("rule", tuple(map(_triple, c.body)), tuple(map(_triple, c.head))))
    if not items:
        return None
    tree = items[0]
    for it in items[1:]:
        tree = ("and", tree, it)
    return tree


def expression_tree(triples):
    tree = triples[0]
    for t in triples[1:]:
        tree = ("and", tree, t)
    return tree


def components(f):
    if f[0] == "triple":
        return set(f[1:])
    if f[0] == "rule":
        return {("expr", f[1]), ("expr", f[2])}
    return components(f[1]) | components(f[2])


def apply(f, sigma):
    """Substitution on components only; implications are left alone."""
    if f[0] == "triple":
        return ("triple",) + tuple(sigma.get(x, x) for x in f[1:])
    if f[0] == "rule":
        return f
    return ("and", apply(f[1], sigma), apply(f[2], sigma))


def models(M, universe, f) -> bool:
    """M is a set of triples of Constants, universe a list of Constants."""
    W = sorted(x for x in components(f) if x[0] == "e")
    if W:
        # item 1: some substitution of the existential components
        for vals in product(universe, repeat=len(W)):
            mu = {w: ("c", v) for w, v in zip(W, vals)}
            if models(M, universe, apply(f, mu)):
                return True
        return False
    if f[0] == "triple":
        # item 2a
        return tuple(x[1] for x in f[1:]) in M
    if f[0] == "and":
        # item 2b
        return models(M, universe, f[1]) and models(M, universe, f[2])
    # item 2c: all substitutions of the universals of body and head
    body, head = expression_tree(f[1]), expression_tree(f[2])
    us = sorted({x for t in f[1] + f[2] for x in t[1:] if x[0] == "u"})
    for vals in product(universe, repeat=len(us)):
        sigma = {u: ("c", v) for u, v in zip(us, vals)}
        if models(M, universe, apply(body, sigma)) and not models(M, universe, apply(head, sigma)):
            return False
    return True


def reference_satisfies(M, f) -> bool:
    """``M`` is an ``n3ex.oracle.FiniteInterpretation``."""
    tree = to_tree(f)
    if tree is None:
        return True
    universe = sorted(M.universe, key=lambda c: c.key)
    return models(set(M.triples), universe, tree)
