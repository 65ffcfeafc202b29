"""Equality modulo conjunct order and injective renaming of variables."""
from __future__ import annotations

from collections import Counter, defaultdict

from .model import (
    Existential,
    Implication,
    Null,
    Universal,
    Variable,
    flat_conjuncts,
)

_VAR_TYPES = (Existential, Universal, Variable, Null)


def _kind(x):
    if isinstance(x, Variable):
        return ("var", x.quantifier)
    return ("var", type(x).__name__)


def _blind(item: tuple) -> tuple:
    return tuple(_kind(x) if isinstance(x, _VAR_TYPES) else x for x in item)


def items_isomorphic(a: list, b: list) -> bool:
    """True iff a bijective, kind-preserving variable renaming maps the
    multiset ``a`` onto the multiset ``b``."""
    if len(a) != len(b):
        return False
    if Counter(map(_blind, a)) != Counter(map(_blind, b)):
        return False
    buckets = defaultdict(list)
    for j, item in enumerate(b):
        buckets[_blind(item)].append(j)
    # most constrained first: small buckets, then items sharing variables
    order = sorted(range(len(a)), key=lambda i: len(buckets[_blind(a[i])]))
    used = [False] * len(b)
    fwd, bwd = {}, {}

    def bind(x, y, trail):
        if not isinstance(x, _VAR_TYPES):
            return x == y
        if not isinstance(y, _VAR_TYPES) or _kind(x) != _kind(y):
            return False
        if x in fwd:
            return fwd[x] == y
        if y in bwd:
            return False
        fwd[x] = y
        bwd[y] = x
        trail.append(x)
        return True

    def search(k):
        if k == len(order):
            return True
        item = a[order[k]]
        for j in buckets[_blind(item)]:
            if used[j]:
                continue
            trail = []
            if all(bind(x, y, trail) for x, y in zip(item, b[j])):
                used[j] = True
                if search(k + 1):
                    return True
                used[j] = False
            for x in trail:
                del bwd[fwd.pop(x)]
        return False

    return search(0)


def _match_units(units_a: list, units_b: list) -> bool:
    if len(units_a) != len(units_b):
        return False
    buckets = defaultdict(list)
    for u in units_b:
        buckets[tuple(sorted(Counter(map(_blind, u)).items(), key=repr))].append(u)
    for u in units_a:
        key = tuple(sorted(Counter(map(_blind, u)).items(), key=repr))
        cands = buckets.get(key, [])
        for i, v in enumerate(cands):
            if items_isomorphic(u, v):
                cands.pop(i)
                break
        else:
            return False
    return True


def _units(f) -> list:
    """Independent renaming scopes of a formula.

    Each rule is one scope; top-level triples form one scope per connected
    group of shared blank nodes.
    """
    units = []
    triples = []
    for c in flat_conjuncts(f):
        if isinstance(c, Implication):
            units.append([("b",) + tuple(t) for t in c.body]
                         + [("h",) + tuple(t) for t in c.head])
        else:
            triples.append(c)
    units.extend([tuple(t) for t in group] for group in connected_groups(triples))
    return units


def connected_index_groups(items: list) -> list:
    """Indices of ``items`` (term tuples) grouped by shared variables."""
    parent = list(range(len(items)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner = {}
    for i, t in enumerate(items):
        for x in t:
            if isinstance(x, _VAR_TYPES):
                if x in owner:
                    ri, rj = find(i), find(owner[x])
                    if ri != rj:
                        parent[max(ri, rj)] = min(ri, rj)
                else:
                    owner[x] = i
    groups = {}
    for i in range(len(items)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def connected_groups(items: list) -> list:
    return [[items[i] for i in g] for g in connected_index_groups(items)]


def structurally_equivalent(f, g) -> bool:
    """Formulae equal up to conjunct order and variable renaming per scope."""
    return _match_units(_units(f), _units(g))


def rulesets_isomorphic(rs1, rs2) -> bool:
    """Rule sets equal up to rule order, atom order and variable renaming."""
    def unit(r):
        return ([("b", a.predicate) + a.args for a in r.body]
                + [("h", a.predicate) + a.args for a in r.head])
    return _match_units([unit(r) for r in rs1], [unit(r) for r in rs2])

