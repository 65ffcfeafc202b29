"""Piece normal form.

A formula is split into pieces: maximal groups of top-level conjuncts
connected through shared blank nodes.  Rules are then normalized by turning
the blank nodes of their bodies into fresh universal variables.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import (
    Conjunction,
    Existential,
    Implication,
    Triple,
    Universal,
    apply,
    components,
    conjoin,
    flat_conjuncts,
)

FRESH_PREFIX = "v"


def split_pieces(f) -> list:
    """Finest split of the top-level conjuncts of ``f`` into pieces.

    Union-find over conjuncts keyed by shared existential components.  Every
    implication is a piece on its own (its blank nodes are not components).
    A single-triple piece is returned as the triple, larger ones as a
    :class:`Conjunction`.  Pieces come in order of their first conjunct.
    """
    items = flat_conjuncts(f)
    parent = list(range(len(items)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner = {}
    for i, c in enumerate(items):
        if not isinstance(c, Triple):
            continue
        for x in c:
            if isinstance(x, Existential):
                j = owner.setdefault(x, i)
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups = {}
    for i, c in enumerate(items):
        groups.setdefault(find(i), []).append(c)
    out = []
    for group in groups.values():
        out.append(group[0] if len(group) == 1 else Conjunction(tuple(group)))
    return out


def eliminate_body_existentials(rule: Implication) -> Implication:
    """Replace body blank nodes by fresh universals ``?v0``, ``?v1``, ...

    Fresh names skip every universal label already used in the rule, so the
    substitution is injective and its range avoids the rule's variables.
    """
    body_ex = []
    for t in rule.body:
        for x in t:
            if isinstance(x, Existential) and x not in body_ex:
                body_ex.append(x)
    if not body_ex:
        return rule
    taken = {x.label for t in rule.body + rule.head for x in t
             if isinstance(x, Universal)}
    sigma = {}
    k = 0
    for x in body_ex:
        while f"{FRESH_PREFIX}{k}" in taken:
            k += 1
        sigma[x] = Universal(f"{FRESH_PREFIX}{k}")
        k += 1
    return Implication(apply(rule.body, sigma), rule.head)


def is_atomic_piece(piece) -> bool:
    return isinstance(piece, (Triple, Conjunction))


def is_normalized(piece) -> bool:
    if isinstance(piece, Implication):
        return not any(isinstance(x, Existential) for t in piece.body for x in t)
    return True


@dataclass(frozen=True)
class PieceSet:
    """A formula in piece normal form."""

    pieces: tuple = ()

    def __iter__(self):
        return iter(self.pieces)

    def __len__(self):
        return len(self.pieces)

    @property
    def atomic_pieces(self) -> list:
        return [p for p in self.pieces if is_atomic_piece(p)]

    @property
    def rule_pieces(self) -> list:
        return [p for p in self.pieces if isinstance(p, Implication)]

    def union(self) -> Conjunction:
        return conjoin(*self.pieces)

    def check(self):
        """Raise ``AssertionError`` if a piece-normal-form invariant fails."""
        seen = {}
        for i, p in enumerate(self.pieces):
            assert is_normalized(p), f"rule piece {p} has body blank nodes"
            for x in components(p):
                if isinstance(x, Existential):
                    j = seen.setdefault(x, i)
                    assert j == i, f"blank node {x} shared by pieces {j} and {i}"
        return self


def to_pnf(f) -> PieceSet:
    """Split into pieces, then normalize every rule piece."""
    pieces = [
        eliminate_body_existentials(p) if isinstance(p, Implication) else p
        for p in split_pieces(f)
    ]
    return PieceSet(tuple(pieces))
