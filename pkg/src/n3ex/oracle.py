"""Finite-universe semantics of existential N3.

Interpretations are Herbrand-style: a finite universe of constants, each
denoting itself, and a set of triples over it.  Variables are substituted by
universe constants only.  This is a testing oracle; everything here is
exponential in the number of variables.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .model import (
    Constant,
    Existential,
    Implication,
    Triple,
    Universal,
    constants,
    flat_conjuncts,
)

SPARE_NS = "urn:n3ex:spare:"
# "auto" enumerates only this many interpretations before switching to SAT
AUTO_ENUMERATION_LIMIT = 2**10


class OracleError(ValueError):
    pass


class BudgetExceeded(OracleError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"enumeration needs {required} interpretations, budget is {budget}"
        )


@dataclass(frozen=True)
class FiniteInterpretation:
    universe: frozenset
    triples: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "universe", frozenset(self.universe))
        object.__setattr__(self, "triples", frozenset(tuple(t) for t in self.triples))
        for t in self.triples:
            for x in t:
                if x not in self.universe:
                    raise OracleError(f"{x} is not in the universe")


class _Index:
    def __init__(self, triples):
        self.triples = triples
        self.by = {}
        for t in triples:
            for i, x in enumerate(t):
                self.by.setdefault((i, x), []).append(t)

    def candidates(self, pattern, b):
        best = None
        for i, x in enumerate(pattern):
            v = b.get(x, x) if not isinstance(x, Constant) else x
            if isinstance(v, Constant):
                lst = self.by.get((i, v), ())
                if best is None or len(lst) < len(best):
                    best = lst
        return self.triples if best is None else best


def _solutions(triples: list, idx: _Index, b: dict):
    """Extensions of ``b`` (variables to constants) embedding ``triples``."""
    if not triples:
        yield b
        return
    best_k, best = 0, None
    for k, t in enumerate(triples):
        c = idx.candidates(t, b)
        if best is None or len(c) < len(best):
            best_k, best = k, c
        if not c:
            return
    pat = triples[best_k]
    rest = triples[:best_k] + triples[best_k + 1:]
    for row in best:
        nb = b
        ok = True
        for x, v in zip(pat, row):
            if isinstance(x, Constant):
                if x != v:
                    ok = False
                    break
            else:
                cur = nb.get(x)
                if cur is None:
                    if nb is b:
                        nb = dict(b)
                    nb[x] = v
                elif cur != v:
                    ok = False
                    break
        if ok:
            yield from _solutions(rest, idx, nb)


def _exists(triples, idx, b) -> bool:
    for _ in _solutions(list(triples), idx, b):
        return True
    return False


def _rule_holds(rule: Implication, idx: _Index, universe) -> bool:
    body_u = {x for t in rule.body for x in t if isinstance(x, Universal)}
    head_only = sorted(
        {x for t in rule.head for x in t if isinstance(x, Universal)} - body_u,
        key=lambda v: v.label,
    )
    seen = set()
    for sol in _solutions(list(rule.body), idx, {}):
        sigma = {u: sol[u] for u in body_u}
        key = frozenset(sigma.items())
        if key in seen:
            continue
        seen.add(key)
        for extra in product(sorted(universe, key=lambda c: c.key), repeat=len(head_only)):
            s = dict(sigma)
            s.update(zip(head_only, extra))
            if not _exists(rule.head, idx, s):
                return False
    return True


def _check_constants(M: FiniteInterpretation, f):
    missing = constants(f) - M.universe
    if missing:
        names = ", ".join(sorted(str(c) for c in missing))
        raise OracleError(f"constants outside the universe: {names}")


def satisfies(M: FiniteInterpretation, f) -> bool:
    """Whether ``M`` is a model of the formula (or collection of formulae)."""
    _check_constants(M, f)
    idx = _Index(list(M.triples))
    items = flat_conjuncts(f)
    atoms = [c for c in items if isinstance(c, Triple)]
    if not _exists(atoms, idx, {}):
        return False
    return all(_rule_holds(r, idx, M.universe)
               for r in items if isinstance(r, Implication))


# ---------------------------------------------------------------------------
# Equivalence
# ---------------------------------------------------------------------------


def spare_constants(n: int, avoid=()) -> list:
    out, k = [], 0
    avoid = set(avoid)
    while len(out) < n:
        c = Constant(f"{SPARE_NS}{k}")
        if c not in avoid:
            out.append(c)
        k += 1
    return out


def oracle_universe(f, g, universe=(), spares: int = 2) -> frozenset:
    base = set(universe) | constants(f) | constants(g)
    return frozenset(base | set(spare_constants(spares, base)))


def _patterns(f) -> list:
    out = []
    for c in flat_conjuncts(f):
        out.extend((c,) if isinstance(c, Triple) else c.body + c.head)
    return out


def relevant_triples(formulae, universe) -> list:
    """Ground triples some pattern of the formulae can be instantiated to.

    Satisfaction never inspects any other triple, so interpretations only
    need to range over subsets of these.
    """
    U = sorted(universe, key=lambda c: c.key)
    out = set()
    for f in formulae:
        for t in _patterns(f):
            choices = [(x,) if isinstance(x, Constant) else U for x in t]
            out.update(product(*choices))
    return sorted(out, key=lambda t: tuple(c.key for c in t))


def _enumerate_witness(f, g, universe, budget):
    rel = relevant_triples([f, g], universe)
    required = 2 ** len(rel)
    if required > budget:
        raise BudgetExceeded(required, budget)
    for bits in product((False, True), repeat=len(rel)):
        M = FiniteInterpretation(universe, [t for t, on in zip(rel, bits) if on])
        if satisfies(M, f) != satisfies(M, g):
            return M
    return None


class _Cnf:
    """Tseitin encoding with constant folding."""

    def __init__(self):
        self.n = 1
        self.clauses = [[1]]  # variable 1 is TRUE
        self.atoms = {}

    TRUE, FALSE = 1, -1

    def atom(self, triple) -> int:
        v = self.atoms.get(triple)
        if v is None:
            self.n += 1
            v = self.atoms[triple] = self.n
        return v

    def _fresh(self) -> int:
        self.n += 1
        return self.n

    def conj(self, lits) -> int:
        lits = set(lits)
        if self.FALSE in lits:
            return self.FALSE
        lits.discard(self.TRUE)
        if not lits:
            return self.TRUE
        if len(lits) == 1:
            return lits.pop()
        if any(-l in lits for l in lits):
            return self.FALSE
        v = self._fresh()
        for l in lits:
            self.clauses.append([-v, l])
        self.clauses.append([v] + [-l for l in lits])
        return v

    def disj(self, lits) -> int:
        return -self.conj(-l for l in lits)


def _ground_conjunction(cnf: _Cnf, triples, U, fixed: dict) -> int:
    """Literal for: some assignment of the remaining variables makes all
    triples true."""
    triples = [tuple(fixed.get(x, x) for x in t) for t in triples]
    free = []
    for t in triples:
        for x in t:
            if not isinstance(x, Constant) and x not in free:
                free.append(x)
    options = []
    for vals in product(U, repeat=len(free)):
        mu = dict(zip(free, vals))
        options.append(cnf.conj(cnf.atom(tuple(mu.get(x, x) for x in t)) for t in triples))
    return cnf.disj(options)


def _ground(cnf: _Cnf, f, U) -> int:
    items = flat_conjuncts(f)
    parts = [_ground_conjunction(cnf, [c for c in items if isinstance(c, Triple)], U, {})]
    for r in items:
        if not isinstance(r, Implication):
            continue
        us = sorted({x for t in r.body + r.head for x in t if isinstance(x, Universal)},
                    key=lambda v: v.label)
        for vals in product(U, repeat=len(us)):
            sigma = dict(zip(us, vals))
            parts.append(cnf.disj([
                -_ground_conjunction(cnf, r.body, U, sigma),
                _ground_conjunction(cnf, r.head, U, sigma),
            ]))
    return cnf.conj(parts)


def _sat_witness(f, g, universe):
    from pysat.solvers import Solver

    U = sorted(universe, key=lambda c: c.key)
    cnf = _Cnf()
    a, b = _ground(cnf, f, U), _ground(cnf, g, U)
    cnf.clauses += [[a, b], [-a, -b]]
    with Solver(name="cadical153", bootstrap_with=cnf.clauses) as s:
        if not s.solve():
            return None
        model = set(l for l in s.get_model() if l > 0)
    return FiniteInterpretation(
        universe, [t for t, v in cnf.atoms.items() if v in model]
    )


def distinguishing_interpretation(f, g, universe=(), spares: int = 2,
                                  method: str = "auto", budget: int = 2**18):
    """An interpretation satisfying exactly one of ``f`` and ``g``, or ``None``.

    ``method`` is ``"enumerate"`` (all subsets of the relevant triples; raises
    :class:`BudgetExceeded` beyond ``budget`` interpretations), ``"sat"``
    (propositional grounding decided by a SAT solver) or ``"auto"``
    (enumerate small cases, else SAT).
    """
    U = oracle_universe(f, g, universe, spares)
    if method == "enumerate":
        return _enumerate_witness(f, g, U, budget)
    if method == "sat":
        return _sat_witness(f, g, U)
    if method == "auto":
        try:
            return _enumerate_witness(f, g, U, min(budget, AUTO_ENUMERATION_LIMIT))
        except BudgetExceeded:
            return _sat_witness(f, g, U)
    raise ValueError(f"unknown method {method!r}")


def n3_equivalent(f, g, universe=(), spares: int = 2, method: str = "auto",
                  budget: int = 2**18) -> bool:
    """Whether ``f`` and ``g`` have the same models over the test universe:
    the given constants, those of ``f`` and ``g``, and ``spares`` fresh ones."""
    return distinguishing_interpretation(f, g, universe, spares, method, budget) is None
