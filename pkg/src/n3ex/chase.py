"""Homomorphisms, matches and the restricted chase.

Internally an atom is ``(predicate, args)`` where a constant is its
:attr:`Constant.key` string and a labeled null is a positive ``int``.  Rule
bodies and heads are compiled into patterns whose arguments are either a
constant key (``str``) or a slot number (``int``) into a binding list.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator

from .model import Atom, Constant, ExRule, Null, RuleSet, Variable

log = logging.getLogger(__name__)


@lru_cache(maxsize=1 << 16)
def _decode_key(key: str) -> Constant:
    return Constant.from_key(key)


def encode_term(t):
    if isinstance(t, Constant):
        return t.key
    if isinstance(t, Null):
        return t.id
    raise TypeError(f"not a ground term: {t!r}")


def decode_term(v):
    if v.__class__ is int:
        return Null(v)
    return _decode_key(v)


class Instance:
    """Set of ground atoms over constants and nulls, indexed by predicate and
    by ``(predicate, position, term)``."""

    def __init__(self, atoms: Iterable[Atom] = ()):
        self._atoms = set()
        self._by_pred = defaultdict(list)
        self._by_term = defaultdict(list)
        self.max_null = 0
        for a in atoms:
            self.add(a)

    # -- encoded access ----------------------------------------------------
    def _add(self, pred: str, args: tuple) -> bool:
        key = (pred, args)
        if key in self._atoms:
            return False
        self._atoms.add(key)
        self._by_pred[pred].append(args)
        by_term = self._by_term
        for i, v in enumerate(args):
            by_term[(pred, i, v)].append(args)
            if v.__class__ is int and v > self.max_null:
                self.max_null = v
        return True

    def _candidates(self, pred: str, args: tuple, b: list) -> list:
        best = None
        by_term = self._by_term
        for i, a in enumerate(args):
            v = a if a.__class__ is str else b[a]
            if v is not None:
                lst = by_term.get((pred, i, v))
                if lst is None:
                    return ()
                if best is None or len(lst) < len(best):
                    best = lst
        if best is None:
            return self._by_pred.get(pred, ())
        return best

    # -- public API --------------------------------------------------------
    def add(self, atom: Atom) -> bool:
        if not atom.is_ground:
            raise ValueError(f"instances hold ground atoms only: {atom}")
        return self._add(atom.predicate, tuple(encode_term(t) for t in atom.args))

    def __contains__(self, atom: Atom) -> bool:
        try:
            enc = tuple(encode_term(t) for t in atom.args)
        except TypeError:
            return False
        return (atom.predicate, enc) in self._atoms

    def __len__(self):
        return len(self._atoms)

    def __iter__(self) -> Iterator[Atom]:
        for pred, rows in self._by_pred.items():
            for args in rows:
                yield Atom(pred, tuple(map(decode_term, args)))

    def atoms(self) -> set:
        return set(self)

    def predicates(self) -> list:
        return list(self._by_pred)

    def copy(self) -> "Instance":
        out = Instance()
        for pred, rows in self._by_pred.items():
            for args in rows:
                out._add(pred, args)
        return out

    def nulls(self) -> set:
        return {Null(v) for (_, args) in self._atoms for v in args if v.__class__ is int}

    def __repr__(self):
        return f"Instance({len(self)} atoms)"


def as_instance(x) -> Instance:
    return x if isinstance(x, Instance) else Instance(x)


# ---------------------------------------------------------------------------
# Pattern compilation and joins
# ---------------------------------------------------------------------------


def _compile(atoms, slots: dict) -> list:
    """Turn atoms into patterns; variables and nulls get slots."""
    pats = []
    for a in atoms:
        args = []
        for t in a.args:
            if isinstance(t, (Variable, Null)):
                args.append(slots.setdefault(t, len(slots)))
            else:
                args.append(t.key)
        pats.append((a.predicate, tuple(args)))
    return pats


def _unify(args: tuple, row: tuple, b: list, newly: list) -> bool:
    for a, v in zip(args, row):
        if a.__class__ is str:
            if a != v:
                return False
        else:
            cur = b[a]
            if cur is None:
                b[a] = v
                newly.append(a)
            elif cur != v:
                return False
    return True


def _solve(pats: list, inst: Instance, b: list, remaining: tuple) -> Iterator[list]:
    """All extensions of binding ``b`` mapping ``pats[remaining]`` into ``inst``.

    Picks the pattern with the fewest index candidates at each level.  The
    same list object is yielded each time; copy it to keep a solution.
    """
    if not remaining:
        yield b
        return
    best_i, best = None, None
    for i in remaining:
        pred, args = pats[i]
        cands = inst._candidates(pred, args, b)
        if not cands:
            return
        if best is None or len(cands) < len(best):
            best_i, best = i, cands
    rest = tuple(i for i in remaining if i != best_i)
    args = pats[best_i][1]
    for row in best:
        newly = []
        if _unify(args, row, b, newly):
            yield from _solve(pats, inst, b, rest)
        for s in newly:
            b[s] = None


def _components(pats: list) -> list:
    """Group pattern indices by shared slots."""
    parent = list(range(len(pats)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner = {}
    for i, (_, args) in enumerate(pats):
        for a in args:
            if a.__class__ is int:
                j = owner.setdefault(a, i)
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups = defaultdict(list)
    for i in range(len(pats)):
        groups[find(i)].append(i)
    return list(groups.values())


def find_hom(A, I, fixed: dict | None = None) -> dict | None:
    """A homomorphism from the atom set ``A`` into ``I``, or ``None``.

    Variables and nulls of ``A`` may map to any term; constants map to
    themselves.  ``fixed`` pre-assigns images to some variables or nulls.
    The result maps every term of ``A`` to its image.
    """
    inst = as_instance(I)
    A = list(A)
    slots = {}
    pats = _compile(A, slots)
    b = [None] * len(slots)
    for t, img in (fixed or {}).items():
        if t in slots:
            b[slots[t]] = encode_term(img)
    # independent groups of patterns can be solved one after the other
    for group in _components(pats):
        if not any(a.__class__ is int for i in group for a in pats[i][1]):
            if all(pats[i] in inst._atoms for i in group):
                continue
            return None
        gen = _solve(pats, inst, b, tuple(group))
        sol = next(gen, None)
        if sol is None:
            return None
        snapshot = list(sol)
        gen.close()
        b[:] = snapshot
    out = {}
    for a in A:
        for t in a.args:
            out[t] = decode_term(b[slots[t]]) if t in slots else t
    return out


def matches(rule: ExRule, I) -> Iterator[dict]:
    """Every homomorphism from the body of ``rule`` into ``I``."""
    inst = as_instance(I)
    slots = {}
    pats = _compile(rule.body, slots)
    names = list(slots)
    b = [None] * len(slots)
    for sol in _solve(pats, inst, b, tuple(range(len(pats)))):
        yield {names[i]: decode_term(v) for i, v in enumerate(sol)}


def is_satisfied(rule: ExRule, I) -> bool:
    inst = as_instance(I)
    return all(find_hom(rule.head, inst, fixed=h) is not None for h in matches(rule, inst))


def is_model(rules, I, database=()) -> bool:
    inst = as_instance(I)
    return all(a in inst for a in database) and all(is_satisfied(r, inst) for r in rules)


def hom_equivalent(I, J) -> bool:
    I, J = as_instance(I), as_instance(J)
    return find_hom(I, J) is not None and find_hom(J, I) is not None


# ---------------------------------------------------------------------------
# The chase
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChaseConfig:
    max_steps: int = 10**7
    max_nulls: int = 10**6
    strategy: str = "restricted"
    facts_as_rules: bool = False
    provenance: bool = False

    def __post_init__(self):
        if self.max_steps <= 0 or self.max_nulls <= 0:
            raise ValueError("chase limits must be positive")
        if self.strategy not in ("restricted", "oblivious"):
            raise ValueError(f"unknown chase strategy {self.strategy!r}")


@dataclass
class ChaseReport:
    status: str = "complete"
    steps: int = 0
    nulls: int = 0
    atoms: int = 0
    initial_atoms: int = 0
    rounds: int = 0
    reason: str = ""
    # derived atom -> (rule, body binding), filled when config.provenance is set
    provenance: dict = field(default_factory=dict, repr=False)

    @property
    def derived(self) -> int:
        return self.atoms - self.initial_atoms

    @property
    def complete(self) -> bool:
        return self.status == "complete"


class _CompiledRule:
    __slots__ = ("rule", "index", "body", "head", "nslots", "ex_slots",
                 "body_slots", "var_of_slot", "ground_head")

    def __init__(self, rule: ExRule, index: int):
        self.rule = rule
        self.index = index
        slots = {}
        self.body = _compile(rule.body, slots)
        self.body_slots = len(slots)
        self.head = _compile(rule.head, slots)
        self.nslots = len(slots)
        self.ex_slots = tuple(range(self.body_slots, self.nslots))
        self.var_of_slot = list(slots)
        self.ground_head = not self.ex_slots


class _Chaser:
    def __init__(self, rules, inst: Instance, cfg: ChaseConfig):
        self.inst = inst
        self.cfg = cfg
        self.rules = [_CompiledRule(r, i) for i, r in enumerate(rules)]
        self.report = ChaseReport(initial_atoms=len(inst))
        self.next_null = inst.max_null + 1
        self.fired = defaultdict(set) if cfg.strategy == "oblivious" else None
        # (pred, constant positions) -> {constant values -> [(rule, body index)]}
        self.triggers = defaultdict(dict)
        for cr in self.rules:
            for j, (pred, args) in enumerate(cr.body):
                pos = tuple(i for i, a in enumerate(args) if a.__class__ is str)
                vals = tuple(args[i] for i in pos)
                self.triggers[pred].setdefault((pos, vals), []).append((cr, j))
        self.signatures = {
            pred: sorted({pos for (pos, _) in table})
            for pred, table in self.triggers.items()
        }

    def _head_satisfied(self, cr: _CompiledRule, b: list) -> bool:
        inst = self.inst
        if cr.ground_head:
            atoms = inst._atoms
            for pred, args in cr.head:
                row = tuple(a if a.__class__ is str else b[a] for a in args)
                if (pred, row) not in atoms:
                    return False
            return True
        hb = b + [None] * (cr.nslots - len(b))
        for _ in _solve(cr.head, inst, hb, tuple(range(len(cr.head)))):
            return True
        return False

    def _fire(self, cr: _CompiledRule, b: list, new: list) -> bool:
        """Apply ``cr`` for binding ``b``; False once a limit is reached."""
        cfg, rep = self.cfg, self.report
        if rep.steps >= cfg.max_steps:
            rep.status, rep.reason = "truncated", "max_steps"
            return False
        if cr.ex_slots:
            if rep.nulls + len(cr.ex_slots) > cfg.max_nulls:
                rep.status, rep.reason = "truncated", "max_nulls"
                return False
            hb = b + [None] * len(cr.ex_slots)
            for s in cr.ex_slots:
                hb[s] = self.next_null
                self.next_null += 1
            rep.nulls += len(cr.ex_slots)
        else:
            hb = b
        rep.steps += 1
        for pred, args in cr.head:
            row = tuple(a if a.__class__ is str else hb[a] for a in args)
            if self.inst._add(pred, row):
                new.append((pred, row))
                if cfg.provenance:
                    rep.provenance[Atom(pred, tuple(map(decode_term, row)))] = (
                        cr.rule,
                        {v: decode_term(b[i]) for i, v in enumerate(cr.var_of_slot[: cr.body_slots])},
                    )
        return True

    def _consider(self, cr: _CompiledRule, b: list, new: list) -> bool:
        if self.fired is not None:
            key = tuple(b[: cr.body_slots])
            if key in self.fired[cr.index]:
                return True
            self.fired[cr.index].add(key)
        elif self._head_satisfied(cr, b):
            return True
        return self._fire(cr, b, new)

    def _lookup(self, pred: str, row: tuple):
        table = self.triggers.get(pred)
        if table is None:
            return ()
        out = []
        for pos in self.signatures[pred]:
            hit = table.get((pos, tuple(row[i] for i in pos)))
            if hit:
                out.extend(hit)
        return out

    def run(self) -> ChaseReport:
        inst, rep = self.inst, self.report
        delta = [(pred, args) for pred, rows in inst._by_pred.items() for args in rows]
        # body-less rules have exactly one (empty) match
        for cr in self.rules:
            if not cr.body and not self._consider(cr, [], delta):
                return self._finish()
        while delta:
            rep.rounds += 1
            pending = defaultdict(list)
            for pred, row in delta:
                for cr, j in self._lookup(pred, row):
                    pending[cr.index].append((j, row))
            delta = []
            for idx in sorted(pending):
                cr = self.rules[idx]
                rest_all = tuple(range(len(cr.body)))
                for j, row in pending[idx]:
                    b = [None] * cr.body_slots
                    if not _unify(cr.body[j][1], row, b, []):
                        continue
                    rest = rest_all[:j] + rest_all[j + 1:]
                    found = [list(s) for s in _solve(cr.body, inst, b, rest)]
                    for sol in found:
                        if not self._consider(cr, sol, delta):
                            return self._finish()
            log.debug("round %d: %d new atoms", rep.rounds, len(delta))
        return self._finish()

    def _finish(self) -> ChaseReport:
        self.report.atoms = len(self.inst)
        return self.report


def chase(rules, database=(), config: ChaseConfig | None = None,
          allow_nulls: bool = False) -> tuple:
    """Run the chase of ``rules`` over ``database``.

    Returns ``(instance, report)``.  Hitting a limit is reported through
    ``report.status == "truncated"``, not raised.
    """
    cfg = config or ChaseConfig()
    rules = list(rules)
    if isinstance(database, Instance):
        inst = database.copy()
    else:
        inst = Instance(database)
    if inst.max_null and not allow_nulls:
        raise ValueError("databases must not contain nulls")
    if not cfg.facts_as_rules:
        for r in rules:
            if r.is_fact:
                for a in r.head:
                    inst.add(a)
        rules = [r for r in rules if not r.is_fact]
    report = _Chaser(rules, inst, cfg).run()
    return inst, report


# ---------------------------------------------------------------------------
# Rule-set comparison through universal models
# ---------------------------------------------------------------------------


def entails(rules, rule: ExRule, config: ChaseConfig | None = None) -> bool | None:
    """Whether every model of ``rules`` satisfies ``rule``.

    The body of ``rule`` is frozen into a database of fresh nulls, chased,
    and the head checked against the result under the frozen binding.
    ``None`` if the chase was truncated.
    """
    frozen = {}
    for a in rule.body:
        for t in a.args:
            if isinstance(t, Variable):
                frozen.setdefault(t, Null(len(frozen) + 1))
    db = Instance(
        Atom(a.predicate, tuple(frozen.get(t, t) for t in a.args)) for a in rule.body
    )
    inst, rep = chase(rules, db, config, allow_nulls=True)
    if find_hom(rule.head, inst, fixed=frozen) is not None:
        return True
    return False if rep.complete else None


def rulesets_equivalent(rs1, rs2, config: ChaseConfig | None = None) -> bool | None:
    """Same models, decided by mutual entailment; ``None`` if inconclusive."""
    verdict = True
    for src, dst in ((rs1, rs2), (rs2, rs1)):
        src = list(src)
        for r in dst:
            e = entails(src, r, config)
            if e is False:
                return False
            if e is None:
                verdict = None
    return verdict


def universal_equivalent(rs1, rs2, database=(), config: ChaseConfig | None = None):
    """Hom-equivalence of the chase results of both rule sets over one database.

    ``None`` if either chase is truncated.
    """
    i1, r1 = chase(rs1, database, config)
    i2, r2 = chase(rs2, database, config)
    if not (r1.complete and r2.complete):
        return None
    return hom_equivalent(i1, i2)


def critical_instance(rules, extra: Constant | None = None) -> Instance:
    """Every atom over the rules' predicates and constants plus one extra."""
    rules = list(rules)
    consts = {t for r in rules for a in r.body + r.head for t in a.args
              if isinstance(t, Constant)}
    consts.add(extra or Constant("urn:n3ex:critical"))
    consts = sorted(consts, key=lambda c: c.key)
    preds = {}
    for r in rules:
        for a in r.body + r.head:
            preds.setdefault(a.predicate, a.arity)
    return Instance(
        Atom(p, args) for p, n in preds.items() for args in product(consts, repeat=n)
    )
