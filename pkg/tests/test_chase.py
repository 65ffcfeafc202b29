import random

import pytest
from hypothesis import given, settings, strategies as st

from naive import all_matches, exhaustive_hom, naive_chase
from n3ex.chase import (
    ChaseConfig,
    Instance,
    chase,
    critical_instance,
    entails,
    find_hom,
    hom_equivalent,
    is_model,
    is_satisfied,
    matches,
    rulesets_equivalent,
    universal_equivalent,
)
from n3ex.generate import deep_taxonomy
from n3ex.model import RDF_TYPE, Atom, Constant, ExRule, Null, RuleSet, Variable, conjoin, iri, literal
from n3ex.parser import parse_rules
from n3ex.translate import translate_formula

seeds = st.integers(min_value=0, max_value=10**9)
LUCY, KNOWS, TOM, NAME = iri("lucy"), iri("knows"), iri("tom"), iri("name")


def tr(s, p, o):
    return Atom("tr", (s, p, o))


K1 = [tr(LUCY, KNOWS, TOM)]
I1 = K1 + [tr(TOM, KNOWS, LUCY)]
I2 = K1 + [tr(TOM, NAME, literal("Tom"))]
I3 = K1 + [tr(LUCY, KNOWS, Null(1)), tr(Null(1), NAME, literal("Tom"))]

KNOWS_BACK = parse_rules("tr(:lucy, :knows, ?x) -> tr(?x, :knows, :lucy) .").rules[0]
NAMED_TOM = parse_rules('tr(?x, :knows, :tom) -> tr(?x, :knows, !y), tr(!y, :name, "Tom") .').rules[0]
SOMEONE = parse_rules("-> tr(:lucy, :knows, !x) .").rules[0]


# homomorphisms -------------------------------------------------------------


def test_hom_examples():
    h = find_hom(I3, I2)
    assert h[Null(1)] == TOM and h[LUCY] == LUCY
    assert find_hom(I2, I3) is None
    assert find_hom([], I2) == {}


def test_hom_equivalence_examples():
    assert not hom_equivalent(I3, I2)
    assert hom_equivalent(I2, I2)
    assert hom_equivalent(I2, I2 + [tr(LUCY, KNOWS, Null(7))])


def test_hom_with_fixed_terms():
    assert find_hom([tr(LUCY, KNOWS, Null(1))], I2, fixed={Null(1): LUCY}) is None
    assert find_hom([tr(LUCY, KNOWS, Null(1))], I2, fixed={Null(1): TOM}) is not None


def _random_atoms(rng, n, consts, nulls):
    terms = consts + nulls
    out = set()
    while len(out) < n:
        p = rng.choice(["p", "q"])
        out.add(Atom(p, (rng.choice(terms), rng.choice(terms))))
    return list(out)


@given(seeds)
def test_find_hom_agrees_with_exhaustive_search(seed):
    rng = random.Random(seed)
    consts = [iri(f"c{i}") for i in range(3)]
    A = _random_atoms(rng, rng.randint(1, 4), consts, [Null(i) for i in range(1, 4)])
    I = _random_atoms(rng, rng.randint(1, 8), consts, [Null(i) for i in range(10, 13)])
    got, want = find_hom(A, I), exhaustive_hom(A, I)
    assert (got is None) == (want is None)
    if got is not None:
        assert all(Atom(a.predicate, tuple(got[x] for x in a.args)) in set(I) for a in A)
        assert all(got[c] == c for c in consts if c in got)


# matches and satisfaction --------------------------------------------------


def test_matches_examples():
    assert list(matches(KNOWS_BACK, K1)) == [{Variable("x"): TOM}]
    assert list(matches(KNOWS_BACK, [])) == []
    assert list(matches(SOMEONE, I1)) == [{}]
    assert list(matches(SOMEONE, [])) == [{}]


def test_satisfaction_examples():
    assert is_satisfied(KNOWS_BACK, I1)
    assert not is_satisfied(KNOWS_BACK, K1)
    assert is_satisfied(NAMED_TOM, I3)
    assert not is_satisfied(NAMED_TOM, K1)
    assert is_satisfied(SOMEONE, [tr(LUCY, KNOWS, iri("tim"))])


# the chase -----------------------------------------------------------------


def test_single_firing_adds_shared_null():
    inst, rep = chase([NAMED_TOM], K1)
    assert rep.complete and rep.steps == 1 and rep.nulls == 1
    new = set(inst) - set(K1)
    assert len(new) == 2
    (n,) = {x for a in new for x in a.args if isinstance(x, Null)}
    assert new == {tr(LUCY, KNOWS, n), tr(n, NAME, literal("Tom"))}
    assert hom_equivalent(inst, I3)


def test_empty_rule_set_returns_database():
    inst, rep = chase([], I1)
    assert set(inst) == set(I1) and rep.steps == 0 and rep.derived == 0


@pytest.mark.parametrize("depth", [1, 2, 3, 4, 5])
def test_deep_taxonomy_small(depth):
    facts, rules = deep_taxonomy(depth)
    rs = translate_formula(conjoin(facts, rules))
    inst, rep = chase(rs)
    a = Constant(RDF_TYPE)
    types = {x for x in inst if x.args[1] == a}
    assert len(types) == 3 * depth + 1
    assert tr(iri("i"), a, iri(f"N{depth}")) in inst
    brute, complete = naive_chase(list(rs), [])
    assert complete and set(brute) == set(inst)


def test_restricted_chase_is_noop_on_models():
    inst, rep = chase([KNOWS_BACK, NAMED_TOM], I3 + [tr(TOM, KNOWS, LUCY), tr(Null(1), KNOWS, LUCY)],
                      allow_nulls=True)
    assert rep.steps == 0


def test_database_must_be_null_free():
    with pytest.raises(ValueError):
        chase([KNOWS_BACK], I3)


def test_truncation_is_reported():
    loop = parse_rules("p(?x) -> e(?x, !y), p(!y) .")
    _, rep = chase(loop, [Atom("p", (iri("a"),))], ChaseConfig(max_steps=25))
    assert rep.status == "truncated" and rep.reason == "max_steps" and rep.steps == 25
    _, rep = chase(loop, [Atom("p", (iri("a"),))], ChaseConfig(max_nulls=10))
    assert rep.status == "truncated" and rep.reason == "max_nulls" and rep.nulls == 10


def test_exact_step_budget_is_not_truncation():
    rules = parse_rules("p(?x) -> q(?x) .\nq(?x) -> r(?x) .")
    _, rep = chase(rules, [Atom("p", (iri("a"),))], ChaseConfig(max_steps=2))
    assert rep.complete and rep.steps == 2


def test_config_validation():
    with pytest.raises(ValueError):
        ChaseConfig(max_steps=0)
    with pytest.raises(ValueError):
        ChaseConfig(strategy="skolem")


def test_oblivious_fires_satisfied_triggers():
    # the only match, x = :lucy, is already satisfied through :ann
    ann = iri("ann")
    db = K1 + [tr(LUCY, KNOWS, ann), tr(ann, NAME, literal("Tom"))]
    _, restricted = chase([NAMED_TOM], db)
    _, oblivious = chase([NAMED_TOM], db, ChaseConfig(strategy="oblivious"))
    assert restricted.steps == 0
    assert oblivious.steps == 1


def test_facts_as_rules_gives_same_result():
    rs = parse_rules("tr(:lucy, :knows, :tom) .\n") + RuleSet((KNOWS_BACK, NAMED_TOM))
    a, _ = chase(rs)
    b, rep = chase(rs, config=ChaseConfig(facts_as_rules=True))
    assert set(a) == set(b) and rep.initial_atoms == 0


def test_instance_indexes_and_copy():
    inst = Instance(I3)
    assert len(inst) == 3 and inst.nulls() == {Null(1)}
    assert inst.add(I3[0]) is False
    c = inst.copy()
    c.add(tr(TOM, KNOWS, LUCY))
    assert len(inst) == 3 and len(c) == 4
    assert set(inst.predicates()) == {"tr"}


# random rule sets against the naive oracle -------------------------------


def _random_program(rng):
    consts = [iri(f"c{i}") for i in range(rng.randint(1, 6))]
    x, y = Variable("x"), Variable("y")
    z = Variable("z", "existential")
    preds = {"p": 1, "q": 2, "r": 2}

    def atom(vars_):
        p = rng.choice(list(preds))
        return Atom(p, tuple(rng.choice(vars_) if vars_ and rng.random() < 0.8 else rng.choice(consts)
                             for _ in range(preds[p])))

    rules = []
    for _ in range(rng.randint(1, 4)):
        body = tuple(atom([x, y]) for _ in range(rng.randint(1, 2)))
        bvars = sorted({v for a in body for v in a.args if isinstance(v, Variable)}, key=str)
        pool = bvars + ([z] if rng.random() < 0.4 else [])
        head = tuple(atom(pool) for _ in range(rng.randint(1, 2)))
        rules.append(ExRule(body, head))
    db = [Atom(p, tuple(rng.choice(consts) for _ in range(n)))
          for p, n in (rng.choice(list(preds.items())) for _ in range(rng.randint(2, 10)))]
    return rules, db


@settings(max_examples=200)
@given(seeds)
def test_chase_matches_naive_saturation(seed):
    rules, db = _random_program(random.Random(seed))
    inst, rep = chase(rules, db, ChaseConfig(max_steps=300, max_nulls=300, provenance=True))
    if not rep.complete:
        return
    brute, complete = naive_chase(rules, db, max_levels=60)
    if not complete:
        return
    assert hom_equivalent(inst, brute)
    assert is_model(rules, inst, db)
    assert set(db) <= set(inst)
    # every derived atom has a recorded derivation that holds in the result
    for atom, (rule, binding) in rep.provenance.items():
        assert all(Atom(a.predicate, tuple(binding.get(t, t) for t in a.args)) in inst
                   for a in rule.body)
        assert atom in inst


def test_null_freshness():
    rules = parse_rules("p(?x) -> q(?x, !y) .\nq(?x, ?y) -> r(?y, !z) .")
    inst, rep = chase(rules, [Atom("p", (iri("a"),)), Atom("p", (iri("b"),))],
                      ChaseConfig(provenance=True))
    seen = 0
    for atom, (rule, binding) in sorted(rep.provenance.items(), key=lambda kv: max(
            [x.id for x in kv[0].args if isinstance(x, Null)] or [0])):
        new = [x.id for x in atom.args if isinstance(x, Null) and x not in binding.values()]
        for n in new:
            assert n > seen
            seen = n
    assert rep.nulls == 4


# rule-set comparison -------------------------------------------------------


def test_entailment_and_equivalence():
    rs = RuleSet((KNOWS_BACK, NAMED_TOM))
    assert entails(rs, KNOWS_BACK) is True
    assert entails([KNOWS_BACK], NAMED_TOM) is False
    assert rulesets_equivalent(rs, rs + RuleSet((KNOWS_BACK,))) is True
    assert rulesets_equivalent(rs, RuleSet((KNOWS_BACK,))) is False


def test_inconclusive_equivalence():
    # deciding whether loop entails the q-rule needs an infinite chase
    loop = parse_rules("p(?x) -> p(!y), e(?x, !y) .")
    q_rule = parse_rules("p(?x) -> e(?x, !y), q(!y) .")
    assert rulesets_equivalent(loop, loop + q_rule, ChaseConfig(max_steps=50)) is None


def test_universal_equivalence_over_databases():
    a = parse_rules("p(?x) -> q(?x) .")
    b = parse_rules("p(?x) -> q(?x), q(?x) .")
    assert universal_equivalent(a, b, [Atom("p", (iri("c"),))]) is True
    crit = critical_instance(list(a) + list(b))
    assert universal_equivalent(a, b, crit) is True
    c = parse_rules("p(?x) -> r(?x) .")
    assert universal_equivalent(a, c, [Atom("p", (iri("c"),))]) is False


def test_all_matches_oracle_consistency():
    got = sorted(map(lambda m: sorted(m.items(), key=str), matches(NAMED_TOM, I1)), key=str)
    want = sorted(map(lambda m: sorted(m.items(), key=str), all_matches(NAMED_TOM.body, I1)), key=str)
    assert got == want
