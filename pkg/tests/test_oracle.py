import random

import pytest
from hypothesis import given, strategies as st

from reference_semantics import reference_satisfies
from n3ex.generate import random_formula
from n3ex.model import Triple, iri
from n3ex.oracle import (
    BudgetExceeded,
    FiniteInterpretation,
    OracleError,
    distinguishing_interpretation,
    n3_equivalent,
    oracle_universe,
    relevant_triples,
    satisfies,
    spare_constants,
)
from n3ex.parser import parse_n3
from n3ex.pnf import to_pnf

seeds = st.integers(min_value=0, max_value=10**9)
LUCY, KNOWS, TOM = iri("lucy"), iri("knows"), iri("tom")
K1 = FiniteInterpretation({LUCY, KNOWS, TOM}, {(LUCY, KNOWS, TOM)})


def test_blank_node_is_witnessed():
    assert satisfies(K1, parse_n3(":lucy :knows _:x ."))


def test_vacuous_implication():
    M = FiniteInterpretation({iri("a"), iri("b")}, set())
    assert satisfies(M, parse_n3("{ ?x :a :b } => { :b :b :b } ."))


def test_knows_back_fails_without_reverse_triple():
    assert not satisfies(K1, parse_n3("{ :lucy :knows ?x } => { ?x :knows :lucy } ."))


def test_constants_must_be_in_universe():
    with pytest.raises(OracleError):
        satisfies(K1, parse_n3(":a :b :c ."))
    with pytest.raises(OracleError):
        FiniteInterpretation({LUCY}, {(LUCY, KNOWS, TOM)})


def test_equivalence_examples():
    f = parse_n3(":a :b :c .")
    g = parse_n3(":a :b :d .")
    assert n3_equivalent(f, f)
    assert not n3_equivalent(f, g)
    m = distinguishing_interpretation(f, g, method="enumerate")
    assert satisfies(m, f) != satisfies(m, g)


def test_fact_vs_blank_not_equivalent():
    f = parse_n3(":lucy :knows :tom .")
    g = parse_n3(":lucy :knows _:x .")
    for method in ("enumerate", "sat"):
        assert distinguishing_interpretation(f, g, method=method) is not None


def test_body_blank_elimination_equivalent():
    f = parse_n3("{ _:x :likes :cake } => { :cake :is :good } .")
    assert n3_equivalent(f, to_pnf(f).union(), method="enumerate")
    assert n3_equivalent(f, to_pnf(f).union(), method="sat")


def test_budget_error_names_required_size():
    f = parse_n3("{ ?x ?y ?z } => { ?z ?y ?x } .")
    with pytest.raises(BudgetExceeded) as ei:
        distinguishing_interpretation(f, f, method="enumerate", budget=16)
    assert ei.value.required > 16 and str(ei.value.required) in str(ei.value)


def test_unknown_method():
    f = parse_n3(":a :b :c .")
    with pytest.raises(ValueError):
        n3_equivalent(f, f, method="magic")


def test_spares_are_fresh():
    avoid = set(spare_constants(1))
    s = spare_constants(2, avoid)
    assert len(s) == 2 and avoid.isdisjoint(s)
    U = oracle_universe(parse_n3(":a :b :c ."), parse_n3(":a :b :c ."), spares=2)
    assert len(U) == 5


def test_relevant_triples_cover_patterns():
    U = {iri("a"), iri("b")}
    rel = relevant_triples([parse_n3(":a :a _:x .")], U)
    assert set(rel) == {(iri("a"), iri("a"), iri("a")), (iri("a"), iri("a"), iri("b"))}


@given(seeds)
def test_monotone_for_conjunctions_of_triples(seed):
    rng = random.Random(seed)
    consts = [iri("c0"), iri("c1")]
    f = parse_n3(" ".join(f"{rng.choice([':c0', ':c1', '_:b'])} :c0 {rng.choice([':c1', '_:d'])} ."
                          for _ in range(rng.randint(1, 3))))
    triples = [(s, p, o) for s in consts for p in consts for o in consts]
    small = [t for t in triples if rng.random() < 0.5]
    big = small + [t for t in triples if rng.random() < 0.5]
    if satisfies(FiniteInterpretation(consts, small), f):
        assert satisfies(FiniteInterpretation(consts, big), f)


@given(seeds)
def test_enumeration_and_sat_agree(seed):
    rng = random.Random(seed)
    f = random_formula(rng, n_constants=2, max_triples=3)
    g = random_formula(rng, n_constants=2, max_triples=3)
    try:
        a = distinguishing_interpretation(f, g, spares=1, method="enumerate", budget=2**12)
    except BudgetExceeded:
        return
    b = distinguishing_interpretation(f, g, spares=1, method="sat")
    assert (a is None) == (b is None)
    if b is not None:
        assert satisfies(b, f) != satisfies(b, g)


@given(seeds)
def test_agrees_with_reference(seed):
    rng = random.Random(seed)
    consts = [iri("c0"), iri("c1")]
    f = random_formula(rng, n_constants=2)
    M = FiniteInterpretation(consts, [(s, p, o) for s in consts for p in consts for o in consts
                                      if rng.random() < 0.5])
    assert satisfies(M, f) == reference_satisfies(M, f)


@given(seeds)
def test_more_spares_never_break_equivalence(seed):
    rng = random.Random(seed)
    f = random_formula(rng, n_constants=2, max_triples=3)
    g = to_pnf(f).union()
    if n3_equivalent(f, g, spares=1):
        assert n3_equivalent(f, g, spares=3)


def test_collections_of_formulae():
    M = FiniteInterpretation({iri("a")}, {(iri("a"),) * 3})
    assert satisfies(M, [Triple(iri("a"), iri("a"), iri("a")), parse_n3("{ ?x :a :a } => { :a :a ?x } .")])


def test_more_spares_never_break_equivalence_on_corpus(corpus):
    docs = [parse_n3(p.read_text()) for p in sorted(corpus.glob("*.n3")) if ".bad." not in p.name]
    for f in docs:
        for g in docs:
            if n3_equivalent(f, g, spares=2):
                assert n3_equivalent(f, g, spares=3)
