import random

import pytest

from asplearn.grounder import ground
from asplearn.parser import parse_program
from asplearn.solver import (
    CostVector,
    Ordering,
    answer_sets,
    compare,
    cost,
    is_answer_set,
    iter_answer_sets,
    model_to_text,
    optimal_answer_sets,
    ordering_matches,
)
from asplearn.syntax import Atom

from oracles import brute_answer_sets, brute_optimal, random_ground_program


def models_of(text, limit=None):
    return answer_sets(ground(parse_program(text)), limit=limit)


def names(model):
    return {str(a) for a in model}


def test_even_negation_loop_enumeration_order():
    out = models_of("a :- not b. b :- not a.")
    assert [names(m) for m in out] == [{"a"}, {"b"}]


def test_choice_enumeration_order():
    out = models_of("0 {a} 1.")
    assert [names(m) for m in out] == [{"a"}, set()]


def test_facts_close_under_rules():
    out = models_of("p. q :- p.")
    assert [names(m) for m in out] == [{"p", "q"}]


def test_constraint_filters_models():
    out = models_of("0 {a} 1. :- a.")
    assert [names(m) for m in out] == [set()]


def test_odd_negation_loop_has_no_model():
    assert models_of("a :- not a.") == []


def test_positive_loop_is_unfounded():
    out = models_of("a :- b. b :- a.")
    assert [names(m) for m in out] == [set()]


def test_duplicate_body_literals():
    out = models_of("q. p :- q, q.")
    assert [names(m) for m in out] == [{"p", "q"}]


def test_choice_bounds_force_selection():
    out = models_of("node(1..2). 1 {pick(X)} 1 :- node(X).")
    got = sorted(names(m) & {"pick(1)", "pick(2)"} for m in out)
    assert got == sorted([{"pick(1)", "pick(2)"}])


def test_choice_lower_bound_requires_support():
    # The lower bound must be met whenever the body holds.
    out = models_of("b. 1 {a} 1 :- b.")
    assert [names(m) for m in out] == [{"a", "b"}]


def test_empty_program_has_empty_model():
    out = models_of("")
    assert [names(m) for m in out] == [set()]


def test_limit_stops_enumeration():
    out = models_of("0 {a} 1. 0 {b} 1.", limit=2)
    assert len(out) == 2


def test_is_answer_set_public_api():
    gp = ground(parse_program("a :- not b. b :- not a."))
    assert is_answer_set(gp, {Atom("a")})
    assert is_answer_set(gp, {Atom("b")})
    assert not is_answer_set(gp, {Atom("a"), Atom("b")})
    assert not is_answer_set(gp, set())
    assert not is_answer_set(gp, {Atom("c")})  # atom outside the program


def test_assumptions_restrict_enumeration():
    gp = ground(parse_program("0 {a; b} 2."))
    a, b = gp.index[Atom("a")], gp.index[Atom("b")]
    with_a = [set(m) for m in iter_answer_sets(gp, assume_true=(a,))]
    assert with_a == [{a, b}, {a}]
    without_a = [set(m) for m in iter_answer_sets(gp, assume_false=(a,))]
    assert without_a == [{b}, set()]


def test_assumption_conflict_yields_nothing():
    gp = ground(parse_program("a."))
    a = gp.index[Atom("a")]
    assert list(iter_answer_sets(gp, assume_false=(a,))) == []


# -- cost vectors -----------------------------------------------------------


def test_cost_vector_canonical_form():
    assert CostVector.from_dict({1: 2, 2: 0}) == CostVector(((1, 2),))
    assert CostVector.from_dict({}) == CostVector()
    assert str(CostVector.from_dict({1: 5, 2: 1})) == "1@2 5@1"
    assert str(CostVector()) == "0"


def test_compare_is_lexicographic_by_level():
    lo = CostVector.from_dict({1: 5})
    hi = CostVector.from_dict({2: 1})
    assert compare(lo, hi) is Ordering.LESS
    assert compare(hi, lo) is Ordering.GREATER
    assert compare(lo, lo) is Ordering.EQUAL
    neg = CostVector.from_dict({1: -1})
    assert compare(neg, CostVector()) is Ordering.LESS


def test_ordering_matches_all_operators():
    assert ordering_matches(Ordering.LESS, "<")
    assert ordering_matches(Ordering.LESS, "<=")
    assert ordering_matches(Ordering.LESS, "!=")
    assert not ordering_matches(Ordering.LESS, ">")
    assert not ordering_matches(Ordering.LESS, "=")
    assert ordering_matches(Ordering.EQUAL, "=")
    assert ordering_matches(Ordering.EQUAL, "<=")
    assert ordering_matches(Ordering.EQUAL, ">=")
    assert not ordering_matches(Ordering.EQUAL, "!=")
    assert ordering_matches(Ordering.GREATER, ">=")
    with pytest.raises(ValueError):
        ordering_matches(Ordering.LESS, "<>")


def test_cost_of_interpretation():
    gp = ground(parse_program("a. b. :~ a.[2@1] :~ a, b.[3@2]"))
    vec = cost(gp, {Atom("a"), Atom("b")})
    assert vec.as_dict() == {1: 2, 2: 3}
    assert cost(gp, {Atom("a")}).as_dict() == {1: 2}


# -- optimization -----------------------------------------------------------


def test_optimal_prefers_cheap_model():
    gp = ground(parse_program("1 {a; b} 2. :~ a.[2@1] :~ b.[1@1]"))
    models, best = optimal_answer_sets(gp)
    assert [names(m) for m in models] == [{"b"}]
    assert best.as_dict() == {1: 1}


def test_optimal_respects_levels_over_magnitude():
    text = ":- not a, not b. 0 {a} 1. 0 {b} 1. :~ a.[1@2] :~ b.[5@1]"
    models, best = optimal_answer_sets(ground(parse_program(text)))
    assert [names(m) for m in models] == [{"b"}]
    assert best.as_dict() == {1: 5}


def test_optimal_with_negative_weight_prefers_violation():
    models, best = optimal_answer_sets(ground(parse_program("0 {a} 1. :~ a.[-1@1]")))
    assert [names(m) for m in models] == [{"a"}]
    assert best.as_dict() == {1: -1}


def test_optimal_reports_all_ties():
    gp = ground(parse_program("1 {a; b} 1. :~ a.[1@1] :~ b.[1@1]"))
    models, best = optimal_answer_sets(gp)
    assert sorted(names(m) for m in models) == [{"a"}, {"b"}]
    assert best.as_dict() == {1: 1}


def test_optimal_of_unsat_program():
    models, best = optimal_answer_sets(ground(parse_program("a :- not a.")))
    assert models == [] and best is None


def test_model_to_text_sorts_atoms():
    assert model_to_text({Atom("b"), Atom("a")}) == "a b"


# -- brute-force cross-check ------------------------------------------------


def test_search_matches_brute_force_on_random_programs():
    rng = random.Random(11)
    for _ in range(150):
        gp = ground(random_ground_program(rng, n_atoms=6, n_rules=8))
        got = {frozenset(m) for m in iter_answer_sets(gp)}
        want = set(brute_answer_sets(gp))
        assert got == want, gp.to_text()


def test_optimization_matches_brute_force_on_random_programs():
    rng = random.Random(12)
    for _ in range(120):
        gp = ground(random_ground_program(rng, n_atoms=6, n_rules=9, n_levels=3))
        models, best = optimal_answer_sets(gp)
        got = {frozenset(gp.index[a] for a in m) for m in models}
        want_models, want_cost = brute_optimal(gp)
        assert got == set(want_models), gp.to_text()
        if best is None:
            assert want_cost is None
        else:
            assert best.as_dict() == want_cost, gp.to_text()
