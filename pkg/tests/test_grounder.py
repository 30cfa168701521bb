"""Grounder tests, including the naive full-instantiation oracle."""
import itertools
import random

import pytest

from asplearn.errors import GroundingError
from asplearn.grounder import (
    GChoice,
    GConstraint,
    GNormal,
    GWeak,
    ground,
    herbrand_base,
)
from asplearn.parser import parse_program
from asplearn.syntax import (
    Atom,
    ChoiceRule,
    Comparison,
    Constant,
    Literal,
    NormalRule,
    Program,
)


def test_choice_rule_grounds_per_edge():
    gp = ground(parse_program(
        "edge(1,2). edge(2,3). edge(3,4). edge(4,1).\n"
        "0 { in(V0,V1) } 1 :- edge(V0,V1)."
    ))
    choices = [r for r in gp.rules if isinstance(r, GChoice)]
    assert len(choices) == 4
    heads = {gp.atoms[r.heads[0]] for r in choices}
    assert heads == {
        Atom("in", (Constant(1), Constant(2))),
        Atom("in", (Constant(2), Constant(3))),
        Atom("in", (Constant(3), Constant(4))),
        Atom("in", (Constant(4), Constant(1))),
    }


def test_comparisons_evaluated_away():
    gp = ground(parse_program("p(1). p(2). q(X,Y) :- p(X), p(Y), X < Y."))
    normals = [r for r in gp.rules if isinstance(r, GNormal) and r.pos]
    assert len(normals) == 1
    assert "q(1,2)" in gp.to_text()
    assert "<" not in gp.to_text()


def test_underivable_negative_literal_dropped():
    gp = ground(parse_program("p :- not q."))
    assert gp.rules == [GNormal(head=0, pos=(), neg=())]
    assert gp.atoms == [Atom("p")]


def test_derivable_negative_literal_kept():
    gp = ground(parse_program("0 {q} 1. p :- not q."))
    normals = [r for r in gp.rules if isinstance(r, GNormal)]
    assert len(normals) == 1
    assert normals[0].neg == (gp.index[Atom("q")],)


def test_rule_with_underivable_positive_body_pruned():
    gp = ground(parse_program("p :- q."))
    assert gp.rules == []


def test_recursive_rules_reach_fixpoint():
    gp = ground(parse_program(
        "edge(1,2). edge(2,3).\n"
        "reach(Y) :- edge(1,Y).\n"
        "reach(Y) :- edge(X,Y), reach(X)."
    ))
    derived = {str(a) for a in gp.atoms if a.pred == "reach"}
    assert derived == {"reach(2)", "reach(3)"}


def test_weak_constraint_instances_are_deduplicated():
    gp = ground(parse_program("p(a).\n:~ p(X).[1@1, X]\n:~ p(Y).[1@1, Y]"))
    assert len(gp.weaks) == 1


def test_weak_constraint_weight_must_ground_to_integer():
    with pytest.raises(GroundingError):
        ground(parse_program("p(a).\n:~ p(X).[X@1]"))


def test_atom_ids_first_seen_and_deterministic():
    text = "a :- not b. b :- not a. c :- a."
    gp1 = ground(parse_program(text))
    gp2 = ground(parse_program(text))
    assert gp1.atoms == gp2.atoms
    assert gp1.atoms[0] == Atom("a")
    assert gp1.atoms[1] == Atom("b")


def test_rule_cap_raises():
    program = parse_program("p(1..30). q(X,Y) :- p(X), p(Y).")
    with pytest.raises(GroundingError):
        ground(program, max_rules=100)


def test_atom_cap_raises():
    program = parse_program("p(1..30). q(X,Y) :- p(X), p(Y).")
    with pytest.raises(GroundingError):
        ground(program, max_atoms=50)


def test_term_generating_recursion_rejected():
    program = parse_program("p(a). p(f(X)) :- p(X).")
    with pytest.raises(GroundingError):
        ground(program)


def test_herbrand_base_of_graph_facts():
    program = parse_program("node(1..4). edge(1,2). edge(2,3). edge(3,4). edge(4,1).")
    base = herbrand_base(program)
    assert len(base) == 4 + 16
    assert Atom("edge", (Constant(3), Constant(1))) in base


def test_herbrand_base_simple():
    base = herbrand_base(parse_program("p(a). q(X) :- p(X)."))
    assert base == {Atom("p", (Constant("a"),)), Atom("q", (Constant("a"),))}
    assert herbrand_base(Program()) == set()


def test_herbrand_base_with_functions():
    base = herbrand_base(parse_program("p(f(a))."))
    assert Atom("p", (Constant("a"),)) in base
    assert len(base) == 2  # p(a) and p(f(a))


# ---------------------------------------------------------------------------
# Naive-instantiation oracle: enumerate every substitution over the
# constants of the program, iterate to a fixpoint, and compare.


def naive_ground(program):
    constants = set()
    for rule in program:
        atoms = list(rule.body)
        from asplearn.syntax import rule_head_atoms

        for a in rule_head_atoms(rule):
            for arg in a.args:
                if isinstance(arg, Constant):
                    constants.add(arg)
        for elem in rule.body:
            if isinstance(elem, Comparison):
                for t in (elem.left, elem.right):
                    if isinstance(t, Constant):
                        constants.add(t)
            else:
                for arg in elem.atom.args:
                    if isinstance(arg, Constant):
                        constants.add(arg)
    constants = sorted(constants, key=lambda c: str(c.value))
    possible = set()
    instances = set()
    changed = True
    while changed:
        changed = False
        for idx, rule in enumerate(program):
            from asplearn.syntax import rule_vars, rule_head_atoms

            vs = sorted(rule_vars(rule), key=lambda v: v.name)
            for combo in itertools.product(constants, repeat=len(vs)):
                theta = dict(zip(vs, combo))
                ok = True
                for elem in rule.body:
                    if isinstance(elem, Comparison):
                        if not elem.apply(theta).holds():
                            ok = False
                            break
                    elif elem.positive and elem.atom.apply(theta) not in possible:
                        ok = False
                        break
                if not ok:
                    continue
                key = (idx, tuple(sorted((v.name, t) for v, t in theta.items())))
                if key not in instances:
                    instances.add(key)
                    changed = True
                for h in rule_head_atoms(rule):
                    ga = h.apply(theta)
                    if ga not in possible:
                        possible.add(ga)
                        changed = True
    return possible, instances


def _random_program(rng):
    preds = [("p", 1), ("q", 1), ("r", 2), ("s", 0)]
    consts = [Constant(v) for v in ("a", "b", 1, 2)]
    variables = ["X", "Y"]
    rules = []
    for _ in range(rng.randint(2, 7)):
        kind = rng.choice(["fact", "normal", "choice", "constraint"])
        if kind == "fact":
            pred, ar = rng.choice(preds)
            rules.append("%s%s." % (pred, _args(rng, ar, consts, [])))
            continue
        pred, ar = rng.choice(preds)
        head = "%s%s" % (pred, _args(rng, ar, consts, variables))
        body = []
        for _ in range(rng.randint(1, 3)):
            bp, bar = rng.choice(preds)
            neg = rng.random() < 0.3
            body.append(("not " if neg else "") + "%s%s" % (bp, _args(rng, bar, consts, variables)))
        text_body = ", ".join(body)
        if kind == "normal":
            rules.append("%s :- %s." % (head, text_body))
        elif kind == "choice":
            rules.append("0 {%s} 1 :- %s." % (head, text_body))
        else:
            rules.append(":- %s." % text_body)
    text = "\n".join(rules)
    try:
        return parse_program(text)
    except Exception:
        return None


def _args(rng, arity, consts, variables):
    if arity == 0:
        return ""
    parts = []
    for _ in range(arity):
        if variables and rng.random() < 0.6:
            parts.append(rng.choice(variables))
        else:
            parts.append(str(rng.choice(consts)))
    return "(%s)" % ",".join(parts)


def test_against_naive_instantiation_oracle():
    rng = random.Random(7)
    checked = 0
    while checked < 60:
        program = _random_program(rng)
        if program is None:
            continue
        checked += 1
        possible_naive, instances_naive = naive_ground(program)
        grounder = __import__("asplearn.grounder", fromlist=["_Grounder"])._Grounder(
            program, 1_000_000, 100_000
        )
        grounder.run()
        assert set(grounder.possible) == possible_naive
        assert set(grounder.instances) == instances_naive
