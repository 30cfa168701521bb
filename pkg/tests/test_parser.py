"""Parser and pretty-printer tests, including the text round-trip property."""
import pytest
from hypothesis import given, settings, strategies as st

from asplearn.errors import ParseError, SafetyError
from asplearn.parser import parse_atom, parse_program, parse_range_facts, parse_rule
from asplearn.syntax import (
    Atom,
    ChoiceRule,
    Comparison,
    Constant,
    Compound,
    HardConstraint,
    Literal,
    NormalRule,
    Program,
    Variable,
    WeakConstraint,
    pretty_print,
    rule_length,
)


def test_parse_normal_rule_with_negation():
    rule = parse_rule("fly(X) :- bird(X), not ab(X).")
    assert rule == NormalRule(
        head=Atom("fly", (Variable("X"),)),
        body=(
            Literal(Atom("bird", (Variable("X"),))),
            Literal(Atom("ab", (Variable("X"),)), positive=False),
        ),
    )


def test_parse_weak_constraint():
    rule = parse_rule(":~ cost(L, C).[C@1, L]")
    assert rule == WeakConstraint(
        body=(Literal(Atom("cost", (Variable("L"), Variable("C")))),),
        weight=Variable("C"),
        level=Constant(1),
        terms=(Variable("L"),),
    )


def test_parse_choice_rule():
    rule = parse_rule("0 {in(V0,V1) } 1 :- edge(V0, V1).")
    assert rule == ChoiceRule(
        lower=0,
        upper=1,
        heads=(Atom("in", (Variable("V0"), Variable("V1"))),),
        body=(Literal(Atom("edge", (Variable("V0"), Variable("V1")))),),
    )


def test_parse_hard_constraint_and_comparison():
    rule = parse_rule(":- in(V0,V1), in(V0,V2), V1 != V2.")
    assert isinstance(rule, HardConstraint)
    assert rule.body[2] == Comparison(Variable("V1"), "!=", Variable("V2"))


def test_parse_range_fact_expands():
    program = parse_program("node(1..4).")
    assert [str(r) for r in program] == [
        "node(1).",
        "node(2).",
        "node(3).",
        "node(4).",
    ]


def test_parse_range_facts_entry_point():
    program = parse_range_facts("node(1..2). edge(1,2).")
    assert len(program) == 3
    with pytest.raises(ParseError):
        parse_range_facts("p(X) :- q(X).")


def test_empty_range_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_program("node(4..1).")


def test_range_outside_fact_is_an_error():
    with pytest.raises(ParseError):
        parse_program("p(1..3) :- q.")


def test_unsafe_rule_rejected():
    with pytest.raises(SafetyError):
        parse_program("fly(X) :- not ab(X).")
    with pytest.raises(SafetyError):
        parse_program(":- node(V0), not reach(V1).")
    with pytest.raises(SafetyError):
        parse_program(":~ p(X).[Y@1]")


def test_negative_integers_and_compound_terms():
    rule = parse_rule(":~ body(1), transmission(2).[-1@3]")
    assert rule.weight == Constant(-1)
    atom = parse_atom("leg_mode(leg(1), bus)")
    assert atom == Atom(
        "leg_mode", (Compound("leg", (Constant(1),)), Constant("bus"))
    )


def test_function_nesting_depth_capped():
    parse_program("p(f(g(a))).")
    with pytest.raises(ParseError):
        parse_program("p(f(g(h(a)))).")


def test_choice_bounds_validated():
    with pytest.raises(ParseError):
        parse_program("2 {a} 1.")
    with pytest.raises(ParseError):
        parse_program("0 {a} 2.")


def test_syntax_error_carries_location():
    with pytest.raises(ParseError) as exc:
        parse_program("p :- q\nr.")
    assert exc.value.line >= 1
    assert exc.value.column >= 1


def test_comments_ignored():
    program = parse_program("p. % a fact\n% whole line\nq :- p.")
    assert len(program) == 2


HAMILTON_TEXT = """\
reach(V0) :- in(1,V0).
reach(V1) :- in(V0,V1), reach(V0).
0 { in(V0,V1) } 1 :- edge(V0,V1).
:- node(V0), not reach(V0).
:- in(V0,V1), in(V0,V2), V1 != V2.
"""


def test_hamilton_program_round_trips():
    program = parse_program(HAMILTON_TEXT)
    assert len(program) == 5
    printed = pretty_print(program)
    assert parse_program(printed) == program
    assert printed.splitlines() == HAMILTON_TEXT.splitlines()


def test_rule_lengths():
    assert rule_length(parse_rule("p.")) == 1
    assert rule_length(parse_rule("fly(X) :- bird(X), not ab(X).")) == 3
    assert rule_length(parse_rule(":~ mode(L, walk).[1@2, L]")) == 2
    assert rule_length(parse_rule("0 { in(V0,V1) } 1 :- edge(V0,V1).")) == 2
    assert rule_length(parse_rule(":- in(V0,V1), in(V0,V2), V1 != V2.")) == 3


def test_empty_program():
    assert parse_program("") == Program()
    assert pretty_print(Program()) == ""


# -- randomized round trip ---------------------------------------------------

_idents = st.sampled_from(["p", "q", "edge", "node", "reach", "mode", "a", "b"])
_vars = st.sampled_from(["X", "Y", "V0", "V1", "V2"])


def _terms(depth=0):
    base = st.one_of(
        st.integers(-20, 20).map(Constant),
        _idents.map(Constant),
        _vars.map(Variable),
    )
    if depth >= 1:
        return base
    return st.one_of(
        base,
        st.builds(
            Compound,
            _idents,
            st.lists(_terms(depth + 1), min_size=1, max_size=2).map(tuple),
        ),
    )


_atoms = st.one_of(
    _idents.map(Atom),
    st.builds(Atom, _idents, st.lists(_terms(), min_size=1, max_size=3).map(tuple)),
)

_literals = st.builds(Literal, _atoms, st.booleans())
_comparisons = st.builds(
    Comparison, _terms(), st.sampled_from(["=", "!=", "<", "<=", ">", ">="]), _terms()
)
_body_elems = st.one_of(_literals, _comparisons)


def _safe_bodies(elems):
    return st.lists(elems, min_size=0, max_size=4).map(tuple)


@st.composite
def _rules(draw):
    kind = draw(st.sampled_from(["normal", "choice", "hard", "weak"]))
    body = draw(_safe_bodies(_body_elems))
    if kind == "normal":
        rule = NormalRule(draw(_atoms), body)
    elif kind == "choice":
        heads = draw(st.lists(_atoms, min_size=1, max_size=3, unique=True).map(tuple))
        upper = draw(st.integers(0, len(heads)))
        lower = draw(st.integers(0, upper))
        rule = ChoiceRule(lower, upper, heads, body)
    elif kind == "hard":
        body = draw(_safe_bodies(_body_elems).filter(lambda b: len(b) > 0))
        rule = HardConstraint(body)
    else:
        body = draw(_safe_bodies(_body_elems).filter(lambda b: len(b) > 0))
        weight = draw(_terms())
        level = draw(st.integers(0, 5).map(Constant))
        terms = draw(st.lists(_terms(), min_size=0, max_size=2).map(tuple))
        rule = WeakConstraint(body, weight, level, terms)
    return rule


def _make_safe(rule):
    """Append a positive guard literal binding every variable."""
    from asplearn.syntax import rule_vars

    vs = sorted(rule_vars(rule), key=lambda v: v.name)
    if not vs:
        return rule
    guard = Literal(Atom("guard", tuple(vs)))
    return type(rule)(**{**rule.__dict__, "body": rule.body + (guard,)})


@given(st.lists(_rules(), min_size=0, max_size=6))
@settings(max_examples=200, deadline=None)
def test_pretty_print_parse_round_trip(rules):
    program = Program(tuple(_make_safe(r) for r in rules))
    assert parse_program(pretty_print(program)) == program
