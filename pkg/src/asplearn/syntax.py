"""AST for the ASP fragment: terms, atoms, literals, rules, programs.

Every node is a frozen dataclass whose __str__ produces the canonical
concrete syntax, so pretty-printing a program is just joining the rules
with newlines.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True, order=True)
class Constant:
    """A symbolic constant (lowercase name) or an integer."""

    value: "str | int"

    @property
    def is_int(self) -> bool:
        return isinstance(self.value, int)

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Compound:
    """A function term such as leg(1). Nesting is allowed but discouraged."""

    functor: str
    args: "tuple[Term, ...]"

    def __str__(self) -> str:
        return "%s(%s)" % (self.functor, ",".join(str(a) for a in self.args))


Term = Union[Constant, Variable, Compound]


def term_depth(t: Term) -> int:
    if isinstance(t, Compound):
        return 1 + max(term_depth(a) for a in t.args)
    return 0


def term_vars(t: Term) -> Iterator[Variable]:
    if isinstance(t, Variable):
        yield t
    elif isinstance(t, Compound):
        for a in t.args:
            yield from term_vars(a)


def term_is_ground(t: Term) -> bool:
    if isinstance(t, Variable):
        return False
    if isinstance(t, Compound):
        return all(term_is_ground(a) for a in t.args)
    return True


def term_order_key(t: Term):
    """Total order over ground terms: integers first (by value), then
    symbolic constants (by name), then compounds (by functor, arity, args)."""
    if isinstance(t, Constant):
        if t.is_int:
            return (0, t.value)
        return (1, t.value)
    if isinstance(t, Compound):
        return (2, t.functor, len(t.args), tuple(term_order_key(a) for a in t.args))
    raise ValueError("term_order_key needs a ground term, got %s" % t)


def substitute(t: Term, subst: "dict[Variable, Term]") -> Term:
    if isinstance(t, Variable):
        return subst.get(t, t)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(substitute(a, subst) for a in t.args))
    return t


# ---------------------------------------------------------------------------
# Atoms and body elements


@dataclass(frozen=True)
class Atom:
    pred: str
    args: "tuple[Term, ...]" = ()

    @property
    def signature(self) -> "tuple[str, int]":
        return (self.pred, len(self.args))

    @property
    def is_ground(self) -> bool:
        return all(term_is_ground(a) for a in self.args)

    def vars(self) -> Iterator[Variable]:
        for a in self.args:
            yield from term_vars(a)

    def apply(self, subst: "dict[Variable, Term]") -> "Atom":
        if not self.args:
            return self
        return Atom(self.pred, tuple(substitute(a, subst) for a in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return "%s(%s)" % (self.pred, ",".join(str(a) for a in self.args))


@dataclass(frozen=True)
class Literal:
    """An atom or its negation-as-failure."""

    atom: Atom
    positive: bool = True

    def vars(self) -> Iterator[Variable]:
        yield from self.atom.vars()

    def apply(self, subst) -> "Literal":
        return Literal(self.atom.apply(subst), self.positive)

    def __str__(self) -> str:
        return str(self.atom) if self.positive else "not %s" % self.atom


COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Comparison:
    """A built-in comparison literal, evaluated away during grounding."""

    left: Term
    op: str
    right: Term

    def vars(self) -> Iterator[Variable]:
        yield from term_vars(self.left)
        yield from term_vars(self.right)

    def apply(self, subst) -> "Comparison":
        return Comparison(substitute(self.left, subst), self.op, substitute(self.right, subst))

    def holds(self) -> bool:
        lk = term_order_key(self.left)
        rk = term_order_key(self.right)
        if self.op == "=":
            return lk == rk
        if self.op == "!=":
            return lk != rk
        if self.op == "<":
            return lk < rk
        if self.op == "<=":
            return lk <= rk
        if self.op == ">":
            return lk > rk
        if self.op == ">=":
            return lk >= rk
        raise ValueError("unknown comparison operator %r" % self.op)

    def __str__(self) -> str:
        return "%s %s %s" % (self.left, self.op, self.right)


BodyElem = Union[Literal, Comparison]


def _body_str(body: "tuple[BodyElem, ...]") -> str:
    return ", ".join(str(b) for b in body)


# ---------------------------------------------------------------------------
# Rules


@dataclass(frozen=True)
class NormalRule:
    head: Atom
    body: "tuple[BodyElem, ...]" = ()

    def __str__(self) -> str:
        if not self.body:
            return "%s." % self.head
        return "%s :- %s." % (self.head, _body_str(self.body))


@dataclass(frozen=True)
class ChoiceRule:
    lower: int
    upper: int
    heads: "tuple[Atom, ...]"
    body: "tuple[BodyElem, ...]" = ()

    def __str__(self) -> str:
        agg = "%d { %s } %d" % (self.lower, "; ".join(str(h) for h in self.heads), self.upper)
        if not self.body:
            return "%s." % agg
        return "%s :- %s." % (agg, _body_str(self.body))


@dataclass(frozen=True)
class HardConstraint:
    body: "tuple[BodyElem, ...]"

    def __str__(self) -> str:
        return ":- %s." % _body_str(self.body)


@dataclass(frozen=True)
class WeakConstraint:
    body: "tuple[BodyElem, ...]"
    weight: Term
    level: Term
    terms: "tuple[Term, ...]" = ()

    def __str__(self) -> str:
        tail = "%s@%s" % (self.weight, self.level)
        if self.terms:
            tail += ", " + ", ".join(str(t) for t in self.terms)
        return ":~ %s.[%s]" % (_body_str(self.body), tail)


Rule = Union[NormalRule, ChoiceRule, HardConstraint, WeakConstraint]


def rule_body(rule: Rule) -> "tuple[BodyElem, ...]":
    return rule.body


def rule_head_atoms(rule: Rule) -> "tuple[Atom, ...]":
    if isinstance(rule, NormalRule):
        return (rule.head,)
    if isinstance(rule, ChoiceRule):
        return rule.heads
    return ()


def rule_vars(rule: Rule) -> "set[Variable]":
    out: set[Variable] = set()
    for a in rule_head_atoms(rule):
        out.update(a.vars())
    for b in rule.body:
        out.update(b.vars())
    if isinstance(rule, WeakConstraint):
        out.update(term_vars(rule.weight))
        out.update(term_vars(rule.level))
        for t in rule.terms:
            out.update(term_vars(t))
    return out


def positive_body_vars(rule: Rule) -> "set[Variable]":
    out: set[Variable] = set()
    for b in rule.body:
        if isinstance(b, Literal) and b.positive:
            out.update(b.vars())
    return out


def is_safe(rule: Rule) -> bool:
    """Every variable must occur in some positive body literal."""
    return rule_vars(rule) <= positive_body_vars(rule)


def rule_length(rule: Rule) -> int:
    """Length of a rule: one per head atom plus one per body element; weak
    constraints count their body plus one for the weight part."""
    n = len(rule.body)
    if isinstance(rule, NormalRule):
        return n + 1
    if isinstance(rule, ChoiceRule):
        return n + len(rule.heads)
    if isinstance(rule, WeakConstraint):
        return n + 1
    return n


# ---------------------------------------------------------------------------
# Programs


@dataclass(frozen=True)
class Program:
    rules: "tuple[Rule, ...]" = ()

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    def __add__(self, other: "Program") -> "Program":
        return Program(self.rules + other.rules)

    def to_text(self) -> str:
        return "\n".join(str(r) for r in self.rules)

    def __str__(self) -> str:
        return self.to_text()


EMPTY_PROGRAM = Program()


def pretty_print(program: Program) -> str:
    """Canonical text of a program; parsing it back yields an equal Program."""
    return program.to_text()
