"""Example semantics: which examples a hypothesis covers, and at what cost.

An attempt example pairs a partial interpretation with a context program;
it is accepted when some answer set of background + hypothesis + context
extends the partial interpretation.  Positive examples are covered when
accepted, negative ones when rejected.  Ordering examples compare the
weak-constraint costs of accepting answer sets of two referenced positive
examples, either for some pair (brave) or for all pairs (cautious).

Each uncovered example charges its penalty; a hypothesis scores its own
length plus the total charged penalty, and counts as a solution only when
that total is finite.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .grounder import GroundProgram, ground
from .solver import CostVector, compare, cost_ids, iter_answer_sets, ordering_matches
from .syntax import EMPTY_PROGRAM, Atom, Program, rule_length

ORDERING_OPS = ("<", ">", "=", "<=", ">=", "!=")


@dataclass(frozen=True)
class PartialInterpretation:
    inc: "tuple[Atom, ...]" = ()
    exc: "tuple[Atom, ...]" = ()

    def extends(self, interp: "set[Atom]") -> bool:
        return all(a in interp for a in self.inc) and not any(
            a in interp for a in self.exc
        )

    def __str__(self) -> str:
        inc = ", ".join(str(a) for a in self.inc)
        exc = ", ".join(str(a) for a in self.exc)
        return "<{%s}, {%s}>" % (inc, exc)


@dataclass(frozen=True)
class WeightedCDPI:
    """A context-dependent partial interpretation with an identifier and a
    penalty (a positive int, or float('inf') for a hard example)."""

    eid: str
    penalty: float
    pi: PartialInterpretation
    ctx: Program = EMPTY_PROGRAM


@dataclass(frozen=True)
class WeightedCDOE:
    """An ordering example over two positive examples' answer-set costs."""

    eid: str
    penalty: float
    left: WeightedCDPI
    right: WeightedCDPI
    op: str


@dataclass(frozen=True)
class ExampleSet:
    positives: "tuple[WeightedCDPI, ...]" = ()
    negatives: "tuple[WeightedCDPI, ...]" = ()
    brave_orderings: "tuple[WeightedCDOE, ...]" = ()
    cautious_orderings: "tuple[WeightedCDOE, ...]" = ()

    def __len__(self) -> int:
        return (
            len(self.positives)
            + len(self.negatives)
            + len(self.brave_orderings)
            + len(self.cautious_orderings)
        )


@dataclass
class CoverageReport:
    uncovered: "tuple[str, ...]"
    penalty: float
    hypothesis_length: int

    @property
    def score(self) -> float:
        return self.hypothesis_length + self.penalty

    @property
    def is_solution(self) -> bool:
        return self.penalty != float("inf")


def hypothesis_length(hypothesis: Program) -> int:
    return sum(rule_length(r) for r in hypothesis)


def _accepting_ids(
    base: Program, example: WeightedCDPI
) -> "tuple[GroundProgram, Optional[Iterator[frozenset[int]]]]":
    gp = ground(base + example.ctx)
    inc_ids = []
    for a in example.pi.inc:
        i = gp.index.get(a)
        if i is None:
            return gp, None  # the atom cannot occur in any answer set
        inc_ids.append(i)
    exc_ids = [gp.index[a] for a in example.pi.exc if a in gp.index]
    return gp, iter_answer_sets(gp, assume_true=inc_ids, assume_false=exc_ids)


def accepts(base: Program, example: WeightedCDPI) -> bool:
    """True when some answer set of base + context extends the example's
    partial interpretation."""
    _, models = _accepting_ids(base, example)
    if models is None:
        return False
    return next(models, None) is not None


def accepting_answer_set(
    base: Program, example: WeightedCDPI
) -> "Optional[set[Atom]]":
    """First answer set of base + context extending the example's partial
    interpretation, or None when there is none."""
    gp, models = _accepting_ids(base, example)
    if models is None:
        return None
    ids = next(models, None)
    if ids is None:
        return None
    return {gp.atoms[i] for i in ids}


def accepting_cost_vectors(base: Program, example: WeightedCDPI) -> "list[CostVector]":
    """Distinct costs over all accepting answer sets, in discovery order."""
    gp, models = _accepting_ids(base, example)
    if models is None:
        return []
    seen: list[CostVector] = []
    for ids in models:
        vec = cost_ids(gp, ids)
        if vec not in seen:
            seen.append(vec)
    return seen


def respects_brave_ordering(base: Program, ordering: WeightedCDOE) -> bool:
    """Some accepting pair of answer sets compares as the operator demands."""
    right = accepting_cost_vectors(base, ordering.right)
    if not right:
        return False
    gp, models = _accepting_ids(base, ordering.left)
    if models is None:
        return False
    seen: list[CostVector] = []
    for ids in models:
        vec = cost_ids(gp, ids)
        if vec in seen:
            continue
        seen.append(vec)
        if any(ordering_matches(compare(vec, rv), ordering.op) for rv in right):
            return True
    return False


def respects_cautious_ordering(base: Program, ordering: WeightedCDOE) -> bool:
    """Every accepting pair compares as the operator demands; holds vacuously
    when either side has no accepting answer set."""
    left = accepting_cost_vectors(base, ordering.left)
    right = accepting_cost_vectors(base, ordering.right)
    return all(
        ordering_matches(compare(lv, rv), ordering.op) for lv in left for rv in right
    )


def evaluate_coverage(
    background: Program, hypothesis: Program, examples: ExampleSet
) -> CoverageReport:
    base = background + hypothesis
    uncovered: list[str] = []
    penalty: float = 0
    cost_cache: dict[str, list[CostVector]] = {}

    def costs_of(e: WeightedCDPI) -> "list[CostVector]":
        if e.eid not in cost_cache:
            cost_cache[e.eid] = accepting_cost_vectors(base, e)
        return cost_cache[e.eid]

    for e in examples.positives:
        if not accepts(base, e):
            uncovered.append(e.eid)
            penalty += e.penalty
    for e in examples.negatives:
        if accepts(base, e):
            uncovered.append(e.eid)
            penalty += e.penalty
    for o in examples.brave_orderings:
        left, right = costs_of(o.left), costs_of(o.right)
        ok = any(
            ordering_matches(compare(lv, rv), o.op) for lv in left for rv in right
        )
        if not ok:
            uncovered.append(o.eid)
            penalty += o.penalty
    for o in examples.cautious_orderings:
        left, right = costs_of(o.left), costs_of(o.right)
        ok = all(
            ordering_matches(compare(lv, rv), o.op) for lv in left for rv in right
        )
        if not ok:
            uncovered.append(o.eid)
            penalty += o.penalty
    return CoverageReport(tuple(uncovered), penalty, hypothesis_length(hypothesis))
