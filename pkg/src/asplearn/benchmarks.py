"""Benchmark generators and train/test evaluation.

Two families.  `hamilton` builds graph-classification tasks: random digraphs
on one to four nodes are encoded as facts in example contexts, labelled by
Hamiltonicity, and a learned hypothesis classifies a graph by whether it is
satisfiable together with the graph's facts.  `journey` builds preference
tasks: journeys (lists of legs with a mode, a distance, and a crime rating)
become hard positive examples, and brave ordering examples over pairs of
journeys carry the operator the target cost function assigns to the pair.

Noise is injected by flipping a uniformly chosen subset of exactly
floor(noise * n) labels: hamilton flips positive/negative, journey replaces
`<` with `>` and `=` with `!=`.  Generation is a pure function of the
BenchmarkSpec, so equal specs give byte-identical task files and test sets.
"""
from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations

from .coverage import PartialInterpretation, WeightedCDOE, WeightedCDPI
from .errors import SpaceError
from .grounder import ground
from .parser import parse_atom, parse_program
from .solver import CostVector, Ordering, compare, cost_ids, iter_answer_sets
from .space import (
    BodyMode,
    ComparisonMode,
    HeadMode,
    ModeBias,
    enumerate_space,
    space_member_text,
)
from .syntax import Atom, Constant, Compound, NormalRule, Program
from .taskfile import INFINITE, TaskFile

FAMILIES = ("hamilton", "journey")

# Generator parameters not fixed by the problem statement; they are echoed
# into Benchmark.metadata so runs stay auditable.
NODE_RANGE = (1, 4)
EXTRA_EDGE_PROB = 0.25
RANDOM_EDGE_PROB = 0.3
LEGS_RANGE = (1, 4)
LEG_MODES = ("bus", "car", "walk", "bicycle")
DISTANCE_RANGE = (1, 20000)
CRIME_RANGE = (1, 5)


def _const_schema(name: str, values) -> Compound:
    return Compound(name, tuple(Constant(v) for v in values))


HAMILTON_BIAS = ModeBias(
    head_modes=(
        HeadMode(parse_atom("reach(var)")),
        HeadMode(parse_atom("in(var, var)"), choice=True),
    ),
    body_modes=(
        BodyMode(parse_atom("in(var, var)")),
        BodyMode(parse_atom("in(const(1), var)")),
        BodyMode(parse_atom("reach(var)"), allow_negative=True),
        BodyMode(parse_atom("node(var)")),
        BodyMode(parse_atom("edge(var, var)")),
    ),
    comparison_modes=(
        ComparisonMode(Constant("var"), "!=", Constant("var")),
    ),
    max_vars=3,
    max_body=2,
    allow_constraints=True,
)

HAMILTON_TARGET = parse_program(
    """
    reach(V0) :- in(1, V0).
    reach(V1) :- in(V0, V1), reach(V0).
    0 {in(V0, V1)} 1 :- edge(V0, V1).
    :- node(V0), not reach(V0).
    :- in(V0, V1), in(V0, V2), V1 != V2.
    """
)

JOURNEY_BIAS = ModeBias(
    body_modes=(
        BodyMode(parse_atom("leg_mode(var, const(walk, car, bus, bicycle))")),
        BodyMode(parse_atom("leg_distance(var, weightvar)")),
        BodyMode(parse_atom("leg_crime_rating(var, intvar)")),
    ),
    comparison_modes=(
        ComparisonMode(Constant("intvar"), ">", _const_schema("const", (1, 2, 3, 4))),
    ),
    max_vars=2,
    max_body=2,
    weak_levels=(1, 2, 3),
    weak_weights=(1, "var"),
)

JOURNEY_TARGET = parse_program(
    """
    :~ leg_mode(L, walk), leg_crime_rating(L, C), C > 3.[1@3, L, C]
    :~ leg_mode(L, car).[1@2, L]
    :~ leg_mode(L, walk), leg_distance(L, D).[D@1, L, D]
    """
)


@dataclass(frozen=True)
class BenchmarkSpec:
    family: str
    n: int
    noise: float = 0.0
    seed: int = 0
    test_size: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError("unknown benchmark family %r" % self.family)
        if self.n < 0 or self.test_size < 0:
            raise ValueError("example and test counts must be non-negative")
        if not 0 <= self.noise < 1:
            raise ValueError("noise fraction must lie in [0, 1)")
        if self.noise >= 0.5:
            warnings.warn(
                "noise fraction %.2f flips most labels; results will say "
                "little about the learner" % self.noise,
                stacklevel=3,
            )


@dataclass(frozen=True)
class Benchmark:
    """A generated task plus its held-out test set and generator metadata."""

    task: TaskFile
    tests: tuple
    metadata: dict = field(compare=False)


# ---------------------------------------------------------------------------
# Hamilton graphs


@dataclass(frozen=True)
class Graph:
    n_nodes: int
    edges: "tuple[tuple[int, int], ...]"


def _fact(pred: str, *args) -> NormalRule:
    return NormalRule(Atom(pred, tuple(Constant(a) for a in args)))


def graph_facts(graph: Graph) -> Program:
    rules = [_fact("node", i) for i in range(1, graph.n_nodes + 1)]
    rules.extend(_fact("edge", u, v) for u, v in graph.edges)
    return Program(tuple(rules))


def is_hamiltonian(graph: Graph) -> bool:
    """Brute force: some cyclic visiting order uses only present edges."""
    n = graph.n_nodes
    edges = set(graph.edges)
    if n == 0:
        return False
    if n == 1:
        return (1, 1) in edges
    for perm in permutations(range(2, n + 1)):
        order = (1,) + perm
        if all(
            (order[i], order[(i + 1) % n]) in edges for i in range(n)
        ):
            return True
    return False


def classify_graph(hypothesis: Program, facts: Program) -> bool:
    """True when the hypothesis is satisfiable together with the graph."""
    gp = ground(hypothesis + facts)
    return next(iter_answer_sets(gp), None) is not None


def _sample_hamiltonian(rng: random.Random) -> Graph:
    n = rng.randint(*NODE_RANGE)
    order = list(range(1, n + 1))
    rng.shuffle(order)
    edges = {(order[i], order[(i + 1) % n]) for i in range(n)}
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            if (u, v) not in edges and rng.random() < EXTRA_EDGE_PROB:
                edges.add((u, v))
    return Graph(n, tuple(sorted(edges)))


def _sample_non_hamiltonian(rng: random.Random) -> Graph:
    while True:
        n = rng.randint(*NODE_RANGE)
        edges = tuple(
            sorted(
                (u, v)
                for u in range(1, n + 1)
                for v in range(1, n + 1)
                if rng.random() < RANDOM_EDGE_PROB
            )
        )
        graph = Graph(n, edges)
        if not is_hamiltonian(graph):
            return graph


def _sample_graphs(rng: random.Random, count: int) -> "list[tuple[Graph, bool]]":
    # half Hamiltonian, the odd one out Hamiltonian, in shuffled order
    flags = [True] * (count - count // 2) + [False] * (count // 2)
    rng.shuffle(flags)
    return [
        ((_sample_hamiltonian if f else _sample_non_hamiltonian)(rng), f)
        for f in flags
    ]


def _flip_set(rng: random.Random, n: int, noise: float) -> "set[int]":
    return set(rng.sample(range(n), int(noise * n)))


def gen_hamilton(spec: BenchmarkSpec) -> Benchmark:
    if spec.family != "hamilton":
        raise ValueError("gen_hamilton needs a hamilton spec, got %r" % spec.family)
    rng = random.Random(spec.seed)
    train = _sample_graphs(rng, spec.n)
    tests = tuple(_sample_graphs(rng, spec.test_size))
    flips = _flip_set(rng, spec.n, spec.noise)

    positives: list = []
    negatives: list = []
    for i, (graph, ham) in enumerate(train):
        label = ham != (i in flips)
        example = WeightedCDPI(
            "e%03d" % i, 1, PartialInterpretation((), ()), graph_facts(graph)
        )
        (positives if label else negatives).append(example)

    task = TaskFile(
        Program(()), HAMILTON_BIAS, tuple(positives), tuple(negatives)
    )
    metadata = {
        "family": spec.family,
        "n": spec.n,
        "noise": spec.noise,
        "seed": spec.seed,
        "test_size": spec.test_size,
        "node_range": list(NODE_RANGE),
        "extra_edge_prob": EXTRA_EDGE_PROB,
        "random_edge_prob": RANDOM_EDGE_PROB,
        "flipped": sorted("e%03d" % i for i in flips),
    }
    return Benchmark(task, tests, metadata)


# ---------------------------------------------------------------------------
# Journey preferences


@dataclass(frozen=True)
class Journey:
    """Legs as (mode, distance, crime rating) triples, numbered from 1."""

    legs: "tuple[tuple[str, int, int], ...]"


def journey_facts(journey: Journey) -> Program:
    rules = []
    for i, (mode, distance, crime) in enumerate(journey.legs, 1):
        rules.append(_fact("leg_mode", i, mode))
        rules.append(_fact("leg_distance", i, distance))
        rules.append(_fact("leg_crime_rating", i, crime))
    return Program(tuple(rules))


def answer_set_cost(hypothesis: Program, facts: Program) -> "CostVector | None":
    """Cost of the first answer set of hypothesis + facts, None if there is
    none.  Journey programs are facts plus weak constraints, so the answer
    set is unique and this is the journey's cost under the hypothesis."""
    gp = ground(hypothesis + facts)
    ids = next(iter_answer_sets(gp), None)
    if ids is None:
        return None
    return cost_ids(gp, ids)


@lru_cache(maxsize=None)
def _journey_space_texts() -> "frozenset[str]":
    return frozenset(sr.text for sr in enumerate_space(JOURNEY_BIAS))


def _sample_journey(rng: random.Random) -> Journey:
    k = rng.randint(*LEGS_RANGE)
    return Journey(
        tuple(
            (
                rng.choice(LEG_MODES),
                rng.randint(*DISTANCE_RANGE),
                rng.randint(*CRIME_RANGE),
            )
            for _ in range(k)
        )
    )


def _strict_pair(rng, target) -> "tuple[Journey, Journey]":
    """Two journeys the target orders strictly, cheaper one first."""
    while True:
        a, b = _sample_journey(rng), _sample_journey(rng)
        verdict = compare(
            answer_set_cost(target, journey_facts(a)),
            answer_set_cost(target, journey_facts(b)),
        )
        if verdict is Ordering.LESS:
            return a, b
        if verdict is Ordering.GREATER:
            return b, a


_EQUAL_TRIES = 40


def _mutate_journey(rng, journey: Journey) -> Journey:
    """A copy with one leg attribute resampled, a leg added or dropped, or
    the legs reshuffled."""
    legs = list(journey.legs)
    kind = rng.randrange(6)
    if kind == 0:
        rng.shuffle(legs)
    elif kind == 1 and len(legs) < LEGS_RANGE[1]:
        legs.insert(
            rng.randrange(len(legs) + 1),
            (
                rng.choice(LEG_MODES),
                rng.randint(*DISTANCE_RANGE),
                rng.randint(*CRIME_RANGE),
            ),
        )
    elif kind == 2 and len(legs) > LEGS_RANGE[0]:
        del legs[rng.randrange(len(legs))]
    else:
        i = rng.randrange(len(legs))
        mode, distance, crime = legs[i]
        attr = rng.randrange(3)
        if attr == 0:
            mode = rng.choice(LEG_MODES)
        elif attr == 1:
            distance = rng.randint(*DISTANCE_RANGE)
        else:
            crime = rng.randint(*CRIME_RANGE)
        legs[i] = (mode, distance, crime)
    return Journey(tuple(legs))


def _equal_pair(rng, target) -> "tuple[Journey, Journey]":
    """Two journeys the target costs identically.  Mutated copies are
    preferred because they differ in an attribute the target ignores,
    which rules out hypotheses that charge for it; a leg-permuted copy is
    the fallback (identical attribute multisets cost the same under any
    weak-constraint hypothesis)."""
    a = _sample_journey(rng)
    cost_a = answer_set_cost(target, journey_facts(a))
    for _ in range(_EQUAL_TRIES):
        b = _mutate_journey(rng, a)
        if b.legs == a.legs:
            continue
        if answer_set_cost(target, journey_facts(b)) == cost_a:
            return a, b
    legs = list(a.legs)
    rng.shuffle(legs)
    return a, Journey(tuple(legs))


def _sample_pairs(rng, target, count) -> "list[tuple[Journey, Journey, str]]":
    # half strict, the odd one out strict, in shuffled order
    flags = [True] * (count - count // 2) + [False] * (count // 2)
    rng.shuffle(flags)
    out = []
    for strict in flags:
        left, right = (_strict_pair if strict else _equal_pair)(rng, target)
        out.append((left, right, "<" if strict else "="))
    return out


def gen_journey(target: Program, spec: BenchmarkSpec) -> Benchmark:
    if spec.family != "journey":
        raise ValueError("gen_journey needs a journey spec, got %r" % spec.family)
    space_texts = _journey_space_texts()
    for rule in target:
        if space_member_text(rule) not in space_texts:
            raise SpaceError(
                "target rule %s is outside the journey bias space" % rule
            )

    rng = random.Random(spec.seed)
    train = _sample_pairs(rng, target, spec.n)
    tests = tuple(
        (journey_facts(l), journey_facts(r), op)
        for l, r, op in _sample_pairs(rng, target, spec.test_size)
    )
    flips = _flip_set(rng, spec.n, spec.noise)

    positives: list = []
    orderings: list = []
    for i, (left, right, op) in enumerate(train):
        sides = []
        for tag, journey in (("l", left), ("r", right)):
            example = WeightedCDPI(
                "j%03d%s" % (i, tag),
                INFINITE,
                PartialInterpretation((), ()),
                journey_facts(journey),
            )
            positives.append(example)
            sides.append(example)
        if i in flips:
            op = ">" if op == "<" else "!="
        orderings.append(WeightedCDOE("o%03d" % i, 1, sides[0], sides[1], op))

    task = TaskFile(
        Program(()),
        JOURNEY_BIAS,
        positives=tuple(positives),
        brave_orderings=tuple(orderings),
    )
    metadata = {
        "family": spec.family,
        "n": spec.n,
        "noise": spec.noise,
        "seed": spec.seed,
        "test_size": spec.test_size,
        "legs_range": list(LEGS_RANGE),
        "leg_modes": list(LEG_MODES),
        "distance_range": list(DISTANCE_RANGE),
        "crime_range": list(CRIME_RANGE),
        "target": [str(r) for r in target],
        "flipped": sorted("o%03d" % i for i in flips),
    }
    return Benchmark(task, tests, metadata)


def generate(spec: BenchmarkSpec, target: "Program | None" = None) -> Benchmark:
    """Dispatch on the spec's family; journey uses the given target or the
    reference cost function."""
    if spec.family == "hamilton":
        return gen_hamilton(spec)
    return gen_journey(JOURNEY_TARGET if target is None else target, spec)


# ---------------------------------------------------------------------------
# Evaluation


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    runtime: float
    hypothesis: str
    certificate: bool


def _report(accuracy, tp, fp, fn, runtime, hypothesis, certificate) -> EvalReport:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalReport(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f1=f1,
        runtime=runtime,
        hypothesis=hypothesis,
        certificate=certificate,
    )


def _journey_verdict(hypothesis, left_facts, right_facts) -> str:
    lc = answer_set_cost(hypothesis, left_facts)
    rc = answer_set_cost(hypothesis, right_facts)
    if lc is None or rc is None:
        return "?"
    return compare(lc, rc).value


def evaluate(
    hypothesis: Program,
    family: str,
    tests,
    *,
    runtime: float = 0.0,
    certificate: bool = False,
) -> EvalReport:
    """Score a hypothesis on a held-out test set.

    hamilton: tests are (Graph, is_hamiltonian) pairs; the positive class is
    "Hamiltonian" and accuracy/precision/recall/F1 come from the confusion
    counts of classify_graph against the truth.  journey: tests are
    (left facts, right facts, operator) triples; accuracy is the fraction of
    pairs whose cost verdict under the hypothesis matches the target's, and
    the confusion counts treat strict preference (`<`) as the positive class.
    """
    if not tests:
        raise ValueError("empty test set")
    tp = fp = fn = 0
    correct = 0
    if family == "hamilton":
        for graph, truth in tests:
            predicted = classify_graph(hypothesis, graph_facts(graph))
            correct += predicted == truth
            tp += truth and predicted
            fn += truth and not predicted
            fp += predicted and not truth
    elif family == "journey":
        for left_facts, right_facts, op in tests:
            predicted = _journey_verdict(hypothesis, left_facts, right_facts)
            correct += predicted == op
            truth = op == "<"
            tp += truth and predicted == "<"
            fn += truth and predicted != "<"
            fp += predicted == "<" and not truth
    else:
        raise ValueError("unknown benchmark family %r" % family)
    return _report(
        correct / len(tests), tp, fp, fn, runtime, hypothesis.to_text(), certificate
    )


# ---------------------------------------------------------------------------
# Test-set (de)serialization, used by the command-line tools


def tests_to_jsonable(family: str, tests) -> "list[dict]":
    if family == "hamilton":
        return [
            {
                "n_nodes": g.n_nodes,
                "edges": [list(e) for e in g.edges],
                "hamiltonian": ham,
            }
            for g, ham in tests
        ]
    return [
        {"left": left.to_text(), "right": right.to_text(), "op": op}
        for left, right, op in tests
    ]


def tests_from_jsonable(family: str, data) -> tuple:
    if family == "hamilton":
        return tuple(
            (
                Graph(d["n_nodes"], tuple(tuple(e) for e in d["edges"])),
                bool(d["hamiltonian"]),
            )
            for d in data
        )
    return tuple(
        (parse_program(d["left"]), parse_program(d["right"]), d["op"])
        for d in data
    )
