"""Independent brute-force reference implementations used across test modules.

Everything here recomputes semantics from first principles (full subset
enumeration, naive fixpoints) and shares no search code with the package.
"""
import random

from asplearn.grounder import GChoice, GConstraint, GNormal, GroundProgram
from asplearn.syntax import (
    Atom,
    ChoiceRule,
    Constant,
    HardConstraint,
    Literal,
    NormalRule,
    Program,
    WeakConstraint,
)

INF = float("inf")


def _sat(pos, neg, interp) -> bool:
    return set(pos) <= interp and not (set(neg) & interp)


def brute_is_stable(gp: GroundProgram, interp: "set[int]") -> bool:
    for rec in gp.rules:
        if isinstance(rec, GNormal):
            if _sat(rec.pos, rec.neg, interp) and rec.head not in interp:
                return False
        elif isinstance(rec, GChoice):
            if _sat(rec.pos, rec.neg, interp):
                chosen = len(set(rec.heads) & interp)
                if not (rec.lower <= chosen <= rec.upper):
                    return False
        elif isinstance(rec, GConstraint):
            if _sat(rec.pos, rec.neg, interp):
                return False
    # Least model of the reduct, by repeated full passes.
    lm: set = set()
    changed = True
    while changed:
        changed = False
        for rec in gp.rules:
            if isinstance(rec, GNormal):
                if set(rec.neg) & interp:
                    continue
                if set(rec.pos) <= lm and rec.head not in lm:
                    lm.add(rec.head)
                    changed = True
            elif isinstance(rec, GChoice):
                if set(rec.neg) & interp:
                    continue
                if set(rec.pos) <= lm:
                    for h in rec.heads:
                        if h in interp and h not in lm:
                            lm.add(h)
                            changed = True
    return lm == interp


def brute_answer_sets(gp: GroundProgram) -> "list[frozenset[int]]":
    n = gp.atom_count
    out = []
    for mask in range(1 << n):
        interp = {i for i in range(n) if mask >> i & 1}
        if brute_is_stable(gp, interp):
            out.append(frozenset(interp))
    return out


def brute_cost(gp: GroundProgram, interp: "frozenset[int]") -> "dict[int, int]":
    totals: dict = {}
    for w in gp.weaks:
        if _sat(w.pos, w.neg, interp):
            totals[w.level] = totals.get(w.level, 0) + w.weight
    return {lvl: t for lvl, t in totals.items() if t != 0}


def brute_optimal(gp: GroundProgram):
    """(answer sets of minimum cost, cost dict) by exhaustive enumeration."""
    sets = brute_answer_sets(gp)
    if not sets:
        return [], None
    levels = sorted({w.level for w in gp.weaks}, reverse=True)

    def key(interp):
        totals = brute_cost(gp, interp)
        return tuple(totals.get(lvl, 0) for lvl in levels)

    best = min(key(s) for s in sets)
    winners = [s for s in sets if key(s) == best]
    return winners, brute_cost(gp, winners[0])


def brute_best_hypothesis(task):
    """(score, rule ids) minimizing the verified score over every subset of
    the space, ties to the lexicographically smallest sorted id vector."""
    from asplearn.coverage import evaluate_coverage

    n = len(task.space)
    best = None
    for mask in range(1 << n):
        rids = tuple(i for i in range(n) if mask >> i & 1)
        hyp = Program(tuple(task.space[r].rule for r in rids))
        rep = evaluate_coverage(task.background, hyp, task.examples)
        score = sum(task.space[r].length for r in rids) + rep.penalty
        cand = (score, rids)
        if best is None or cand < best:
            best = cand
    return best


TASK_RULE_POOL = (
    "a.", "b.", "c.",
    "a :- b.", "b :- a.", "c :- a, b.",
    "a :- not b.", "b :- not c.", "c :- not a, b.",
    "0 {a; b} 1.", "1 {a; c} 2.", "0 {c} 1.",
    ":- a, b.", ":- c.", ":- a, not c.",
    ":~ a.[1@1]", ":~ b.[2@1]", ":~ c.[1@2]", ":~ a, b.[1@1]",
)


def random_learning_task(
    rng: random.Random, n_rules: int = 6, n_examples: int = 6,
    ordering_share: float = 0.3, infinite_share: float = 0.15,
):
    """A small weighted task over atoms a, b, c with a mixed rule space."""
    from asplearn.coverage import (
        ExampleSet,
        PartialInterpretation,
        WeightedCDOE,
        WeightedCDPI,
    )
    from asplearn.learner import LearningTask
    from asplearn.parser import parse_atom, parse_program
    from asplearn.space import explicit_space

    names = ["a", "b", "c"]
    space = explicit_space(
        parse_program(t).rules[0] for t in rng.sample(TASK_RULE_POOL, n_rules)
    )
    background = parse_program(rng.choice(["", "", "", "d.", "a :- d. d."]))

    def rand_pi():
        inc = rng.sample(names, rng.randint(0, 2))
        exc = rng.sample([x for x in names if x not in inc], rng.randint(0, 1))
        return PartialInterpretation(
            tuple(parse_atom(x) for x in inc), tuple(parse_atom(x) for x in exc)
        )

    def rand_ctx():
        return parse_program(rng.choice(["", "", "", "d2.", "b :- c.", ":~ c.[1@1]"]))

    def rand_penalty():
        return INF if rng.random() < infinite_share else rng.randint(1, 3)

    pos, neg, brave, cautious = [], [], [], []
    for i in range(n_examples):
        if rng.random() < ordering_share:
            left = WeightedCDPI("o%d_l" % i, 1, rand_pi(), rand_ctx())
            right = WeightedCDPI("o%d_r" % i, 1, rand_pi(), rand_ctx())
            op = rng.choice(("<", ">", "=", "<=", ">=", "!="))
            o = WeightedCDOE("o%d" % i, rand_penalty(), left, right, op)
            (brave if rng.random() < 0.5 else cautious).append(o)
        else:
            e = WeightedCDPI("e%d" % i, rand_penalty(), rand_pi(), rand_ctx())
            (pos if rng.random() < 0.6 else neg).append(e)
    examples = ExampleSet(tuple(pos), tuple(neg), tuple(brave), tuple(cautious))
    return LearningTask(background, space, examples)


def random_ground_program(
    rng: random.Random, n_atoms: int = 6, n_rules: int = 8, n_levels: int = 2
) -> Program:
    atoms = [Atom("a%d" % i) for i in range(n_atoms)]
    rules = []
    while len(rules) < n_rules:
        kind = rng.choice(["fact", "normal", "normal", "choice", "constraint", "weak"])
        body = tuple(
            Literal(a, rng.random() < 0.7)
            for a in rng.sample(atoms, rng.randint(0, min(3, n_atoms)))
        )
        if kind == "fact":
            rules.append(NormalRule(rng.choice(atoms)))
        elif kind == "normal":
            rules.append(NormalRule(rng.choice(atoms), body))
        elif kind == "choice":
            heads = tuple(rng.sample(atoms, rng.randint(1, min(3, n_atoms))))
            lower = rng.randint(0, len(heads))
            upper = rng.randint(lower, len(heads))
            rules.append(ChoiceRule(lower, upper, heads, body))
        elif kind == "constraint":
            if not body:
                continue
            rules.append(HardConstraint(body))
        else:
            if not body:
                continue
            rules.append(
                WeakConstraint(
                    body,
                    Constant(rng.randint(-2, 3)),
                    Constant(rng.randint(1, n_levels)),
                )
            )
    return Program(tuple(rules))
