"""Hypothesis search over an enumerated rule space.

A hypothesis is a subset of the space.  Its score is the summed length of
its rules plus the penalties of the examples it leaves uncovered; examples
with an infinite penalty must be covered by any solution.  `solve_optimal`
returns a minimum-score hypothesis, with a certificate when the search can
prove optimality.

Three search strategies share one outer shape (propose, verify through the
coverage semantics, record what was learned):

* small spaces are scanned exhaustively with lazily verified scores, which
  certifies the optimum;
* weak-constraint-only spaces whose ordering examples have deterministic
  answer sets reduce to per-level delta matrices and a beam search;
* everything else runs a counterexample loop whose verification failures
  are turned into clauses over rule selections, optimized by a small
  branch-and-bound.

Examples with identical content share one constraint and pool their
penalties, so repeated observations are only ever evaluated once.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, replace
from typing import Iterator, Optional

from .coverage import (
    ExampleSet,
    CoverageReport,
    PartialInterpretation,
    WeightedCDOE,
    WeightedCDPI,
    _accepting_ids,
    accepting_answer_set,
    evaluate_coverage,
)
from .errors import TaskError
from .space import SpaceRule
from .syntax import (
    Atom,
    ChoiceRule,
    Comparison,
    Constant,
    HardConstraint,
    NormalRule,
    Program,
    Rule,
    Term,
    Variable,
    WeakConstraint,
    EMPTY_PROGRAM,
)

INFINITE = float("inf")

log = logging.getLogger("asplearn.learner")


# ---------------------------------------------------------------------------
# Tasks


@dataclass(frozen=True)
class LearningTask:
    """Background knowledge, a rule space, and penalty-weighted examples."""

    background: Program
    space: "tuple[SpaceRule, ...]"
    examples: ExampleSet

    def __post_init__(self):
        ids = [e.eid for e in self.examples.positives]
        ids += [e.eid for e in self.examples.negatives]
        ids += [o.eid for o in self.examples.brave_orderings]
        ids += [o.eid for o in self.examples.cautious_orderings]
        dupes = {i for i in ids if ids.count(i) > 1}
        if dupes:
            raise TaskError("duplicate example identifiers: %s" % ", ".join(sorted(dupes)))
        for i, sr in enumerate(self.space):
            if sr.rid != i:
                raise TaskError("space rule ids must be dense and ascending")


@dataclass(frozen=True)
class CDPI:
    """An unweighted context-dependent partial interpretation."""

    pi: PartialInterpretation
    ctx: Program = EMPTY_PROGRAM


@dataclass(frozen=True)
class CDOE:
    """An unweighted ordering between two unweighted examples."""

    left: CDPI
    right: CDPI
    op: str


@dataclass(frozen=True)
class ContextTask:
    """A task whose examples all must be covered (no penalties)."""

    background: Program
    space: "tuple[SpaceRule, ...]"
    positives: "tuple[CDPI, ...]" = ()
    negatives: "tuple[CDPI, ...]" = ()
    brave_orderings: "tuple[CDOE, ...]" = ()
    cautious_orderings: "tuple[CDOE, ...]" = ()


def lift_to_noisy(task: ContextTask) -> LearningTask:
    """Wrap every example with a fresh identifier and an infinite penalty.
    Hypotheses with a finite score on the result are exactly the hypotheses
    covering every example of the input."""
    pos = tuple(
        WeightedCDPI("pos_%d" % i, INFINITE, e.pi, e.ctx)
        for i, e in enumerate(task.positives)
    )
    neg = tuple(
        WeightedCDPI("neg_%d" % i, INFINITE, e.pi, e.ctx)
        for i, e in enumerate(task.negatives)
    )

    def side(oid, tag, e):
        return WeightedCDPI("%s_%s" % (oid, tag), INFINITE, e.pi, e.ctx)

    brave = tuple(
        WeightedCDOE("bo_%d" % i, INFINITE, side("bo_%d" % i, "l", o.left),
                     side("bo_%d" % i, "r", o.right), o.op)
        for i, o in enumerate(task.brave_orderings)
    )
    cautious = tuple(
        WeightedCDOE("co_%d" % i, INFINITE, side("co_%d" % i, "l", o.left),
                     side("co_%d" % i, "r", o.right), o.op)
        for i, o in enumerate(task.cautious_orderings)
    )
    return LearningTask(task.background, task.space, ExampleSet(pos, neg, brave, cautious))


def restrict_to_hard(task: LearningTask) -> ContextTask:
    """Keep only the infinite-penalty examples, unweighted.  Hypotheses
    covering every example of the result are exactly the hypotheses with a
    finite score on the input."""
    ex = task.examples
    return ContextTask(
        task.background,
        task.space,
        positives=tuple(CDPI(e.pi, e.ctx) for e in ex.positives if e.penalty == INFINITE),
        negatives=tuple(CDPI(e.pi, e.ctx) for e in ex.negatives if e.penalty == INFINITE),
        brave_orderings=tuple(
            CDOE(CDPI(o.left.pi, o.left.ctx), CDPI(o.right.pi, o.right.ctx), o.op)
            for o in ex.brave_orderings if o.penalty == INFINITE
        ),
        cautious_orderings=tuple(
            CDOE(CDPI(o.left.pi, o.left.ctx), CDPI(o.right.pi, o.right.ctx), o.op)
            for o in ex.cautious_orderings if o.penalty == INFINITE
        ),
    )


def _as_learning_task(task: ContextTask) -> LearningTask:
    return lift_to_noisy(task)


def is_context_solution(task: ContextTask, rule_ids) -> bool:
    """True when the hypothesis covers every example of the task."""
    lifted = _as_learning_task(task)
    return verify(lifted, rule_ids).is_solution


# ---------------------------------------------------------------------------
# Hypotheses and verification


def hypothesis_program(task: LearningTask, rule_ids) -> Program:
    return Program(tuple(task.space[r].rule for r in sorted(set(rule_ids))))


def hypothesis_length(task: LearningTask, rule_ids) -> int:
    return sum(task.space[r].length for r in set(rule_ids))


def verify(task: LearningTask, rule_ids) -> CoverageReport:
    """Score a hypothesis against the full task."""
    report = evaluate_coverage(
        task.background, hypothesis_program(task, rule_ids), task.examples
    )
    return replace(report, hypothesis_length=hypothesis_length(task, rule_ids))


# ---------------------------------------------------------------------------
# Results


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    relevant: int
    incumbent: Optional[float]
    bound: float


@dataclass(frozen=True)
class HypothesisConstraint:
    """The acceptance test one example (or a group of identical examples)
    imposes on hypotheses.  `holds(rule_ids)` is true exactly when the
    hypothesis covers the example; verdicts are computed on demand and
    cached by rule-id vector."""

    example_ids: "tuple[str, ...]"
    penalty: float
    _engine: "_Engine"
    _cluster: int

    def holds(self, rule_ids) -> bool:
        return self._engine.verdict(self._cluster, tuple(sorted(set(rule_ids))))

    @property
    def verdicts(self) -> "dict[tuple[int, ...], bool]":
        return dict(self._engine.memo[self._cluster])


@dataclass(frozen=True)
class SolveResult:
    status: str  # "optimal" | "feasible" | "unsatisfiable"
    rule_ids: "tuple[int, ...]"
    hypothesis: Program
    score: float
    report: CoverageReport
    certificate: bool
    iterations: int
    runtime: float
    trace: "tuple[IterationRecord, ...]"
    constraints: "tuple[HypothesisConstraint, ...]"

    @property
    def is_solution(self) -> bool:
        return self.report.is_solution


# ---------------------------------------------------------------------------
# Matching rule instances against a fixed interpretation


def _rule_parts(rule: Rule):
    if isinstance(rule, NormalRule):
        body = rule.body
    elif isinstance(rule, (ChoiceRule, HardConstraint, WeakConstraint)):
        body = rule.body
    else:  # pragma: no cover - exhaustive over rule kinds
        raise TypeError(rule)
    pos, neg, comps = [], [], []
    for elem in body:
        if isinstance(elem, Comparison):
            comps.append(elem)
        elif elem.positive:
            pos.append(elem.atom)
        else:
            neg.append(elem.atom)
    return pos, neg, comps


def _match_term(pattern: Term, value: Term, theta: dict) -> Optional[dict]:
    if isinstance(pattern, Variable):
        bound = theta.get(pattern)
        if bound is None:
            out = dict(theta)
            out[pattern] = value
            return out
        return theta if bound == value else None
    if isinstance(pattern, Constant):
        return theta if pattern == value else None
    # compound pattern
    if not hasattr(value, "functor") or pattern.functor != value.functor:
        return None
    if len(pattern.args) != len(value.args):
        return None
    for p, v in zip(pattern.args, value.args):
        theta = _match_term(p, v, theta)
        if theta is None:
            return None
    return theta


def _substitutions(rule: Rule, interp: "frozenset[Atom]") -> Iterator[dict]:
    """Substitutions making the rule's body true in the interpretation."""
    pos, neg, comps = _rule_parts(rule)
    by_pred: dict = {}
    for a in interp:
        by_pred.setdefault((a.pred, len(a.args)), []).append(a)

    def extend(i: int, theta: dict) -> Iterator[dict]:
        if i == len(pos):
            for comp in comps:
                if not comp.apply(theta).holds():
                    return
            for atom in neg:
                if atom.apply(theta) in interp:
                    return
            yield theta
            return
        want = pos[i]
        for candidate in by_pred.get((want.pred, len(want.args)), ()):
            theta2 = theta
            for p, v in zip(want.args, candidate.args):
                theta2 = _match_term(p, v, theta2)
                if theta2 is None:
                    break
            if theta2 is not None:
                yield from extend(i + 1, theta2)

    yield from extend(0, {})


def _breaks(rule: Rule, interp: "frozenset[Atom]") -> bool:
    """True when adding the rule would stop the interpretation from being an
    answer set: a normal rule deriving a missing atom, a choice whose bounds
    fail, or a constraint that fires.  Weak constraints never break."""
    if isinstance(rule, WeakConstraint):
        return False
    for theta in _substitutions(rule, interp):
        if isinstance(rule, NormalRule):
            if rule.head.apply(theta) not in interp:
                return True
        elif isinstance(rule, ChoiceRule):
            heads = {h.apply(theta) for h in rule.heads}
            chosen = len(heads & interp)
            if chosen < rule.lower or chosen > rule.upper:
                return True
        else:  # HardConstraint
            return True
    return False


def _weak_profile(rule: WeakConstraint, interp: "frozenset[Atom]"):
    """(level, summed weight) of the rule's violated instances on a fixed
    interpretation, or None when a weight or level is not an integer."""
    if not (isinstance(rule.level, Constant) and rule.level.is_int):
        return None
    total = 0
    seen = set()
    variables = tuple(sorted(set(v for a in _rule_parts(rule)[0] for v in a.vars()),
                             key=lambda v: v.name))
    for theta in _substitutions(rule, interp):
        key = tuple(theta.get(v) for v in variables)
        if key in seen:
            continue
        seen.add(key)
        w = rule.weight
        if isinstance(w, Variable):
            w = theta.get(w)
        if not (isinstance(w, Constant) and w.is_int):
            return None
        total += w.value
    return rule.level.value, total


# ---------------------------------------------------------------------------
# Example clustering


@dataclass(frozen=True)
class _Cluster:
    kind: str  # "pos" | "neg" | "brave" | "cautious"
    penalty: float
    rep: object
    member_ids: "tuple[str, ...]"


def _cdpi_sig(e: WeightedCDPI):
    return (e.pi.inc, e.pi.exc, e.ctx)


def _build_clusters(examples: ExampleSet) -> "list[_Cluster]":
    groups: dict = {}
    order: list = []

    def add(kind, sig, eid, penalty, rep):
        key = (kind, sig)
        if key not in groups:
            groups[key] = [kind, 0.0, rep, []]
            order.append(key)
        groups[key][1] += penalty
        groups[key][3].append(eid)

    for e in examples.positives:
        add("pos", _cdpi_sig(e), e.eid, e.penalty, e)
    for e in examples.negatives:
        add("neg", _cdpi_sig(e), e.eid, e.penalty, e)
    for o in examples.brave_orderings:
        add("brave", (o.op, _cdpi_sig(o.left), _cdpi_sig(o.right)), o.eid, o.penalty, o)
    for o in examples.cautious_orderings:
        add("cautious", (o.op, _cdpi_sig(o.left), _cdpi_sig(o.right)), o.eid, o.penalty, o)
    return [
        _Cluster(kind, pen, rep, tuple(ids))
        for kind, pen, rep, ids in (groups[k] for k in order)
    ]


# ---------------------------------------------------------------------------
# Engine: verdict cache over clustered examples


class _Engine:
    def __init__(self, task: LearningTask):
        self.task = task
        self.space = task.space
        self.lengths = [sr.length for sr in task.space]
        self.clusters = _build_clusters(task.examples)
        self.memo: "list[dict[tuple[int, ...], bool]]" = [{} for _ in self.clusters]
        self._progs: "dict[tuple[int, ...], Program]" = {}
        self._breaker_cache: "dict[frozenset[Atom], tuple[int, ...]]" = {}

    def hyp(self, rids: "tuple[int, ...]") -> Program:
        prog = self._progs.get(rids)
        if prog is None:
            prog = hypothesis_program(self.task, rids)
            self._progs[rids] = prog
        return prog

    def length(self, rids) -> int:
        return sum(self.lengths[r] for r in rids)

    def verdict(self, c: int, rids: "tuple[int, ...]") -> bool:
        got = self.memo[c].get(rids)
        if got is not None:
            return got
        cluster = self.clusters[c]
        base = self.task.background + self.hyp(rids)
        if cluster.kind == "pos":
            out = _coverage_pos(base, cluster.rep)
        elif cluster.kind == "neg":
            out = not _coverage_pos(base, cluster.rep)
        elif cluster.kind == "brave":
            from .coverage import respects_brave_ordering

            out = respects_brave_ordering(base, cluster.rep)
        else:
            from .coverage import respects_cautious_ordering

            out = respects_cautious_ordering(base, cluster.rep)
        self.memo[c][rids] = out
        return out

    def score(self, rids: "tuple[int, ...]"):
        """(verified score, uncovered cluster indexes)."""
        uncovered = tuple(
            c for c in range(len(self.clusters)) if not self.verdict(c, rids)
        )
        total = self.length(rids) + sum(self.clusters[c].penalty for c in uncovered)
        return total, uncovered

    def relevant_count(self) -> int:
        return sum(1 for m in self.memo if m)

    def breakers(self, interp: "frozenset[Atom]") -> "tuple[int, ...]":
        got = self._breaker_cache.get(interp)
        if got is None:
            got = tuple(
                sr.rid for sr in self.space if _breaks(sr.rule, interp)
            )
            self._breaker_cache[interp] = got
        return got

    def constraints(self) -> "tuple[HypothesisConstraint, ...]":
        return tuple(
            HypothesisConstraint(cl.member_ids, cl.penalty, self, c)
            for c, cl in enumerate(self.clusters)
        )


def _coverage_pos(base: Program, example: WeightedCDPI) -> bool:
    from .coverage import accepts

    return accepts(base, example)


# ---------------------------------------------------------------------------
# Exhaustive strategy for small spaces (certified)


def _solve_exact(engine: _Engine, deadline, max_iterations, t0):
    task = engine.task
    n = len(task.space)
    nmask = 1 << n
    mask_len = [0] * nmask
    for m in range(1, nmask):
        low = (m & -m).bit_length() - 1
        mask_len[m] = mask_len[m & (m - 1)] + engine.lengths[low]

    def rids_of(m):
        out = []
        i = 0
        while m:
            if m & 1:
                out.append(i)
            m >>= 1
            i += 1
        return tuple(out)

    known_pen: "dict[int, float]" = {}
    incumbent: Optional[tuple] = None  # (score, rids)
    trace: list = []
    iteration = 0
    status = "feasible"
    certificate = False

    while True:
        iteration += 1
        bound = INFINITE
        ties: list = []
        for m in range(nmask):
            opt = mask_len[m] + known_pen.get(m, 0.0)
            if opt < bound:
                bound = opt
                ties = [m]
            elif opt == bound:
                ties.append(m)
        chosen = min(ties, key=rids_of)
        rids = rids_of(chosen)
        true_score, uncovered = engine.score(rids)
        known_pen[chosen] = sum(engine.clusters[c].penalty for c in uncovered)
        if incumbent is None or (true_score, rids) < incumbent:
            incumbent = (true_score, rids)
        trace.append(
            IterationRecord(iteration, engine.relevant_count(), incumbent[0], bound)
        )
        log.info(
            "iteration=%d relevant=%d incumbent=%s bound=%s",
            iteration, engine.relevant_count(), incumbent[0], bound,
        )
        if bound == INFINITE:
            status, certificate = "unsatisfiable", True
            incumbent = (INFINITE, ())
            break
        if true_score == bound:
            status, certificate = "optimal", True
            incumbent = (true_score, rids)
            break
        if max_iterations is not None and iteration >= max_iterations:
            break
        if deadline is not None and time.monotonic() > deadline:
            break

    return incumbent, status, certificate, iteration, trace


# ---------------------------------------------------------------------------
# Weak-constraint-only strategy (delta matrices + beam search)


_SIGN_TESTS = {
    "<": lambda s: s < 0,
    "<=": lambda s: s <= 0,
    "=": lambda s: s == 0,
    "!=": lambda s: s != 0,
    ">": lambda s: s > 0,
    ">=": lambda s: s >= 0,
}


def _program_has_weaks(prog: Program) -> bool:
    return any(isinstance(r, WeakConstraint) for r in prog)


def _weak_terms_canonical(rule: WeakConstraint) -> bool:
    terms = rule.terms
    if len(set(terms)) != len(terms):
        return False
    if not all(isinstance(t, Variable) for t in terms):
        return False
    body_vars = set(v for a in _rule_parts(rule)[0] for v in a.vars())
    return set(terms) == body_vars


class _WeakModel:
    """Per-level violation deltas of every space rule on every ordering,
    valid when each ordering side has exactly one accepting answer set and
    no weak constraints live outside the space."""

    def __init__(self, engine: _Engine):
        self.engine = engine
        self.ok = False
        task = engine.task
        if _program_has_weaks(task.background):
            return
        for sr in task.space:
            if sr.kind != "weak" or not _weak_terms_canonical(sr.rule):
                return

        self.const_pen = 0.0
        self.const_unsat = False
        sides: list = []  # (cluster idx, left interp, right interp)
        for c, cl in enumerate(engine.clusters):
            if cl.kind in ("pos", "neg"):
                # weak rules never change answer sets, so the verdict is
                # hypothesis-independent
                if not engine.verdict(c, ()):
                    self.const_pen += cl.penalty
                continue
            if _program_has_weaks(cl.rep.left.ctx) or _program_has_weaks(cl.rep.right.ctx):
                return
            left = _accepting_sets(task.background, cl.rep.left, 2)
            right = _accepting_sets(task.background, cl.rep.right, 2)
            if len(left) > 1 or len(right) > 1:
                return
            if not left or not right:
                covered = cl.kind == "cautious"  # vacuous truth
                if not covered:
                    self.const_pen += cl.penalty
                continue
            sides.append((c, left[0], right[0]))
        if self.const_pen == INFINITE:
            self.const_unsat = True

        import numpy as np

        self.np = np
        self.orderings = [c for c, _, _ in sides]
        n_ord = len(sides)
        n_rules = len(task.space)
        levels = sorted(
            {p[0] for sr in task.space
             for p in [_weak_profile(sr.rule, frozenset())] if p is not None},
            reverse=True,
        )
        profiles: "dict[tuple[int, int], dict[int, int]]" = {}
        for j, (_, left, right) in enumerate(sides):
            for sr in task.space:
                pl = _weak_profile(sr.rule, left)
                pr = _weak_profile(sr.rule, right)
                if pl is None or pr is None:
                    return
                delta = pl[1] - pr[1]
                if delta:
                    profiles.setdefault((sr.rid, j), {})[pl[0]] = delta
        self.levels = levels
        self.mats = {
            lvl: np.zeros((n_rules, n_ord), dtype=np.int64) for lvl in levels
        }
        for (rid, j), per_level in profiles.items():
            for lvl, d in per_level.items():
                self.mats[lvl][rid, j] = d
        self.pens = np.array(
            [engine.clusters[c].penalty for c in self.orderings], dtype=np.float64
        )
        self.ops = [engine.clusters[c].rep.op for c in self.orderings]
        self.lengths = np.array(engine.lengths, dtype=np.float64)
        self.active = sorted(
            {rid for (rid, _j) in profiles}
        )
        self.ok = True

    def _violation_pen(self, signs):
        np = self.np
        miss = np.zeros(len(self.orderings), dtype=bool)
        for j, op in enumerate(self.ops):
            miss[j] = not _SIGN_TESTS[op](int(signs[j]))
        return float(self.pens[miss].sum())

    def score(self, rids: "tuple[int, ...]") -> float:
        np = self.np
        n_ord = len(self.orderings)
        verdict = np.zeros(n_ord, dtype=np.int64)
        for lvl in self.levels:
            d = self.mats[lvl][list(rids)].sum(axis=0) if rids else np.zeros(n_ord, dtype=np.int64)
            verdict = np.where(verdict == 0, np.sign(d), verdict)
        return (
            self.const_pen
            + float(sum(self.engine.lengths[r] for r in rids))
            + self._violation_pen(verdict)
        )

    def scores_with_added(self, rids: "tuple[int, ...]"):
        """Score of rids + {r} for every rule r, vectorized."""
        np = self.np
        n_rules = len(self.engine.lengths)
        n_ord = len(self.orderings)
        verdict = np.zeros((n_rules, n_ord), dtype=np.int64)
        for lvl in self.levels:
            base = self.mats[lvl][list(rids)].sum(axis=0) if rids else np.zeros(n_ord, dtype=np.int64)
            d = self.mats[lvl] + base[None, :]
            verdict = np.where(verdict == 0, np.sign(d), verdict)
        miss = np.zeros((n_rules, n_ord), dtype=bool)
        for j, op in enumerate(self.ops):
            s = verdict[:, j]
            if op == "<":
                ok = s < 0
            elif op == "<=":
                ok = s <= 0
            elif op == "=":
                ok = s == 0
            elif op == "!=":
                ok = s != 0
            elif op == ">":
                ok = s > 0
            else:
                ok = s >= 0
            miss[:, j] = ~ok
        pen = (miss * self.pens[None, :]).sum(axis=1)
        base_len = float(sum(self.engine.lengths[r] for r in rids))
        return self.const_pen + base_len + self.lengths + pen


def _accepting_sets(background: Program, example: WeightedCDPI, limit: int):
    gp, models = _accepting_ids(background, example)
    out = []
    if models is None:
        return out
    for ids in models:
        out.append(frozenset(gp.atoms[i] for i in ids))
        if len(out) >= limit:
            break
    return out


def _pair_sweep(model: _WeakModel, keep: int):
    """Exact scores of every singleton and every pair of active rules,
    keeping the best `keep` partners per rule.  The global optimum over
    hypotheses of at most two rules is always among the results."""
    np = model.np
    act = np.array(model.active, dtype=np.int64)
    found: "dict[tuple[int, ...], float]" = {(): model.score(())}
    singles = model.scores_with_added(())
    for r in model.active:
        found[(r,)] = float(singles[r])
    k = min(keep, len(act))
    for i in model.active:
        row = model.scores_with_added((i,))[act]
        for jj in np.argpartition(row, k - 1)[:k]:
            q = int(act[jj])
            if q != i:
                found.setdefault(tuple(sorted((i, q))), float(row[jj]))
    return sorted(((s, rids) for rids, s in found.items()), key=lambda kv: (kv[0], kv[1]))


# Pair sweeps are skipped when rules x rules x orderings x levels blows past
# this many vectorized cells.
_SWEEP_CELL_CAP = 400_000_000


def _solve_weak(engine: _Engine, model: _WeakModel, deadline, max_iterations,
                beam_width: int):
    if model.const_unsat:
        # an infinite-penalty example is uncovered and no weak rule can
        # change any answer set, so every hypothesis fails it
        return (INFINITE, ()), "unsatisfiable", True, 0, []

    trace: list = []
    if not model.orderings:
        rec = IterationRecord(1, engine.relevant_count(), model.const_pen, model.const_pen)
        return (model.const_pen, ()), "optimal", True, 1, [rec]

    candidates = model.active
    n_rules = len(engine.lengths)
    sweep_cells = (
        n_rules * n_rules * len(model.orderings) * max(len(model.levels), 1)
    )
    if candidates and sweep_cells <= _SWEEP_CELL_CAP:
        beam = [(s, r) for s, r in _pair_sweep(model, beam_width)[:beam_width]]
    else:
        beam = [((model.score(())), ())]
    best = beam[0]
    iteration = 0
    stale = 0
    while True:
        iteration += 1
        pool: "dict[tuple[int, ...], float]" = {r: s for s, r in beam}
        for base_score, rids in beam:
            adds = model.scores_with_added(rids)
            order = sorted(candidates, key=lambda r: (adds[r], r))
            for r in order[: beam_width * 2]:
                if r in rids:
                    continue
                new = tuple(sorted(rids + (r,)))
                if new not in pool:
                    pool[new] = float(adds[r])
            for r in rids:
                rest = tuple(x for x in rids if x != r)
                if rest not in pool:
                    pool[rest] = model.score(rest)
                swap_scores = model.scores_with_added(rest)
                order = sorted(candidates, key=lambda q: (swap_scores[q], q))
                for q in order[:beam_width]:
                    if q in rest:
                        continue
                    new = tuple(sorted(rest + (q,)))
                    if new not in pool:
                        pool[new] = float(swap_scores[q])
        ranked = sorted(pool.items(), key=lambda kv: (kv[1], kv[0]))
        beam = [(s, r) for r, s in ranked[:beam_width]]
        head = (beam[0][0], beam[0][1])
        if head < best:
            best = head
            stale = 0
        else:
            stale += 1
        trace.append(IterationRecord(iteration, len(model.orderings), best[0], 0.0))
        log.info(
            "iteration=%d relevant=%d incumbent=%s bound=%s",
            iteration, len(model.orderings), best[0], 0.0,
        )
        if stale >= 4 or iteration >= 60:
            break
        if max_iterations is not None and iteration >= max_iterations:
            break
        if deadline is not None and time.monotonic() > deadline:
            break
    return best, "feasible", False, iteration, trace


# ---------------------------------------------------------------------------
# Classification strategy: generating rules plus filtering constraints

_CLASSIFY_AS_CAP = 4096
_CLASSIFY_BEAM = 6
_CLASSIFY_LAYERS = 10
_CLASSIFY_STALE = 4
# Below this many space rules the clause strategy is preferred: it's
# complete and certifies optima, while the decomposition beam does not.
_CLASSIFY_MIN_SPACE = 64


def _constraint_instances(rule: Rule, atoms):
    """Ground (positive, negative) body-atom pairs of the constraint whose
    positive body lies inside `atoms` and whose comparisons hold.  Negative
    literals are collected, not filtered: they are checked per answer set."""
    pos, neg, comps = _rule_parts(rule)
    by_pred: dict = {}
    for a in atoms:
        by_pred.setdefault((a.pred, len(a.args)), []).append(a)
    out = []

    def extend(i: int, theta: dict):
        if i == len(pos):
            for comp in comps:
                if not comp.apply(theta).holds():
                    return
            out.append((
                frozenset(a.apply(theta) for a in pos),
                frozenset(a.apply(theta) for a in neg),
            ))
            return
        want = pos[i]
        for candidate in by_pred.get((want.pred, len(want.args)), ()):
            theta2 = theta
            for p, v in zip(want.args, candidate.args):
                theta2 = _match_term(p, v, theta2)
                if theta2 is None:
                    break
            if theta2 is not None:
                extend(i + 1, theta2)

    extend(0, {})
    return out


def _minimal_masks(masks):
    """Subset-minimal distinct masks; they decide acceptance on both sides
    (a set disjoint from a subset mask is disjoint from its supersets, and
    hitting every minimal mask hits every superset)."""
    uniq = sorted(set(masks), key=lambda m: (bin(m).count("1"), m))
    out: "list[int]" = []
    for m in uniq:
        if not any(p & m == p for p in out):
            out.append(m)
    return out


def _bits_of(mask: int):
    out = []
    b = 0
    while mask:
        if mask & 1:
            out.append(b)
        mask >>= 1
        b += 1
    return out


def _best_constraint_bits(entries, bit_lengths, bits):
    """Pick constraint bits minimizing constraint length plus uncovered
    penalties.  entries: (is_pos, penalty, masks); a positive needs some
    mask disjoint from the choice, a negative needs every mask hit.
    Best-improvement bit flips from the empty choice, then greedy hitting
    sets for still-uncovered negatives, repeated to a fixpoint."""

    def total(chosen: int) -> float:
        s = 0.0
        for b in bits:
            if chosen >> b & 1:
                s += bit_lengths[b]
        for is_pos, pen, masks in entries:
            if is_pos:
                if all(m & chosen for m in masks):
                    s += pen
            else:
                if any(m & chosen == 0 for m in masks):
                    s += pen
        return s

    chosen = 0
    best = total(chosen)
    improved = True
    while improved:
        improved = False
        while True:
            step = None
            for b in bits:
                c2 = chosen ^ (1 << b)
                s2 = total(c2)
                if s2 < best - 1e-9 and (step is None or (s2, c2) < step):
                    step = (s2, c2)
            if step is None:
                break
            best, chosen = step
            improved = True
        for is_pos, pen, masks in entries:
            if is_pos:
                continue
            if not any(m & chosen == 0 for m in masks):
                continue
            add = 0
            for m in masks:
                if m & (chosen | add) == 0:
                    b = min(_bits_of(m), key=lambda b2: (bit_lengths[b2], b2))
                    add |= 1 << b
            if add:
                s2 = total(chosen | add)
                if s2 < best - 1e-9:
                    best, chosen = s2, chosen | add
                    improved = True
    return best, chosen


class _ClassifyModel:
    """Acceptance decomposition for spaces without weak rules on tasks whose
    examples are all pos/neg interpretations: a hypothesis splits into a
    generating part (normal and choice rules) and hard constraints, and the
    constraints only filter the answer sets the generating part admits."""

    def __init__(self, engine: _Engine):
        self.engine = engine
        self.ok = False
        task = engine.task
        if _program_has_weaks(task.background):
            return
        if any(sr.kind == "weak" for sr in task.space):
            return
        if any(cl.kind not in ("pos", "neg") for cl in engine.clusters):
            return
        self.gen_ids = tuple(
            sr.rid for sr in task.space if sr.kind in ("normal", "choice")
        )
        self.con_ids = tuple(sr.rid for sr in task.space if sr.kind == "constraint")
        if not self.gen_ids or not self.con_ids:
            return

        import numpy as np

        self.np = np
        self.con_len = {i: engine.lengths[rid] for i, rid in enumerate(self.con_ids)}
        self._accept_memo: dict = {}
        self._inst_memo: dict = {}
        self._mask_memo: dict = {}
        self._eval_memo: dict = {}
        self.ok = True

    def accepting(self, gens: "tuple[int, ...]", c: int):
        """Accepting answer sets of background + generators on the cluster's
        context, or None when enumeration overflows the cap."""
        key = (gens, c)
        if key in self._accept_memo:
            return self._accept_memo[key]
        base = self.engine.task.background + self.engine.hyp(gens)
        sets = _accepting_sets(base, self.engine.clusters[c].rep, _CLASSIFY_AS_CAP + 1)
        out = None if len(sets) > _CLASSIFY_AS_CAP else tuple(sets)
        self._accept_memo[key] = out
        return out

    def _instances(self, rid: int, vocab, atoms):
        key = (rid, vocab)
        got = self._inst_memo.get(key)
        if got is None:
            got = _constraint_instances(self.engine.space[rid].rule, atoms)
            self._inst_memo[key] = got
        return got

    def _masks_for(self, sets):
        """Minimal violated-constraint masks over the accepting sets."""
        got = self._mask_memo.get(sets)
        if got is not None:
            return got
        np = self.np
        atoms = sorted(set().union(*sets), key=str)
        index = {a: i for i, a in enumerate(atoms)}
        words = (len(atoms) + 63) // 64 or 1
        k = len(sets)
        as_bits = np.zeros((k, words), dtype=np.uint64)
        for j, s in enumerate(sets):
            for a in s:
                i = index[a]
                as_bits[j, i >> 6] |= np.uint64(1 << (i & 63))
        masks = [0] * k
        vocab = frozenset(atoms)
        for ci, rid in enumerate(self.con_ids):
            insts = self._instances(rid, vocab, atoms)
            if not insts:
                continue
            n = len(insts)
            pos_b = np.zeros((n, words), dtype=np.uint64)
            neg_b = np.zeros((n, words), dtype=np.uint64)
            for t, (ps, ns) in enumerate(insts):
                for a in ps:
                    i = index[a]
                    pos_b[t, i >> 6] |= np.uint64(1 << (i & 63))
                for a in ns:
                    i = index.get(a)
                    # negative atoms outside the vocabulary are never true
                    if i is not None:
                        neg_b[t, i >> 6] |= np.uint64(1 << (i & 63))
            hit = ((as_bits[None, :, :] & pos_b[:, None, :]) == pos_b[:, None, :]).all(2)
            clean = ((as_bits[None, :, :] & neg_b[:, None, :]) == 0).all(2)
            fires = (hit & clean).any(0)
            for j in np.nonzero(fires)[0]:
                masks[int(j)] |= 1 << ci
        out = tuple(_minimal_masks(masks))
        self._mask_memo[sets] = out
        return out

    def evaluate(self, gens: "tuple[int, ...]"):
        """(score, constraint rids, behavior fingerprint) of the generator
        choice with its best constraint completion, or None on overflow."""
        if gens in self._eval_memo:
            return self._eval_memo[gens]
        pen0 = 0.0
        entries: list = []
        fp: list = []
        for c, cl in enumerate(self.engine.clusters):
            sets = self.accepting(gens, c)
            if sets is None:
                self._eval_memo[gens] = None
                return None
            if not sets:
                if cl.kind == "pos":
                    pen0 += cl.penalty
                fp.append(None)
                continue
            masks = self._masks_for(sets)
            fp.append(masks)
            if cl.kind == "neg" and any(m == 0 for m in masks):
                # an answer set violating nothing survives any constraints
                pen0 += cl.penalty
                continue
            entries.append((cl.kind == "pos", cl.penalty, masks))

        relevant = 0
        for is_pos, _pen, masks in entries:
            if not is_pos:
                for m in masks:
                    relevant |= m
        reduced: list = []
        for is_pos, pen, masks in entries:
            if is_pos:
                rm = _minimal_masks(m & relevant for m in masks)
                if rm[0] == 0:
                    continue  # some answer set evades every useful constraint
                reduced.append((True, pen, rm))
            else:
                reduced.append((False, pen, masks))
        bits = _bits_of(relevant)
        extra, chosen = _best_constraint_bits(reduced, self.con_len, bits)
        cons = tuple(self.con_ids[b] for b in _bits_of(chosen))
        score = self.engine.length(gens) + pen0 + extra
        out = (score, cons, tuple(fp))
        self._eval_memo[gens] = out
        return out


def _solve_classify(engine: _Engine, model: _ClassifyModel, deadline,
                    max_iterations):
    """Beam search over the generating part with exact-ish constraint
    completion per candidate.  Returns None when the base evaluation
    overflows, handing the task back to the clause strategy."""

    def entry(gens):
        r = model.evaluate(gens)
        if r is None:
            return None
        score, cons, fp = r
        return (score, tuple(sorted(gens + cons)), gens, fp)

    e0 = entry(())
    if e0 is None:
        return None
    clusters = engine.clusters
    order = sorted(
        range(len(clusters)), key=lambda c: (len(clusters[c].rep.ctx), c)
    )
    probes = sorted(
        {order[(i * (len(order) - 1)) // 5] for i in range(6)}
    ) if order else []

    def probe_fp(gens):
        fp = []
        for c in probes:
            sets = model.accepting(gens, c)
            if sets is None:
                return None
            fp.append(sets)
        return tuple(fp)

    beam = [e0]
    best = e0
    stale = 0
    iteration = 0
    trace: list = []
    while True:
        iteration += 1
        groups: dict = {}
        expansions = {g for _s, _r, g, _f in beam[:2]}
        out_of_time = False
        for gens in sorted(expansions):
            for r in model.gen_ids:
                if r in gens:
                    continue
                g2 = tuple(sorted(gens + (r,)))
                if g2 in model._eval_memo:
                    continue
                pf = probe_fp(g2)
                if pf is None:
                    continue
                cand = (engine.lengths[r], g2)
                if groups.setdefault(pf, cand) > cand:
                    groups[pf] = cand
            if deadline is not None and time.monotonic() > deadline:
                out_of_time = True
                break
        cands = {g2 for _l, g2 in groups.values()}
        for _s, _r, gens, _f in beam:
            for r in gens:
                cands.add(tuple(x for x in gens if x != r))
        pool: dict = {e[2]: e for e in beam}
        pool.setdefault(best[2], best)
        for g2 in sorted(cands):
            e = entry(g2)
            if e is not None:
                pool[g2] = e
            if deadline is not None and time.monotonic() > deadline:
                out_of_time = True
                break
        ranked = sorted(pool.values())
        beam = []
        seen_fp: set = set()
        for e in ranked:
            if e[3] in seen_fp:
                continue
            seen_fp.add(e[3])
            beam.append(e)
            if len(beam) >= _CLASSIFY_BEAM:
                break
        if beam[0][:2] < best[:2]:
            best = beam[0]
            stale = 0
        else:
            stale += 1
        trace.append(
            IterationRecord(iteration, engine.relevant_count(), best[0], 0.0)
        )
        log.info(
            "iteration=%d relevant=%d incumbent=%s bound=%s",
            iteration, engine.relevant_count(), best[0], 0.0,
        )
        if stale >= _CLASSIFY_STALE or iteration >= _CLASSIFY_LAYERS:
            break
        if max_iterations is not None and iteration >= max_iterations:
            break
        if out_of_time or (deadline is not None and time.monotonic() > deadline):
            break
    return (best[0], best[1]), "feasible", False, iteration, trace


# ---------------------------------------------------------------------------
# Clause-guided counterexample strategy


@dataclass(frozen=True)
class _Clause:
    """Covering the cluster's example requires including one of `pos` or
    excluding one of `neg`; otherwise the example is provably uncovered."""

    cluster: int
    pos: "tuple[int, ...]"
    neg: "tuple[int, ...]"


class _ClauseSearch:
    """Branch-and-bound over rule selections against the clause store.
    Minimizes hypothesis length plus penalties of clusters whose clauses are
    all falsified, plus penalties recorded for exactly-matching verified
    hypotheses.  Free rules default to excluded."""

    def __init__(self, engine: _Engine, clauses, memo_uncovered, node_budget,
                 seed_best):
        self.engine = engine
        self.clauses = clauses
        self.memo_uncovered = memo_uncovered
        self.node_budget = node_budget
        self.best = seed_best  # (score, rids) or None
        self.exhausted = True
        self.pens = [cl.penalty for cl in engine.clusters]

        self.occ_pos: "dict[int, list[int]]" = {}
        self.occ_neg: "dict[int, list[int]]" = {}
        for i, c in enumerate(clauses):
            for r in c.pos:
                self.occ_pos.setdefault(r, []).append(i)
            for r in c.neg:
                self.occ_neg.setdefault(r, []).append(i)
        self.sat = [0] * len(clauses)
        self.unassigned = [len(c.pos) + len(c.neg) for c in clauses]
        self.forced = [0] * len(engine.clusters)
        self.inc: "set[int]" = set()
        self.exc: "set[int]" = set()
        self.length = 0.0
        # Infinite penalties are counted, not summed: inf - inf is nan and
        # would poison every later comparison on backtrack.
        self.pen_fin = 0.0
        self.pen_inf = 0

    def _pen(self) -> float:
        return INFINITE if self.pen_inf else self.pen_fin

    def _falsify_check(self, ci):
        if self.sat[ci] == 0 and self.unassigned[ci] == 0:
            cl = self.clauses[ci].cluster
            self.forced[cl] += 1
            if self.forced[cl] == 1:
                if self.pens[cl] == INFINITE:
                    self.pen_inf += 1
                else:
                    self.pen_fin += self.pens[cl]

    def _unfalsify(self, ci):
        cl = self.clauses[ci].cluster
        self.forced[cl] -= 1
        if self.forced[cl] == 0:
            if self.pens[cl] == INFINITE:
                self.pen_inf -= 1
            else:
                self.pen_fin -= self.pens[cl]

    def _assign(self, rid: int, included: bool):
        if included:
            self.inc.add(rid)
            self.length += self.engine.lengths[rid]
            for ci in self.occ_pos.get(rid, ()):
                self.sat[ci] += 1
            for ci in self.occ_neg.get(rid, ()):
                self.unassigned[ci] -= 1
                self._falsify_check(ci)
        else:
            self.exc.add(rid)
            for ci in self.occ_neg.get(rid, ()):
                self.sat[ci] += 1
            for ci in self.occ_pos.get(rid, ()):
                self.unassigned[ci] -= 1
                self._falsify_check(ci)

    def _unassign(self, rid: int, included: bool):
        if included:
            self.inc.discard(rid)
            self.length -= self.engine.lengths[rid]
            for ci in self.occ_pos.get(rid, ()):
                self.sat[ci] -= 1
            for ci in self.occ_neg.get(rid, ()):
                if self.sat[ci] == 0 and self.unassigned[ci] == 0:
                    self._unfalsify(ci)
                self.unassigned[ci] += 1
        else:
            self.exc.discard(rid)
            for ci in self.occ_neg.get(rid, ()):
                self.sat[ci] -= 1
            for ci in self.occ_pos.get(rid, ()):
                if self.sat[ci] == 0 and self.unassigned[ci] == 0:
                    self._unfalsify(ci)
                self.unassigned[ci] += 1

    def _select(self) -> Optional[int]:
        pick = None
        width = None
        for i in range(len(self.clauses)):
            if self.sat[i] or self.unassigned[i] == 0:
                continue
            if self.forced[self.clauses[i].cluster]:
                continue
            if width is None or self.unassigned[i] < width:
                pick, width = i, self.unassigned[i]
        return pick

    def _leaf(self):
        rids = tuple(sorted(self.inc))
        extra = 0.0
        for c, pen in self.memo_uncovered.get(rids, ()):
            if not self.forced[c]:
                extra += pen
        score = self.length + self._pen() + extra
        cand = (score, rids)
        if self.best is None or cand < self.best:
            self.best = cand

    def _search(self):
        if self.node_budget <= 0:
            self.exhausted = False
            return
        self.node_budget -= 1
        lb = self.length + self._pen()
        if self.best is not None and lb > self.best[0]:
            return
        ci = self._select()
        if ci is None:
            self._leaf()
            return
        clause = self.clauses[ci]
        # each child satisfies one literal with all earlier ones falsified;
        # the final child falsifies the whole clause and pays the penalty
        literals = [
            (r, True) for r in sorted(clause.pos, key=lambda r: (self.engine.lengths[r], r))
            if r not in self.inc and r not in self.exc
        ] + [
            (r, False) for r in sorted(clause.neg)
            if r not in self.inc and r not in self.exc
        ]
        undo: list = []
        for rid, want_in in literals:
            self._assign(rid, want_in)
            self._search()
            self._unassign(rid, want_in)
            self._assign(rid, not want_in)
            undo.append((rid, not want_in))
        self._search()
        for rid, val in reversed(undo):
            self._unassign(rid, val)

    def run(self):
        import sys

        limit = len(self.clauses) * 4 + 10_000
        if sys.getrecursionlimit() < limit:
            sys.setrecursionlimit(limit)
        for i in range(len(self.clauses)):
            self._falsify_check(i)
        self._search()
        return self.best, self.exhausted


def _generating_ids(engine: _Engine) -> "tuple[int, ...]":
    return tuple(sr.rid for sr in engine.space if sr.kind in ("normal", "choice"))


def _witness_clause(engine: _Engine, c: int, interp, gen_part) -> _Clause:
    return _Clause(c, pos=engine.breakers(interp), neg=tuple(sorted(gen_part)))


def _core_clause(engine: _Engine, c: int, rids: "tuple[int, ...]") -> _Clause:
    gen = set(_generating_ids(engine))
    g_part = sorted(set(rids) & gen)
    core = [r for r in sorted(set(rids)) if engine.space[r].kind == "constraint"]
    for r in list(core):
        trial = tuple(sorted(set(g_part) | (set(core) - {r})))
        if not engine.verdict(c, trial):
            core.remove(r)
    return _Clause(
        c,
        pos=tuple(sorted(gen - set(g_part))),
        neg=tuple(sorted(set(g_part) | set(core))),
    )


def _solve_cegis(engine: _Engine, deadline, max_iterations, node_budget):
    task = engine.task
    clauses: "list[_Clause]" = []
    seen: set = set()
    # Penalties charged at exactly-matching leaves; holds only clusters that
    # produce no clauses (orderings), so the clause objective stays a true
    # lower bound on tasks without them.
    memo_uncovered: "dict[tuple[int, ...], tuple]" = {}

    def add_clause(cl: _Clause):
        key = (cl.cluster, cl.pos, cl.neg)
        if key not in seen:
            seen.add(key)
            clauses.append(cl)

    certifiable = all(cl.kind in ("pos", "neg") for cl in engine.clusters)
    for c, cl in enumerate(engine.clusters):
        if cl.kind != "neg":
            continue
        base_as = accepting_answer_set(task.background, cl.rep)
        if base_as is not None:
            add_clause(_witness_clause(engine, c, frozenset(base_as), ()))

    incumbent: Optional[tuple] = None
    bound = 0.0
    trace: list = []
    iteration = 0
    status = "feasible"
    certificate = False

    while True:
        iteration += 1
        search = _ClauseSearch(engine, list(clauses), memo_uncovered, node_budget,
                               incumbent)
        best, exhausted = search.run()
        pred_score, rids = best
        if exhausted and certifiable:
            bound = max(bound, pred_score)
        fresh = incumbent is None or (pred_score, rids) < incumbent
        if fresh:
            true_score, uncovered = engine.score(rids)
            memo_uncovered[rids] = tuple(
                (c, engine.clusters[c].penalty)
                for c in uncovered
                if engine.clusters[c].kind not in ("pos", "neg")
            )
            if incumbent is None or (true_score, rids) < incumbent:
                incumbent = (true_score, rids)
            hyp_set = set(rids)
            # highest penalty first, ties by example identifier
            for c in sorted(
                uncovered,
                key=lambda c: (-engine.clusters[c].penalty,
                               engine.clusters[c].member_ids[0]),
            ):
                kind = engine.clusters[c].kind
                if kind == "neg":
                    witness = accepting_answer_set(
                        task.background + engine.hyp(rids), engine.clusters[c].rep
                    )
                    if witness is not None:
                        gen_part = hyp_set & set(_generating_ids(engine))
                        add_clause(_witness_clause(engine, c, frozenset(witness), gen_part))
                elif kind == "pos":
                    add_clause(_core_clause(engine, c, rids))
        trace.append(
            IterationRecord(iteration, engine.relevant_count(),
                            incumbent[0] if incumbent else None, bound)
        )
        log.info(
            "iteration=%d relevant=%d incumbent=%s bound=%s",
            iteration, engine.relevant_count(),
            incumbent[0] if incumbent else None, bound,
        )
        if incumbent is not None and bound >= incumbent[0]:
            status = "unsatisfiable" if bound == INFINITE else "optimal"
            certificate = True
            break
        if not fresh:
            break
        if max_iterations is not None and iteration >= max_iterations:
            break
        if deadline is not None and time.monotonic() > deadline:
            break

    if incumbent is None:
        incumbent = (INFINITE, ())
    return incumbent, status, certificate, iteration, trace


# ---------------------------------------------------------------------------
# Entry point


def solve_optimal(
    task: LearningTask,
    *,
    seed: Optional[int] = None,
    max_iterations: Optional[int] = None,
    budget_seconds: Optional[float] = None,
    exact_threshold: int = 16,
    node_budget: int = 100_000,
    beam_width: int = 8,
) -> SolveResult:
    """Search the rule space for a minimum-score hypothesis.

    The search is deterministic for a given task; `seed` is accepted for
    interface stability and recorded nowhere.  `budget_seconds` is checked
    at iteration boundaries, so runs under a time budget may stop at
    different points on different machines; iteration budgets reproduce
    exactly."""
    del seed
    t0 = time.monotonic()
    deadline = t0 + budget_seconds if budget_seconds is not None else None
    engine = _Engine(task)

    if len(task.space) <= exact_threshold:
        incumbent, status, certificate, iterations, trace = _solve_exact(
            engine, deadline, max_iterations, t0
        )
    else:
        model = _WeakModel(engine)
        classify = None
        if model.ok or getattr(model, "const_unsat", False):
            incumbent, status, certificate, iterations, trace = _solve_weak(
                engine, model, deadline, max_iterations, beam_width
            )
        else:
            if len(task.space) > _CLASSIFY_MIN_SPACE:
                cmodel = _ClassifyModel(engine)
                if cmodel.ok:
                    classify = _solve_classify(engine, cmodel, deadline, max_iterations)
            if classify is not None:
                incumbent, status, certificate, iterations, trace = classify
            else:
                incumbent, status, certificate, iterations, trace = _solve_cegis(
                    engine, deadline, max_iterations, node_budget
                )

    score, rids = incumbent
    report = verify(task, rids)
    if status == "unsatisfiable":
        rids = ()
        report = verify(task, rids)
    return SolveResult(
        status=status,
        rule_ids=rids,
        hypothesis=hypothesis_program(task, rids),
        score=report.score,
        report=report,
        certificate=certificate,
        iterations=iterations,
        runtime=time.monotonic() - t0,
        trace=tuple(trace),
        constraints=engine.constraints(),
    )
