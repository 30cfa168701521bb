"""Grounding: semi-naive bottom-up instantiation of programs.

The grounder computes the set of possibly-derivable atoms by iterating
positive rule bodies to a fixpoint (facts seed the iteration, each round
joins against the atoms discovered in the previous round), then emits
ground rule instances over that set.  Comparison literals are evaluated
away during the join.  A negated body literal whose atom can never be
derived is dropped; rules whose positive body mentions an underivable
atom are never emitted.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import GroundingError
from .parser import MAX_FUNCTION_DEPTH
from .syntax import (
    Atom,
    ChoiceRule,
    Comparison,
    Compound,
    Constant,
    HardConstraint,
    Literal,
    NormalRule,
    Program,
    Rule,
    Term,
    Variable,
    WeakConstraint,
    term_depth,
)

DEFAULT_MAX_RULES = 1_000_000
DEFAULT_MAX_ATOMS = 100_000


# ---------------------------------------------------------------------------
# Ground rule records, over atom ids


@dataclass(frozen=True)
class GNormal:
    head: int
    pos: "tuple[int, ...]"
    neg: "tuple[int, ...]"


@dataclass(frozen=True)
class GChoice:
    lower: int
    upper: int
    heads: "tuple[int, ...]"
    pos: "tuple[int, ...]"
    neg: "tuple[int, ...]"


@dataclass(frozen=True)
class GConstraint:
    pos: "tuple[int, ...]"
    neg: "tuple[int, ...]"


@dataclass(frozen=True)
class GWeak:
    pos: "tuple[int, ...]"
    neg: "tuple[int, ...]"
    weight: int
    level: int
    terms: "tuple[Term, ...]"


GroundRule = "GNormal | GChoice | GConstraint | GWeak"


class GroundProgram:
    """Ground rules plus the atom table mapping ids to atoms."""

    def __init__(self):
        self.atoms: list[Atom] = []
        self.index: dict[Atom, int] = {}
        self.rules: list = []
        self.weaks: list[GWeak] = []

    def intern(self, atom: Atom) -> int:
        idx = self.index.get(atom)
        if idx is None:
            idx = len(self.atoms)
            self.atoms.append(atom)
            self.index[atom] = idx
        return idx

    @property
    def atom_count(self) -> int:
        return len(self.atoms)

    @property
    def rule_count(self) -> int:
        return len(self.rules) + len(self.weaks)

    def _body_elems(self, pos, neg):
        out = [Literal(self.atoms[a]) for a in pos]
        out.extend(Literal(self.atoms[a], positive=False) for a in neg)
        return tuple(out)

    def to_program(self) -> Program:
        rules: list[Rule] = []
        for rec in self.rules:
            if isinstance(rec, GNormal):
                rules.append(NormalRule(self.atoms[rec.head], self._body_elems(rec.pos, rec.neg)))
            elif isinstance(rec, GChoice):
                heads = tuple(self.atoms[h] for h in rec.heads)
                rules.append(ChoiceRule(rec.lower, rec.upper, heads, self._body_elems(rec.pos, rec.neg)))
            else:
                rules.append(HardConstraint(self._body_elems(rec.pos, rec.neg)))
        for rec in self.weaks:
            rules.append(
                WeakConstraint(
                    self._body_elems(rec.pos, rec.neg),
                    Constant(rec.weight),
                    Constant(rec.level),
                    rec.terms,
                )
            )
        return Program(tuple(rules))

    def to_text(self) -> str:
        return self.to_program().to_text()


# ---------------------------------------------------------------------------
# Matching


def _match_term(pattern: Term, ground: Term, theta: dict) -> bool:
    if isinstance(pattern, Variable):
        bound = theta.get(pattern)
        if bound is None:
            theta[pattern] = ground
            return True
        return bound == ground
    if isinstance(pattern, Constant):
        return pattern == ground
    if isinstance(pattern, Compound):
        if not isinstance(ground, Compound) or ground.functor != pattern.functor:
            return False
        if len(ground.args) != len(pattern.args):
            return False
        return all(_match_term(p, g, theta) for p, g in zip(pattern.args, ground.args))
    return False


def _match_atom(pattern: Atom, ground: Atom, theta: dict) -> "dict | None":
    trail = dict(theta)
    for p, g in zip(pattern.args, ground.args):
        if not _match_term(p, g, trail):
            return None
    return trail


class _RuleInfo:
    """Pre-analysis of one rule for the join."""

    def __init__(self, rule: Rule):
        self.rule = rule
        self.pos: list[Atom] = []
        self.neg: list[Atom] = []
        self.comparisons: list[Comparison] = []
        for elem in rule.body:
            if isinstance(elem, Comparison):
                self.comparisons.append(elem)
            elif elem.positive:
                self.pos.append(elem.atom)
            else:
                self.neg.append(elem.atom)
        # Schedule each comparison after the shortest positive-body prefix
        # that binds all of its variables.
        bound: set[Variable] = set()
        self.schedule: list[list[Comparison]] = [[] for _ in range(len(self.pos) + 1)]
        prefix_vars = [set()]
        for atom in self.pos:
            bound = bound | set(atom.vars())
            prefix_vars.append(set(bound))
        for comp in self.comparisons:
            cvars = set(comp.vars())
            for j, vs in enumerate(prefix_vars):
                if cvars <= vs:
                    self.schedule[j].append(comp)
                    break


def _apply_atom(atom: Atom, theta: dict) -> Atom:
    return atom.apply(theta)


class _Grounder:
    def __init__(self, program: Program, max_rules: int, max_atoms: int):
        self.program = program
        self.max_rules = max_rules
        self.max_atoms = max_atoms
        self.infos = [_RuleInfo(r) for r in program]
        self.possible: dict[Atom, None] = {}
        self.by_pred: dict[tuple, list[Atom]] = {}
        self.instances: dict = {}  # (rule_idx, theta_key) -> theta
        self.instance_order: list = []

    def _add_atom(self, atom: Atom, new_atoms: list):
        if atom in self.possible:
            return
        for arg in atom.args:
            if term_depth(arg) > MAX_FUNCTION_DEPTH:
                raise GroundingError(
                    "grounding produced a term nested deeper than %d: %s"
                    % (MAX_FUNCTION_DEPTH, atom)
                )
        if len(self.possible) >= self.max_atoms:
            raise GroundingError("grounding exceeded the atom cap (%d)" % self.max_atoms)
        self.possible[atom] = None
        self.by_pred.setdefault(atom.signature, []).append(atom)
        new_atoms.append(atom)

    def _record(self, rule_idx: int, theta: dict, new_atoms: list):
        info = self.infos[rule_idx]
        key = (rule_idx, tuple(sorted((v.name, t) for v, t in theta.items())))
        if key in self.instances:
            return
        if len(self.instance_order) >= self.max_rules:
            raise GroundingError("grounding exceeded the rule cap (%d)" % self.max_rules)
        self.instances[key] = theta
        self.instance_order.append((rule_idx, theta))
        rule = info.rule
        if isinstance(rule, NormalRule):
            self._add_atom(_apply_atom(rule.head, theta), new_atoms)
        elif isinstance(rule, ChoiceRule):
            for h in rule.heads:
                self._add_atom(_apply_atom(h, theta), new_atoms)

    def _join(self, rule_idx: int, delta_at: int, delta: list, new_atoms: list):
        info = self.infos[rule_idx]

        def extend(j: int, theta: dict):
            if j == len(info.pos):
                self._record(rule_idx, theta, new_atoms)
                return
            pattern = info.pos[j]
            if j == delta_at:
                pool = [a for a in delta if a.signature == pattern.signature]
            else:
                pool = self.by_pred.get(pattern.signature, ())
            for ground in pool:
                trail = _match_atom(pattern, ground, theta)
                if trail is None:
                    continue
                if all(c.apply(trail).holds() for c in info.schedule[j + 1]):
                    extend(j + 1, trail)

        if all(c.apply({}).holds() for c in info.schedule[0]):
            extend(0, {})

    def run(self) -> GroundProgram:
        new_atoms: list[Atom] = []
        # Seed round: rules without positive body literals are ground.
        for idx, info in enumerate(self.infos):
            if not info.pos:
                if all(c.holds() for c in info.comparisons):
                    self._record(idx, {}, new_atoms)
        delta = new_atoms
        while delta:
            new_atoms = []
            for idx, info in enumerate(self.infos):
                if not info.pos:
                    continue
                for k in range(len(info.pos)):
                    self._join(idx, k, delta, new_atoms)
            delta = new_atoms
        return self._emit()

    def _emit(self) -> GroundProgram:
        gp = GroundProgram()
        seen: set = set()
        for rule_idx, theta in self.instance_order:
            info = self.infos[rule_idx]
            rule = info.rule
            neg_ids = []
            skip = False
            pos_atoms = [_apply_atom(a, theta) for a in info.pos]
            neg_atoms = [_apply_atom(a, theta) for a in info.neg]
            heads = []
            if isinstance(rule, NormalRule):
                heads = [_apply_atom(rule.head, theta)]
            elif isinstance(rule, ChoiceRule):
                heads = [_apply_atom(h, theta) for h in rule.heads]
            head_ids = [gp.intern(a) for a in heads]
            pos_ids = tuple(gp.intern(a) for a in pos_atoms)
            for a in neg_atoms:
                if a in self.possible:
                    neg_ids.append(gp.intern(a))
                # else: the atom can never hold, so "not a" is vacuously true
            neg_ids = tuple(neg_ids)
            if isinstance(rule, NormalRule):
                rec = GNormal(head_ids[0], pos_ids, neg_ids)
            elif isinstance(rule, ChoiceRule):
                # Heads that collapse under the substitution count once.
                uniq = tuple(dict.fromkeys(head_ids))
                rec = GChoice(rule.lower, rule.upper, uniq, pos_ids, neg_ids)
            elif isinstance(rule, HardConstraint):
                rec = GConstraint(pos_ids, neg_ids)
            else:
                weight = substitute_int(rule.weight, theta, "weight")
                level = substitute_int(rule.level, theta, "level")
                terms = tuple(_subst_ground(t, theta) for t in rule.terms)
                rec = GWeak(pos_ids, neg_ids, weight, level, terms)
            key = rec
            if key in seen:
                continue
            seen.add(key)
            if isinstance(rec, GWeak):
                gp.weaks.append(rec)
            else:
                gp.rules.append(rec)
        return gp


def _subst_ground(term: Term, theta: dict) -> Term:
    from .syntax import substitute, term_is_ground

    out = substitute(term, theta)
    if not term_is_ground(out):
        raise GroundingError("unbound variable in weak-constraint tail: %s" % out)
    return out


def substitute_int(term: Term, theta: dict, what: str) -> int:
    out = _subst_ground(term, theta)
    if isinstance(out, Constant) and out.is_int:
        return out.value
    raise GroundingError("weak-constraint %s must ground to an integer, got %s" % (what, out))


def ground(
    program: Program,
    max_rules: int = DEFAULT_MAX_RULES,
    max_atoms: int = DEFAULT_MAX_ATOMS,
) -> GroundProgram:
    """Ground a program; atom ids are assigned in first-seen order."""
    return _Grounder(program, max_rules, max_atoms).run()


# ---------------------------------------------------------------------------
# Herbrand base


def _collect_signature(program: Program):
    constants: dict[Constant, None] = {}
    functors: dict[tuple, None] = {}
    preds: dict[tuple, None] = {}
    max_depth = 0

    def walk_term(t: Term):
        nonlocal max_depth
        if isinstance(t, Constant):
            constants.setdefault(t)
        elif isinstance(t, Compound):
            functors.setdefault((t.functor, len(t.args)))
            for a in t.args:
                walk_term(a)

    def walk_atom(a: Atom):
        nonlocal max_depth
        preds.setdefault(a.signature)
        for arg in a.args:
            max_depth = max(max_depth, term_depth(arg))
            walk_term(arg)

    for rule in program:
        if isinstance(rule, NormalRule):
            walk_atom(rule.head)
        elif isinstance(rule, ChoiceRule):
            for h in rule.heads:
                walk_atom(h)
        for elem in rule.body:
            if isinstance(elem, Comparison):
                walk_term(elem.left)
                walk_term(elem.right)
            else:
                walk_atom(elem.atom)
        if isinstance(rule, WeakConstraint):
            walk_term(rule.weight)
            walk_term(rule.level)
            for t in rule.terms:
                walk_term(t)
    return list(constants), list(functors), list(preds), max_depth


def herbrand_base(program: Program, max_atoms: int = DEFAULT_MAX_ATOMS) -> "set[Atom]":
    """All ground atoms formable from the program's predicates over the
    universe of ground terms built from its constants and functors, with
    function nesting bounded by what appears syntactically."""
    constants, functors, preds, max_depth = _collect_signature(program)
    universe: list[Term] = list(constants)
    seen: set[Term] = set(universe)
    for _ in range(max_depth):
        next_layer: list[Term] = []
        for functor, arity in functors:
            for combo in _tuples(universe, arity):
                t = Compound(functor, combo)
                if term_depth(t) <= max_depth and t not in seen:
                    seen.add(t)
                    next_layer.append(t)
        if not next_layer:
            break
        universe.extend(next_layer)
    base: set[Atom] = set()
    for pred, arity in preds:
        count = len(universe) ** arity if arity else 1
        if len(base) + count > max_atoms:
            raise GroundingError("herbrand base exceeds the atom cap (%d)" % max_atoms)
        for combo in _tuples(universe, arity):
            base.add(Atom(pred, combo))
    return base


def _tuples(universe: list, arity: int):
    if arity == 0:
        yield ()
        return
    for head in universe:
        for rest in _tuples(universe, arity - 1):
            yield (head,) + rest
