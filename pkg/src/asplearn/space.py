"""Hypothesis-space enumeration from mode declarations.

Mode schemas are ordinary atoms whose argument positions hold the reserved
markers `var` (a variable of any sort), `intvar` (a variable that may be
compared numerically), `weightvar` (a variable that may serve as a weak
constraint weight), or `const(v1,...,vk)` (one of the listed ground
values).  Declaring a position with both capabilities means listing the
mode twice, once per marker; the enumerator merges the capability sets of
identical literals.  It instantiates schemas over a fixed variable stock
V0..V{maxv-1}, assembles bodies up to the size limits, decorates them into
every rule kind the bias allows, and keeps one canonical representative
per variable-renaming equivalence class.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Union

from .errors import SpaceError
from .syntax import (
    COMPARISON_OPS,
    Atom,
    ChoiceRule,
    Comparison,
    Compound,
    Constant,
    HardConstraint,
    Literal,
    NormalRule,
    Rule,
    Term,
    Variable,
    WeakConstraint,
    is_safe,
    rule_length,
    substitute,
    term_is_ground,
    term_vars,
)

VAR_MARK = "var"
INTVAR_MARK = "intvar"
WEIGHTVAR_MARK = "weightvar"
CONST_MARK = "const"

DEFAULT_MAX_RULES = 50_000

_KIND_RANK = {"normal": 0, "choice": 1, "constraint": 2, "weak": 3}


@dataclass(frozen=True)
class HeadMode:
    schema: Atom
    choice: bool = False


@dataclass(frozen=True)
class BodyMode:
    schema: Atom
    allow_negative: bool = False


@dataclass(frozen=True)
class ComparisonMode:
    left: Term
    op: str
    right: Term


@dataclass(frozen=True)
class ModeBias:
    head_modes: "tuple[HeadMode, ...]" = ()
    body_modes: "tuple[BodyMode, ...]" = ()
    comparison_modes: "tuple[ComparisonMode, ...]" = ()
    max_vars: int = 3
    max_body: int = 3
    max_comparisons: int = 1
    weak_levels: "tuple[int, ...]" = ()
    weak_weights: "tuple[Union[int, str], ...]" = ()
    choice_bounds: "tuple[tuple[int, int], ...]" = ((0, 1),)
    allow_constraints: bool = False
    max_rules: int = DEFAULT_MAX_RULES
    # "literals" charges each rule its literal count; "rules" charges 1 each.
    length_measure: str = "literals"


@dataclass(frozen=True)
class SpaceRule:
    rid: int
    rule: Rule
    text: str
    length: int
    kind: str


_EMPTY = frozenset()


class _Inst:
    """One instantiation of a schema: the built term plus which variable
    names it placed in comparison-capable and weight-capable positions."""

    __slots__ = ("term", "cmp_vars", "weight_vars")

    def __init__(self, term, cmp_vars, weight_vars):
        self.term = term
        self.cmp_vars = cmp_vars
        self.weight_vars = weight_vars


def _merge_inst(functor_or_pred, parts, build):
    cvs = frozenset().union(*(p.cmp_vars for p in parts)) if parts else _EMPTY
    wvs = frozenset().union(*(p.weight_vars for p in parts)) if parts else _EMPTY
    return _Inst(build(functor_or_pred, tuple(p.term for p in parts)), cvs, wvs)


def _instantiate_term(schema: Term, variables) -> "list[_Inst]":
    if isinstance(schema, Constant):
        if schema.value == VAR_MARK:
            return [_Inst(v, _EMPTY, _EMPTY) for v in variables]
        if schema.value == INTVAR_MARK:
            return [_Inst(v, frozenset((v.name,)), _EMPTY) for v in variables]
        if schema.value == WEIGHTVAR_MARK:
            return [_Inst(v, _EMPTY, frozenset((v.name,))) for v in variables]
        return [_Inst(schema, _EMPTY, _EMPTY)]
    if isinstance(schema, Variable):
        raise SpaceError(
            "mode schemas use the markers var/intvar/weightvar/const(...), "
            "not raw variables like %s" % schema.name
        )
    if schema.functor == CONST_MARK:
        if not schema.args or not all(term_is_ground(a) for a in schema.args):
            raise SpaceError("const(...) needs one or more ground values")
        return [_Inst(a, _EMPTY, _EMPTY) for a in schema.args]
    out = []
    for parts in product(*(_instantiate_term(a, variables) for a in schema.args)):
        out.append(_merge_inst(schema.functor, parts, Compound))
    return out


def _instantiate_atom(schema: Atom, variables) -> "list[_Inst]":
    if not schema.args:
        return [_Inst(schema, _EMPTY, _EMPTY)]
    out = []
    for parts in product(*(_instantiate_term(a, variables) for a in schema.args)):
        out.append(_merge_inst(schema.pred, parts, Atom))
    return out


def _comparison_side(schema: Term, any_vars, cmp_vars, weight_vars) -> "list[Term]":
    if isinstance(schema, Constant):
        if schema.value == VAR_MARK:
            return [Variable(v) for v in any_vars]
        if schema.value == INTVAR_MARK:
            return [Variable(v) for v in cmp_vars]
        if schema.value == WEIGHTVAR_MARK:
            return [Variable(v) for v in weight_vars]
        return [schema]
    if isinstance(schema, Variable):
        raise SpaceError(
            "comparison modes use var/intvar/weightvar/const(...) markers"
        )
    if schema.functor == CONST_MARK:
        return list(schema.args)
    return [schema] if term_is_ground(schema) else []


# ---------------------------------------------------------------------------
# Canonical representatives


def _rule_var_order(rule: Rule) -> "list[Variable]":
    seen: list[Variable] = []

    def take(it):
        for v in it:
            if v not in seen:
                seen.append(v)

    if isinstance(rule, NormalRule):
        take(rule.head.vars())
    elif isinstance(rule, ChoiceRule):
        for h in rule.heads:
            take(h.vars())
    for b in rule.body:
        take(b.vars())
    if isinstance(rule, WeakConstraint):
        take(term_vars(rule.weight))
        take(term_vars(rule.level))
    return seen


def _rename_rule(rule: Rule, mapping) -> Rule:
    body = tuple(sorted((b.apply(mapping) for b in rule.body), key=str))
    if isinstance(rule, NormalRule):
        return NormalRule(rule.head.apply(mapping), body)
    if isinstance(rule, ChoiceRule):
        heads = tuple(h.apply(mapping) for h in rule.heads)
        return ChoiceRule(rule.lower, rule.upper, heads, body)
    if isinstance(rule, HardConstraint):
        return HardConstraint(body)
    # Weak constraint: the term tuple is derived from the renamed body so
    # that equivalent rules always carry identical tails.
    weight = substitute(rule.weight, mapping)
    level = substitute(rule.level, mapping)
    terms: list[Term] = []
    for b in body:
        for v in b.vars():
            if v not in terms:
                terms.append(v)
    return WeakConstraint(body, weight, level, tuple(terms))


def canonical_rule(rule: Rule) -> Rule:
    """The representative of the rule's variable-renaming class: variables
    become V0.., the body is sorted, and the least rendering wins."""
    old = _rule_var_order(rule)
    if not old:
        return _rename_rule(rule, {})
    best = None
    best_text = None
    for perm in permutations(range(len(old))):
        mapping = {old[i]: Variable("V%d" % perm[i]) for i in range(len(old))}
        cand = _rename_rule(rule, mapping)
        text = str(cand)
        if best_text is None or text < best_text:
            best, best_text = cand, text
    return best


def _rule_kind(rule: Rule) -> str:
    if isinstance(rule, NormalRule):
        return "normal"
    if isinstance(rule, ChoiceRule):
        return "choice"
    if isinstance(rule, HardConstraint):
        return "constraint"
    return "weak"


# ---------------------------------------------------------------------------
# Enumeration


def _body_pool(bias: ModeBias, variables):
    # The same literal may arise from several modes (e.g. one marking a
    # position intvar and another weightvar); it enters the pool once with
    # the union of the capability sets.
    order: "list[str]" = []
    entries: "dict[str, list]" = {}
    for bm in bias.body_modes:
        for inst in _instantiate_atom(bm.schema, variables):
            polarities = (True, False) if bm.allow_negative else (True,)
            for positive in polarities:
                lit = Literal(inst.term, positive)
                key = str(lit)
                if key not in entries:
                    order.append(key)
                    entries[key] = [lit, inst.cmp_vars, inst.weight_vars]
                else:
                    entries[key][1] |= inst.cmp_vars
                    entries[key][2] |= inst.weight_vars
    return [tuple(entries[key]) for key in order]


def enumerate_space(bias: ModeBias) -> "tuple[SpaceRule, ...]":
    if bias.max_comparisons not in (0, 1):
        raise SpaceError("at most one comparison per rule is supported")
    for op_mode in bias.comparison_modes:
        if op_mode.op not in COMPARISON_OPS:
            raise SpaceError("unknown comparison operator %r" % op_mode.op)
    variables = [Variable("V%d" % i) for i in range(bias.max_vars)]
    pool = _body_pool(bias, variables)
    head_insts = [
        (hm, inst) for hm in bias.head_modes for inst in _instantiate_atom(hm.schema, variables)
    ]

    candidates: "list[Rule]" = []

    def emit_for_body(body, cmp_vars, weight_vars):
        if bias.allow_constraints and body:
            candidates.append(HardConstraint(body))
        if body:
            for lvl in bias.weak_levels:
                for w in bias.weak_weights:
                    if w == VAR_MARK:
                        weights = [Variable(v) for v in sorted(weight_vars)]
                    else:
                        weights = [Constant(w)]
                    for weight in weights:
                        candidates.append(
                            WeakConstraint(body, weight, Constant(lvl), ())
                        )
        for hm, inst in head_insts:
            if hm.choice:
                for lo, hi in bias.choice_bounds:
                    # Heads are single atoms here, so bounds clamp to 0..1.
                    if lo > 1 or lo > hi:
                        continue
                    candidates.append(ChoiceRule(lo, min(hi, 1), (inst.term,), body))
            else:
                candidates.append(NormalRule(inst.term, body))

    for size in range(0, bias.max_body + 1):
        for combo in combinations(pool, size):
            body = tuple(lit for lit, _, _ in combo)
            cmp_vars = set()
            weight_vars = set()
            any_vars = set()
            for lit, cvs, wvs in combo:
                if lit.positive:
                    cmp_vars |= cvs
                    weight_vars |= wvs
                    any_vars |= {v.name for v in lit.vars()}
            cmp_vars = frozenset(cmp_vars)
            weight_vars = frozenset(weight_vars)
            emit_for_body(body, cmp_vars, weight_vars)
            if bias.max_comparisons < 1 or not bias.comparison_modes:
                continue
            comps = []
            comp_seen = set()
            for cm in bias.comparison_modes:
                sides = (sorted(any_vars), sorted(cmp_vars), sorted(weight_vars))
                lefts = _comparison_side(cm.left, *sides)
                rights = _comparison_side(cm.right, *sides)
                for lt, rt in product(lefts, rights):
                    if lt == rt and isinstance(lt, Variable):
                        continue
                    comp = Comparison(lt, cm.op, rt)
                    if str(comp) not in comp_seen:
                        comp_seen.add(str(comp))
                        comps.append(comp)
            for comp in comps:
                emit_for_body(body + (comp,), cmp_vars, weight_vars)

    chosen: "dict[str, Rule]" = {}
    for cand in candidates:
        if not is_safe(cand):
            continue
        canon = canonical_rule(cand)
        text = str(canon)
        if text in chosen:
            continue
        chosen[text] = canon
        if len(chosen) > bias.max_rules:
            raise SpaceError(
                "hypothesis space exceeds the cap of %d rules" % bias.max_rules
            )

    if bias.length_measure == "literals":
        measure = rule_length
    elif bias.length_measure == "rules":
        measure = lambda rule: 1  # noqa: E731
    else:
        raise SpaceError("unknown length measure %r" % bias.length_measure)

    ordered = sorted(
        chosen.items(),
        key=lambda kv: (measure(kv[1]), _KIND_RANK[_rule_kind(kv[1])], kv[0]),
    )
    return tuple(
        SpaceRule(i, rule, text, measure(rule), _rule_kind(rule))
        for i, (text, rule) in enumerate(ordered)
    )


def space_member_text(rule: Rule) -> str:
    """Canonical rendering used to test whether a rule is in a space."""
    return str(canonical_rule(rule))


def explicit_space(rules) -> "tuple[SpaceRule, ...]":
    """Build a space from the given rules in order, ids starting at 0."""
    return tuple(
        SpaceRule(i, rule, str(rule), rule_length(rule), _rule_kind(rule))
        for i, rule in enumerate(rules)
    )
