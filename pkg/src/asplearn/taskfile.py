"""Reading and writing learning tasks as text files.

A task file mixes three kinds of content.  Plain statements form the
background program.  Bias directives describe the rule space:

    #modeh(schema).             head schema for normal rules
    #modeh(schema, choice).     head schema for choice rules
    #modeb(schema).             body schema, positive occurrences only
    #modeb(schema, negated).    body schema, may appear under `not`
    #compare(lhs op rhs).       comparison schema over body variables
    #maxv(n).  #maxb(n).        variable / body-literal limits
    #maxrules(n).               enumeration cap
    #weak(levels=(..), weights=(..)).   enables weak constraints
    #choice(bounds=(lo,hi);...).        bounds for choice rules
    #constraint.                enables hard constraints
    #length(literals|rules).    how much each rule adds to the score

Schemas are atoms whose argument positions hold `var`, `intvar`
(comparable), `weightvar` (usable as a weak-constraint weight), or
`const(v1,...,vk)`; weak weights are integers or the marker `var`.
Example directives carry an identifier, a penalty (a positive integer or
`inf`), and the example content:

    #pos(id, penalty, {inc}, {exc}, {ctx}).       trailing {ctx} optional
    #neg(id, penalty, {inc}, {exc}, {ctx}).
    #brave_ordering(id, penalty, id1, id2, op).
    #cautious_ordering(id, penalty, id1, id2, op).

Ordering examples refer to #pos/#neg examples by identifier and compare
their answer sets under the given operator.  Comments run from % to the
end of the line.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .coverage import (
    ExampleSet,
    PartialInterpretation,
    WeightedCDOE,
    WeightedCDPI,
)
from .errors import ParseError, TaskError
from .learner import LearningTask
from .parser import Parser, tokenize
from .space import (
    DEFAULT_MAX_RULES,
    BodyMode,
    ComparisonMode,
    HeadMode,
    ModeBias,
    SpaceRule,
    enumerate_space,
)
from .syntax import COMPARISON_OPS, Program

INFINITE = float("inf")

_TASK_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<hash>\#[a-z][A-Za-z0-9_]*)
  | (?P<int>\d+)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<op>:-|:~|\.\.|!=|<=|>=|=|<|>|\{|\}|\(|\)|\[|\]|;|,|\.|@|-)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class TaskFile:
    """A parsed task: background program, rule-space bias, and examples."""

    background: Program
    bias: ModeBias
    positives: "tuple[WeightedCDPI, ...]" = ()
    negatives: "tuple[WeightedCDPI, ...]" = ()
    brave_orderings: "tuple[WeightedCDOE, ...]" = ()
    cautious_orderings: "tuple[WeightedCDOE, ...]" = ()

    @property
    def examples(self) -> ExampleSet:
        return ExampleSet(
            self.positives, self.negatives,
            self.brave_orderings, self.cautious_orderings,
        )

    def space(self) -> "tuple[SpaceRule, ...]":
        return enumerate_space(self.bias)

    def to_learning_task(self) -> LearningTask:
        return LearningTask(self.background, self.space(), self.examples)


class _TaskParser(Parser):
    def __init__(self, text: str):
        self.tokens = tokenize(text, _TASK_TOKEN_RE)
        self.pos = 0
        self.background: list = []
        self.bias_fields: dict = {}
        self.head_modes: list = []
        self.body_modes: list = []
        self.comparison_modes: list = []
        self.choice_bounds: list = []
        self.pos_examples: list = []
        self.neg_examples: list = []
        self.brave: list = []
        self.cautious: list = []
        # (identifier, line) in parse order, for duplicate reports
        self.example_lines: list = []

    # -- small pieces --------------------------------------------------------

    def parse_int(self) -> int:
        neg = False
        if self.at("-"):
            self.next()
            neg = True
        tok = self.next()
        if tok.kind != "int":
            raise ParseError("expected an integer", tok.line, tok.column)
        return -int(tok.text) if neg else int(tok.text)

    def parse_name(self, what: str) -> "tuple[str, int]":
        tok = self.next()
        if tok.kind != "ident":
            raise ParseError("expected %s" % what, tok.line, tok.column)
        return tok.text, tok.line

    def parse_penalty(self) -> float:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "inf":
            self.next()
            return INFINITE
        value = self.parse_int()
        if value <= 0:
            raise ParseError("penalties must be positive or inf", tok.line, tok.column)
        return value

    def parse_ground_atoms(self) -> tuple:
        self.expect("{")
        atoms = []
        while not self.at("}"):
            tok = self.peek()
            atom = self.parse_atom()
            if not atom.is_ground:
                raise ParseError(
                    "example interpretations must be ground", tok.line, tok.column
                )
            atoms.append(atom)
            if self.at(","):
                self.next()
        self.expect("}")
        return tuple(atoms)

    def parse_context(self) -> Program:
        self.expect("{")
        rules: list = []
        while not self.at("}"):
            rules.extend(self.parse_statement())
        self.expect("}")
        return Program(tuple(rules))

    # -- directives ------------------------------------------------------------

    def parse_cdpi(self, out: list):
        self.expect("(")
        eid, line = self.parse_name("an example identifier")
        self.expect(",")
        penalty = self.parse_penalty()
        self.expect(",")
        inc = self.parse_ground_atoms()
        self.expect(",")
        exc = self.parse_ground_atoms()
        ctx = Program(())
        if self.at(","):
            self.next()
            ctx = self.parse_context()
        self.expect(")")
        self.expect(".")
        self.example_lines.append((eid, line))
        out.append(WeightedCDPI(eid, penalty, PartialInterpretation(inc, exc), ctx))

    def parse_ordering(self, out: list):
        self.expect("(")
        eid, line = self.parse_name("an example identifier")
        self.expect(",")
        penalty = self.parse_penalty()
        self.expect(",")
        left, _ = self.parse_name("an example identifier")
        self.expect(",")
        right, _ = self.parse_name("an example identifier")
        self.expect(",")
        op_tok = self.next()
        if op_tok.text not in COMPARISON_OPS:
            raise ParseError(
                "expected an ordering operator", op_tok.line, op_tok.column
            )
        self.expect(")")
        self.expect(".")
        self.example_lines.append((eid, line))
        out.append((eid, penalty, left, right, op_tok.text, line))

    def parse_mode(self, out: list, flag_name: str, field_name: str, cls):
        self.expect("(")
        schema = self.parse_atom()
        flag = False
        if self.at(","):
            self.next()
            name, line = self.parse_name("'%s'" % flag_name)
            if name != flag_name:
                raise ParseError(
                    "expected '%s', found %r" % (flag_name, name), line, 0
                )
            flag = True
        self.expect(")")
        self.expect(".")
        out.append(cls(schema, **{field_name: flag}))

    def parse_compare(self):
        self.expect("(")
        left = self.parse_term()
        op_tok = self.next()
        if op_tok.text not in COMPARISON_OPS:
            raise ParseError(
                "expected a comparison operator", op_tok.line, op_tok.column
            )
        right = self.parse_term()
        self.expect(")")
        self.expect(".")
        self.comparison_modes.append(ComparisonMode(left, op_tok.text, right))

    def parse_limit(self, key: str):
        self.expect("(")
        value = self.parse_int()
        if value < 0:
            raise ParseError("limits must be at least 0")
        self.expect(")")
        self.expect(".")
        self.bias_fields[key] = value

    def parse_weak(self):
        self.expect("(")
        levels: list = []
        weights: list = []
        for slot, target in (("levels", levels), ("weights", weights)):
            name, line = self.parse_name("'%s'" % slot)
            if name != slot:
                raise ParseError("expected '%s', found %r" % (slot, name), line, 0)
            self.expect("=")
            self.expect("(")
            while not self.at(")"):
                if slot == "weights" and self.peek().text == "var":
                    self.next()
                    target.append("var")
                else:
                    target.append(self.parse_int())
                if self.at(","):
                    self.next()
            self.expect(")")
            if slot == "levels":
                self.expect(",")
        self.expect(")")
        self.expect(".")
        if not levels or not weights:
            raise ParseError("#weak needs at least one level and one weight")
        self.bias_fields["weak_levels"] = tuple(levels)
        self.bias_fields["weak_weights"] = tuple(weights)

    def parse_choice_bounds(self):
        self.expect("(")
        name, line = self.parse_name("'bounds'")
        if name != "bounds":
            raise ParseError("expected 'bounds', found %r" % name, line, 0)
        self.expect("=")
        while True:
            self.expect("(")
            lo = self.parse_int()
            self.expect(",")
            hi = self.parse_int()
            self.expect(")")
            if not (0 <= lo <= hi):
                raise ParseError("choice bounds must satisfy 0 <= lo <= hi")
            self.choice_bounds.append((lo, hi))
            if self.at(";"):
                self.next()
                continue
            break
        self.expect(")")
        self.expect(".")

    def parse_length_measure(self):
        self.expect("(")
        name, line = self.parse_name("'literals' or 'rules'")
        if name not in ("literals", "rules"):
            raise ParseError(
                "expected 'literals' or 'rules', found %r" % name, line, 0
            )
        self.expect(")")
        self.expect(".")
        self.bias_fields["length_measure"] = name

    def parse_directive(self):
        tok = self.next()
        name = tok.text[1:]
        if name == "pos":
            self.parse_cdpi(self.pos_examples)
        elif name == "neg":
            self.parse_cdpi(self.neg_examples)
        elif name == "brave_ordering":
            self.parse_ordering(self.brave)
        elif name == "cautious_ordering":
            self.parse_ordering(self.cautious)
        elif name == "modeh":
            self.parse_mode(self.head_modes, "choice", "choice", HeadMode)
        elif name == "modeb":
            self.parse_mode(self.body_modes, "negated", "allow_negative", BodyMode)
        elif name == "compare":
            self.parse_compare()
        elif name == "maxv":
            self.parse_limit("max_vars")
        elif name == "maxb":
            self.parse_limit("max_body")
        elif name == "maxcomp":
            self.parse_limit("max_comparisons")
        elif name == "maxrules":
            self.parse_limit("max_rules")
        elif name == "weak":
            self.parse_weak()
        elif name == "choice":
            self.parse_choice_bounds()
        elif name == "constraint":
            self.expect(".")
            self.bias_fields["allow_constraints"] = True
        elif name == "length":
            self.parse_length_measure()
        else:
            raise ParseError("unknown directive %r" % tok.text, tok.line, tok.column)

    # -- whole files -------------------------------------------------------------

    def parse_task(self) -> TaskFile:
        while self.peek().kind != "eof":
            if self.peek().kind == "hash":
                self.parse_directive()
            else:
                self.background.extend(self.parse_statement())

        bias = ModeBias(
            head_modes=tuple(self.head_modes),
            body_modes=tuple(self.body_modes),
            comparison_modes=tuple(self.comparison_modes),
            **self.bias_fields,
        )
        if self.choice_bounds:
            bias = replace(bias, choice_bounds=tuple(self.choice_bounds))
        if not (
            bias.head_modes
            or bias.allow_constraints
            or (bias.weak_levels and bias.weak_weights)
        ):
            raise TaskError("the bias enables no rule kind")

        used: set = set()
        for eid, line in self.example_lines:
            if eid in used:
                raise TaskError(
                    "duplicate example identifier %r (line %d)" % (eid, line)
                )
            used.add(eid)
        by_id = {e.eid: e for e in self.pos_examples + self.neg_examples}

        def resolve(records):
            out = []
            for eid, penalty, left, right, op, line in records:
                for ref in (left, right):
                    if ref not in by_id:
                        raise TaskError(
                            "ordering %r refers to unknown example %r (line %d)"
                            % (eid, ref, line)
                        )
                out.append(
                    WeightedCDOE(eid, penalty, by_id[left], by_id[right], op)
                )
            return out

        brave = resolve(self.brave)
        cautious = resolve(self.cautious)

        return TaskFile(
            Program(tuple(self.background)),
            bias,
            tuple(self.pos_examples),
            tuple(self.neg_examples),
            tuple(brave),
            tuple(cautious),
        )


def parse_task(text: str) -> TaskFile:
    return _TaskParser(text).parse_task()


def load_task(path: str) -> TaskFile:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_task(fh.read())


# ---------------------------------------------------------------------------
# Serialization


def _render_penalty(penalty: float) -> str:
    return "inf" if penalty == INFINITE else "%d" % penalty


def _render_cdpi(tag: str, e: WeightedCDPI) -> str:
    parts = [
        e.eid,
        _render_penalty(e.penalty),
        "{%s}" % ", ".join(str(a) for a in e.pi.inc),
        "{%s}" % ", ".join(str(a) for a in e.pi.exc),
    ]
    if len(e.ctx):
        parts.append("{ %s }" % " ".join(str(r) for r in e.ctx))
    return "#%s(%s)." % (tag, ", ".join(parts))


def _render_ordering(tag: str, o: WeightedCDOE) -> str:
    return "#%s(%s, %s, %s, %s, %s)." % (
        tag, o.eid, _render_penalty(o.penalty), o.left.eid, o.right.eid, o.op
    )


def render_task(tf: TaskFile) -> str:
    """Deterministic text for the task; `parse_task` restores it exactly."""
    known = {e.eid: e for e in tf.positives + tf.negatives}
    for o in tf.brave_orderings + tf.cautious_orderings:
        for side in (o.left, o.right):
            if known.get(side.eid) != side:
                raise TaskError(
                    "ordering %r does not refer to a listed example" % o.eid
                )

    lines: list = []
    if len(tf.background):
        lines.append("% background")
        lines.extend(str(r) for r in tf.background)
        lines.append("")

    b = tf.bias
    lines.append("% bias")
    lines.append("#maxv(%d)." % b.max_vars)
    lines.append("#maxb(%d)." % b.max_body)
    if b.max_comparisons != 1:
        lines.append("#maxcomp(%d)." % b.max_comparisons)
    if b.max_rules != DEFAULT_MAX_RULES:
        lines.append("#maxrules(%d)." % b.max_rules)
    if b.length_measure != "literals":
        lines.append("#length(%s)." % b.length_measure)
    if b.allow_constraints:
        lines.append("#constraint.")
    if b.weak_levels:
        lines.append(
            "#weak(levels=(%s), weights=(%s))."
            % (
                ", ".join("%d" % l for l in b.weak_levels),
                ", ".join(str(w) for w in b.weak_weights),
            )
        )
    if any(hm.choice for hm in b.head_modes) or b.choice_bounds != ((0, 1),):
        lines.append(
            "#choice(bounds=%s)."
            % ";".join("(%d,%d)" % (lo, hi) for lo, hi in b.choice_bounds)
        )
    for hm in b.head_modes:
        lines.append(
            "#modeh(%s%s)." % (hm.schema, ", choice" if hm.choice else "")
        )
    for bm in b.body_modes:
        lines.append(
            "#modeb(%s%s)." % (bm.schema, ", negated" if bm.allow_negative else "")
        )
    for cm in b.comparison_modes:
        lines.append("#compare(%s %s %s)." % (cm.left, cm.op, cm.right))

    if tf.positives or tf.negatives:
        lines.append("")
        lines.append("% examples")
        lines.extend(_render_cdpi("pos", e) for e in tf.positives)
        lines.extend(_render_cdpi("neg", e) for e in tf.negatives)
    if tf.brave_orderings or tf.cautious_orderings:
        lines.append("")
        lines.append("% orderings")
        lines.extend(_render_ordering("brave_ordering", o) for o in tf.brave_orderings)
        lines.extend(
            _render_ordering("cautious_ordering", o) for o in tf.cautious_orderings
        )
    return "\n".join(lines) + "\n"
