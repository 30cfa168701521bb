"""Transforms program text into the AST.

Grammar (clingo-like):

    program    := statement*
    statement  := rule | fact | constraint | weak
    rule       := head ":-" body "." | head "."
    head       := atom | int "{" atom (";" atom)* "}" int
    constraint := ":-" body "."
    weak       := ":~" body "." "[" term "@" term ("," term)* "]"
    body       := bodyelem ("," bodyelem)*
    bodyelem   := "not"? atom | term cmpop term
    atom       := ident | ident "(" term ("," term)* ")"
    term       := ident | ident "(" term ("," term)* ")" | variable | int
    range fact := ident "(" rangearg ("," rangearg)* ")" "."   (expanded)

Comments run from % to end of line. Facts may use integer ranges a..b in
argument positions; they expand to the cross product of ground facts.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, SafetyError
from .syntax import (
    Atom,
    BodyElem,
    ChoiceRule,
    Comparison,
    COMPARISON_OPS,
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
    is_safe,
    rule_vars,
    positive_body_vars,
    term_depth,
)

MAX_FUNCTION_DEPTH = 2

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<op>:-|:~|\.\.|!=|<=|>=|=|<|>|\{|\}|\(|\)|\[|\]|;|,|\.|@|-)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, token_re: "re.Pattern" = _TOKEN_RE) -> "list[Token]":
    tokens = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        m = token_re.match(text, pos)
        if m is None:
            raise ParseError(
                "unexpected character %r" % text[pos], line, pos - line_start + 1
            )
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, line, m.start() - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + value.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _RangeTerm:
    """Placeholder for a..b inside a fact argument, removed by expansion."""

    def __init__(self, low: int, high: int):
        self.low = low
        self.high = high


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text:
            raise ParseError(
                "expected %r, found %r" % (text, tok.text or "<eof>"), tok.line, tok.column
            )
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.column)


    # -- terms -------------------------------------------------------------

    def parse_term(self, allow_range: bool = False, as_atom: bool = False):
        tok = self.peek()
        if tok.kind == "int":
            self.next()
            value = int(tok.text)
            if allow_range and self.at(".."):
                self.next()
                hi = self.next()
                if hi.kind != "int":
                    raise ParseError("range bound must be an integer", hi.line, hi.column)
                if value > int(hi.text):
                    raise ParseError(
                        "empty range %d..%s" % (value, hi.text), tok.line, tok.column
                    )
                return _RangeTerm(value, int(hi.text))
            return Constant(value)
        if tok.text == "-":
            self.next()
            num = self.next()
            if num.kind != "int":
                raise ParseError("expected integer after '-'", num.line, num.column)
            return Constant(-int(num.text))
        if tok.kind == "var":
            self.next()
            return Variable(tok.text)
        if tok.kind == "ident":
            self.next()
            if self.at("("):
                self.next()
                args = [self.parse_term(allow_range)]
                while self.at(","):
                    self.next()
                    args.append(self.parse_term(allow_range))
                self.expect(")")
                term = Compound(tok.text, tuple(args))
                # Function terms nest at most MAX_FUNCTION_DEPTH deep; the
                # atom shell around its arguments does not count.
                if not as_atom and not any(isinstance(a, _RangeTerm) for a in args):
                    if term_depth(term) > MAX_FUNCTION_DEPTH:
                        raise ParseError(
                            "function nesting deeper than %d" % MAX_FUNCTION_DEPTH,
                            tok.line,
                            tok.column,
                        )
                return term
            return Constant(tok.text)
        raise self.error("expected a term, found %r" % (tok.text or "<eof>"))

    def parse_atom(self, allow_range: bool = False) -> Atom:
        tok = self.peek()
        term = self.parse_term(allow_range, as_atom=True)
        if isinstance(term, Compound):
            return Atom(term.functor, term.args)
        if isinstance(term, Constant) and isinstance(term.value, str):
            return Atom(term.value)
        raise ParseError("expected an atom", tok.line, tok.column)

    # -- bodies ------------------------------------------------------------

    def parse_body_elem(self) -> BodyElem:
        if self.at("not"):
            # 'not' is an ordinary ident token; only treat it as negation
            # when an atom follows.
            save = self.pos
            self.next()
            atom = self.parse_atom()
            if self.peek().text in COMPARISON_OPS:
                self.pos = save
            else:
                return Literal(atom, positive=False)
        tok = self.peek()
        term = self.parse_term(as_atom=True)
        if self.peek().text in COMPARISON_OPS:
            if term_depth(term) > MAX_FUNCTION_DEPTH:
                raise ParseError(
                    "function nesting deeper than %d" % MAX_FUNCTION_DEPTH,
                    tok.line,
                    tok.column,
                )
            op = self.next().text
            right = self.parse_term()
            return Comparison(term, op, right)
        if isinstance(term, Compound):
            return Literal(Atom(term.functor, term.args))
        if isinstance(term, Constant) and isinstance(term.value, str):
            return Literal(Atom(term.value))
        raise ParseError("expected a literal", tok.line, tok.column)

    def parse_body(self) -> "tuple[BodyElem, ...]":
        elems = [self.parse_body_elem()]
        while self.at(","):
            self.next()
            elems.append(self.parse_body_elem())
        return tuple(elems)

    # -- statements ----------------------------------------------------------

    def parse_statement(self) -> "list[Rule]":
        tok = self.peek()
        if tok.text == ":-":
            self.next()
            body = self.parse_body()
            self.expect(".")
            return [self._checked(HardConstraint(body), tok)]
        if tok.text == ":~":
            self.next()
            body = self.parse_body()
            self.expect(".")
            self.expect("[")
            weight = self.parse_term()
            self.expect("@")
            level = self.parse_term()
            terms = []
            while self.at(","):
                self.next()
                terms.append(self.parse_term())
            self.expect("]")
            return [self._checked(WeakConstraint(body, weight, level, tuple(terms)), tok)]
        if tok.kind == "int":
            return [self._checked(self.parse_choice(), tok)]
        head = self.parse_atom(allow_range=True)
        if self.at(":-"):
            if _atom_has_range(head):
                raise ParseError("ranges are only allowed in facts", tok.line, tok.column)
            self.next()
            body = self.parse_body()
            self.expect(".")
            return [self._checked(NormalRule(head, body), tok)]
        self.expect(".")
        if _atom_has_range(head):
            return [self._checked(NormalRule(f), tok) for f in _expand_range_fact(head)]
        return [self._checked(NormalRule(head), tok)]

    def parse_choice(self) -> ChoiceRule:
        low_tok = self.next()
        lower = int(low_tok.text)
        self.expect("{")
        heads = [self.parse_atom()]
        while self.at(";"):
            self.next()
            heads.append(self.parse_atom())
        self.expect("}")
        up_tok = self.next()
        if up_tok.kind != "int":
            raise ParseError("expected upper bound", up_tok.line, up_tok.column)
        upper = int(up_tok.text)
        if not (0 <= lower <= upper <= len(heads)):
            raise ParseError(
                "choice bounds must satisfy 0 <= %d <= %d <= %d"
                % (lower, upper, len(heads)),
                low_tok.line,
                low_tok.column,
            )
        body: tuple[BodyElem, ...] = ()
        if self.at(":-"):
            self.next()
            body = self.parse_body()
        self.expect(".")
        return ChoiceRule(lower, upper, tuple(heads), body)

    def _checked(self, rule: Rule, tok: Token) -> Rule:
        if not is_safe(rule):
            unbound = sorted(
                v.name for v in rule_vars(rule) - positive_body_vars(rule)
            )
            raise SafetyError(
                "unsafe rule %r: variable(s) %s not bound by a positive body literal"
                % (str(rule), ", ".join(unbound)),
                tok.line,
                tok.column,
            )
        return rule

    def parse_program(self) -> Program:
        rules: list[Rule] = []
        while self.peek().kind != "eof":
            rules.extend(self.parse_statement())
        return Program(tuple(rules))


def _atom_has_range(atom: Atom) -> bool:
    return any(isinstance(a, _RangeTerm) for a in atom.args)


def _expand_range_fact(atom: Atom) -> "list[Atom]":
    slots: list[list[Term]] = []
    for arg in atom.args:
        if isinstance(arg, _RangeTerm):
            slots.append([Constant(i) for i in range(arg.low, arg.high + 1)])
        else:
            slots.append([arg])
    facts: list[Atom] = []

    def rec(i: int, chosen: "list[Term]"):
        if i == len(slots):
            facts.append(Atom(atom.pred, tuple(chosen)))
            return
        for t in slots[i]:
            rec(i + 1, chosen + [t])

    rec(0, [])
    return facts


def parse_program(text: str) -> Program:
    """Parse program text; range facts expand to their ground instances."""
    return Parser(text).parse_program()


def parse_rule(text: str) -> Rule:
    program = parse_program(text)
    if len(program) != 1:
        raise ParseError("expected exactly one rule, got %d" % len(program))
    return program.rules[0]


def parse_atom(text: str) -> Atom:
    parser = Parser(text)
    atom = parser.parse_atom()
    if parser.peek().kind != "eof":
        raise parser.error("trailing input after atom")
    if _atom_has_range(atom):
        raise parser.error("ranges are not allowed here")
    return atom


def parse_range_facts(text: str) -> Program:
    """Parse fact statements (possibly with a..b ranges) into ground facts."""
    program = parse_program(text)
    for rule in program:
        if not isinstance(rule, NormalRule) or rule.body:
            raise ParseError("expected facts only, found %r" % str(rule))
    return program
