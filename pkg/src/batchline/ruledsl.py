"""Textual rule language for sample-matching conditions.

Grammar (one rule per ``;``-terminated statement, ``#`` line comments):

    rule     := IDENT "(" var ("," var)* ")" ":=" atom ("AND" atom)*
    atom     := IDENT "(" var ")"                     class atom
              | IDENT "(" var "," var ")"             property atom
              | operand CMP operand                   CMP in == != < <= > >=
              | "reldiff" "(" var "," var "," NUMBER ")"
    operand  := var | STRING | NUMBER

Class and property identifiers follow the schema naming convention
(uppercase- vs lowercase-initial); variables are lowercase-initial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .schema import Diagnostic, Schema

CMP_OPS = ("==", "!=", "<=", ">=", "<", ">")


@dataclass(frozen=True)
class Span:
    line: int
    column: int


class RuleSyntaxError(ValueError):
    def __init__(self, code: str, message: str, span: Span, expected: tuple[str, ...] = ()):
        self.code = code  # lexical-error | syntax-error | safety-violation
        self.span = span
        self.expected = expected
        suffix = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"{code} at line {span.line}, column {span.column}: {message}{suffix}")


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class StringLit:
    value: str


@dataclass(frozen=True)
class NumberLit:
    value: float


Operand = Union[Var, StringLit, NumberLit]


@dataclass(frozen=True)
class ClassAtom:
    class_name: str
    var: str
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class PropertyAtom:
    property: str
    subject: str
    object: str
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class Compare:
    left: Operand
    op: str
    right: Operand
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class RelDiff:
    left: str
    right: str
    tolerance: float
    span: Span = field(default=Span(0, 0), compare=False)

    def __post_init__(self) -> None:
        if not (0.0 < self.tolerance < 1.0):
            raise ValueError(f"reldiff tolerance must be in (0,1): {self.tolerance}")


Atom = Union[ClassAtom, PropertyAtom, Compare, RelDiff]


@dataclass(frozen=True)
class RuleAst:
    name: str
    head_vars: tuple[str, ...]
    body: tuple[Atom, ...]
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[RuleAst, ...]

    def __iter__(self):
        return iter(self.rules)

    def get(self, name: str) -> Optional[RuleAst]:
        for r in self.rules:
            if r.name == name:
                return r
        return None


# ---------------------------------------------------------------- lexer

@dataclass(frozen=True)
class Token:
    kind: str  # IDENT NUMBER STRING PUNCT AND EOF
    text: str
    span: Span


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<number>\d+(\.\d+)?([eE][+-]?\d+)?)
  | (?P<string>"[^"\n]*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>:=|==|!=|<=|>=|[(),;<>])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise RuleSyntaxError("lexical-error", f"unexpected character {text[pos]!r}", Span(line, col))
        span = Span(line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "nl":
            line += 1
            col = 1
        else:
            col += len(lexeme)
        if kind == "number":
            tokens.append(Token("NUMBER", lexeme, span))
        elif kind == "string":
            tokens.append(Token("STRING", lexeme[1:-1], span))
        elif kind == "ident":
            tokens.append(Token("AND" if lexeme == "AND" else "IDENT", lexeme, span))
        elif kind == "punct":
            tokens.append(Token("PUNCT", lexeme, span))
        pos = m.end()
    tokens.append(Token("EOF", "", Span(line, col)))
    return tokens


# ---------------------------------------------------------------- parser

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.cur
        self.pos += 1
        return tok

    def expect(self, kind: str, text: Optional[str] = None) -> Token:
        tok = self.cur
        if tok.kind != kind or (text is not None and tok.text != text):
            expected = (text,) if text else (kind,)
            raise RuleSyntaxError(
                "syntax-error", f"unexpected {tok.text!r}", tok.span, expected=expected
            )
        return self.advance()

    def var_name(self) -> str:
        tok = self.expect("IDENT")
        if not tok.text[0].islower() and tok.text[0] != "_":
            raise RuleSyntaxError(
                "syntax-error",
                f"variable names are lowercase-initial, got {tok.text!r}",
                tok.span,
                expected=("variable",),
            )
        return tok.text

    def operand(self) -> Operand:
        tok = self.cur
        if tok.kind == "NUMBER":
            self.advance()
            return NumberLit(float(tok.text))
        if tok.kind == "STRING":
            self.advance()
            return StringLit(tok.text)
        if tok.kind == "IDENT":
            return Var(self.var_name())
        raise RuleSyntaxError(
            "syntax-error", f"unexpected {tok.text!r}", tok.span, expected=("operand",)
        )

    def atom(self) -> Atom:
        tok = self.cur
        if tok.kind == "IDENT" and self.tokens[self.pos + 1].text == "(":
            name_tok = self.advance()
            self.expect("PUNCT", "(")
            if name_tok.text == "reldiff":
                a = self.var_name()
                self.expect("PUNCT", ",")
                b = self.var_name()
                self.expect("PUNCT", ",")
                tol_tok = self.expect("NUMBER")
                self.expect("PUNCT", ")")
                try:
                    return RelDiff(a, b, float(tol_tok.text), span=name_tok.span)
                except ValueError as exc:
                    raise RuleSyntaxError("syntax-error", str(exc), tol_tok.span)
            first = self.var_name()
            if self.cur.text == ",":
                self.advance()
                second = self.var_name()
                self.expect("PUNCT", ")")
                return PropertyAtom(name_tok.text, first, second, span=name_tok.span)
            self.expect("PUNCT", ")")
            return ClassAtom(name_tok.text, first, span=name_tok.span)
        left = self.operand()
        op_tok = self.cur
        if op_tok.text not in CMP_OPS:
            raise RuleSyntaxError(
                "syntax-error", f"unexpected {op_tok.text!r}", op_tok.span, expected=CMP_OPS
            )
        self.advance()
        right = self.operand()
        return Compare(left, op_tok.text, right, span=op_tok.span)

    def rule(self) -> RuleAst:
        name_tok = self.expect("IDENT")
        self.expect("PUNCT", "(")
        head = [self.var_name()]
        while self.cur.text == ",":
            self.advance()
            head.append(self.var_name())
        self.expect("PUNCT", ")")
        self.expect("PUNCT", ":=")
        body = [self.atom()]
        while self.cur.kind == "AND":
            self.advance()
            body.append(self.atom())
        ast = RuleAst(name_tok.text, tuple(head), tuple(body), span=name_tok.span)
        _check_safety(ast)
        return ast

    def ruleset(self) -> RuleSet:
        rules: list[RuleAst] = []
        names: set[str] = set()
        while self.cur.kind != "EOF":
            r = self.rule()
            self.expect("PUNCT", ";")
            if r.name in names:
                raise RuleSyntaxError("syntax-error", f"duplicate rule name {r.name!r}", r.span)
            names.add(r.name)
            rules.append(r)
        if not rules:
            raise RuleSyntaxError("syntax-error", "empty rule set", self.cur.span)
        return RuleSet(tuple(rules))


def _check_safety(ast: RuleAst) -> None:
    """Range restriction: head and comparison vars must be bound by a class or property atom."""
    bound: set[str] = set()
    for atom in ast.body:
        if isinstance(atom, ClassAtom):
            bound.add(atom.var)
        elif isinstance(atom, PropertyAtom):
            bound.add(atom.subject)
            bound.add(atom.object)
    unbound: list[str] = []
    for v in ast.head_vars:
        if v not in bound:
            unbound.append(v)
    for atom in ast.body:
        if isinstance(atom, Compare):
            for side in (atom.left, atom.right):
                if isinstance(side, Var) and side.name not in bound:
                    unbound.append(side.name)
        elif isinstance(atom, RelDiff):
            for v in (atom.left, atom.right):
                if v not in bound:
                    unbound.append(v)
    if unbound:
        names = ", ".join(sorted(set(unbound)))
        raise RuleSyntaxError(
            "safety-violation",
            f"variables not bound by any class or property atom: {names}",
            ast.span,
        )


def parse_rule(text: str) -> RuleAst:
    """Parse a single rule (trailing ';' optional)."""
    parser = _Parser(tokenize(text))
    ast = parser.rule()
    if parser.cur.text == ";":
        parser.advance()
    parser.expect("EOF")
    return ast


def parse_ruleset(text: str) -> RuleSet:
    return _Parser(tokenize(text)).ruleset()


# ---------------------------------------------------------------- printing

def _print_operand(op: Operand) -> str:
    if isinstance(op, Var):
        return op.name
    if isinstance(op, StringLit):
        return f'"{op.value}"'
    value = op.value
    return str(int(value)) if value == int(value) else repr(value)


def _print_atom(atom: Atom) -> str:
    if isinstance(atom, ClassAtom):
        return f"{atom.class_name}({atom.var})"
    if isinstance(atom, PropertyAtom):
        return f"{atom.property}({atom.subject}, {atom.object})"
    if isinstance(atom, RelDiff):
        return f"reldiff({atom.left}, {atom.right}, {repr(atom.tolerance)})"
    return f"{_print_operand(atom.left)} {atom.op} {_print_operand(atom.right)}"


def print_rule(ast: RuleAst) -> str:
    """Canonical text form; parse_rule(print_rule(a)) == a structurally."""
    head = ", ".join(ast.head_vars)
    body = " AND ".join(_print_atom(a) for a in ast.body)
    return f"{ast.name}({head}) := {body};"


def print_ruleset(rules: RuleSet) -> str:
    return "\n".join(print_rule(r) for r in rules)


# ---------------------------------------------------------------- validation

def validate_rule(ast: RuleAst, schema: Schema) -> list[Diagnostic]:
    """Check every predicate against the schema and datatype-check comparisons."""
    diags: list[Diagnostic] = []
    # Variable datatypes induced by property atoms: object position of a data
    # property carries that property's datatype; entities carry None.
    var_types: dict[str, Optional[str]] = {}

    def note_type(var: str, datatype: Optional[str], where: str) -> None:
        if var in var_types and var_types[var] != datatype:
            diags.append(
                Diagnostic(
                    "datatype-mismatch",
                    where,
                    f"variable {var!r} used with conflicting datatypes",
                )
            )
        var_types[var] = datatype

    for atom in ast.body:
        if isinstance(atom, ClassAtom):
            kind, _ = schema.lookup(atom.class_name)
            if kind == "unknown":
                diags.append(_unknown(atom.class_name))
            elif kind != "class":
                diags.append(
                    Diagnostic("wrong-kind", atom.class_name, f"{atom.class_name!r} is a {kind}, not a class")
                )
            note_type(atom.var, None, atom.class_name)
        elif isinstance(atom, PropertyAtom):
            kind, defn = schema.lookup(atom.property)
            if kind == "unknown":
                diags.append(_unknown(atom.property))
            elif kind == "data-property":
                note_type(atom.subject, None, atom.property)
                note_type(atom.object, defn.datatype, atom.property)
            elif kind == "object-property":
                note_type(atom.subject, None, atom.property)
                note_type(atom.object, None, atom.property)
            else:
                diags.append(
                    Diagnostic("wrong-kind", atom.property, f"{atom.property!r} is a {kind}, not a property")
                )

    for atom in ast.body:
        if isinstance(atom, RelDiff):
            for v in (atom.left, atom.right):
                if var_types.get(v, None) != "float":
                    diags.append(
                        Diagnostic(
                            "datatype-mismatch",
                            ast.name,
                            f"reldiff requires float-valued bindings; {v!r} is not float-valued",
                        )
                    )
        elif isinstance(atom, Compare):
            types = []
            for side in (atom.left, atom.right):
                if isinstance(side, Var):
                    types.append(var_types.get(side.name))
                elif isinstance(side, StringLit):
                    types.append("string")
                else:
                    types.append("float")
            if atom.op in ("<", "<=", ">", ">="):
                for t, side in zip(types, (atom.left, atom.right)):
                    if t is None:
                        name = side.name if isinstance(side, Var) else str(side)
                        diags.append(
                            Diagnostic(
                                "datatype-mismatch",
                                ast.name,
                                f"ordering comparison over entity-valued operand {name!r}",
                            )
                        )
    return diags


def _unknown(name: str) -> Diagnostic:
    return Diagnostic(
        "unknown-predicate",
        name,
        f"{name!r} is not declared in the schema; revise the TBox (add the missing "
        f"class or property) or fix the rule",
    )


def validate_ruleset(rules: RuleSet, schema: Schema) -> dict[str, list[Diagnostic]]:
    """Per-rule diagnostics; only rules with entries are invalid."""
    out: dict[str, list[Diagnostic]] = {}
    for r in rules:
        diags = validate_rule(r, schema)
        if diags:
            out[r.name] = diags
    return out
