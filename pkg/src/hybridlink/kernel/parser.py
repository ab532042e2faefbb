"""Parser and pretty-printer for the workspace command language.

The language is deliberately tiny. A command is one or more statements
separated by ``;``::

    x = data(:,1)
    [ret, cov] = ewstats(retseries)
    portopt(ret, cov, 20); grid on; xlabel(Labels{1})

Expressions are identifiers, numbers, quoted strings, builtin calls,
column/row selection ``v(:,k)`` / ``v(k,:)`` and string-list element
access ``v{k}``. There are no operators and no control flow.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Tuple, Union

from .errors import CommandSyntaxError

PLOT_DIRECTIVES = ("grid", "xlabel", "ylabel", "title")


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class String:
    value: str


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]


@dataclass(frozen=True)
class ColIndex:
    target: Ident
    index: int


@dataclass(frozen=True)
class RowIndex:
    target: Ident
    index: int


@dataclass(frozen=True)
class CellIndex:
    target: Ident
    index: int


Expr = Union[Ident, Number, String, Call, ColIndex, RowIndex, CellIndex]


@dataclass(frozen=True)
class Assign:
    target: str
    expr: Expr


@dataclass(frozen=True)
class MultiAssign:
    targets: Tuple[str, ...]
    call: Call


@dataclass(frozen=True)
class ExprStatement:
    expr: Expr


@dataclass(frozen=True)
class PlotDirective:
    name: str
    # grid carries a switch word ("on"/"off"); labels carry an expression
    arg: Union[str, Expr, None]


Statement = Union[Assign, MultiAssign, ExprStatement, PlotDirective]


@dataclass(frozen=True)
class Command:
    statements: Tuple[Statement, ...]


# -- lexer --------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>-?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[()\[\]{},;=:])
  | (?P<quote>['"])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int
    value: object = None


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise CommandSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind == "ws":
            pos = m.end()
            continue
        if kind == "quote":
            q = m.group()
            buf = []
            i = pos + 1
            while True:
                if i >= len(text):
                    raise CommandSyntaxError("unterminated string", pos)
                ch = text[i]
                if ch == q:
                    if i + 1 < len(text) and text[i + 1] == q:
                        buf.append(q)
                        i += 2
                        continue
                    break
                buf.append(ch)
                i += 1
            tokens.append(Token("string", text[pos:i + 1], pos, "".join(buf)))
            pos = i + 1
            continue
        tok = m.group()
        if kind == "punct":
            tokens.append(Token(tok, tok, pos))
        elif kind == "number":
            tokens.append(Token("number", tok, pos, float(tok)))
        else:
            tokens.append(Token("ident", tok, pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


# -- parser -------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, n: int = 1) -> Token:
        return self.tokens[min(self.i + n, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise CommandSyntaxError(f"expected {kind!r}, found {found!r}", self.tok.pos)
        return self.advance()

    def command(self) -> Command:
        statements = []
        while True:
            while self.tok.kind == ";":
                self.advance()
            if self.tok.kind == "eof":
                break
            statements.append(self.statement())
            if self.tok.kind not in (";", "eof"):
                raise CommandSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)
        if not statements:
            raise CommandSyntaxError("empty command", 0)
        return Command(tuple(statements))

    def statement(self) -> Statement:
        t = self.tok
        if t.kind == "[":
            return self.multi_assign()
        if t.kind == "ident" and self.peek().kind == "=":
            self.advance()
            self.advance()
            return Assign(t.text, self.expr())
        if t.kind == "ident" and t.text in PLOT_DIRECTIVES:
            return self.directive()
        return ExprStatement(self.expr())

    def multi_assign(self) -> MultiAssign:
        self.expect("[")
        targets = [self.expect("ident").text]
        while self.tok.kind == ",":
            self.advance()
            targets.append(self.expect("ident").text)
        self.expect("]")
        self.expect("=")
        pos = self.tok.pos
        rhs = self.expr()
        if not isinstance(rhs, Call):
            raise CommandSyntaxError("multiple assignment needs a function call", pos)
        return MultiAssign(tuple(targets), rhs)

    def directive(self) -> PlotDirective:
        name = self.advance().text
        if name == "grid":
            if self.tok.kind == "ident" and self.tok.text in ("on", "off"):
                return PlotDirective(name, self.advance().text)
            if self.tok.kind in (";", "eof"):
                return PlotDirective(name, "on")
            raise CommandSyntaxError("grid takes 'on' or 'off'", self.tok.pos)
        self.expect("(")
        arg = self.expr()
        self.expect(")")
        return PlotDirective(name, arg)

    def index(self) -> int:
        t = self.expect("number")
        if t.value != int(t.value) or t.value < 1:
            raise CommandSyntaxError(f"malformed index {t.text!r}", t.pos)
        return int(t.value)

    def expr(self) -> Expr:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Number(t.value)
        if t.kind == "string":
            self.advance()
            return String(t.value)
        if t.kind != "ident":
            found = t.text or "end of input"
            raise CommandSyntaxError(f"expected an expression, found {found!r}", t.pos)
        self.advance()
        if self.tok.kind == "{":
            self.advance()
            k = self.index()
            self.expect("}")
            return CellIndex(Ident(t.text), k)
        if self.tok.kind != "(":
            return Ident(t.text)
        self.advance()
        # v(:,k) selects a column, v(k,:) a row
        if self.tok.kind == ":":
            self.advance()
            self.expect(",")
            k = self.index()
            self.expect(")")
            return ColIndex(Ident(t.text), k)
        if self.tok.kind == "number" and self.peek().kind == "," and self.peek(2).kind == ":":
            k = self.index()
            self.advance()
            self.advance()
            self.expect(")")
            return RowIndex(Ident(t.text), k)
        args = []
        if self.tok.kind != ")":
            args.append(self.expr())
            while self.tok.kind == ",":
                self.advance()
                args.append(self.expr())
        self.expect(")")
        return Call(t.text, tuple(args))


def parse_command(text: str) -> Command:
    if text is None or not text.strip():
        raise CommandSyntaxError("empty command", 0)
    return _Parser(text).command()


# -- printer ------------------------------------------------------------------

def _fmt_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def format_expr(e: Expr) -> str:
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, Number):
        return _fmt_number(e.value)
    if isinstance(e, String):
        return "'" + e.value.replace("'", "''") + "'"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, ColIndex):
        return f"{e.target.name}(:,{e.index})"
    if isinstance(e, RowIndex):
        return f"{e.target.name}({e.index},:)"
    if isinstance(e, CellIndex):
        return f"{e.target.name}{{{e.index}}}"
    raise TypeError(f"not an expression: {e!r}")


def format_statement(s: Statement) -> str:
    if isinstance(s, Assign):
        return f"{s.target} = {format_expr(s.expr)}"
    if isinstance(s, MultiAssign):
        return f"[{', '.join(s.targets)}] = {format_expr(s.call)}"
    if isinstance(s, ExprStatement):
        return format_expr(s.expr)
    if isinstance(s, PlotDirective):
        if s.name == "grid":
            return f"grid {s.arg}"
        return f"{s.name}({format_expr(s.arg)})"
    raise TypeError(f"not a statement: {s!r}")


def pretty_print(cmd: Command) -> str:
    return "; ".join(format_statement(s) for s in cmd.statements)
