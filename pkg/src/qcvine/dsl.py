"""Recursive-descent frontend for the circuit DSL.

Grammar (half-open ranges, affine integer expressions)::

    program  = { funcdef } circuit
    circuit  = "circuit" IDENT "(" expr ")" block        # expr = qubit count
    funcdef  = "def" IDENT "(" [ IDENT {"," IDENT} ] ")" block
    block    = "{" { stmt } "}"
    stmt     = gatecall ";" | call ";" | forloop
    forloop  = "for" IDENT "in" expr ".." expr block
    gatecall = GATE [ "(" exprlist ")" ] operand { "," operand }
    operand  = "q" "[" expr "]"
    call     = IDENT "(" [ exprlist ] ")"

Gate names come from the fixed vocabulary in :mod:`qcvine.model` and are
reserved: a statement starting with one is always a gate call.  Angle
arguments of rotation gates are kept as verbatim source text; they are
display labels and never evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import KINDS, GateKind, QvError


class ParseError(QvError):
    """Syntax error carrying position and the expected-token set."""

    def __init__(self, line: int, col: int, message: str, expected: tuple[str, ...] = ()):
        self.line = line
        self.col = col
        self.expected = expected
        super().__init__(f"{line}:{col}: {message}")


@dataclass(frozen=True)
class Span:
    line: int
    col: int


# Expressions

@dataclass(frozen=True)
class Num:
    value: int
    span: Span


@dataclass(frozen=True)
class Name:
    ident: str
    span: Span


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    span: Span


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"
    span: Span


Expr = Num | Name | Neg | Bin


# Statements

@dataclass(frozen=True)
class GateCall:
    kind: GateKind
    angle_labels: tuple[str, ...]
    operands: tuple[Expr, ...]
    span: Span


@dataclass(frozen=True)
class FuncCall:
    name: str
    args: tuple[Expr, ...]
    span: Span


@dataclass(frozen=True)
class ForLoop:
    var: str
    start: Expr
    stop: Expr
    body: tuple["Stmt", ...]
    span: Span


Stmt = GateCall | FuncCall | ForLoop


@dataclass(frozen=True)
class FuncDef:
    name: str
    params: tuple[str, ...]
    body: tuple[Stmt, ...]
    span: Span


@dataclass(frozen=True)
class Program:
    funcs: dict[str, FuncDef]
    circuit_name: str
    qubit_expr: Expr
    body: tuple[Stmt, ...]
    span: Span


KEYWORDS = ("circuit", "def", "for", "in")
_SYMBOLS = ("..", "{", "}", "(", ")", "[", "]", ",", ";", "+", "-", "*", "/")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT | INT | a symbol/keyword literal | EOF
    text: str
    line: int
    col: int
    pos: int


def tokenize(src: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "#":  # comment to end of line
            while i < n and src[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("INT", src[i:j], line, col, i))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            word = src[i:j]
            kind = word if word in KEYWORDS else "IDENT"
            toks.append(Token(kind, word, line, col, i))
            col += j - i
            i = j
            continue
        if src.startswith("..", i):
            toks.append(Token("..", "..", line, col, i))
            i += 2
            col += 2
            continue
        if c in "{}()[],;+-*/":
            toks.append(Token(c, c, line, col, i))
            i += 1
            col += 1
            continue
        raise ParseError(line, col, f"unexpected character {c!r}")
    toks.append(Token("EOF", "", line, col, i))
    return toks


class Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    @property
    def cur(self) -> Token:
        return self.toks[self.i]

    def _advance(self) -> Token:
        tok = self.cur
        if tok.kind != "EOF":
            self.i += 1
        return tok

    def _expect(self, *kinds: str) -> Token:
        if self.cur.kind in kinds:
            return self._advance()
        got = self.cur.text or "end of input"
        want = " or ".join(f"'{k}'" for k in kinds)
        raise ParseError(self.cur.line, self.cur.col, f"expected {want}, found {got!r}", kinds)

    def _accept(self, kind: str) -> Token | None:
        if self.cur.kind == kind:
            return self._advance()
        return None

    def parse(self) -> Program:
        funcs: dict[str, FuncDef] = {}
        while self.cur.kind == "def":
            f = self._funcdef()
            if f.name in funcs:
                raise ParseError(f.span.line, f.span.col, f"function {f.name!r} redefined")
            funcs[f.name] = f
        kw = self._expect("circuit")
        name = self._ident(reserved_check=True)
        self._expect("(")
        qubit_expr = self._expr()
        self._expect(")")
        body = self._block()
        self._expect("EOF")
        return Program(funcs, name, qubit_expr, body, Span(kw.line, kw.col))

    def _funcdef(self) -> FuncDef:
        kw = self._expect("def")
        name = self._ident(reserved_check=True)
        self._expect("(")
        params: list[str] = []
        if self.cur.kind != ")":
            params.append(self._ident())
            while self._accept(","):
                params.append(self._ident())
        self._expect(")")
        body = self._block()
        return FuncDef(name, tuple(params), body, Span(kw.line, kw.col))

    def _ident(self, reserved_check: bool = False) -> str:
        tok = self._expect("IDENT")
        if reserved_check and tok.text in KINDS:
            raise ParseError(tok.line, tok.col, f"{tok.text!r} is a reserved gate name")
        return tok.text

    def _block(self) -> tuple[Stmt, ...]:
        self._expect("{")
        stmts: list[Stmt] = []
        while self.cur.kind != "}":
            stmts.append(self._stmt())
        self._expect("}")
        return tuple(stmts)

    def _stmt(self) -> Stmt:
        if self.cur.kind == "for":
            return self._forloop()
        tok = self._expect("IDENT")
        if tok.text in KINDS:
            stmt: Stmt = self._gatecall(tok)
        else:
            stmt = self._funccall(tok)
        self._expect(";")
        return stmt

    def _forloop(self) -> ForLoop:
        kw = self._expect("for")
        var = self._ident()
        self._expect("in")
        start = self._expr()
        self._expect("..")
        stop = self._expr()
        body = self._block()
        return ForLoop(var, start, stop, body, Span(kw.line, kw.col))

    def _gatecall(self, tok: Token) -> GateCall:
        kind = KINDS[tok.text]
        angles: list[str] = []
        if self._accept("("):
            angles.append(self._angle_text())
            while self._accept(","):
                angles.append(self._angle_text())
            self._expect(")")
        if len(angles) != kind.params:
            raise ParseError(
                tok.line, tok.col,
                f"gate {kind.name!r} expects {kind.params} angle parameter(s), got {len(angles)}",
            )
        operands = [self._operand()]
        while self._accept(","):
            operands.append(self._operand())
        if len(operands) != kind.arity:
            raise ParseError(
                tok.line, tok.col,
                f"gate {kind.name!r} expects {kind.arity} operand(s), got {len(operands)}",
            )
        return GateCall(kind, tuple(angles), tuple(operands), Span(tok.line, tok.col))

    def _angle_text(self) -> str:
        # Angles are display labels: parse for well-formedness, keep the source slice.
        start = self.cur.pos
        self._expr()
        end = self.cur.pos
        return self.src[start:end].strip()

    def _operand(self) -> Expr:
        tok = self._expect("IDENT")
        if tok.text != "q":
            raise ParseError(tok.line, tok.col, f"expected qubit operand 'q[...]', found {tok.text!r}")
        self._expect("[")
        e = self._expr()
        self._expect("]")
        return e

    def _funccall(self, tok: Token) -> FuncCall:
        self._expect("(")
        args: list[Expr] = []
        if self.cur.kind != ")":
            args.append(self._expr())
            while self._accept(","):
                args.append(self._expr())
        self._expect(")")
        return FuncCall(tok.text, tuple(args), Span(tok.line, tok.col))

    def _expr(self) -> Expr:
        left = self._term()
        while self.cur.kind in ("+", "-"):
            op = self._advance()
            right = self._term()
            left = Bin(op.kind, left, right, Span(op.line, op.col))
        return left

    def _term(self) -> Expr:
        left = self._factor()
        while self.cur.kind in ("*", "/"):
            op = self._advance()
            right = self._factor()
            left = Bin(op.kind, left, right, Span(op.line, op.col))
        return left

    def _factor(self) -> Expr:
        tok = self.cur
        if tok.kind == "INT":
            self._advance()
            return Num(int(tok.text), Span(tok.line, tok.col))
        if tok.kind == "IDENT":
            self._advance()
            return Name(tok.text, Span(tok.line, tok.col))
        if tok.kind == "-":
            self._advance()
            return Neg(self._factor(), Span(tok.line, tok.col))
        if tok.kind == "(":
            self._advance()
            e = self._expr()
            self._expect(")")
            return e
        raise ParseError(tok.line, tok.col, f"expected expression, found {tok.text or 'end of input'!r}",
                         ("INT", "IDENT", "-", "("))


def parse(src: str) -> Program:
    """Parse DSL source text into a program AST."""
    return Parser(src).parse()
