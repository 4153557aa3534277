"""Lexer, recursive-descent parser and pretty-printer for BAP source.

ASCII spellings: ``forall``, ``xor``, ``in``, ``notin``, ``<M| op Lang>``,
``$X$`` for row count, ``X_(row, col)`` for 0-based cells, ``\\`` for the
unconditional connective and ``name *: ...`` for operator definitions.
Arithmetic is evaluated strictly left to right with no precedence.
"""

from __future__ import annotations

import re
from typing import Iterable, NamedTuple

from .ast import (
    Assign,
    BapProgram,
    BinOp,
    Cell,
    Compare,
    Cond,
    GuardParen,
    HaltIf,
    Length,
    Loc,
    Logic,
    Loop,
    MachineOp,
    Name,
    Num,
    OpDef,
    Paren,
    Seq,
)
from .errors import BapSyntaxError, UndefinedMatrix, UndefinedOperator

KEYWORDS = {"forall", "halt", "if", "xor", "in", "notin"}
RELATIONS = ("<", "<=", ">", ">=", "==")

TOKEN_SPEC = [
    ("COMMENT", r"//[^\n]*"),
    ("NEWLINE", r"\n"),
    ("WS", r"[ \t\r]+"),
    ("INT", r"\d+"),
    ("IDENT", r"[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+)*"),
    ("SUB", r"_\("),
    ("DEFINE", r"\*:"),
    ("ARROW", r"=>"),
    ("OP", r"<=|>=|==|[<>=+\-*/(),;\\|$&]"),
]
MASTER = re.compile("|".join(f"(?P<{name}>{pat})" for name, pat in TOKEN_SPEC))


class Tok(NamedTuple):
    kind: str
    text: str
    line: int
    col: int

    @property
    def loc(self) -> Loc:
        return Loc(self.line, self.col)


def lex(src: str) -> list[Tok]:
    toks = []
    line, col, pos = 1, 1, 0
    while pos < len(src):
        m = MASTER.match(src, pos)
        if not m:
            raise BapSyntaxError(f"unexpected character {src[pos]!r}", line, col)
        kind, text = m.lastgroup, m.group()
        if kind == "NEWLINE":
            line, col = line + 1, 1
        else:
            if kind not in ("WS", "COMMENT"):
                if kind == "IDENT" and text in KEYWORDS:
                    kind = "KW"
                toks.append(Tok(kind, text, line, col))
            col += len(text)
        pos = m.end()
    toks.append(Tok("EOF", "", line, col))
    return toks


class Parser:
    def __init__(self, src: str):
        self.toks = lex(src)
        self.pos = 0

    # token helpers

    @property
    def tok(self) -> Tok:
        return self.toks[self.pos]

    def peek(self, offset=1) -> Tok:
        return self.toks[min(self.pos + offset, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != "EOF"

    def advance(self) -> Tok:
        tok = self.tok
        self.pos += 1
        return tok

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def ident(self) -> Tok:
        if self.tok.kind != "IDENT":
            self.fail("expected a name")
        return self.advance()

    def fail(self, message: str):
        tok = self.tok
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise BapSyntaxError(f"{message}, found {found}", tok.line, tok.col)

    # grammar

    def program(self) -> BapProgram:
        statements = []
        definitions = []
        while self.tok.kind != "EOF":
            if self.tok.kind == "IDENT" and self.peek().kind == "DEFINE":
                name = self.advance()
                self.advance()
                definitions.append(OpDef(name.text, self.stmtseq(), name.loc))
            else:
                statements.append(self.stmtseq())
            self.expect(";")
        return BapProgram(tuple(statements), tuple(definitions))

    def stmtseq(self):
        start = self.tok.loc
        stmts = [self.stmt()]
        while self.at("\\"):
            self.advance()
            stmts.append(self.stmt())
        return stmts[0] if len(stmts) == 1 else Seq(tuple(stmts), start)

    def stmt(self):
        tok = self.tok
        if tok.kind == "KW" and tok.text == "forall":
            self.advance()
            self.expect("(")
            guard = self.guard()
            self.expect(")")
            self.expect("=>")
            return Loop(guard, self.stmtseq(), tok.loc)
        if tok.kind == "KW" and tok.text == "halt":
            self.advance()
            if not (self.tok.kind == "KW" and self.tok.text == "if"):
                self.fail("expected 'if'")
            self.advance()
            return HaltIf(self.guard(), tok.loc)
        if tok.text == "<" and self.peek().text == "M" and self.peek(2).text == "|":
            self.pos += 3
            op = self.ident().text
            language = self.ident().text
            self.expect(">")
            return MachineOp(op, language, tok.loc)
        if tok.kind == "IDENT":
            saved = self.pos
            try:
                target = self.lvalue()
            except BapSyntaxError:
                target = None
            if target is not None and self.at("="):
                self.advance()
                return Assign(target, self.expr(), tok.loc)
            self.pos = saved
        guard = self.guard()
        self.expect("=>")
        return Cond(guard, self.stmtseq(), tok.loc)

    def lvalue(self):
        name = self.ident()
        if self.tok.kind == "SUB":
            return self.cell_rest(name)
        return Name(name.text, name.loc)

    def cell_rest(self, name: Tok) -> Cell:
        self.advance()
        row = self.expr()
        self.expect(",")
        col = self.expr()
        self.expect(")")
        return Cell(name.text, row, col, name.loc)

    def guard(self):
        left = self.guard_primary()
        while self.at("&") or (self.tok.kind == "KW" and self.tok.text == "xor"):
            op = self.advance()
            left = Logic(op.text, left, self.guard_primary(), op.loc)
        return left

    def guard_primary(self):
        if self.at("("):
            saved = self.pos
            start = self.advance()
            try:
                inner = self.guard()
                self.expect(")")
                return GuardParen(inner, start.loc)
            except BapSyntaxError:
                self.pos = saved
        return self.comparison()

    def comparison(self) -> Compare:
        left = self.expr()
        tok = self.tok
        if tok.kind == "KW" and tok.text in ("in", "notin"):
            self.advance()
            matrix = self.ident()
            return Compare(tok.text, left, Name(matrix.text, matrix.loc), tok.loc)
        if tok.kind == "OP" and tok.text in RELATIONS:
            self.advance()
            return Compare(tok.text, left, self.expr(), tok.loc)
        self.fail("expected a relation")

    def expr(self):
        left = self.term()
        while self.tok.kind == "OP" and self.tok.text in "+-*/":
            op = self.advance()
            left = BinOp(op.text, left, self.term(), op.loc)
        return left

    def term(self):
        tok = self.tok
        if tok.kind == "INT":
            self.advance()
            return Num(int(tok.text), tok.loc)
        if self.at("$"):
            self.advance()
            name = self.ident()
            self.expect("$")
            return Length(name.text, tok.loc)
        if self.at("("):
            self.advance()
            inner = self.expr()
            self.expect(")")
            return Paren(inner, tok.loc)
        if tok.kind == "IDENT":
            self.advance()
            if self.tok.kind == "SUB":
                return self.cell_rest(tok)
            return Name(tok.text, tok.loc)
        self.fail("expected an expression")


def _walk(node):
    yield node
    for value in getattr(node, "__dict__", {}).values():
        if isinstance(value, tuple):
            for item in value:
                yield from _walk(item)
        elif hasattr(value, "__dataclass_fields__"):
            yield from _walk(value)


def matrix_references(prog: BapProgram) -> list[tuple[str, Loc]]:
    refs = []
    for root in (*prog.definitions, *prog.statements):
        for node in _walk(root):
            if isinstance(node, MachineOp):
                refs.append((node.language, node.loc))
            elif isinstance(node, (Length, Cell)):
                refs.append((node.matrix, node.loc))
            elif isinstance(node, Compare) and node.op in ("in", "notin"):
                refs.append((node.right.name, node.right.loc))
    return refs


def check_references(prog: BapProgram, matrices: Iterable[str] | None = None) -> None:
    ops = prog.operators
    for root in (*prog.definitions, *prog.statements):
        for node in _walk(root):
            if isinstance(node, MachineOp) and node.op not in ops:
                raise UndefinedOperator(f"{node.loc}: operator {node.op!r} is not defined")
    if matrices is not None:
        known = set(matrices)
        for name, loc in matrix_references(prog):
            if name not in known:
                raise UndefinedMatrix(f"{loc}: matrix {name!r} is not declared")


def parse_bap(text: str, matrices: Iterable[str] | None = None) -> BapProgram:
    """Parse ``text``; when ``matrices`` is given, also check matrix names against it."""
    prog = Parser(text).program()
    check_references(prog, matrices)
    return prog


# printing

def format_expr(e) -> str:
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.name
    if isinstance(e, Length):
        return f"${e.matrix}$"
    if isinstance(e, Cell):
        return f"{e.matrix}_({format_expr(e.row)}, {format_expr(e.col)})"
    if isinstance(e, BinOp):
        return f"{format_expr(e.left)} {e.op} {format_expr(e.right)}"
    if isinstance(e, Paren):
        return f"({format_expr(e.expr)})"
    raise TypeError(e)


def format_guard(g) -> str:
    if isinstance(g, Compare):
        return f"{format_expr(g.left)} {g.op} {format_expr(g.right)}"
    if isinstance(g, Logic):
        return f"{format_guard(g.left)} {g.op} {format_guard(g.right)}"
    if isinstance(g, GuardParen):
        return f"({format_guard(g.guard)})"
    raise TypeError(g)


def format_stmt(s) -> str:
    if isinstance(s, Seq):
        return " \\ ".join(format_stmt(x) for x in s.stmts)
    if isinstance(s, Assign):
        return f"{format_expr(s.target)} = {format_expr(s.value)}"
    if isinstance(s, Loop):
        return f"forall ({format_guard(s.guard)}) => {format_stmt(s.body)}"
    if isinstance(s, Cond):
        return f"{format_guard(s.guard)} => {format_stmt(s.body)}"
    if isinstance(s, MachineOp):
        return f"<M| {s.op} {s.language}>"
    if isinstance(s, HaltIf):
        return f"halt if {format_guard(s.guard)}"
    raise TypeError(s)


def format_program(prog: BapProgram) -> str:
    lines = [f"{d.name} *: {format_stmt(d.body)};" for d in prog.definitions]
    lines += [f"{format_stmt(s)};" for s in prog.statements]
    return "\n".join(lines) + "\n"
