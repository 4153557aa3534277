"""AST node types. Source locations are carried but excluded from equality."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Loc:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


NOLOC = Loc(0, 0)


def _loc():
    return field(default=NOLOC, compare=False, repr=False)


# expressions

@dataclass(frozen=True)
class Num:
    value: int
    loc: Loc = _loc()


@dataclass(frozen=True)
class Name:
    name: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class Length:
    matrix: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class Cell:
    matrix: str
    row: "Expr"
    col: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Paren:
    expr: "Expr"
    loc: Loc = _loc()


Expr = Union[Num, Name, Length, Cell, BinOp, Paren]


# guards

@dataclass(frozen=True)
class Compare:
    op: str
    left: Expr
    right: Expr  # a Name naming a matrix when op is "in" / "notin"
    loc: Loc = _loc()


@dataclass(frozen=True)
class Logic:
    op: str  # "&" or "xor"
    left: "Guard"
    right: "Guard"
    loc: Loc = _loc()


@dataclass(frozen=True)
class GuardParen:
    guard: "Guard"
    loc: Loc = _loc()


Guard = Union[Compare, Logic, GuardParen]


# statements

@dataclass(frozen=True)
class Assign:
    target: Union[Name, Cell]
    value: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Seq:
    """Statements joined by the unconditional ``\\`` connective."""

    stmts: tuple["Stmt", ...]
    loc: Loc = _loc()


@dataclass(frozen=True)
class Loop:
    guard: Guard
    body: Union["Stmt", Seq]
    loc: Loc = _loc()


@dataclass(frozen=True)
class Cond:
    guard: Guard
    body: Union["Stmt", Seq]
    loc: Loc = _loc()


@dataclass(frozen=True)
class MachineOp:
    op: str
    language: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class HaltIf:
    guard: Guard
    loc: Loc = _loc()


@dataclass(frozen=True)
class OpDef:
    name: str
    body: Union["Stmt", Seq]
    loc: Loc = _loc()


Stmt = Union[Assign, Loop, Cond, MachineOp, HaltIf]


@dataclass(frozen=True)
class BapProgram:
    statements: tuple[Union[Stmt, Seq], ...]
    # definitions in source order; operator lookup goes through ``operators``
    definitions: tuple[OpDef, ...] = ()

    @property
    def operators(self) -> dict[str, Union[Stmt, Seq]]:
        return {d.name: d.body for d in self.definitions}
