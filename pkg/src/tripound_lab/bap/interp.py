"""Matrix-machine interpreter for parsed BAP programs."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from ..model import Instance, Pairing
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
    Paren,
    Seq,
)
from .errors import BapRuntimeError, IndexOutOfBounds, StepCapExceeded
from .parser import check_references

DEFAULT_STEP_CAP = 10**7
MAX_OP_DEPTH = 200


@dataclass
class Matrix:
    width: int
    rows: list[list[int | None]] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)


@dataclass
class BapState:
    matrices: dict[str, Matrix] = field(default_factory=dict)
    scalars: dict[str, int] = field(default_factory=dict)
    step_counter: int = 0
    step_cap: int = DEFAULT_STEP_CAP
    # steps attributed to the innermost statement executing when they were taken
    profile: dict[Loc, int] = field(default_factory=dict)


class _Halt(Exception):
    pass


def _trunc_div(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b > 0) else -q


class Machine:
    def __init__(self, prog: BapProgram, state: BapState):
        self.prog = prog
        self.ops = prog.operators
        self.state = state
        self.current: Loc = Loc(0, 0)
        self.depth = 0

    def charge(self, n: int = 1):
        st = self.state
        if st.step_counter + n > st.step_cap:
            raise StepCapExceeded(f"{self.current}: step cap {st.step_cap} exceeded")
        st.step_counter += n
        st.profile[self.current] = st.profile.get(self.current, 0) + n

    def matrix(self, name: str, loc: Loc) -> Matrix:
        try:
            return self.state.matrices[name]
        except KeyError:
            raise BapRuntimeError(f"{loc}: {name!r} is not a matrix") from None

    def _index(self, m: Matrix, c: Cell, write: bool) -> tuple[int, int]:
        r, col = self.eval(c.row), self.eval(c.col)
        limit = len(m) if write else len(m) - 1
        if r < 0 or col < 0 or r > limit or col >= m.width:
            raise IndexOutOfBounds(
                f"{c.loc}: {c.matrix}_({r}, {col}) outside {len(m)} x {m.width} matrix"
            )
        return r, col

    def read_cell(self, c: Cell) -> int:
        m = self.matrix(c.matrix, c.loc)
        r, col = self._index(m, c, write=False)
        self.charge()
        value = m.rows[r][col]
        if value is None:
            raise IndexOutOfBounds(f"{c.loc}: {c.matrix}_({r}, {col}) is empty")
        return value

    def write_cell(self, c: Cell, value: int):
        m = self.matrix(c.matrix, c.loc)
        r, col = self._index(m, c, write=True)
        self.charge()
        if r == len(m):
            m.rows.append([None] * m.width)
        m.rows[r][col] = value

    def eval(self, e) -> int:
        if isinstance(e, Num):
            return e.value
        if isinstance(e, Name):
            try:
                return self.state.scalars[e.name]
            except KeyError:
                raise BapRuntimeError(f"{e.loc}: scalar {e.name!r} is not defined") from None
        if isinstance(e, Length):
            return len(self.matrix(e.matrix, e.loc))
        if isinstance(e, Cell):
            return self.read_cell(e)
        if isinstance(e, Paren):
            return self.eval(e.expr)
        if isinstance(e, BinOp):
            a, b = self.eval(e.left), self.eval(e.right)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            if b == 0:
                raise BapRuntimeError(f"{e.loc}: division by zero")
            return _trunc_div(a, b)
        raise TypeError(e)

    def test(self, g) -> bool:
        if isinstance(g, GuardParen):
            return self.test(g.guard)
        if isinstance(g, Logic):
            left, right = self.test(g.left), self.test(g.right)
            return (left and right) if g.op == "&" else (left != right)
        x = self.eval(g.left)
        if g.op in ("in", "notin"):
            found = False
            for row in self.matrix(g.right.name, g.right.loc).rows:
                for cell in row:
                    if cell is None:
                        continue
                    self.charge()
                    if cell == x:
                        found = True
                        break
                if found:
                    break
            return found if g.op == "in" else not found
        y = self.eval(g.right)
        self.charge()
        return {
            "<": x < y,
            "<=": x <= y,
            ">": x > y,
            ">=": x >= y,
            "==": x == y,
        }[g.op]

    def run(self, s):
        if isinstance(s, Seq):
            for sub in s.stmts:
                self.run(sub)
            return
        outer = self.current
        self.current = s.loc
        try:
            if isinstance(s, Assign):
                value = self.eval(s.value)
                if isinstance(s.target, Cell):
                    self.write_cell(s.target, value)
                else:
                    self.state.scalars[s.target.name] = value
            elif isinstance(s, Loop):
                while self.test(s.guard):
                    self.run(s.body)
                    self.current = s.loc
            elif isinstance(s, Cond):
                if self.test(s.guard):
                    self.run(s.body)
            elif isinstance(s, MachineOp):
                self.depth += 1
                if self.depth > MAX_OP_DEPTH:
                    raise BapRuntimeError(f"{s.loc}: operator nesting deeper than {MAX_OP_DEPTH}")
                try:
                    self.run(self.ops[s.op])
                finally:
                    self.depth -= 1
            elif isinstance(s, HaltIf):
                if self.test(s.guard):
                    raise _Halt()
            else:
                raise TypeError(s)
        finally:
            self.current = outer


def run_bap(prog: BapProgram, initial: BapState, step_cap: int | None = None) -> tuple[BapState, int]:
    """Execute ``prog`` on a copy of ``initial``; returns the final state and its step count."""
    state = copy.deepcopy(initial)
    if step_cap is not None:
        state.step_cap = step_cap
    check_references(prog, state.matrices)
    machine = Machine(prog, state)
    try:
        for stmt in prog.statements:
            machine.run(stmt)
    except _Halt:
        pass
    return state, state.step_counter


def state_from_instance(inst: Instance, step_cap: int = DEFAULT_STEP_CAP) -> BapState:
    """S holds one element id per row; I holds [x y] and [y x] per incompatible pair.

    D (two columns) and F (one column) start empty as working matrices.
    """
    I_rows = []
    for u, v in inst.forbidden:
        I_rows += [[u, v], [v, u]]
    return BapState(
        matrices={
            "S": Matrix(1, [[e] for e in range(inst.n)]),
            "I": Matrix(2, I_rows),
            "D": Matrix(2),
            "F": Matrix(1),
        },
        step_cap=step_cap,
    )


def pairing_from_state(state: BapState, matrix: str = "D") -> Pairing:
    rows = state.matrices[matrix].rows
    for r, row in enumerate(rows):
        if None in row:
            raise BapRuntimeError(f"{matrix} row {r} is incomplete")
    return Pairing(rows)
