"""CNF encoding of the pairing problem, DIMACS output and a plain DPLL solver.

Variable ``var(u, v)`` (``u < v``) is true iff ``u`` and ``v`` share a row.
The formula is: one negative unit per forbidden pair, then one at-least-one
clause per element, then pairwise at-most-one clauses per element.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .model import Instance, Pairing


class MalformedModel(ValueError):
    """True pair-variables do not describe a perfect pairing."""


@dataclass(frozen=True)
class VarMap:
    n: int

    def var(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        if u == v or u < 0 or v >= self.n:
            raise ValueError(f"no variable for ({u}, {v}) with n={self.n}")
        return u * self.n - u * (u + 1) // 2 + (v - u)

    def pair(self, var: int) -> tuple[int, int]:
        """Inverse of ``var``."""
        if not 1 <= var <= self.count:
            raise ValueError(f"variable {var} out of range 1..{self.count}")
        u = 0
        # row u owns ids var(u, u+1) .. var(u, n-1), i.e. n-1-u of them
        while var > self.n - 1 - u:
            var -= self.n - 1 - u
            u += 1
        return u, u + var

    @property
    def count(self) -> int:
        return self.n * (self.n - 1) // 2


@dataclass(frozen=True)
class CnfFormula:
    var_count: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        for clause in self.clauses:
            if not clause:
                raise ValueError("empty clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.var_count:
                    raise ValueError(f"literal {lit} out of range for {self.var_count} variables")


def encode(inst: Instance) -> tuple[CnfFormula, VarMap]:
    n = inst.n
    vm = VarMap(n)
    clauses: list[tuple[int, ...]] = []
    for u, v in inst.forbidden:
        clauses.append((-vm.var(u, v),))
    for e in range(n):
        clauses.append(tuple(vm.var(e, x) for x in range(n) if x != e))
    for e in range(n):
        others = [x for x in range(n) if x != e]
        for x, y in combinations(others, 2):
            clauses.append((-vm.var(e, x), -vm.var(e, y)))
    return CnfFormula(vm.count, tuple(clauses)), vm


def write_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.var_count} {len(f.clauses)}"]
    lines += [" ".join(map(str, clause)) + " 0" for clause in f.clauses]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SatResult:
    sat: bool
    assignment: dict[int, bool] | None
    decisions: int
    propagations: int
    conflicts: int

    def __bool__(self) -> bool:
        return self.sat


def dpll_solve(f: CnfFormula) -> SatResult:
    """Deterministic DPLL.

    Unit propagation runs to fixpoint; branching picks the lowest unassigned
    variable, TRUE first; backtracking is chronological. No pure-literal rule.
    Variables that occur in no clause are never branched on and come back FALSE.
    """
    nvars = f.var_count
    clauses = f.clauses
    value: list[bool | None] = [None] * (nvars + 1)
    # clauses containing each literal
    occurs: dict[int, list[int]] = {}
    for ci, clause in enumerate(clauses):
        for lit in clause:
            occurs.setdefault(lit, []).append(ci)
    for v in range(1, nvars + 1):
        if v not in occurs and -v not in occurs:
            value[v] = False

    # trail entries: (var, is_decision, flipped)
    trail: list[tuple[int, bool, bool]] = []
    decisions = propagations = conflicts = 0

    def lit_value(lit):
        v = value[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def propagate(queue):
        nonlocal propagations
        while queue:
            lit = queue.pop()
            for ci in occurs.get(-lit, ()):
                unassigned = None
                n_unassigned = 0
                satisfied = False
                for other in clauses[ci]:
                    lv = lit_value(other)
                    if lv is True:
                        satisfied = True
                        break
                    if lv is None:
                        n_unassigned += 1
                        unassigned = other
                if satisfied:
                    continue
                if n_unassigned == 0:
                    return False
                if n_unassigned == 1:
                    value[abs(unassigned)] = unassigned > 0
                    trail.append((abs(unassigned), False, False))
                    propagations += 1
                    queue.append(unassigned)
        return True

    # root-level units
    queue = []
    ok = True
    for clause in clauses:
        if len(clause) == 1:
            lit = clause[0]
            lv = lit_value(lit)
            if lv is False:
                ok = False
                break
            if lv is None:
                value[abs(lit)] = lit > 0
                trail.append((abs(lit), False, False))
                propagations += 1
                queue.append(lit)
    if ok:
        ok = propagate(queue)
    if not ok:
        return SatResult(False, None, decisions, propagations, conflicts + 1)

    next_var = 1
    while True:
        while next_var <= nvars and value[next_var] is not None:
            next_var += 1
        if next_var > nvars:
            model = {v: bool(value[v]) for v in range(1, nvars + 1)}
            return SatResult(True, model, decisions, propagations, conflicts)

        decisions += 1
        var = next_var
        value[var] = True
        trail.append((var, True, False))
        ok = propagate([var])
        while not ok:
            conflicts += 1
            # undo to the most recent decision that still has its FALSE branch
            while trail:
                v, is_decision, flipped = trail.pop()
                value[v] = None
                if is_decision and not flipped:
                    break
            else:
                return SatResult(False, None, decisions, propagations, conflicts)
            value[v] = False
            trail.append((v, True, True))
            ok = propagate([-v])
        next_var = 1


def decode(assignment: dict[int, bool], vm: VarMap) -> Pairing:
    rows = [vm.pair(var) for var in sorted(assignment) if assignment[var]]
    seen: set[int] = set()
    for row in rows:
        for e in row:
            if e in seen:
                raise MalformedModel(f"element {e} appears in more than one true pair")
            seen.add(e)
    missing = sorted(set(range(vm.n)) - seen)
    if missing:
        raise MalformedModel(f"elements {missing} are unmatched")
    return Pairing(rows)
