"""Native three-phase Tripound pairing with step accounting.

Phase a writes every incompatible element into column 0 of D, one per row.
Phase b strips the incompatible elements out of S, leaving the free list F.
Phase c fills column 1 of those rows from F, then fills the remaining rows
two free elements at a time.

A step is one matrix cell read, one cell write, or one comparison.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Instance, Pairing, check_pairing
from .sat import decode, dpll_solve, encode

MODES = ("faithful", "extended")
SCANS = ("linear", "indexed", "prefix")


class TripoundError(Exception):
    pass


class InsufficientFreeElements(TripoundError):
    pass


class Infeasible(TripoundError):
    pass


@dataclass(frozen=True)
class TripoundTrace:
    k: int
    a: int
    free: int
    steps_a: int
    steps_b: int
    steps_c: int
    scan: str
    mode: str
    fallback_used: bool

    @property
    def total(self) -> int:
        return self.steps_a + self.steps_b + self.steps_c

    def format(self) -> str:
        items = [
            ("k", self.k),
            ("a", self.a),
            ("free", self.free),
            ("steps_a", self.steps_a),
            ("steps_b", self.steps_b),
            ("steps_c", self.steps_c),
            ("steps_total", self.total),
            ("scan", self.scan),
            ("mode", self.mode),
            ("fallback_used", str(self.fallback_used).lower()),
        ]
        return "".join(f"{key}={value}\n" for key, value in items)


def feasibility_threshold(n: int, i: int) -> bool:
    """Whether faithful mode can place ``i`` incompatible pairs among ``n`` elements."""
    return 4 * i <= n


def _phase_a(inst: Instance, D: list[list[int | None]]) -> int:
    steps = 0
    for u, v in inst.forbidden:
        for x in (u, v):
            D.append([x, None])
            steps += 2  # read I cell, write D cell
    return steps


def _scan_linear(inst: Instance) -> tuple[list[int], int]:
    # tau is the working copy of I: rows [x, y] and [y, x] per pair; a hit
    # deletes the matched row so later searches cover fewer rows
    tau = []
    steps = 0
    for u, v in inst.forbidden:
        tau.append((u, v))
        tau.append((v, u))
        steps += 4
    free = []
    for s in range(inst.n):
        steps += 1  # read S cell
        hit = None
        for r, row in enumerate(tau):
            steps += 1
            if row[0] == s:
                hit = r
                break
        if hit is None:
            free.append(s)
            steps += 1
        else:
            del tau[hit]
            steps += 1
    return free, steps


def _scan_indexed(inst: Instance) -> tuple[list[int], int]:
    free = []
    steps = 0
    for s in range(inst.n):
        steps += 2  # read S cell, one partner lookup
        if inst.partner_of[s] is None:
            free.append(s)
            steps += 1
    return free, steps


def _scan_prefix(inst: Instance) -> tuple[list[int], int]:
    """Slice off the head of S when the incompatible elements are declared first."""
    head = 2 * len(inst.forbidden)
    steps = 0
    for s in range(head):
        steps += 2
        if inst.partner_of[s] is None:
            free, more = _scan_linear(inst)
            return free, steps + more
    free = list(range(head, inst.n))
    steps += 2 * len(free)  # read and copy each remaining S cell
    return free, steps


_SCANNERS = {"linear": _scan_linear, "indexed": _scan_indexed, "prefix": _scan_prefix}


def tripound_solve(inst: Instance, mode: str = "faithful", scan: str = "linear") -> tuple[Pairing, TripoundTrace]:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if scan not in SCANS:
        raise ValueError(f"unknown scan mode {scan!r}")

    D: list[list[int | None]] = []
    steps_a = _phase_a(inst, D)
    free, steps_b = _SCANNERS[scan](inst)

    steps_c = 0
    cursor = 0
    exhausted = False
    rows_needed = inst.n // 2
    for r in range(len(D)):
        if cursor >= len(free):
            exhausted = True
            break
        D[r][1] = free[cursor]
        cursor += 1
        steps_c += 2
    if not exhausted:
        for r in range(len(D), rows_needed):
            if cursor + 1 >= len(free):
                exhausted = True
                break
            D.append([free[cursor], free[cursor + 1]])
            cursor += 2
            steps_c += 4

    def trace(fallback):
        return TripoundTrace(
            k=inst.n,
            a=len(inst.forbidden) * 2,
            free=len(free),
            steps_a=steps_a,
            steps_b=steps_b,
            steps_c=steps_c,
            scan=scan,
            mode=mode,
            fallback_used=fallback,
        )

    if exhausted:
        if mode == "faithful":
            i = len(inst.forbidden)
            raise InsufficientFreeElements(
                f"{len(free)} free elements cannot fill column 1 of {2 * i} rows (i={i} > n/4={inst.n / 4:g})"
            )
        formula, vm = encode(inst)
        result = dpll_solve(formula)
        if not result.sat:
            raise Infeasible("no pairing avoids every incompatible pair")
        pairing = decode(result.assignment, vm)
        return pairing, trace(True)

    pairing = Pairing(D)
    verdict = check_pairing(inst, pairing)
    assert verdict.valid, verdict.violations
    return pairing, trace(False)
