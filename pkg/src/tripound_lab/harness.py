"""Seeded instance generation, scaling fits, determinism checks and the verify suite."""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator, Sequence

from . import bap
from .counting import (
    VARIANTS,
    compare_counts,
    count_matchings_bruteforce,
    enumerate_matchings,
)
from .model import Instance, check_pairing, format_pairing
from .sat import decode, dpll_solve, encode
from .tripound import (
    Infeasible,
    InsufficientFreeElements,
    TripoundError,
    feasibility_threshold,
    tripound_solve,
)

MASK64 = (1 << 64) - 1
LCG_MUL = 6364136223846793005
LCG_INC = 1442695040888963407


def lcg_next(state: int) -> int:
    return (state * LCG_MUL + LCG_INC) & MASK64


class Lcg:
    """64-bit LCG; draws come from the high 32 bits of each new state."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u32(self) -> int:
        self.state = lcg_next(self.state)
        return self.state >> 32

    def below(self, bound: int) -> int:
        """Integer in ``[0, bound)`` by multiply-shift of a 32-bit draw."""
        return (self.next_u32() * bound) >> 32


class SpecInvalid(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    n: int
    i: int
    seed: int
    incompatibles_first: bool = False


def gen_instance(spec: GenSpec) -> Instance:
    n, i = spec.n, spec.i
    if n < 2 or n % 2 or i < 0 or 2 * i > n or not 0 <= spec.seed <= MASK64:
        raise SpecInvalid(f"invalid generator spec {spec}")
    rng = Lcg(spec.seed)
    ids = list(range(n))
    for j in range(n - 1, 0, -1):
        r = rng.below(j + 1)
        ids[j], ids[r] = ids[r], ids[j]
    chosen = ids[: 2 * i]
    pairs = [(chosen[2 * p], chosen[2 * p + 1]) for p in range(i)]
    names = [f"e{j}" for j in range(n)]
    if spec.incompatibles_first:
        taken = set(chosen)
        order = chosen + [j for j in range(n) if j not in taken]
        names = [f"e{j}" for j in order]
        pos = {j: k for k, j in enumerate(order)}
        pairs = [(pos[u], pos[v]) for u, v in pairs]
    return Instance.build(names, pairs)


def random_instances(count: int, seed: int, max_n: int = 40, min_n: int = 2, feasible_only: bool = True) -> Iterator[Instance]:
    """A deterministic stream of instances with ``n`` in ``[min_n, max_n]`` (even)."""
    rng = Lcg(seed)
    sizes = list(range(min_n, max_n + 1, 2))
    for _ in range(count):
        n = sizes[rng.below(len(sizes))]
        i_max = n // 4 if feasible_only else n // 2
        i = rng.below(i_max + 1)
        yield gen_instance(GenSpec(n, i, rng.next_u32() << 32 | rng.next_u32()))


def _partial_matchings(elements: tuple[int, ...]) -> Iterator[list[tuple[int, int]]]:
    if len(elements) < 2:
        yield []
        return
    x, rest = elements[0], elements[1:]
    yield from _partial_matchings(rest)
    for k, y in enumerate(rest):
        for tail in _partial_matchings(rest[:k] + rest[k + 1 :]):
            yield [(x, y)] + tail


def all_instances(n: int) -> Iterator[Instance]:
    """Every disjoint forbidden-pair set over ``n`` elements, in a fixed order."""
    names = [f"e{j}" for j in range(n)]
    for pairs in _partial_matchings(tuple(range(n))):
        yield Instance.build(names, pairs)


# scaling

@dataclass(frozen=True)
class ScalingPoint:
    n: int
    i: int
    steps: int
    free: int


@dataclass(frozen=True)
class ScalingReport:
    scan: str
    points: tuple[ScalingPoint, ...]
    slope: float
    intercept: float
    max_residual: float

    def format(self) -> str:
        lines = [f"{'n':>8} {'i':>6} {'free':>8} {'steps':>12}"]
        for p in self.points:
            lines.append(f"{p.n:>8} {p.i:>6} {p.free:>8} {p.steps:>12}")
        lines.append(f"scan={self.scan}")
        lines.append(f"slope={self.slope:.6f}")
        lines.append(f"intercept={self.intercept:.6f}")
        lines.append(f"max_residual={self.max_residual:.6f}")
        return "\n".join(lines) + "\n"


def fit_loglog(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares line through (log x, log y): slope, intercept, max |residual|."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(y) for y in ys]
    slope, intercept = statistics.linear_regression(lx, ly)
    residual = max(abs(y - (slope * x + intercept)) for x, y in zip(lx, ly))
    return slope, intercept, residual


def measure_scaling(sizes: Iterable[int], scan: str = "linear", seed: int = 1, incompatibles_first: bool = False) -> ScalingReport:
    points = []
    for n in sorted(sizes):
        if n < 8 or n % 2:
            raise SpecInvalid(f"scaling sizes must be even and >= 8, got {n}")
        i = n // 8
        inst = gen_instance(GenSpec(n, i, seed, incompatibles_first))
        _, trace = tripound_solve(inst, "faithful", scan)
        points.append(ScalingPoint(n, i, trace.total, trace.free))
    slope, intercept, residual = fit_loglog([p.n for p in points], [p.steps for p in points])
    return ScalingReport(scan, tuple(points), slope, intercept, residual)


# determinism

@dataclass(frozen=True)
class DeterminismVerdict:
    passed: bool
    divergence: str | None = None

    def __bool__(self):
        return self.passed


def _native_fingerprint(inst: Instance, mode: str = "faithful", scan: str = "linear") -> str:
    try:
        pairing, trace = tripound_solve(inst, mode, scan)
    except TripoundError as exc:
        return f"error={type(exc).__name__}: {exc}\n"
    return format_pairing(inst, pairing) + trace.format()


def _bap_fingerprint(inst: Instance, program: bap.BapProgram | None = None) -> str:
    program = program or bap.bundled_tripound()
    try:
        state, steps = bap.run_bap(program, bap.state_from_instance(inst))
    except bap.BapError as exc:
        return f"error={type(exc).__name__}: {exc}\n"
    rows = "".join(f"{r}\n" for r in state.matrices["D"].rows)
    return rows + f"steps={steps}\n"


def determinism_check(
    inst: Instance,
    runs: int = 3,
    native: Callable[[Instance], str] = _native_fingerprint,
    interpreted: Callable[[Instance], str] = _bap_fingerprint,
) -> DeterminismVerdict:
    """Re-run the native solver and the bundled program; all outputs must match byte for byte."""
    if runs < 2:
        raise ValueError("determinism needs at least two runs")
    for label, fn in (("native", native), ("bap", interpreted)):
        first = fn(inst)
        for run in range(1, runs):
            again = fn(inst)
            if again != first:
                a, b = first.splitlines(), again.splitlines()
                line = next((k for k, (x, y) in enumerate(zip(a, b)) if x != y), min(len(a), len(b)))
                left = a[line] if line < len(a) else "<end>"
                right = b[line] if line < len(b) else "<end>"
                return DeterminismVerdict(False, f"{label} run {run} line {line}: {left!r} != {right!r}")
    return DeterminismVerdict(True)


# verification suite

PASS, FAIL, FAIL_EXPECTED = "PASS", "FAIL", "FAIL-expected"


@dataclass
class ClaimResult:
    name: str
    status: str
    detail: str = ""
    seconds: float = 0.0


@dataclass
class VerifyReport:
    results: list[ClaimResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status != FAIL for r in self.results)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def format(self) -> str:
        width = max(len(r.name) for r in self.results)
        lines = [f"{r.status:<13} {r.name:<{width}}  {r.detail}".rstrip() for r in self.results]
        lines.append(f"overall={'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines) + "\n"


def _even_sizes(max_n: int, start: int = 2) -> range:
    return range(start, max_n + 1, 2)


def claim_encoding_correct(max_n: int) -> tuple[bool, str]:
    checked = 0
    for n in _even_sizes(max_n):
        for inst in all_instances(n):
            formula, vm = encode(inst)
            result = dpll_solve(formula)
            has = next(enumerate_matchings(inst), None) is not None
            if result.sat != has:
                return False, f"sat={result.sat} but enumerator found={has} on {inst.forbidden} n={n}"
            if result.sat and not check_pairing(inst, decode(result.assignment, vm)):
                return False, f"decoded pairing invalid on n={n} {inst.forbidden}"
            checked += 1
    return True, f"{checked} instances"


def claim_threshold_exact(max_n: int) -> tuple[bool, str]:
    checked = 0
    for n in _even_sizes(max_n):
        for inst in all_instances(n):
            expect = feasibility_threshold(n, len(inst.forbidden))
            try:
                pairing, _ = tripound_solve(inst, "faithful")
                ok = bool(check_pairing(inst, pairing))
            except InsufficientFreeElements:
                ok = False
            if ok != expect:
                return False, f"n={n} i={len(inst.forbidden)} faithful={ok} threshold={expect}"
            checked += 1
    return True, f"{checked} instances"


def claim_faithful_sound(count: int, seed: int) -> tuple[bool, str]:
    for inst in random_instances(count, seed):
        pairing, _ = tripound_solve(inst, "faithful")
        if not check_pairing(inst, pairing):
            return False, f"invalid pairing for n={inst.n} {inst.forbidden}"
    return True, f"{count} random instances"


def claim_extended_complete(max_n: int) -> tuple[bool, str]:
    checked = 0
    for n in _even_sizes(max_n):
        for inst in all_instances(n):
            has = next(enumerate_matchings(inst), None) is not None
            try:
                pairing, _ = tripound_solve(inst, "extended")
                got = bool(check_pairing(inst, pairing))
            except Infeasible:
                got = False
            if got != has:
                return False, f"n={n} {inst.forbidden}: extended={got} enumerator={has}"
            checked += 1
    return True, f"{checked} instances"


def claim_bap_equivalent(count: int, seed: int) -> tuple[bool, str]:
    program = bap.bundled_tripound()
    for inst in random_instances(count, seed):
        native, _ = tripound_solve(inst, "faithful")
        state, _ = bap.run_bap(program, bap.state_from_instance(inst))
        if bap.pairing_from_state(state) != native:
            return False, f"D differs for n={inst.n} {inst.forbidden}"
    return True, f"{count} random instances"


def claim_count_identity(max_n: int) -> tuple[bool, str]:
    checked = 0
    for n in _even_sizes(min(max_n, 8)):
        for inst in all_instances(n):
            if not compare_counts(inst).identity_holds:
                return False, f"identity fails on n={n} {inst.forbidden}"
            checked += 1
    return True, f"{checked} instances"


def phi_cases(sizes: Iterable[int] = (2, 4, 6, 8)) -> list[tuple[str, int, int, int, int]]:
    """(variant, n, i, phi, brute arrangements) for i = 0 .. n/2 at each size."""
    rows = []
    for n in sizes:
        for i in range(n // 2 + 1):
            inst = gen_instance(GenSpec(n, i, seed=0))
            for variant in VARIANTS:
                rep = compare_counts(inst, variant)
                rows.append((variant, n, i, rep.phi, rep.brute_arrangements))
    return rows


def claim_phi_matches(variant: str) -> tuple[bool, str]:
    cases = [c for c in phi_cases() if c[0] == variant]
    bad = [c for c in cases if c[3] != c[4]]
    if not bad:
        return True, f"{len(cases)} cases agree"
    _, n, i, phi, brute = bad[0]
    return False, f"{len(bad)}/{len(cases)} cases disagree, e.g. n={n} i={i}: phi={phi} brute={brute}"


def claim_faithful_complete(max_n: int) -> tuple[bool, str]:
    """Paper claim: the three-phase procedure solves every solvable instance."""
    for n in _even_sizes(max_n):
        for inst in all_instances(n):
            if count_matchings_bruteforce(inst) == 0:
                continue
            try:
                tripound_solve(inst, "faithful")
            except InsufficientFreeElements:
                return False, f"witness n={n} i={len(inst.forbidden)} {inst.forbidden} (i > n/4) is solvable"
    return True, "no counterexample"


def claim_determinism(count: int, seed: int) -> tuple[bool, str]:
    for inst in random_instances(count, seed):
        verdict = determinism_check(inst, runs=3)
        if not verdict:
            return False, verdict.divergence
    return True, f"{count} instances x 3 runs"


SCALING_SIZES = tuple(2**k for k in range(6, 13))


def claim_polynomial(seed: int) -> tuple[bool, str]:
    lin = measure_scaling(SCALING_SIZES, "linear", seed)
    idx = measure_scaling(SCALING_SIZES, "indexed", seed)
    ok = (
        1.7 <= lin.slope <= 2.3
        and idx.slope <= 1.3
        and lin.max_residual <= 0.3
        and idx.max_residual <= 0.3
    )
    return ok, (
        f"linear slope={lin.slope:.3f} resid={lin.max_residual:.3f}; "
        f"indexed slope={idx.slope:.3f} resid={idx.max_residual:.3f}"
    )


def verify_all(max_n: int = 8, seed: int = 1) -> VerifyReport:
    if max_n > 10:
        raise SpecInvalid("exhaustive checks are limited to max-n <= 10")
    report = VerifyReport()

    def run(name, fn, *args, expected_failure=False):
        start = time.perf_counter()
        try:
            ok, detail = fn(*args)
        except Exception as exc:  # a crash is a failed property, not a harness abort
            ok, detail = False, f"{type(exc).__name__}: {exc}"
            expected_failure = False
        if ok:
            status = PASS
        else:
            status = FAIL_EXPECTED if expected_failure else FAIL
        report.results.append(ClaimResult(name, status, detail, time.perf_counter() - start))

    run("sat encoding agrees with matching enumerator", claim_encoding_correct, max_n)
    run("faithful succeeds iff i <= n/4", claim_threshold_exact, max_n)
    run("faithful pairings are valid (random)", claim_faithful_sound, 1000, seed)
    run("extended succeeds iff a pairing exists", claim_extended_complete, max_n)
    run("bundled program reproduces native D", claim_bap_equivalent, 200, seed)
    run("arrangements = matchings * (n/2)! * 2^(n/2)", claim_count_identity, max_n)
    run("deterministic outputs and step counts", claim_determinism, 50, seed)
    run("step counts grow polynomially", claim_polynomial, seed)
    for variant in VARIANTS:
        run(f"phi ({variant}) equals brute-force arrangements", claim_phi_matches, variant, expected_failure=True)
    run("faithful solves all feasible instances", claim_faithful_complete, max_n, expected_failure=True)
    return report
