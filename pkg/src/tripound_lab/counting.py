"""Arrangement counting: the literal series formula and brute-force counters.

``eval_phi`` evaluates the legal-arrangement series exactly as written, in two
readings (even step, unit step). It is the thing under test, so it returns
whatever signed integer the arithmetic produces. The brute-force counters are
the ground truth it is compared against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, trunc
from typing import Iterator

from .model import Instance, Pairing

ARRANGEMENT_LIMIT = 10
MATCHING_COUNT_LIMIT = 16
MATCHING_ENUM_LIMIT = 10

VARIANTS = ("even-step", "unit-step")


class SizeLimit(ValueError):
    pass


@dataclass(frozen=True)
class PhiParams:
    e: int
    i: int
    a_start: int = 2
    variant: str = "even-step"

    def __post_init__(self):
        if self.e < 0 or self.i < 0 or self.a_start < 2:
            raise ValueError(f"invalid phi parameters {self}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")


@dataclass(frozen=True)
class CountReport:
    variant: str
    n: int
    i: int
    phi: int
    brute_arrangements: int
    brute_matchings: int
    identity_holds: bool

    @property
    def agree(self) -> bool:
        return self.phi == self.brute_arrangements

    def format(self) -> str:
        fields = [
            ("n", self.n),
            ("i", self.i),
            ("variant", self.variant),
            ("phi", self.phi),
            ("brute_arrangements", self.brute_arrangements),
            ("brute_matchings", self.brute_matchings),
            ("agree", str(self.agree).lower()),
            ("identity_holds", str(self.identity_holds).lower()),
        ]
        width = max(len(k) for k, _ in fields)
        return "".join(f"{k.ljust(width)} = {v}\n" for k, v in fields)


def _forbidden_masks(inst: Instance) -> list[int]:
    """Per element, a bitmask of elements it may not share a row with."""
    masks = [0] * inst.n
    for u, v in inst.forbidden:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def count_arrangements_bruteforce(inst: Instance) -> int:
    """Ordered row-major placements of all elements with no forbidden row.

    Rows are filled top to bottom with every ordered pair of unused elements;
    the count for a given set of unused elements is memoised.
    """
    n = inst.n
    if n > ARRANGEMENT_LIMIT:
        raise SizeLimit(f"arrangement enumeration limited to n <= {ARRANGEMENT_LIMIT}, got {n}")
    bad = _forbidden_masks(inst)

    @lru_cache(maxsize=None)
    def fill(unused: int) -> int:
        if not unused:
            return 1
        total = 0
        for x in range(n):
            if not unused >> x & 1:
                continue
            rest = unused & ~(1 << x)
            for y in range(n):
                if rest >> y & 1 and not bad[x] >> y & 1:
                    total += fill(rest & ~(1 << y))
        return total

    return fill((1 << n) - 1)


def count_matchings_bruteforce(inst: Instance) -> int:
    n = inst.n
    if n > MATCHING_COUNT_LIMIT:
        raise SizeLimit(f"matching count limited to n <= {MATCHING_COUNT_LIMIT}, got {n}")
    bad = _forbidden_masks(inst)

    @lru_cache(maxsize=None)
    def count(unused: int) -> int:
        if not unused:
            return 1
        x = (unused & -unused).bit_length() - 1
        rest = unused & ~(1 << x)
        total = 0
        for y in range(x + 1, n):
            if rest >> y & 1 and not bad[x] >> y & 1:
                total += count(rest & ~(1 << y))
        return total

    return count((1 << n) - 1)


def enumerate_matchings(inst: Instance) -> Iterator[Pairing]:
    """Valid pairings, smallest unmatched element first, partners ascending."""
    n = inst.n
    if n > MATCHING_ENUM_LIMIT:
        raise SizeLimit(f"matching enumeration limited to n <= {MATCHING_ENUM_LIMIT}, got {n}")
    partner = inst.partner_of
    used = [False] * n
    rows: list[tuple[int, int]] = []

    def walk():
        try:
            x = used.index(False)
        except ValueError:
            yield Pairing(rows)
            return
        used[x] = True
        for y in range(x + 1, n):
            if used[y] or partner[x] == y:
                continue
            used[y] = True
            rows.append((x, y))
            yield from walk()
            rows.pop()
            used[y] = False
        used[x] = False

    yield from walk()


def eval_phi(p: PhiParams) -> int:
    e, i, a = p.e, p.i, p.a_start
    fi = factorial(i)
    phi = factorial(e)
    if p.variant == "even-step":
        # first term uses multiplier e; later terms e - a/2; stop once that reaches zero
        first = True
        while e - Fraction(a, 2) > 0:
            mult = e if first else trunc(e - Fraction(a, 2))
            phi -= factorial(a) * fi * mult
            first = False
            a += 2
        return phi
    phi -= factorial(a) * fi * e
    for b in range(a, e + 1):
        phi -= factorial(b + 2) * fi * trunc(e - Fraction(b + 2, 2))
    return phi


def compare_counts(inst: Instance, variant: str = "even-step") -> CountReport:
    n = inst.n
    arrangements = count_arrangements_bruteforce(inst)
    matchings = count_matchings_bruteforce(inst)
    half = n // 2
    identity = arrangements == matchings * factorial(half) * 2**half
    phi = eval_phi(PhiParams(e=n, i=len(inst.forbidden), a_start=2, variant=variant))
    return CountReport(variant, n, len(inst.forbidden), phi, arrangements, matchings, identity)
