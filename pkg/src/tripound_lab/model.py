"""Instances, pairings, the instance text format and the validity predicate.

An instance is an even-sized list of named elements plus a set of disjoint
incompatible pairs. A pairing places every element into exactly one row of
an ``n/2 x 2`` matrix. ``check_pairing`` is the ground truth used by every
solver and oracle in the package.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence


class InstanceError(ValueError):
    """Raised for malformed instance text. ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateElement(InstanceError):
    pass


class UnknownElementInPair(InstanceError):
    pass


class ElementInTwoPairs(InstanceError):
    pass


class SelfPair(InstanceError):
    pass


class OddElementCount(InstanceError):
    pass


class InstanceSyntaxError(InstanceError):
    pass


@dataclass(frozen=True)
class ElementTable:
    names: tuple[str, ...]
    index_of: Mapping[str, int] = field(compare=False, repr=False)

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "ElementTable":
        names = tuple(names)
        index = {}
        for j, name in enumerate(names):
            if name in index:
                raise DuplicateElement(f"duplicate element {name!r}")
            index[name] = j
        return cls(names, index)

    def __len__(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class Instance:
    table: ElementTable
    forbidden: tuple[tuple[int, int], ...]
    partner_of: tuple[int | None, ...] = field(compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.table)

    @property
    def names(self) -> tuple[str, ...]:
        return self.table.names

    @classmethod
    def build(cls, names: Iterable[str], forbidden: Iterable[tuple[int, int]] = ()) -> "Instance":
        """Validate and construct. Pairs are element ids."""
        table = ElementTable.from_names(names)
        n = len(table)
        if n % 2:
            raise OddElementCount(f"{n} elements cannot fill an N x 2 matrix")
        partner: list[int | None] = [None] * n
        pairs = []
        for u, v in forbidden:
            for x in (u, v):
                if not 0 <= x < n:
                    raise UnknownElementInPair(f"element id {x} out of range")
            if u == v:
                raise SelfPair(f"element {table.names[u]!r} paired with itself")
            for x in (u, v):
                if partner[x] is not None:
                    raise ElementInTwoPairs(f"element {table.names[x]!r} is in two incompatible pairs")
            partner[u], partner[v] = v, u
            pairs.append((u, v))
        return cls(table, tuple(pairs), tuple(partner))

    @classmethod
    def from_names(cls, names: Sequence[str], pairs: Iterable[tuple[str, str]] = ()) -> "Instance":
        table = ElementTable.from_names(names)
        return cls.build(table.names, [(table.index_of[x], table.index_of[y]) for x, y in pairs])

    def incompatible_elements(self) -> list[int]:
        """Forbidden-pair members, first then second, in pair order."""
        return [x for pair in self.forbidden for x in pair]


@dataclass(frozen=True)
class Pairing:
    rows: tuple[tuple[int, int], ...]

    def __init__(self, rows: Iterable[Sequence[int]]):
        object.__setattr__(self, "rows", tuple((int(x), int(y)) for x, y in rows))

    def flat(self) -> list[int]:
        """Row-major contents (the sorted list K)."""
        return [x for row in self.rows for x in row]


@dataclass(frozen=True)
class Verdict:
    violations: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_instance(text: str) -> Instance:
    names: list[str] | None = None
    index: dict[str, int] = {}
    pairs: list[tuple[int, int]] = []
    partner: dict[int, int] = {}
    pending_pairs: list[tuple[int, list[str]]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        keyword, *toks = line.split()
        if keyword == "elements":
            if names is not None:
                raise InstanceSyntaxError("second 'elements' line", lineno)
            if not toks:
                raise InstanceSyntaxError("'elements' needs at least one token", lineno)
            names = []
            for tok in toks:
                if tok in index:
                    raise DuplicateElement(f"duplicate element {tok!r}", lineno)
                index[tok] = len(names)
                names.append(tok)
            if len(names) % 2:
                raise OddElementCount(f"{len(names)} elements cannot fill an N x 2 matrix", lineno)
        elif keyword == "incompatible":
            if len(toks) != 2:
                raise InstanceSyntaxError("'incompatible' takes exactly two tokens", lineno)
            pending_pairs.append((lineno, toks))
        else:
            raise InstanceSyntaxError(f"unknown keyword {keyword!r}", lineno)

    if names is None:
        raise InstanceSyntaxError("missing 'elements' line")

    for lineno, (x, y) in pending_pairs:
        for tok in (x, y):
            if tok not in index:
                raise UnknownElementInPair(f"unknown element {tok!r}", lineno)
        u, v = index[x], index[y]
        if u == v:
            raise SelfPair(f"element {x!r} paired with itself", lineno)
        for tok, e in ((x, u), (y, v)):
            if e in partner:
                raise ElementInTwoPairs(f"element {tok!r} is in two incompatible pairs", lineno)
        partner[u], partner[v] = v, u
        pairs.append((u, v))

    return Instance.build(names, pairs)


def serialize_instance(inst: Instance) -> str:
    lines = ["elements " + " ".join(inst.names)]
    for u, v in inst.forbidden:
        lines.append(f"incompatible {inst.names[u]} {inst.names[v]}")
    return "\n".join(lines) + "\n"


def format_pairing(inst: Instance, p: Pairing) -> str:
    return "".join(f"{inst.names[x]} {inst.names[y]}\n" for x, y in p.rows)


def parse_pairing(inst: Instance, text: str) -> Pairing:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        toks = line.split()
        if len(toks) != 2:
            raise InstanceSyntaxError("pairing rows hold exactly two tokens", lineno)
        try:
            rows.append(tuple(inst.table.index_of[t] for t in toks))
        except KeyError as exc:
            raise UnknownElementInPair(f"unknown element {exc.args[0]!r}", lineno) from None
    return Pairing(rows)


def check_pairing(inst: Instance, p: Pairing) -> Verdict:
    """Validity of ``p``: no forbidden row and every element used exactly once.

    Order of rows and order within rows are ignored.
    """
    names = inst.names
    violations = []
    for r, (x, y) in enumerate(p.rows):
        if inst.partner_of[x] == y:
            violations.append(f"row {r} ({names[x]}, {names[y]}) is an incompatible pair")
    uses = Counter(p.flat())
    for e in range(inst.n):
        if uses[e] > 1:
            violations.append(f"element {names[e]} used {uses[e]} times")
        elif uses[e] == 0:
            violations.append(f"element {names[e]} missing")
    return Verdict(tuple(violations))
