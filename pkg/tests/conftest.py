import itertools
import time
from pathlib import Path

import pytest

from tripound_lab.model import Instance
from tripound_lab.sat import CnfFormula

GOLDEN = Path(__file__).parent / "golden"


# independent oracles ------------------------------------------------------

def is_valid_pairing(inst, rows):
    """Definition-level check, written without reference to check_pairing."""
    if len(rows) != inst.n // 2:
        return False
    flat = [x for row in rows for x in row]
    if sorted(flat) != list(range(inst.n)):
        return False
    banned = {frozenset(p) for p in inst.forbidden}
    return all(frozenset(row) not in banned for row in rows)


def all_pairings(n):
    """Every partition of range(n) into unordered pairs (rows sorted)."""
    def rec(rest):
        if not rest:
            yield []
            return
        x = rest[0]
        for k in range(1, len(rest)):
            y = rest[k]
            for tail in rec(rest[1:k] + rest[k + 1:]):
                yield [(x, y)] + tail
    yield from rec(list(range(n)))


def arrangements_by_permutation(inst):
    banned = {frozenset(p) for p in inst.forbidden}
    total = 0
    for perm in itertools.permutations(range(inst.n)):
        if all(frozenset(perm[r:r + 2]) not in banned for r in range(0, inst.n, 2)):
            total += 1
    return total


def read_dimacs(text):
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("c")]
    _, kind, nvars, nclauses = lines[0].split()
    assert kind == "cnf"
    clauses = []
    for ln in lines[1:]:
        lits = [int(t) for t in ln.split()]
        assert lits[-1] == 0
        clauses.append(tuple(lits[:-1]))
    assert len(clauses) == int(nclauses)
    return CnfFormula(int(nvars), tuple(clauses))


def clauses_satisfied(clauses, assignment):
    return all(any(assignment[abs(l)] == (l > 0) for l in c) for c in clauses)


def small_instance(names, *pairs):
    return Instance.from_names(list(names), pairs)


@pytest.fixture
def abcd_ab():
    return small_instance("abcd", ("a", "b"))


# acceptance reporting -----------------------------------------------------

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and rep.when == "call":
        number, title = marker.args
        _ACCEPTANCE.append((number, title, rep.passed, rep.duration))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, duration in sorted(_ACCEPTANCE):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number}. {title} ({duration:.2f}s)")


@pytest.fixture
def stopwatch():
    start = time.perf_counter()
    return lambda: time.perf_counter() - start
