import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from tripound_lab.counting import enumerate_matchings
from tripound_lab.harness import all_instances
from tripound_lab.model import Pairing, check_pairing
from tripound_lab.sat import (
    CnfFormula,
    MalformedModel,
    VarMap,
    decode,
    dpll_solve,
    encode,
    write_dimacs,
)

from conftest import GOLDEN, clauses_satisfied, read_dimacs, small_instance


def test_varmap_n4_order():
    vm = VarMap(4)
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert [vm.var(u, v) for u, v in pairs] == [1, 2, 3, 4, 5, 6]
    assert vm.var(3, 1) == vm.var(1, 3)


@pytest.mark.parametrize("n", [2, 3, 4, 7, 10, 31])
def test_varmap_bijection(n):
    vm = VarMap(n)
    ids = [vm.var(u, v) for u, v in itertools.combinations(range(n), 2)]
    assert sorted(ids) == list(range(1, n * (n - 1) // 2 + 1))
    for u, v in itertools.combinations(range(n), 2):
        assert vm.pair(vm.var(u, v)) == (u, v)


def test_varmap_rejects_diagonal():
    with pytest.raises(ValueError):
        VarMap(4).var(2, 2)


def test_encode_n4_single_pair(abcd_ab):
    formula, vm = encode(abcd_ab)
    assert formula.var_count == 6
    assert len(formula.clauses) == 17
    assert formula.clauses[0] == (-1,)
    assert sum(len(c) == 3 for c in formula.clauses) == 4
    assert sum(len(c) == 2 for c in formula.clauses) == 12


def test_encode_n2():
    formula, _ = encode(small_instance("ab"))
    assert formula == CnfFormula(1, ((1,), (1,)))
    formula, _ = encode(small_instance("ab", ("a", "b")))
    assert formula.clauses == ((-1,), (1,), (1,))
    assert not dpll_solve(formula)


def test_dimacs_small():
    assert write_dimacs(CnfFormula(1, ((1,),))) == "p cnf 1 1\n1 0\n"
    assert write_dimacs(CnfFormula(1, ((-1,), (1,)))) == "p cnf 1 2\n-1 0\n1 0\n"


def test_dimacs_golden(abcd_ab):
    formula, _ = encode(abcd_ab)
    golden = (GOLDEN / "n4_single_pair.cnf").read_bytes()
    assert write_dimacs(formula).encode() == golden


def test_cnf_rejects_bad_literals():
    with pytest.raises(ValueError):
        CnfFormula(1, ((2,),))
    with pytest.raises(ValueError):
        CnfFormula(1, ((),))


def test_dpll_trivial():
    result = dpll_solve(CnfFormula(1, ((1,),)))
    assert result.sat and result.assignment == {1: True}
    assert not dpll_solve(CnfFormula(1, ((-1,), (1,))))


def test_dpll_unconstrained_defaults_false():
    result = dpll_solve(CnfFormula(3, ((1,),)))
    assert result.assignment == {1: True, 2: False, 3: False}


def test_dpll_n4_single_pair(abcd_ab):
    # hand trace: unit -x1; decide x2 (a,c) true; AMO clears x3, x4, x6; b's ALO forces x5
    formula, vm = encode(abcd_ab)
    result = dpll_solve(formula)
    assert result.sat
    assert result.decisions == 1
    assert decode(result.assignment, vm) == Pairing([(0, 2), (1, 3)])


def test_decode_examples():
    assert decode({1: True}, VarMap(2)) == Pairing([(0, 1)])
    vm = VarMap(4)
    model = {v: False for v in range(1, 7)}
    model[vm.var(0, 2)] = model[vm.var(1, 3)] = True
    assert decode(model, vm) == Pairing([(0, 2), (1, 3)])
    model[vm.var(1, 3)] = False
    with pytest.raises(MalformedModel):
        decode(model, vm)


def test_decode_rejects_double_use():
    vm = VarMap(4)
    model = {v: False for v in range(1, 7)}
    model[vm.var(0, 1)] = model[vm.var(0, 2)] = model[vm.var(2, 3)] = True
    with pytest.raises(MalformedModel):
        decode(model, vm)


def brute_force_sat(formula):
    for bits in itertools.product([False, True], repeat=formula.var_count):
        assignment = dict(enumerate(bits, start=1))
        if clauses_satisfied(formula.clauses, assignment):
            return True
    return False


@st.composite
def cnfs(draw):
    nvars = draw(st.integers(1, 7))
    lit = st.integers(1, nvars).flatmap(lambda v: st.sampled_from([v, -v]))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=4).map(tuple), max_size=25))
    return CnfFormula(nvars, tuple(clauses))


@settings(max_examples=300)
@given(cnfs())
def test_dpll_agrees_with_truth_table(formula):
    result = dpll_solve(formula)
    assert result.sat == brute_force_sat(formula)
    if result.sat:
        assert clauses_satisfied(formula.clauses, result.assignment)


@given(cnfs())
def test_dpll_deterministic(formula):
    assert dpll_solve(formula) == dpll_solve(formula)


def test_encoding_matches_enumerator_exhaustively():
    for n in (2, 4, 6, 8):
        for inst in all_instances(n):
            formula, vm = encode(inst)
            result = dpll_solve(formula)
            assert result.sat == (next(enumerate_matchings(inst), None) is not None)
            if result.sat:
                assert check_pairing(inst, decode(result.assignment, vm)).valid


def test_random_assignments_violating_constraints_fail_clauses():
    rng = random.Random(5)
    for inst in all_instances(6):
        formula, vm = encode(inst)
        for _ in range(20):
            assignment = {v: rng.random() < 0.3 for v in range(1, vm.count + 1)}
            true_pairs = [vm.pair(v) for v, b in assignment.items() if b]
            uses = [x for p in true_pairs for x in p]
            forbidden_hit = any(assignment[vm.var(u, v)] for u, v in inst.forbidden)
            perfect = sorted(uses) == list(range(inst.n))
            if forbidden_hit or not perfect:
                assert not clauses_satisfied(formula.clauses, assignment)
            else:
                assert clauses_satisfied(formula.clauses, assignment)


def test_dimacs_round_trip():
    for inst in list(all_instances(6))[::7]:
        formula, _ = encode(inst)
        assert read_dimacs(write_dimacs(formula)) == formula
