import pytest
from hypothesis import given, settings, strategies as st

from tripound_lab.bap import (
    BapState,
    BapSyntaxError,
    IndexOutOfBounds,
    Matrix,
    StepCapExceeded,
    UndefinedMatrix,
    UndefinedOperator,
    bundled_tripound,
    bundled_tripound_source,
    format_program,
    pairing_from_state,
    parse_bap,
    run_bap,
    state_from_instance,
)
from tripound_lab.bap.ast import (
    Assign,
    BapProgram,
    BinOp,
    Cell,
    Compare,
    Cond,
    GuardParen,
    HaltIf,
    Length,
    Logic,
    Loop,
    MachineOp,
    Name,
    Num,
    OpDef,
    Paren,
    Seq,
)
from tripound_lab.bap.errors import BapRuntimeError
from tripound_lab.bap.parser import lex
from tripound_lab.harness import random_instances
from tripound_lab.model import Pairing
from tripound_lab.tripound import tripound_solve

from conftest import small_instance


def single(text):
    prog = parse_bap(text)
    assert len(prog.statements) == 1
    return prog.statements[0]


# parsing

def test_parse_length_assign():
    assert single("k = $S$;") == Assign(Name("k"), Length("S"))


def test_parse_loop_machine_op():
    prog = parse_bap("d *: D_(line, 0) = I_(line, 0);\nforall (line < k) => <M| d D>;")
    assert prog.statements[0] == Loop(Compare("<", Name("line"), Name("k")), MachineOp("d", "D"))
    assert prog.operators["d"] == Assign(Cell("D", Name("line"), Num(0)), Cell("I", Name("line"), Num(0)))


def test_parse_backslash_sequence():
    assert single("x = 1 \\ y = 2;") == Seq((Assign(Name("x"), Num(1)), Assign(Name("y"), Num(2))))


def test_parse_cond_and_halt():
    stmt = single("S_(line, 0) in I & line >= 0 => halt if line > k / 2;")
    assert isinstance(stmt, Cond)
    assert stmt.guard == Logic(
        "&",
        Compare("in", Cell("S", Name("line"), Num(0)), Name("I")),
        Compare(">=", Name("line"), Num(0)),
    )
    assert stmt.body == HaltIf(Compare(">", Name("line"), BinOp("/", Name("k"), Num(2))))


def test_parse_paren_guard_vs_paren_expr():
    assert single("(a < b) xor (c < d) => x = 1;").guard == Logic(
        "xor", GuardParen(Compare("<", Name("a"), Name("b"))), GuardParen(Compare("<", Name("c"), Name("d")))
    )
    assert single("(a + 1) < b => x = 1;").guard == Compare(
        "<", Paren(BinOp("+", Name("a"), Num(1))), Name("b")
    )


def test_arithmetic_is_left_to_right():
    assert single("x = 1 + 2 * 3;").value == BinOp("*", BinOp("+", Num(1), Num(2)), Num(3))


def test_underscore_names_and_cells():
    toks = [t.text for t in lex("k_old = D_(0, 1);")]
    assert toks[:4] == ["k_old", "=", "D", "_("]


def test_comments_are_skipped():
    prog = parse_bap("// header\nk = 1; // trailing\n")
    assert prog.statements == (Assign(Name("k"), Num(1)),)


@pytest.mark.parametrize(
    "text",
    ["k = ;", "forall line < k => x = 1;", "x = 1", "halt line > 1;", "<M| d>;", "x = 1 # 2;", "x == 1;"],
)
def test_syntax_errors(text):
    with pytest.raises(BapSyntaxError) as info:
        parse_bap(text)
    assert info.value.line == 1


def test_syntax_error_position():
    with pytest.raises(BapSyntaxError) as info:
        parse_bap("k = 1;\nx = = 2;")
    assert (info.value.line, info.value.col) == (2, 5)


def test_undefined_operator():
    with pytest.raises(UndefinedOperator):
        parse_bap("forall (line < k) => <M| d D>;")


def test_undefined_matrix():
    with pytest.raises(UndefinedMatrix):
        parse_bap("k = $Q$;", matrices=["S"])
    with pytest.raises(UndefinedMatrix):
        run_bap(parse_bap("1 in Z => y = 1;"), BapState())


def test_operator_defined_after_use_is_hoisted():
    prog = parse_bap("x = 0;\n<M| d S>;\nd *: x = x + 1;")
    state, _ = run_bap(prog, BapState(matrices={"S": Matrix(1)}))
    assert state.scalars["x"] == 1


# running

def test_run_length():
    state, steps = run_bap(parse_bap("k = $S$;"), BapState(matrices={"S": Matrix(1, [[0], [1], [2], [3]])}))
    assert state.scalars == {"k": 4}
    assert steps == 0


def test_non_progressing_loop_hits_cap():
    with pytest.raises(StepCapExceeded):
        run_bap(parse_bap("forall (0 < 1) => x = 1;"), BapState(step_cap=1000))


def test_default_cap_is_ten_million():
    assert BapState().step_cap == 10**7


def test_unconditional_sequence_and_cond():
    prog = parse_bap("x = 0 \\ y = 5;\nx < 1 => x = 7 \\ y = y - 1;\nx < 1 => y = 100;")
    state, steps = run_bap(prog, BapState())
    assert state.scalars == {"x": 7, "y": 4}
    assert steps == 2


def test_halt_stops_program():
    prog = parse_bap("x = 0;\nforall (x < 10) => x = x + 1 \\ halt if x == 3;\ny = 1;")
    state, _ = run_bap(prog, BapState())
    assert state.scalars == {"x": 3}


def test_xor_guard():
    prog = parse_bap("x = 0;\n1 < 2 xor 2 < 3 => x = 1;\n1 < 2 xor 3 < 2 => x = x + 10;")
    assert run_bap(prog, BapState())[0].scalars["x"] == 10


def test_division_truncates_toward_zero():
    prog = parse_bap("a = 7 / 2;\nb = 0 - 7 / 2;\nc = (0 - 7) / 2;")
    scalars = run_bap(prog, BapState())[0].scalars
    # left to right: (0 - 7) / 2 in both b and c
    assert scalars == {"a": 3, "b": -3, "c": -3}
    with pytest.raises(BapRuntimeError):
        run_bap(parse_bap("a = 1 / 0;"), BapState())


def test_matrix_growth_and_bounds():
    prog = parse_bap("D_(0, 0) = 5;\nD_(1, 1) = 6;")
    state, steps = run_bap(prog, BapState(matrices={"D": Matrix(2)}))
    assert state.matrices["D"].rows == [[5, None], [None, 6]]
    assert steps == 2
    for text in ("D_(2, 0) = 1;", "D_(0, 2) = 1;", "x = D_(0, 0);", "x = 0 - 1 \\ D_(x, 0) = 1;"):
        with pytest.raises(IndexOutOfBounds):
            run_bap(parse_bap(text), BapState(matrices={"D": Matrix(2)}))


def test_empty_cell_read_is_an_error():
    state = BapState(matrices={"D": Matrix(2, [[1, None]])})
    with pytest.raises(IndexOutOfBounds):
        run_bap(parse_bap("x = D_(0, 1);"), state)


def test_membership_counts_each_comparison():
    state = BapState(matrices={"I": Matrix(2, [[4, 5], [5, 4]])})
    assert run_bap(parse_bap("4 in I => y = 1;"), state)[1] == 1
    assert run_bap(parse_bap("5 in I => y = 1;"), state)[1] == 2
    assert run_bap(parse_bap("9 notin I => y = 1;"), state)[1] == 4


def test_initial_state_not_mutated():
    state = BapState(matrices={"D": Matrix(2)})
    run_bap(parse_bap("D_(0, 0) = 1;"), state)
    assert state.matrices["D"].rows == []
    assert state.step_counter == 0


def test_runaway_operator_recursion():
    with pytest.raises(BapRuntimeError):
        run_bap(parse_bap("d *: <M| d S>;\n<M| d S>;"), BapState(matrices={"S": Matrix(1)}))


def test_profile_sums_to_counter():
    inst = small_instance("abcdefgh", ("a", "e"), ("b", "h"))
    state, steps = run_bap(bundled_tripound(), state_from_instance(inst))
    assert sum(state.profile.values()) == steps == state.step_counter
    assert all(v > 0 for v in state.profile.values())


def test_step_counts_deterministic():
    for inst in random_instances(20, seed=2):
        a = run_bap(bundled_tripound(), state_from_instance(inst))
        b = run_bap(bundled_tripound(), state_from_instance(inst))
        assert a[1] == b[1]
        assert a[0].matrices["D"].rows == b[0].matrices["D"].rows


# bundled program

def test_bundled_n2():
    state, _ = run_bap(bundled_tripound(), state_from_instance(small_instance("ab")))
    assert pairing_from_state(state) == Pairing([(0, 1)])


def test_bundled_single_pair(abcd_ab):
    state, _ = run_bap(bundled_tripound(), state_from_instance(abcd_ab))
    assert pairing_from_state(state) == tripound_solve(abcd_ab)[0] == Pairing([(0, 2), (1, 3)])


def test_bundled_mirrors_exhaustion():
    inst = small_instance("abcd", ("a", "b"), ("c", "d"))
    with pytest.raises(IndexOutOfBounds):
        run_bap(bundled_tripound(), state_from_instance(inst))


def test_bundled_equivalent_to_native():
    program = bundled_tripound()
    for inst in random_instances(200, seed=77):
        state, _ = run_bap(program, state_from_instance(inst))
        assert pairing_from_state(state) == tripound_solve(inst)[0]


def test_bundled_marks_divergences():
    src = bundled_tripound_source()
    assert "k = k + 1" in src
    assert "xor" in src
    assert "line = line + line" in src


def test_bundled_round_trip():
    prog = bundled_tripound()
    assert parse_bap(format_program(prog)) == prog


# round trip over generated programs

names = st.sampled_from(["x", "line", "k", "a_b"])
matrices = st.sampled_from(["S", "D", "I"])


def exprs():
    leaves = st.one_of(
        st.integers(0, 99).map(Num),
        names.map(Name),
        matrices.map(Length),
    )

    def extend(children):
        return st.one_of(
            st.builds(lambda m, r, c: Cell(m, r, c), matrices, children, children),
            children.map(Paren),
            # a right operand that is itself a BinOp must be parenthesised to re-parse the same
            st.builds(lambda op, l, r: BinOp(op, l, r if not isinstance(r, BinOp) else Paren(r)),
                      st.sampled_from("+-*/"), children, children),
        )

    return st.recursive(leaves, extend, max_leaves=6)


def guards():
    base = st.one_of(
        st.builds(Compare, st.sampled_from(["<", "<=", ">", ">=", "=="]), exprs(), exprs()),
        st.builds(Compare, st.sampled_from(["in", "notin"]), exprs(), matrices.map(Name)),
    )

    def extend(children):
        return st.one_of(
            children.map(GuardParen),
            st.builds(lambda op, l, r: Logic(op, l, r if not isinstance(r, Logic) else GuardParen(r)),
                      st.sampled_from(["&", "xor"]), children, children),
        )

    return st.recursive(base, extend, max_leaves=4)


def simple_stmts():
    return st.one_of(
        st.builds(Assign, names.map(Name), exprs()),
        st.builds(Assign, st.builds(Cell, matrices, exprs(), exprs()), exprs()),
        st.builds(lambda g: HaltIf(g), guards()),
        st.just(MachineOp("op", "D")),
    )


def seqs(stmt):
    return st.lists(stmt, min_size=1, max_size=3).map(lambda xs: xs[0] if len(xs) == 1 else Seq(tuple(xs)))


def stmts():
    # compound bodies go last in a sequence, where greedy parsing keeps the same shape
    inner = seqs(simple_stmts())
    compound = st.one_of(
        st.builds(Loop, guards(), inner),
        st.builds(Cond, guards(), inner),
    )
    return st.one_of(
        seqs(simple_stmts()),
        st.builds(lambda head, tail: Seq((*head, tail)), st.lists(simple_stmts(), min_size=1, max_size=2), compound),
        compound,
    )


@settings(max_examples=200)
@given(st.lists(stmts(), min_size=1, max_size=4), seqs(simple_stmts()))
def test_print_parse_round_trip(statements, op_body):
    prog = BapProgram(tuple(statements), (OpDef("op", op_body),))
    text = format_program(prog)
    assert parse_bap(text) == prog
