import random

import pytest
from hypothesis import given, settings, strategies as st

from cfv.bitblast import bitblast
from cfv.dpll import solve_cnf
from cfv.errors import DomainTooLargeError
from cfv.generators import random_formula
from cfv.smtlib import ExternalSolver, emit_smtlib
from cfv.solver import (
    Sat,
    Timeout,
    Unsat,
    check_model,
    exhaustive_solve,
    make_solve_fn,
    sat_solve,
)
from cfv.terms import BOOL, Formula, TermBuilder, evaluate, to_signed


def single_input_formula(width, build):
    b = TermBuilder()
    x = b.input("x", width)
    return Formula(b, build(b, x), (x,))


class TestTerms:
    def test_constant_folding(self):
        b = TermBuilder()
        assert b.add(b.const(200, 8), b.const(100, 8)).value == 44
        assert b.mul(b.const(7, 4), b.const(3, 4)).value == 5
        assert b.slt(b.const(15, 4), b.const(0, 4)).value == 1  # -1 < 0
        assert b.ashr(b.const(0b1000, 4), b.const(1, 4)).value == 0b1100

    def test_shift_amount_is_masked(self):
        b = TermBuilder()
        assert b.shl(b.const(1, 4), b.const(5, 4)).value == 2  # 5 & 3 == 1
        x = b.input("x", 8)
        env = {"x": 1}
        assert evaluate(b.shl(x, b.const(9, 8)), env) == 2

    def test_self_cancellation(self):
        b = TermBuilder()
        x = b.input("x", 8)
        assert b.bxor(x, x).value == 0
        assert b.sub(x, x).value == 0
        assert b.eq(x, x) is b.true

    def test_commutative_canonicalization(self):
        b = TermBuilder()
        x, y = b.input("x", 8), b.input("y", 8)
        assert b.add(x, y) is b.add(y, x)
        assert b.mul(x, y) is b.mul(y, x)

    def test_hash_consing(self):
        b = TermBuilder()
        x = b.input("x", 8)
        assert b.add(x, b.const(1, 8)) is b.add(x, b.const(1, 8))

    def test_input_width_clash_rejected(self):
        b = TermBuilder()
        b.input("x", 8)
        with pytest.raises(ValueError):
            b.input("x", 4)

    def test_eq_pushes_through_ite(self):
        b = TermBuilder()
        c1, c2 = b.input("c1", BOOL), b.input("c2", BOOL)
        x, y, z = b.input("x", 4), b.input("y", 4), b.input("z", 4)
        eq = b.eq(b.ite(c1, x, z), b.ite(c2, y, z))
        # Both guards false collapses to z == z == true regardless of data.
        assert evaluate(eq, {"c1": False, "c2": False, "x": 1, "y": 2, "z": 3})
        assert not evaluate(eq, {"c1": True, "c2": False, "x": 1, "y": 2, "z": 3})


class TestSolverExamples:
    def test_constant_true_root(self):
        b = TermBuilder()
        f = Formula(b, b.true, ())
        assert isinstance(sat_solve(f), Sat)

    def test_x_plus_one_wraps(self):
        f = single_input_formula(8, lambda b, x: b.eq(b.add(x, b.const(1, 8)), b.const(0, 8)))
        for solver in (sat_solve, exhaustive_solve):
            result = solver(f)
            assert isinstance(result, Sat) and result.model == {"x": 255}

    def test_x_and_zero_unsat(self):
        f = single_input_formula(
            8, lambda b, x: b.ne(b.band(x, b.const(0, 8)), b.const(0, 8))
        )
        assert isinstance(sat_solve(f), Unsat)
        assert isinstance(exhaustive_solve(f), Unsat)

    def test_xor_self_unsat(self):
        f = single_input_formula(
            4, lambda b, x: b.ne(b.bxor(x, x), b.const(0, 4))
        )
        assert f.root.is_const and not f.root.value
        assert isinstance(sat_solve(f), Unsat)

    def test_first_model_is_lexicographically_least(self):
        f = single_input_formula(4, lambda b, x: b.ne(x, b.const(0, 4)))
        assert sat_solve(f).model == {"x": 1}
        assert exhaustive_solve(f).model == {"x": 1}

    def test_domain_cap(self):
        b = TermBuilder()
        xs = tuple(b.input(f"x{i}", 8) for i in range(3))
        f = Formula(b, b.ne(xs[0], xs[1]), xs)
        with pytest.raises(DomainTooLargeError):
            exhaustive_solve(f)

    def test_timeout_on_hard_instance(self):
        b = TermBuilder()
        p, q = b.input("p", 32), b.input("q", 32)
        lhs = b.mul(b.add(p, b.const(1, 32)), q)
        rhs = b.add(b.mul(p, q), q)
        f = Formula(b, b.ne(lhs, rhs), (p, q))
        assert isinstance(sat_solve(f, timeout_s=1.0), Timeout)


class TestDpll:
    def test_empty_clause_unsat(self):
        assert solve_cnf(1, [(1,), ()]).status == "unsat"

    def test_unit_propagation(self):
        result = solve_cnf(2, [(1,), (-1, 2)])
        assert result.status == "sat"
        assert result.assignment[1] == 1 and result.assignment[2] == 1

    def test_no_clauses_is_sat(self):
        result = solve_cnf(2, [])
        assert result.status == "sat"

    def test_backtracking(self):
        # (x1 | x2) & (!x1 | x2) & (x1 | !x2) forces x1 = x2 = true.
        result = solve_cnf(2, [(1, 2), (-1, 2), (1, -2)])
        assert result.status == "sat"
        assert result.assignment[1] == 1 and result.assignment[2] == 1

    @given(st.integers(0, 2_000))
    @settings(max_examples=40)
    def test_random_3cnf_matches_bruteforce(self, seed):
        rng = random.Random(seed)
        n_vars = rng.randint(1, 8)
        clauses = [
            tuple(
                rng.choice((1, -1)) * rng.randint(1, n_vars) for _ in range(3)
            )
            for _ in range(rng.randint(1, 20))
        ]
        clauses = [tuple(dict.fromkeys(c)) for c in clauses]
        clauses = [c for c in clauses if not any(-l in c for l in c)]
        result = solve_cnf(n_vars, clauses)
        brute_sat = any(
            all(any((l > 0) == bool((m >> (abs(l) - 1)) & 1) for l in c) for c in clauses)
            for m in range(1 << n_vars)
        )
        assert (result.status == "sat") == brute_sat


class TestAgreement:
    @given(st.integers(0, 100_000))
    @settings(max_examples=100)
    def test_bitblast_agrees_with_enumeration(self, seed):
        rng = random.Random(seed)
        f = random_formula(rng, width=4, max_inputs=2, depth=3)
        fast = sat_solve(f)
        slow = exhaustive_solve(f)
        assert type(fast) is type(slow)
        if isinstance(fast, Sat):
            assert fast.model == slow.model
            assert check_model(f, fast.model)

    def test_cnf_shape_invariants(self):
        rng = random.Random(7)
        for _ in range(20):
            f = random_formula(rng, width=4, max_inputs=3, depth=4)
            if f.root.is_const:
                continue
            cnf = bitblast(f)
            cnf.check()  # no empty/tautological clauses, indices in range


class TestSmtlib:
    def test_single_bool_input(self):
        b = TermBuilder()
        p = b.input("b", BOOL)
        text = emit_smtlib(Formula(b, p, (p,)))
        assert "(declare-const |b| Bool)" in text
        assert "(assert |b|)" in text
        assert text.endswith("(check-sat)\n(get-model)\n")

    def test_deterministic_output(self):
        def build():
            b = TermBuilder()
            x, y = b.input("x", 4), b.input("y", 4)
            root = b.eq(b.add(x, y), b.const(3, 4))
            return Formula(b, root, (x, y))

        assert emit_smtlib(build()) == emit_smtlib(build())

    def test_shifts_are_masked_in_output(self):
        b = TermBuilder()
        x, y = b.input("x", 8), b.input("y", 8)
        text = emit_smtlib(Formula(b, b.ne(b.shl(x, y), x), (x, y)))
        assert "(bvshl |x| (bvand |y| (_ bv7 8)))" in text

    def test_external_solver_stub(self, tmp_path):
        stub = tmp_path / "stub.py"
        stub.write_text(
            "import sys\n"
            "text = open(sys.argv[1]).read()\n"
            "print('unsat' if 'bv255' in text else 'sat')\n"
        )
        ext = ExternalSolver(f"python3 {stub} {{file}}")
        b = TermBuilder()
        x = b.input("x", 8)
        f_unsat = Formula(b, b.eq(x, b.const(255, 8)), (x,))
        f_sat = Formula(b, b.eq(x, b.const(1, 8)), (x,))
        assert ext.decide(f_unsat) == "unsat"
        assert ext.decide(f_sat) == "sat"
        solve = make_solve_fn(ext)
        assert isinstance(solve(f_unsat), Unsat)
        result = solve(f_sat)  # sat falls through to the internal solver
        assert isinstance(result, Sat) and result.model == {"x": 1}

    def test_external_solver_requires_placeholder(self):
        with pytest.raises(ValueError):
            ExternalSolver("z3 -smt2")


def test_signed_helpers():
    assert to_signed(15, 4) == -1
    assert to_signed(7, 4) == 7
    assert to_signed(8, 4) == -8
