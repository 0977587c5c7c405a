import random

import pytest
from hypothesis import given, strategies as st

from cfv.errors import MiniCSyntaxError, TypeCheckError, UnsupportedConstructError
from cfv.generators import FunctionGen
from cfv.minic import (
    cyclomatic_complexity,
    format_unit,
    normalize_alpha,
    parse_unit,
    type_check_unit,
)
from cfv.minic import ast


def parse_ok(src: str, width: int = 32):
    unit = parse_unit(src, "t.c", width)
    type_check_unit(unit, width)
    return unit


def fn(src: str, name: str = "f", width: int = 32):
    unit = parse_ok(src, width)
    return next(f for f in unit.functions if f.name == name)


class TestParser:
    def test_identity_function(self):
        unit = parse_unit("int f(int x){return x;}", "t.c")
        assert len(unit.functions) == 1
        f = unit.functions[0]
        assert f.name == "f"
        assert len(f.params) == 1

    def test_comments_are_stripped_from_the_tree(self):
        plain = parse_unit("int f(int x){return x;}", "t.c")
        commented = parse_unit("int f(int x){/*c*/return x;}", "t.c")
        assert plain.declarations == commented.declarations
        assert len(commented.comments) == 1

    def test_division_is_unsupported(self):
        with pytest.raises(UnsupportedConstructError) as exc:
            parse_unit("int f(int x){return x / 2;}", "t.c")
        diag = exc.value.diagnostics[0]
        assert "division" in diag.message
        assert diag.span.col == 23  # the `/` token itself

    @pytest.mark.parametrize(
        "src",
        [
            "int f(int x){return x % 2;}",
            "int f(int x){x++; return x;}",
            "int f(int *p){return 0;}",
            "int f(int x){int y = &x; return y;}",
            "#define N 4\nint f(int x){return x;}",
            "int f(int x){return x ? 1 : 0;}",
        ],
    )
    def test_out_of_subset_constructs(self, src):
        with pytest.raises(UnsupportedConstructError):
            parse_unit(src, "t.c")

    def test_syntax_error_has_position(self):
        with pytest.raises(MiniCSyntaxError) as exc:
            parse_unit("int f(int x){return ;;}", "t.c")
        assert exc.value.diagnostics[0].span.line == 1

    def test_for_desugars_to_block_decl_while(self):
        looped = fn("int f(int n){int s = 0; for (int i = 0; i < n; i = i + 1) { s = s + i; } return s;}")
        handwritten = fn(
            "int f(int n){int s = 0; { int i = 0; while (i < n) { s = s + i; i = i + 1; } } return s;}"
        )
        assert normalize_alpha(looped) == normalize_alpha(handwritten)

    def test_for_without_init_is_a_bare_while(self):
        a = fn("int f(int n){for (; n > 0;) { n = n - 1; } return n;}")
        b = fn("int f(int n){while (n > 0) { n = n - 1; } return n;}")
        assert normalize_alpha(a) == normalize_alpha(b)

    def test_braceless_bodies_normalize_like_braced(self):
        a = fn("int f(int x){if (x > 0) return 1; return 0;}")
        b = fn("int f(int x){if (x > 0) { return 1; } return 0;}")
        assert normalize_alpha(a) == normalize_alpha(b)

    def test_spans_nest_within_parents(self):
        unit = parse_ok("int f(int x){ if (x > 0) { x = x - 1; } return x; }")
        f = unit.functions[0]

        def check(stmt, lo, hi):
            assert lo <= stmt.span.start <= stmt.span.end <= hi
            for child in ast.walk_stmts(stmt):
                assert stmt.span.start <= child.span.start
                assert child.span.end <= stmt.span.end

        check(f.body, f.span.start, f.span.end)

    def test_hex_literals(self):
        f = fn("int f(){return 0x10;}")
        ret = f.body.stmts[0]
        assert isinstance(ret.value, ast.IntLit) and ret.value.value == 16


class TestTypeCheck:
    def test_call_type_mismatch(self):
        with pytest.raises(TypeCheckError):
            parse_ok("int f(int x){return x;} int g(){return f(true);}")

    def test_assert_requires_bool(self):
        with pytest.raises(TypeCheckError):
            parse_ok("void f(int x){assert(x);}")

    def test_condition_requires_bool(self):
        with pytest.raises(TypeCheckError):
            parse_ok("int f(int x){if (x) { return 1; } return 0;}")

    def test_well_typed_unit_passes(self):
        unit = parse_unit("bool f(int x){return x == 0;}", "t.c")
        type_check_unit(unit)
        assert isinstance(unit.functions[0].body.stmts[0].value.ty, ast.BoolType)

    def test_undefined_symbol(self):
        with pytest.raises(TypeCheckError) as exc:
            parse_ok("int f(){return missing;}")
        assert "undefined" in exc.value.diagnostics[0].message

    def test_missing_return_detected(self):
        with pytest.raises(TypeCheckError):
            parse_ok("int f(int x){if (x > 0) { return 1; }}")

    def test_return_on_both_branches_accepted(self):
        parse_ok("int f(int x){if (x > 0) { return 1; } else { return 0; }}")

    def test_reads_writes_globals(self):
        unit = parse_ok(
            """
            int g = 1;
            int h;
            int arr[2];
            int reader(){return g;}
            void writer(int v){h = v;}
            void element(int v){arr[0] = v + g;}
            """
        )
        by_name = {f.name: f for f in unit.functions}
        assert by_name["reader"].reads_globals == {"g"}
        assert by_name["reader"].writes_globals == set()
        assert by_name["writer"].writes_globals == {"h"}
        assert by_name["element"].reads_globals == {"arr", "g"}
        assert by_name["element"].writes_globals == {"arr"}

    def test_duplicate_names_rejected(self):
        with pytest.raises(TypeCheckError):
            parse_ok("int f(){return 1;} int f(){return 2;}")

    def test_void_value_use_rejected(self):
        with pytest.raises(TypeCheckError):
            parse_ok("void p(){return;} int f(){return p();}")

    def test_shadowing_in_nested_blocks(self):
        f = fn("int f(int x){int y = x; { int y = 2; x = y; } return y;}")
        assert f is not None


class TestNormalize:
    def test_canonical_renaming(self):
        a = fn("int f(int a){int b = a; return b;}")
        b = fn("int g(int zz){int q = zz; return q;}", name="g")
        assert normalize_alpha(a) == normalize_alpha(b)

    def test_idempotent(self):
        f = fn("int f(int a){int b = a; while (b > 0) { b = b - 1; } return b;}")
        once = normalize_alpha(f)
        assert normalize_alpha(once) == once

    def test_operand_order_matters(self):
        a = fn("int f(int a, int b){return a + b;}")
        b = fn("int f(int a, int b){return b + a;}")
        assert normalize_alpha(a) != normalize_alpha(b)

    def test_self_call_is_anonymous(self):
        a = fn("int f(int n){if (n <= 0) { return 0; } return f(n - 1);}")
        b = fn("int g(int n){if (n <= 0) { return 0; } return g(n - 1);}", name="g")
        assert normalize_alpha(a) == normalize_alpha(b)

    def test_globals_keep_their_names(self):
        a = fn("int g; int f(){return g;}")
        b_unit = parse_ok("int h; int f(){return h;}")
        b = b_unit.functions[0]
        assert normalize_alpha(a) != normalize_alpha(b)

    def test_preserves_complexity(self):
        f = fn("int f(int x){if (x > 0 && x < 9) { while (x > 1) { x = x - 1; } } return x;}")
        assert cyclomatic_complexity(f) == cyclomatic_complexity(normalize_alpha(f))


class TestComplexity:
    def test_straight_line_is_one(self):
        assert cyclomatic_complexity(fn("int f(int x){return x + 1;}")) == 1

    def test_if_with_and(self):
        f = fn("int f(int x){if (x > 0 && x < 5) { return 1; } return 0;}")
        assert cyclomatic_complexity(f) == 3

    def test_if_while_and(self):
        f = fn(
            "int f(int x){if (x > 0 && x < 5) { while (x > 0) { x = x - 1; } } return x;}"
        )
        assert cyclomatic_complexity(f) == 4

    def test_for_counts_once(self):
        a = fn("int f(int n){int s = 0; for (int i = 0; i < n; i = i + 1) { s = s + 1; } return s;}")
        assert cyclomatic_complexity(a) == 2


@given(st.integers(0, 10_000))
def test_roundtrip_print_parse(seed):
    """Printing and reparsing a generated unit reproduces the tree and its
    typing; normalization commutes with the round trip."""
    rng = random.Random(seed)
    unit = FunctionGen(rng, width=8, with_global=rng.random() < 0.5).function()
    text = format_unit(unit)
    reparsed = parse_unit(text, "gen.c", 8)
    assert reparsed.declarations == unit.declarations
    type_check_unit(reparsed, 8)
    again = parse_unit(format_unit(reparsed), "gen.c", 8)
    assert again.declarations == reparsed.declarations
    assert normalize_alpha(again.functions[0]) == normalize_alpha(reparsed.functions[0])
