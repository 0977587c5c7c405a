import pytest

from cfv.errors import InputError
from cfv.harness import (
    CallGraph,
    build_call_graph,
    generalize,
    load_tests,
    select_tests,
)
from cfv.minic import ast
from cfv.minic.normalize import normalize_alpha
from cfv.snapshot import snapshot_from_sources

LIB = """
int counter = 0;

int add(int a, int b) { return a + b; }
int twice(int x) { return add(x, x); }
void tick() { counter = counter + 1; }
int idle() { return 0; }
"""


@pytest.fixture()
def tests_and_view(tmp_path):
    snap = snapshot_from_sources({"lib.c": LIB}, "lib", 8)
    (tmp_path / "t.c").write_text(
        """
// doubling
void test_twice() {
    assert(twice(2) == 4);
}

void test_tick() {
    tick();
    tick();
    assert(counter == 2);
}

int helper_three() { return add(1, 2); }

void test_helper() {
    assert(helper_three() == 3);
}
"""
    )
    return load_tests(tmp_path, snap)


class TestLoading:
    def test_tests_discovered_in_order(self, tests_and_view):
        tests, _ = tests_and_view
        assert [t.name for t in tests] == ["test_twice", "test_tick", "test_helper"]

    def test_section_from_leading_comment(self, tests_and_view):
        tests, _ = tests_and_view
        assert tests[0].section == "doubling"
        assert tests[1].section == "test_tick"

    def test_helpers_are_not_tests(self, tests_and_view):
        tests, view = tests_and_view
        assert "helper_three" in view.functions
        assert all(t.name != "helper_three" for t in tests)

    def test_test_must_assert(self, tmp_path):
        snap = snapshot_from_sources({"lib.c": LIB}, "lib", 8)
        (tmp_path / "t.c").write_text("void test_nothing() { tick(); }")
        with pytest.raises(InputError) as exc:
            load_tests(tmp_path, snap)
        assert "no assert" in str(exc.value)

    def test_test_must_be_void_nullary(self, tmp_path):
        snap = snapshot_from_sources({"lib.c": LIB}, "lib", 8)
        (tmp_path / "t.c").write_text("int test_bad(int x) { assert(x == x); return x; }")
        with pytest.raises(InputError):
            load_tests(tmp_path, snap)

    def test_globals_in_test_files_rejected(self, tmp_path):
        snap = snapshot_from_sources({"lib.c": LIB}, "lib", 8)
        (tmp_path / "t.c").write_text("int stray; void test_a(){assert(true);}")
        with pytest.raises(InputError) as exc:
            load_tests(tmp_path, snap)
        assert "must not declare globals" in str(exc.value)


class TestCallGraphAndSelection:
    def test_direct_and_transitive_reachability(self, tests_and_view):
        tests, view = tests_and_view
        cg = build_call_graph(view, tests)
        assert cg.edges["test_twice"] == ("twice",)
        assert cg.reachable("test_twice") == {"test_twice", "twice", "add"}

    def test_empty_test_suite_graph(self):
        snap = snapshot_from_sources({"lib.c": LIB}, "lib", 8)
        cg = build_call_graph(snap, [])
        assert set(cg.edges) == set(snap.functions)
        assert cg.edges["twice"] == ("add",)

    def test_selection_is_reachability_intersection(self, tests_and_view):
        tests, view = tests_and_view
        cg = build_call_graph(view, tests)
        assert [t.name for t in select_tests(tests, {"add"}, cg)] == [
            "test_twice",
            "test_helper",
        ]
        assert [t.name for t in select_tests(tests, {"tick"}, cg)] == ["test_tick"]
        assert select_tests(tests, set(), cg) == []

    def test_no_triggers_selects_nothing(self, tests_and_view):
        tests, view = tests_and_view
        cg = build_call_graph(view, tests)
        assert select_tests(tests, {"idle"}, cg) == []


class TestGeneralize:
    def make_test(self, body_src: str, tmp_path):
        snap = snapshot_from_sources({"lib.c": LIB}, "lib", 8)
        (tmp_path / "t.c").write_text(body_src)
        tests, view = load_tests(tmp_path, snap)
        return tests[0], view

    def test_literal_argument_becomes_nondet(self, tmp_path):
        t, _ = self.make_test(
            "void test_a(){int r = twice(5); assert(r == 10);}", tmp_path
        )
        gt = generalize(t, {"twice"})
        assert len(gt.substitutions) == 1
        sub = gt.substitutions[0]
        assert sub.original == 5 and sub.arg_position == 0
        decl = gt.body.body.stmts[0]
        assert isinstance(decl.init.args[0], ast.NondetInt)
        assert gt.mode == "auto"

    def test_negative_literal_counts(self, tmp_path):
        t, _ = self.make_test(
            "void test_a(){int r = twice(-3); assert(r == r);}", tmp_path
        )
        gt = generalize(t, {"twice"})
        assert gt.substitutions[0].original == -3

    def test_non_literal_arguments_untouched(self, tmp_path):
        t, _ = self.make_test(
            "void test_a(){int x = 5; int r = twice(x); assert(r == 10);}", tmp_path
        )
        gt = generalize(t, {"twice"})
        assert gt.substitutions == []
        assert gt.body is t.body
        assert gt.mode == "none"

    def test_no_target_calls_is_identity(self, tmp_path):
        t, _ = self.make_test("void test_a(){tick(); assert(counter == 1);}", tmp_path)
        gt = generalize(t, {"add"})
        assert gt.substitutions == [] and gt.body is t.body

    def test_asserts_preserved_verbatim(self, tmp_path):
        t, _ = self.make_test(
            "void test_a(){int r = twice(1); assert(twice(2) == 4);}", tmp_path
        )
        gt = generalize(t, {"twice"})
        # only the non-assert call site was substituted
        assert len(gt.substitutions) == 1
        assert gt.body.body.stmts[1] == t.body.body.stmts[1]

    def test_existing_nondets_mark_manual(self, tmp_path):
        t, _ = self.make_test(
            "void test_a(){int x = nondet_int(); int r = twice(x); assert(r == x + x);}",
            tmp_path,
        )
        gt = generalize(t, {"twice"})
        assert gt.mode == "manual"

    def test_statement_skeleton_is_preserved(self, tmp_path):
        t, _ = self.make_test(
            """
void test_a(){
    int r = 0;
    int i = 0;
    while (i < 2) { r = add(r, 3); i = i + 1; }
    if (r > 5) { assert(r == 6); }
    assert(r == 6);
}
""",
            tmp_path,
        )
        gt = generalize(t, {"add"})
        kinds_before = [type(s).__name__ for s in ast.walk_stmts(t.body.body)]
        kinds_after = [type(s).__name__ for s in ast.walk_stmts(gt.body.body)]
        assert kinds_before == kinds_after
        assert len(gt.substitutions) == 1  # the literal 3 in add(r, 3)

    def test_substituting_originals_back_restores_the_test(self, tmp_path):
        from cfv.verify import Counterexample, concretize
        from cfv.minic.ast import DUMMY_SPAN

        t, _ = self.make_test(
            "void test_a(){int r = twice(5); int q = add(2, 3); assert(r + q == 15);}",
            tmp_path,
        )
        gt = generalize(t, {"twice", "add"})
        assert len(gt.substitutions) == 3
        # Build the counterexample whose values are the original literals.
        valuation, sites = {}, {}
        for i, sub in enumerate(gt.substitutions):
            sym = f"n{i}"
            valuation[sym] = sub.original % 256
            nondet_span = None
            # the nondet node carries the replaced literal's span
            count = 0
            for e in ast.all_exprs(gt.body):
                if isinstance(e, (ast.NondetInt, ast.NondetBool)):
                    if count == i:
                        nondet_span = e.span
                        break
                    count += 1
            sites[sym] = (nondet_span.start, 0)
        cx = Counterexample(valuation, sites, DUMMY_SPAN, [])
        restored = concretize(gt, cx, 8)
        assert normalize_alpha(restored.body) == normalize_alpha(t.body)

    def test_targets_must_be_nonempty(self, tmp_path):
        t, _ = self.make_test("void test_a(){assert(true);}", tmp_path)
        with pytest.raises(ValueError):
            generalize(t, set())
