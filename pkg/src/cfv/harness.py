"""Regression test modeling, selection and generalization.

Tests are MiniC functions named `test_*` (void, no parameters, at least one
assert) in a designated directory. Test files may define helper functions
but no globals; everything is type-checked together with the snapshot under
test, giving a combined view that the verifier and call graph operate on.
The section label of a test is the comment sitting directly above it, or
the function name when there is none.

Selection is call-graph reachability: a test is selected exactly when it
can reach a changed function whose equivalence verdict is anything other
than Equivalent, or a newly added function.

Generalization replaces integer and boolean literals passed directly to
targeted functions with fresh nondet symbols, one per call-site argument,
and records the substitution. Assertions and control structure are left
untouched: every behavior of the original test stays a behavior of the
generalized one (substitute the original literals back to recover it). A
test that already contains nondet intrinsics is tagged as manually
generalized so spurious counterexamples can be triaged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from cfv.errors import Diagnostic, FrontendError, InputError
from cfv.minic import ast
from cfv.minic.ast import Span
from cfv.minic.parser import parse_unit
from cfv.minic.typecheck import type_check
from cfv.snapshot import Snapshot


@dataclass
class TestCase:
    name: str
    section: str
    body: ast.FunctionDef
    path: str = ""


@dataclass
class CallGraph:
    edges: dict[str, tuple[str, ...]]

    def reachable(self, root: str) -> set[str]:
        seen: set[str] = set()
        stack = [root]
        while stack:
            name = stack.pop()
            if name in seen:
                continue
            seen.add(name)
            stack.extend(self.edges.get(name, ()))
        return seen


def load_tests(tests_dir: str | Path, snap: Snapshot) -> tuple[list[TestCase], Snapshot]:
    """Parse and check a test directory against a snapshot.

    Returns the tests plus a combined view snapshot (snapshot units plus
    test units) that test verification runs against.
    """
    tests_dir = Path(tests_dir)
    if not tests_dir.is_dir():
        raise InputError(
            [Diagnostic(str(tests_dir), ast.DUMMY_SPAN, "error", "not a directory")]
        )
    diagnostics: list[Diagnostic] = []
    test_units = []
    for path in sorted(tests_dir.rglob("*.c")):
        rel = str(path.relative_to(tests_dir))
        try:
            test_units.append(parse_unit(path.read_text(encoding="utf-8"), rel, snap.width))
        except FrontendError as err:
            diagnostics.extend(err.diagnostics)
    if diagnostics:
        raise InputError(diagnostics)

    for unit in test_units:
        for g in unit.globals:
            diagnostics.append(
                Diagnostic(
                    unit.path,
                    g.span,
                    "error",
                    "test files must not declare globals; state belongs to the snapshot",
                )
            )
    if diagnostics:
        raise InputError(diagnostics)

    units = snap.units + test_units
    try:
        env = type_check(units, snap.width)
    except FrontendError as err:
        raise InputError(err.diagnostics) from None
    view = Snapshot(f"{snap.label}+tests", units, env, snap.width)

    tests: list[TestCase] = []
    for unit in test_units:
        for fn in unit.functions:
            if not fn.name.startswith("test_"):
                continue
            if not isinstance(fn.return_type, ast.VoidType) or fn.params:
                diagnostics.append(
                    Diagnostic(
                        unit.path,
                        fn.span,
                        "error",
                        f"test {fn.name!r} must be void and take no parameters",
                    )
                )
                continue
            if not any(
                isinstance(s, ast.Assert) for s in ast.walk_stmts(fn.body)
            ):
                diagnostics.append(
                    Diagnostic(
                        unit.path,
                        fn.span,
                        "error",
                        f"test {fn.name!r} contains no assert",
                    )
                )
                continue
            tests.append(TestCase(fn.name, _section_label(unit, fn), fn, unit.path))
    if diagnostics:
        raise InputError(diagnostics)
    tests.sort(key=lambda t: (t.path, t.body.span.start))
    return tests, view


def _section_label(unit: ast.SourceUnit, fn: ast.FunctionDef) -> str:
    for comment in unit.comments:
        if comment.end_line == fn.span.line - 1 and comment.text:
            return comment.text
    return fn.name


def build_call_graph(snap: Snapshot, tests: list[TestCase]) -> CallGraph:
    """Direct-call edges over snapshot functions plus test bodies."""
    functions: dict[str, ast.FunctionDef] = dict(snap.functions)
    for t in tests:
        functions.setdefault(t.name, t.body)
    edges: dict[str, tuple[str, ...]] = {}
    for name in sorted(functions):
        fn = functions[name]
        callees = {
            e.name
            for e in ast.all_exprs(fn)
            if isinstance(e, ast.Call) and e.name in functions
        }
        edges[name] = tuple(sorted(callees))
    return CallGraph(edges)


def select_tests(
    tests: list[TestCase], triggers: set[str], cg: CallGraph
) -> list[TestCase]:
    """Tests whose reachable set meets the trigger functions, input order."""
    return [t for t in tests if cg.reachable(t.name) & triggers]


# ---------------------------------------------------------------------------
# Generalization


@dataclass
class Substitution:
    call_span: Span
    arg_position: int
    original: int | bool
    symbol: str


@dataclass
class GeneralizedTest:
    origin: str
    body: ast.FunctionDef
    substitutions: list[Substitution]
    manual: bool  # origin already contained nondet intrinsics

    @property
    def mode(self) -> str:
        if self.manual:
            return "manual"
        return "auto" if self.substitutions else "none"


def _literal_value(e: ast.Expr) -> tuple[bool, int | bool | None]:
    if isinstance(e, ast.IntLit):
        return True, e.value
    if isinstance(e, ast.BoolLit):
        return True, e.value
    if isinstance(e, ast.Unary) and e.op == "-" and isinstance(e.operand, ast.IntLit):
        return True, -e.operand.value
    return False, None


class _Generalizer:
    def __init__(self, targets: set[str]):
        self.targets = targets
        self.substitutions: list[Substitution] = []

    def fresh(self) -> str:
        return f"s{len(self.substitutions)}"

    def rewrite_expr(self, e: ast.Expr) -> ast.Expr:
        if isinstance(e, (ast.IntLit, ast.BoolLit, ast.VarRef, ast.NondetInt, ast.NondetBool)):
            return e
        if isinstance(e, ast.ArrayIndex):
            return ast.ArrayIndex(e.span, e.name, self.rewrite_expr(e.index))
        if isinstance(e, ast.Unary):
            return ast.Unary(e.span, e.op, self.rewrite_expr(e.operand))
        if isinstance(e, ast.Binary):
            return ast.Binary(
                e.span, e.op, self.rewrite_expr(e.left), self.rewrite_expr(e.right)
            )
        if isinstance(e, ast.Call):
            args: list[ast.Expr] = []
            for pos, arg in enumerate(e.args):
                is_lit, value = _literal_value(arg)
                if e.name in self.targets and is_lit:
                    symbol = self.fresh()
                    self.substitutions.append(
                        Substitution(e.span, pos, value, symbol)
                    )
                    if isinstance(value, bool):
                        args.append(ast.NondetBool(arg.span))
                    else:
                        args.append(ast.NondetInt(arg.span))
                else:
                    args.append(self.rewrite_expr(arg))
            return ast.Call(e.span, e.name, args)
        raise AssertionError(f"unknown expression {e!r}")  # pragma: no cover

    def rewrite_stmt(self, s: ast.Stmt) -> ast.Stmt:
        if isinstance(s, ast.Block):
            return ast.Block(s.span, [self.rewrite_stmt(x) for x in s.stmts])
        if isinstance(s, ast.VarDecl):
            init = self.rewrite_expr(s.init) if s.init is not None else None
            return ast.VarDecl(s.span, s.name, s.declared_type, init)
        if isinstance(s, ast.Assign):
            target = s.target
            if isinstance(target, ast.ArrayIndex):
                target = ast.ArrayIndex(
                    target.span, target.name, self.rewrite_expr(target.index)
                )
            return ast.Assign(s.span, target, self.rewrite_expr(s.value))
        if isinstance(s, ast.If):
            return ast.If(
                s.span,
                self.rewrite_expr(s.cond),
                self.rewrite_stmt(s.then_body),
                self.rewrite_stmt(s.else_body) if s.else_body is not None else None,
            )
        if isinstance(s, ast.While):
            return ast.While(s.span, self.rewrite_expr(s.cond), self.rewrite_stmt(s.body))
        if isinstance(s, ast.Return):
            value = self.rewrite_expr(s.value) if s.value is not None else None
            return ast.Return(s.span, value)
        if isinstance(s, ast.Assert):
            # Assertions are the checked properties; keep them verbatim.
            return s
        if isinstance(s, ast.Assume):
            return s
        if isinstance(s, ast.ExprStmt):
            return ast.ExprStmt(s.span, self.rewrite_expr(s.expr))
        raise AssertionError(f"unknown statement {s!r}")  # pragma: no cover


def generalize(t: TestCase, targets: set[str]) -> GeneralizedTest:
    """Replace literal arguments of calls to target functions with nondets.

    With no substitutable site the original body is returned unchanged with
    an empty substitution list.
    """
    if not targets:
        raise ValueError("targets must be nonempty")
    manual = any(
        isinstance(e, (ast.NondetInt, ast.NondetBool)) for e in ast.all_exprs(t.body)
    )
    gen = _Generalizer(targets)
    body = gen.rewrite_stmt(t.body.body)
    if not gen.substitutions:
        return GeneralizedTest(t.name, t.body, [], manual)
    fn = ast.FunctionDef(
        t.body.name,
        [],
        t.body.return_type,
        body,
        span=t.body.span,
        body_span=t.body.body_span,
        reads_globals=t.body.reads_globals,
        writes_globals=t.body.writes_globals,
    )
    return GeneralizedTest(t.name, fn, gen.substitutions, manual)
