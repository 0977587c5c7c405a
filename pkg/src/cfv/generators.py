"""Seeded random generators for the oracle-based test campaigns.

Three families, all deterministic per seed:

* random formulas over a few small-width inputs, for solver agreement
  against the exhaustive enumerator;
* random function pairs (original plus a mutation), for equivalence-verdict
  agreement against brute-force interpretation over every input;
* random nondet-free test bodies over a small fixture snapshot, for
  encoder/interpreter agreement.

Generated loops are counting loops with at most three iterations so a bound
of four unrolls them completely, keeping bounded and unbounded semantics
identical, which is what lets plain interpretation serve as ground truth.
"""

from __future__ import annotations

import random

from cfv.minic import ast
from cfv.minic.ast import DUMMY_SPAN as S
from cfv.minic.normalize import normalize_alpha
from cfv.minic.printer import format_unit
from cfv.snapshot import Snapshot, snapshot_from_sources
from cfv.terms import BOOL, Formula, Term, TermBuilder

INT_BIN_OPS = ("+", "-", "*", "&", "|", "^", "<<", ">>")
CMP_OPS = ("<", "<=", ">", ">=", "==", "!=")


# ---------------------------------------------------------------------------
# Formulas


def random_formula(
    rng: random.Random, width: int = 4, max_inputs: int = 3, depth: int = 4
) -> Formula:
    b = TermBuilder()
    n_inputs = rng.randint(1, max_inputs)
    inputs = [b.input(f"x{i}", width) for i in range(n_inputs)]

    def bv(d: int) -> Term:
        if d == 0 or rng.random() < 0.3:
            if rng.random() < 0.4:
                return b.const(rng.randrange(1 << width), width)
            return rng.choice(inputs)
        op = rng.choice(INT_BIN_OPS + ("~", "-", "ite"))
        if op == "~":
            return b.bnot(bv(d - 1))
        if op == "-":
            return b.neg(bv(d - 1))
        if op == "ite":
            return b.ite(bl(d - 1), bv(d - 1), bv(d - 1))
        x, y = bv(d - 1), bv(d - 1)
        return {
            "+": b.add, "-": b.sub, "*": b.mul, "&": b.band,
            "|": b.bor, "^": b.bxor, "<<": b.shl, ">>": b.ashr,
        }[op](x, y)

    def bl(d: int) -> Term:
        if d == 0 or rng.random() < 0.25:
            op = rng.choice(CMP_OPS)
            x, y = bv(max(d - 1, 0)), bv(max(d - 1, 0))
            return {
                "<": b.slt, "<=": b.sle, "==": b.eq, "!=": b.ne,
                ">": lambda p, q: b.slt(q, p), ">=": lambda p, q: b.sle(q, p),
            }[op](x, y)
        op = rng.choice(("and", "or", "not", "xor"))
        if op == "not":
            return b.not_(bl(d - 1))
        x, y = bl(d - 1), bl(d - 1)
        return {"and": b.and_, "or": b.or_, "xor": b.xor}[op](x, y)

    return Formula(b, bl(depth), tuple(inputs))


# ---------------------------------------------------------------------------
# Function pairs


class FunctionGen:
    """Random single-function programs: 1-2 int parameters, optionally one
    int global, straight-line/branching/counting-loop bodies."""

    def __init__(self, rng: random.Random, width: int = 4, with_global: bool = False):
        self.rng = rng
        self.width = width
        self.with_global = with_global
        self.counter = 0

    def fresh(self) -> str:
        self.counter += 1
        return f"t{self.counter}"

    def int_expr(self, vars_: list[str], depth: int) -> ast.Expr:
        rng = self.rng
        if depth == 0 or rng.random() < 0.35:
            if vars_ and rng.random() < 0.7:
                return ast.VarRef(S, rng.choice(vars_))
            return ast.IntLit(S, rng.randrange(1 << self.width))
        if rng.random() < 0.15:
            op = rng.choice(("-", "~"))
            return ast.Unary(S, op, self.int_expr(vars_, depth - 1))
        op = rng.choice(INT_BIN_OPS)
        return ast.Binary(
            S, op, self.int_expr(vars_, depth - 1), self.int_expr(vars_, depth - 1)
        )

    def bool_expr(self, vars_: list[str], depth: int) -> ast.Expr:
        rng = self.rng
        if depth == 0 or rng.random() < 0.5:
            op = rng.choice(CMP_OPS)
            return ast.Binary(
                S, op, self.int_expr(vars_, depth), self.int_expr(vars_, depth)
            )
        op = rng.choice(("&&", "||"))
        left = self.bool_expr(vars_, depth - 1)
        right = self.bool_expr(vars_, depth - 1)
        if rng.random() < 0.2:
            left = ast.Unary(S, "!", left)
        return ast.Binary(S, op, left, right)

    def statements(self, vars_: list[str], writable: list[str], budget: int) -> list[ast.Stmt]:
        rng = self.rng
        out: list[ast.Stmt] = []
        local_vars = list(vars_)
        local_writable = list(writable)
        while budget > 0:
            budget -= 1
            kind = rng.random()
            if kind < 0.35:
                name = self.fresh()
                out.append(
                    ast.VarDecl(
                        S, name, ast.IntType(self.width), self.int_expr(local_vars, 2)
                    )
                )
                local_vars.append(name)
                local_writable.append(name)
            elif kind < 0.65 and local_writable:
                target = rng.choice(local_writable)
                out.append(
                    ast.Assign(S, ast.VarRef(S, target), self.int_expr(local_vars, 2))
                )
            elif kind < 0.85:
                then_body = ast.Block(S, self.statements(local_vars, local_writable, 1))
                else_body = None
                if rng.random() < 0.5:
                    else_body = ast.Block(
                        S, self.statements(local_vars, local_writable, 1)
                    )
                out.append(
                    ast.If(S, self.bool_expr(local_vars, 1), then_body, else_body)
                )
            else:
                counter = self.fresh()
                bound = rng.randint(1, 3)
                body = self.statements(local_vars, local_writable, 1)
                body.append(
                    ast.Assign(
                        S,
                        ast.VarRef(S, counter),
                        ast.Binary(S, "+", ast.VarRef(S, counter), ast.IntLit(S, 1)),
                    )
                )
                out.append(ast.VarDecl(S, counter, ast.IntType(self.width), ast.IntLit(S, 0)))
                out.append(
                    ast.While(
                        S,
                        ast.Binary(S, "<", ast.VarRef(S, counter), ast.IntLit(S, bound)),
                        ast.Block(S, body),
                    )
                )
        return out

    def function(self) -> ast.SourceUnit:
        rng = self.rng
        n_params = rng.randint(1, 2)
        params = [ast.Param(f"p{i}", ast.IntType(self.width), S) for i in range(n_params)]
        vars_ = [p.name for p in params]
        writable = list(vars_)
        decls: list[ast.GlobalDecl | ast.FunctionDef] = []
        if self.with_global:
            decls.append(ast.GlobalDecl("g", ast.IntType(self.width), None, S))
            vars_.append("g")
            writable.append("g")
        stmts = self.statements(vars_, writable, self.rng.randint(1, 3))
        stmts.append(ast.Return(S, self.int_expr(vars_, 2)))
        fn = ast.FunctionDef(
            "f", params, ast.IntType(self.width), ast.Block(S, stmts), span=S, body_span=S
        )
        decls.append(fn)
        return ast.SourceUnit("gen.c", decls)


def _mutation_points(fn: ast.FunctionDef):
    """Mutable expressions, excluding loop conditions and counter updates
    so every mutant still unrolls completely at the oracle bound."""
    skip_stmts: set[int] = set()
    counters: set[str] = set()
    for stmt in ast.walk_stmts(fn.body):
        if isinstance(stmt, ast.While):
            cond = stmt.cond
            if isinstance(cond, ast.Binary) and isinstance(cond.left, ast.VarRef):
                counters.add(cond.left.name)
    for stmt in ast.walk_stmts(fn.body):
        if isinstance(stmt, ast.While):
            skip_stmts.add(id(stmt))  # its condition, via walk_exprs_of_stmt
        if (
            isinstance(stmt, ast.Assign)
            and isinstance(stmt.target, ast.VarRef)
            and stmt.target.name in counters
        ):
            skip_stmts.add(id(stmt))
    points = []
    for stmt in ast.walk_stmts(fn.body):
        if id(stmt) in skip_stmts:
            continue
        for root in ast.walk_exprs_of_stmt(stmt):
            for e in ast.walk_exprs(root):
                if isinstance(e, ast.Binary) or isinstance(e, ast.IntLit):
                    points.append(e)
    return points


def mutate_function(rng: random.Random, unit: ast.SourceUnit, width: int) -> ast.SourceUnit:
    """A randomly mutated copy; the mutation may or may not change behavior.

    Ground truth comes from the brute-force oracle, so no mutation needs a
    known outcome.
    """
    text = format_unit(unit)
    from cfv.minic.parser import parse_unit

    copy = parse_unit(text, unit.path, width)
    fn = copy.functions[0]
    choice = rng.random()
    if choice < 0.2:
        return copy  # byte-identical apart from layout
    if choice < 0.35:
        renamed = normalize_alpha(fn)
        renamed.name = fn.name
        for i, decl in enumerate(copy.declarations):
            if isinstance(decl, ast.FunctionDef):
                copy.declarations[i] = renamed
        return copy
    points = _mutation_points(fn)
    if not points:
        return copy
    target = rng.choice(points)
    if isinstance(target, ast.IntLit):
        target.value = (target.value + rng.choice((1, -1))) % (1 << width)
        return copy
    if rng.random() < 0.5:
        target.left, target.right = target.right, target.left
    else:
        families = (("+", "-"), ("&", "|", "^"), ("<", "<=", ">", ">="), ("==", "!="))
        for family in families:
            if target.op in family:
                target.op = rng.choice([op for op in family if op != target.op] or [target.op])
                break
    return copy


def random_pair(
    rng: random.Random, width: int = 4, with_global: bool = False
) -> tuple[Snapshot, Snapshot]:
    """An (old, new) snapshot pair around one generated function "f"."""
    gen = FunctionGen(rng, width, with_global)
    unit = gen.function()
    old_text = format_unit(unit)
    new_unit = mutate_function(rng, unit, width)
    new_text = format_unit(new_unit)
    old = snapshot_from_sources({"gen.c": old_text}, "old", width)
    new = snapshot_from_sources({"gen.c": new_text}, "new", width)
    return old, new


# ---------------------------------------------------------------------------
# Nondet-free tests

FIXTURE_SOURCE = """
int acc = 0;
int buf[3];

int add_clip(int a, int b) {
    int s = a + b;
    if (s < a) { return a; }
    return s;
}

int scale(int x, int k) {
    int r = 0;
    int i = 0;
    while (i < k && i < 3) {
        r = r + x;
        i = i + 1;
    }
    return r;
}

void stash(int idx, int val) {
    buf[idx] = val;
    acc = acc + val;
}

int fetch(int idx) {
    return buf[idx];
}
"""


def fixture_snapshot(width: int = 4) -> Snapshot:
    return snapshot_from_sources({"fixture.c": FIXTURE_SOURCE}, "fixture", width)


class RandomTestGen:
    """Random nondet-free test bodies over the fixture snapshot.

    Some asserts hold and some do not; some array accesses go out of
    bounds. The point is agreement between the encoder and the
    interpreter, not test health.
    """

    def __init__(self, rng: random.Random, width: int = 4):
        self.rng = rng
        self.gen = FunctionGen(rng, width)
        self.width = width

    def call_expr(self, vars_: list[str]) -> ast.Expr:
        rng = self.rng
        name = rng.choice(("add_clip", "scale", "fetch"))
        if name == "fetch":
            return ast.Call(S, "fetch", [self.gen.int_expr(vars_, 1)])
        return ast.Call(
            S, name, [self.gen.int_expr(vars_, 1), self.gen.int_expr(vars_, 1)]
        )

    def body(self) -> ast.FunctionDef:
        rng = self.rng
        self.gen.counter = 0
        vars_: list[str] = []
        stmts: list[ast.Stmt] = []
        for _ in range(rng.randint(2, 5)):
            roll = rng.random()
            if roll < 0.45 or not vars_:
                name = self.gen.fresh()
                init = (
                    self.call_expr(vars_)
                    if rng.random() < 0.5
                    else self.gen.int_expr(vars_, 2)
                )
                stmts.append(ast.VarDecl(S, name, ast.IntType(self.width), init))
                vars_.append(name)
            elif roll < 0.6:
                stmts.append(
                    ast.ExprStmt(
                        S,
                        ast.Call(
                            S,
                            "stash",
                            [self.gen.int_expr(vars_, 1), self.gen.int_expr(vars_, 1)],
                        ),
                    )
                )
            elif roll < 0.8:
                stmts.append(ast.Assert(S, self.gen.bool_expr(vars_, 1)))
            else:
                then_body = ast.Block(
                    S, [ast.Assert(S, self.gen.bool_expr(vars_, 1))]
                )
                stmts.append(ast.If(S, self.gen.bool_expr(vars_, 1), then_body, None))
        stmts.append(ast.Assert(S, self.gen.bool_expr(vars_, 1)))
        return ast.FunctionDef(
            "test_generated", [], ast.VoidType(), ast.Block(S, stmts), span=S, body_span=S
        )

    def test_case(self):
        from cfv.harness import TestCase

        body = self.body()
        # Round-trip through the printer and parser so spans are real; the
        # encoder keys nondet sites by byte offset and tests stay honest.
        unit = ast.SourceUnit("gen_test.c", [body])
        text = format_unit(unit)
        from cfv.minic.parser import parse_unit

        parsed = parse_unit(text, "gen_test.c", self.width)
        return TestCase("test_generated", "generated", parsed.functions[0]), text
