"""Type checker for MiniC units.

Annotates every expression with its type, checks call signatures against the
definitions visible in the environment (functions may be defined in any
order and in other units of the same snapshot), verifies that every path
through a non-void function ends in a return, and computes each function's
syntactic read/write sets over global variables.

Conditions of `if`/`while` and the arguments of `assert`/`assume` must be
bool; there is no implicit int-to-bool conversion anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass

from cfv.errors import Diagnostic, TypeCheckError
from cfv.minic import ast
from cfv.minic.ast import (
    ArrayIndex,
    ArrayType,
    Assert,
    Assign,
    Assume,
    Binary,
    Block,
    BoolLit,
    BoolType,
    Call,
    Expr,
    ExprStmt,
    FunctionDef,
    GlobalDecl,
    If,
    IntLit,
    IntType,
    NondetBool,
    NondetInt,
    Return,
    SourceUnit,
    Stmt,
    Unary,
    VarDecl,
    VarRef,
    VoidType,
    While,
)


@dataclass
class Environment:
    """Names visible to a function body: globals and function signatures."""

    globals: dict[str, GlobalDecl]
    functions: dict[str, FunctionDef]
    width: int


class _Checker:
    def __init__(self, env: Environment, path: str):
        self.env = env
        self.path = path
        self.diagnostics: list[Diagnostic] = []
        self.int_type = IntType(env.width)
        self.scopes: list[dict[str, ast.Type]] = []
        self.reads: set[str] = set()
        self.writes: set[str] = set()

    def error(self, span: ast.Span, message: str) -> None:
        self.diagnostics.append(Diagnostic(self.path, span, "error", message))

    # -- scope handling ------------------------------------------------------

    def push_scope(self) -> None:
        self.scopes.append({})

    def pop_scope(self) -> None:
        self.scopes.pop()

    def declare(self, name: str, ty: ast.Type, span: ast.Span) -> None:
        if name in self.scopes[-1]:
            self.error(span, f"redefinition of {name!r}")
        self.scopes[-1][name] = ty

    def lookup(self, name: str) -> tuple[ast.Type | None, bool]:
        """Resolve a name; second element is True when it is a global."""
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name], False
        g = self.env.globals.get(name)
        if g is not None:
            return g.ty, True
        return None, False

    # -- functions -----------------------------------------------------------

    def check_function(self, fn: FunctionDef) -> None:
        self.scopes = [{}]
        self.reads = set()
        self.writes = set()
        for p in fn.params:
            self.declare(p.name, p.ty, p.span)
        self.check_block(fn.body, fn)
        if not isinstance(fn.return_type, VoidType) and not self._definitely_returns(
            fn.body
        ):
            self.error(fn.span, f"function {fn.name!r}: not all paths return a value")
        fn.reads_globals = frozenset(self.reads)
        fn.writes_globals = frozenset(self.writes)

    def _definitely_returns(self, stmt: Stmt) -> bool:
        if isinstance(stmt, Return):
            return True
        if isinstance(stmt, Block):
            return any(self._definitely_returns(s) for s in stmt.stmts)
        if isinstance(stmt, If):
            return (
                stmt.else_body is not None
                and self._definitely_returns(stmt.then_body)
                and self._definitely_returns(stmt.else_body)
            )
        return False

    def check_block(self, block: Block, fn: FunctionDef) -> None:
        self.push_scope()
        for stmt in block.stmts:
            self.check_stmt(stmt, fn)
        self.pop_scope()

    def check_stmt(self, stmt: Stmt, fn: FunctionDef) -> None:
        if isinstance(stmt, Block):
            self.check_block(stmt, fn)
        elif isinstance(stmt, VarDecl):
            if stmt.init is not None:
                ty = self.check_expr(stmt.init)
                if ty is not None and ty != stmt.declared_type:
                    self.error(
                        stmt.span,
                        f"initializer of {stmt.name!r} has type {ty}, expected"
                        f" {stmt.declared_type}",
                    )
            self.declare(stmt.name, stmt.declared_type, stmt.span)
        elif isinstance(stmt, Assign):
            self.check_assign(stmt)
        elif isinstance(stmt, If):
            self.require_bool(stmt.cond, "if condition")
            self.check_block(stmt.then_body, fn)
            if stmt.else_body is not None:
                self.check_block(stmt.else_body, fn)
        elif isinstance(stmt, While):
            self.require_bool(stmt.cond, "loop condition")
            self.check_block(stmt.body, fn)
        elif isinstance(stmt, Return):
            self.check_return(stmt, fn)
        elif isinstance(stmt, (Assert, Assume)):
            kw = "assert" if isinstance(stmt, Assert) else "assume"
            self.require_bool(stmt.cond, f"{kw} condition")
        elif isinstance(stmt, ExprStmt):
            self.check_expr(stmt.expr, allow_void=True)
        else:  # pragma: no cover - parser produces no other statements
            raise AssertionError(f"unknown statement {stmt!r}")

    def check_assign(self, stmt: Assign) -> None:
        target = stmt.target
        if isinstance(target, VarRef):
            ty, is_global = self.lookup(target.name)
            if ty is None:
                self.error(target.span, f"undefined variable {target.name!r}")
                self.check_expr(stmt.value)
                return
            if isinstance(ty, ArrayType):
                self.error(target.span, "arrays cannot be assigned as a whole")
                return
            target.ty = ty
            if is_global:
                self.writes.add(target.name)
            vty = self.check_expr(stmt.value)
            if vty is not None and vty != ty:
                self.error(stmt.span, f"cannot assign {vty} to {ty}")
        elif isinstance(target, ArrayIndex):
            elem = self.check_array_index(target, writing=True)
            vty = self.check_expr(stmt.value)
            if elem is not None and vty is not None and vty != elem:
                self.error(stmt.span, f"cannot assign {vty} to array element {elem}")
        else:  # pragma: no cover - parser enforces assignable targets
            self.error(stmt.span, "invalid assignment target")

    def check_return(self, stmt: Return, fn: FunctionDef) -> None:
        if isinstance(fn.return_type, VoidType):
            if stmt.value is not None:
                self.error(stmt.span, f"void function {fn.name!r} returns a value")
                self.check_expr(stmt.value)
        else:
            if stmt.value is None:
                self.error(stmt.span, f"function {fn.name!r} must return {fn.return_type}")
            else:
                ty = self.check_expr(stmt.value)
                if ty is not None and ty != fn.return_type:
                    self.error(
                        stmt.span,
                        f"return type mismatch: {ty}, expected {fn.return_type}",
                    )

    def require_bool(self, expr: Expr, what: str) -> None:
        ty = self.check_expr(expr)
        if ty is not None and not isinstance(ty, BoolType):
            self.error(expr.span, f"{what} must be bool, found {ty}")

    # -- expressions -----------------------------------------------------------

    def check_array_index(self, expr: ArrayIndex, writing: bool) -> ast.Type | None:
        ty, is_global = self.lookup(expr.name)
        if ty is None:
            self.error(expr.span, f"undefined variable {expr.name!r}")
            self.check_expr(expr.index)
            return None
        if not isinstance(ty, ArrayType):
            self.error(expr.span, f"{expr.name!r} is not an array")
            self.check_expr(expr.index)
            return None
        if is_global:
            self.reads.add(expr.name)
            if writing:
                self.writes.add(expr.name)
        ity = self.check_expr(expr.index)
        if ity is not None and not isinstance(ity, IntType):
            self.error(expr.index.span, "array index must be int")
        expr.ty = ty.elem
        return ty.elem

    def check_expr(self, expr: Expr, allow_void: bool = False) -> ast.Type | None:
        ty = self._infer(expr, allow_void)
        expr.ty = ty
        return ty

    def _infer(self, expr: Expr, allow_void: bool = False) -> ast.Type | None:
        if isinstance(expr, IntLit):
            return self.int_type
        if isinstance(expr, BoolLit):
            return BoolType()
        if isinstance(expr, NondetInt):
            return self.int_type
        if isinstance(expr, NondetBool):
            return BoolType()
        if isinstance(expr, VarRef):
            ty, is_global = self.lookup(expr.name)
            if ty is None:
                if expr.name in self.env.functions:
                    self.error(expr.span, f"{expr.name!r} is a function, not a variable")
                else:
                    self.error(expr.span, f"undefined variable {expr.name!r}")
                return None
            if isinstance(ty, ArrayType):
                self.error(expr.span, f"array {expr.name!r} used without an index")
                return None
            if is_global:
                self.reads.add(expr.name)
            return ty
        if isinstance(expr, ArrayIndex):
            return self.check_array_index(expr, writing=False)
        if isinstance(expr, Unary):
            ty = self.check_expr(expr.operand)
            if ty is None:
                return None
            if expr.op in ("-", "~"):
                if not isinstance(ty, IntType):
                    self.error(expr.span, f"operator {expr.op!r} needs an int operand")
                    return None
                return self.int_type
            if not isinstance(ty, BoolType):
                self.error(expr.span, "operator '!' needs a bool operand")
                return None
            return BoolType()
        if isinstance(expr, Binary):
            return self._infer_binary(expr)
        if isinstance(expr, Call):
            return self._infer_call(expr, allow_void)
        raise AssertionError(f"unknown expression {expr!r}")  # pragma: no cover

    def _infer_binary(self, expr: Binary) -> ast.Type | None:
        lty = self.check_expr(expr.left)
        rty = self.check_expr(expr.right)
        if lty is None or rty is None:
            return None
        op = expr.op
        if op in ast.BOOL_CONNECTIVES:
            if not isinstance(lty, BoolType) or not isinstance(rty, BoolType):
                self.error(expr.span, f"operator {op!r} needs bool operands")
                return None
            return BoolType()
        if op in ("==", "!="):
            if lty != rty or isinstance(lty, ArrayType):
                self.error(expr.span, f"cannot compare {lty} with {rty}")
                return None
            return BoolType()
        if op in ("<", "<=", ">", ">="):
            if not isinstance(lty, IntType) or not isinstance(rty, IntType):
                self.error(expr.span, f"operator {op!r} needs int operands")
                return None
            return BoolType()
        # Arithmetic, bitwise and shift operators.
        if not isinstance(lty, IntType) or not isinstance(rty, IntType):
            self.error(expr.span, f"operator {op!r} needs int operands")
            return None
        return self.int_type

    def _infer_call(self, expr: Call, allow_void: bool) -> ast.Type | None:
        fn = self.env.functions.get(expr.name)
        if fn is None:
            self.error(expr.span, f"call to undefined function {expr.name!r}")
            for a in expr.args:
                self.check_expr(a)
            return None
        if len(expr.args) != len(fn.params):
            self.error(
                expr.span,
                f"{expr.name!r} takes {len(fn.params)} argument(s),"
                f" {len(expr.args)} given",
            )
        for arg, param in zip(expr.args, fn.params):
            aty = self.check_expr(arg)
            if aty is not None and aty != param.ty:
                self.error(
                    arg.span,
                    f"argument {param.name!r} of {expr.name!r} expects {param.ty},"
                    f" found {aty}",
                )
        for arg in expr.args[len(fn.params) :]:
            self.check_expr(arg)
        if isinstance(fn.return_type, VoidType) and not allow_void:
            self.error(expr.span, f"void function {expr.name!r} used as a value")
            return None
        return fn.return_type


def build_environment(units: list[SourceUnit], width: int) -> tuple[Environment, list[Diagnostic]]:
    """Collect globals and functions across units, checking name uniqueness."""
    diagnostics: list[Diagnostic] = []
    globals_map: dict[str, GlobalDecl] = {}
    functions: dict[str, FunctionDef] = {}
    owner: dict[str, str] = {}
    for unit in units:
        for decl in unit.declarations:
            name = decl.name
            if name in owner:
                diagnostics.append(
                    Diagnostic(
                        unit.path,
                        decl.span,
                        "error",
                        f"{name!r} already defined in {owner[name]}",
                    )
                )
                continue
            owner[name] = unit.path
            if isinstance(decl, GlobalDecl):
                globals_map[name] = decl
            else:
                functions[name] = decl
    return Environment(globals_map, functions, width), diagnostics


def type_check(units: list[SourceUnit], width: int = 32) -> Environment:
    """Type-check a set of units that together form one program.

    Returns the shared environment on success; raises TypeCheckError carrying
    every diagnostic found otherwise. Expression `ty` annotations and the
    per-function global read/write sets are filled in as a side effect.
    """
    env, diagnostics = build_environment(units, width)
    for unit in units:
        for g in unit.globals:
            if g.init is None:
                continue
            is_bool_init = isinstance(g.init, BoolLit)
            if isinstance(g.ty, BoolType) != is_bool_init:
                diagnostics.append(
                    Diagnostic(
                        unit.path,
                        g.span,
                        "error",
                        f"initializer type does not match global {g.name!r} ({g.ty})",
                    )
                )
    for unit in units:
        checker = _Checker(env, unit.path)
        for fn in unit.functions:
            checker.check_function(fn)
        diagnostics.extend(checker.diagnostics)
    if diagnostics:
        raise TypeCheckError(diagnostics)
    return env


def type_check_unit(unit: SourceUnit, width: int = 32) -> Environment:
    return type_check([unit], width)
