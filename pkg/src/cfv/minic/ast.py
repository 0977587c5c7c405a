"""Typed AST for the MiniC subset.

Every node carries a source span. Equality between nodes is structural and
span-insensitive (spans and inferred types are excluded from comparison), so
two parses of the same text, or of texts differing only in layout and
comments, compare equal. This is the equality used by the structural
equivalence stage and by the parse/print round-trip tests.

Value semantics: all integers are two's complement at one configurable width
per snapshot; arrays are fixed-length with int elements; booleans are a
distinct type. There is no division, no pointer or address operator, and no
preprocessor.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Span:
    """Half-open byte range with the 1-based line/column of its start."""

    line: int
    col: int
    start: int
    end: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


DUMMY_SPAN = Span(0, 0, 0, 0)


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class IntType:
    width: int

    def __str__(self) -> str:
        return "int"


@dataclass(frozen=True)
class BoolType:
    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class VoidType:
    def __str__(self) -> str:
        return "void"


@dataclass(frozen=True)
class ArrayType:
    elem: IntType
    length: int

    def __str__(self) -> str:
        return f"int[{self.length}]"


Type = IntType | BoolType | VoidType | ArrayType

VALID_WIDTHS = (4, 8, 16, 32)


# ---------------------------------------------------------------------------
# Expressions
#
# `ty` is filled in by the type checker and never participates in equality.


@dataclass
class Expr:
    span: Span = field(compare=False, repr=False)


@dataclass
class IntLit(Expr):
    value: int
    ty: Type | None = field(default=None, compare=False, repr=False)


@dataclass
class BoolLit(Expr):
    value: bool
    ty: Type | None = field(default=None, compare=False, repr=False)


@dataclass
class VarRef(Expr):
    name: str
    ty: Type | None = field(default=None, compare=False, repr=False)


@dataclass
class ArrayIndex(Expr):
    name: str
    index: Expr
    ty: Type | None = field(default=None, compare=False, repr=False)


@dataclass
class Unary(Expr):
    op: str  # "-", "!", "~"
    operand: Expr
    ty: Type | None = field(default=None, compare=False, repr=False)


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr
    ty: Type | None = field(default=None, compare=False, repr=False)


@dataclass
class Call(Expr):
    name: str
    args: list[Expr]
    ty: Type | None = field(default=None, compare=False, repr=False)


@dataclass
class NondetInt(Expr):
    ty: Type | None = field(default=None, compare=False, repr=False)


@dataclass
class NondetBool(Expr):
    ty: Type | None = field(default=None, compare=False, repr=False)


# Binary operators grouped by precedence, weakest first. `&&` and `||`
# short-circuit; there is deliberately no `/` or `%`.
BINARY_PRECEDENCE: tuple[tuple[str, ...], ...] = (
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("<<", ">>"),
    ("+", "-"),
    ("*",),
)

COMPARISON_OPS = ("==", "!=", "<", "<=", ">", ">=")
BOOL_CONNECTIVES = ("&&", "||")


# ---------------------------------------------------------------------------
# Statements


@dataclass
class Stmt:
    span: Span = field(compare=False, repr=False)


@dataclass
class Block(Stmt):
    stmts: list[Stmt]


@dataclass
class VarDecl(Stmt):
    name: str
    declared_type: Type
    init: Expr | None


@dataclass
class Assign(Stmt):
    target: Expr  # VarRef or ArrayIndex
    value: Expr


@dataclass
class If(Stmt):
    cond: Expr
    then_body: Block
    else_body: Block | None


@dataclass
class While(Stmt):
    cond: Expr
    body: Block


@dataclass
class Return(Stmt):
    value: Expr | None


@dataclass
class Assert(Stmt):
    cond: Expr


@dataclass
class Assume(Stmt):
    cond: Expr


@dataclass
class ExprStmt(Stmt):
    expr: Expr


# ---------------------------------------------------------------------------
# Top-level declarations


@dataclass
class Param:
    name: str
    ty: Type
    span: Span = field(default=DUMMY_SPAN, compare=False, repr=False)


@dataclass
class FunctionDef:
    name: str
    params: list[Param]
    return_type: Type
    body: Block
    span: Span = field(default=DUMMY_SPAN, compare=False, repr=False)
    body_span: Span = field(default=DUMMY_SPAN, compare=False, repr=False)
    # Sound syntactic over-approximations, filled in by the type checker.
    reads_globals: frozenset[str] = field(default=frozenset(), compare=False)
    writes_globals: frozenset[str] = field(default=frozenset(), compare=False)


@dataclass
class GlobalDecl:
    name: str
    ty: Type
    init: Expr | None
    span: Span = field(default=DUMMY_SPAN, compare=False, repr=False)


@dataclass
class Comment:
    text: str
    span: Span
    end_line: int


@dataclass
class SourceUnit:
    path: str
    declarations: list[GlobalDecl | FunctionDef]
    comments: list[Comment] = field(default_factory=list, compare=False)
    source_text: str = field(default="", compare=False, repr=False)

    @property
    def functions(self) -> list[FunctionDef]:
        return [d for d in self.declarations if isinstance(d, FunctionDef)]

    @property
    def globals(self) -> list[GlobalDecl]:
        return [d for d in self.declarations if isinstance(d, GlobalDecl)]


def walk_stmts(stmt: Stmt):
    """Yield stmt and all statements nested inside it, preorder."""
    yield stmt
    if isinstance(stmt, Block):
        for s in stmt.stmts:
            yield from walk_stmts(s)
    elif isinstance(stmt, If):
        yield from walk_stmts(stmt.then_body)
        if stmt.else_body is not None:
            yield from walk_stmts(stmt.else_body)
    elif isinstance(stmt, While):
        yield from walk_stmts(stmt.body)


def walk_exprs_of_stmt(stmt: Stmt):
    """Yield the expressions directly attached to one statement."""
    if isinstance(stmt, VarDecl) and stmt.init is not None:
        yield stmt.init
    elif isinstance(stmt, Assign):
        yield stmt.target
        yield stmt.value
    elif isinstance(stmt, (If, While)):
        yield stmt.cond
    elif isinstance(stmt, Return) and stmt.value is not None:
        yield stmt.value
    elif isinstance(stmt, (Assert, Assume)):
        yield stmt.cond
    elif isinstance(stmt, ExprStmt):
        yield stmt.expr


def walk_exprs(expr: Expr):
    """Yield expr and all subexpressions, preorder."""
    yield expr
    if isinstance(expr, ArrayIndex):
        yield from walk_exprs(expr.index)
    elif isinstance(expr, Unary):
        yield from walk_exprs(expr.operand)
    elif isinstance(expr, Binary):
        yield from walk_exprs(expr.left)
        yield from walk_exprs(expr.right)
    elif isinstance(expr, Call):
        for a in expr.args:
            yield from walk_exprs(a)


def all_exprs(fn: FunctionDef):
    for stmt in walk_stmts(fn.body):
        for e in walk_exprs_of_stmt(stmt):
            yield from walk_exprs(e)
