"""Cyclomatic complexity over MiniC function bodies.

Counting rule: 1 + number of `if` statements + number of `while` loops +
number of `&&` and `||` operators. A `for` loop contributes exactly one,
because it is already a single `while` after desugaring.
"""

from __future__ import annotations

from cfv.minic import ast


def cyclomatic_complexity(fn: ast.FunctionDef) -> int:
    count = 1
    for stmt in ast.walk_stmts(fn.body):
        if isinstance(stmt, (ast.If, ast.While)):
            count += 1
        for root in ast.walk_exprs_of_stmt(stmt):
            for e in ast.walk_exprs(root):
                if isinstance(e, ast.Binary) and e.op in ast.BOOL_CONNECTIVES:
                    count += 1
    return count
