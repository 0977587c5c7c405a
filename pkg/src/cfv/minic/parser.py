"""Recursive descent parser for MiniC.

Produces a SourceUnit of global declarations and function definitions.
`for` loops are desugared to `while` at parse time: with an init clause the
result is a block `{ init; while (cond) { body…; step; } }`, without one it
is the bare `while`. Single-statement bodies of `if`/`else`/`while` are
wrapped in a Block, so brace style does not affect the tree.

The integer width of `int` is supplied by the caller because the same source
is checked at width 4 or 8 by the exhaustive test oracles and at width 32 in
normal runs.
"""

from __future__ import annotations

from cfv.errors import Diagnostic, MiniCSyntaxError, UnsupportedConstructError
from cfv.minic import ast
from cfv.minic.ast import Span
from cfv.minic.lexer import Token, tokenize

UNSUPPORTED_HINTS = {
    "/": "division is not supported",
    "%": "modulo is not supported",
    "++": "increment is not supported; use `x = x + 1`",
    "--": "decrement is not supported; use `x = x - 1`",
    "->": "pointers are not supported",
    ".": "structs are not supported",
    "?": "the conditional operator is not supported",
    ":": "the conditional operator is not supported",
}


class _Parser:
    def __init__(self, tokens: list[Token], path: str, width: int):
        self.tokens = tokens
        self.path = path
        self.pos = 0
        self.int_type = ast.IntType(width)

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("op", "keyword")

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if not self.at(text):
            self.error(f"expected {text!r}, found {tok.text!r}", tok)
        return self.advance()

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        if tok.kind == "unsupported":
            hint = UNSUPPORTED_HINTS.get(tok.text, f"{tok.text!r} is outside the subset")
            self.unsupported(hint, tok)
        raise MiniCSyntaxError([Diagnostic(self.path, tok.span, "error", message)])

    def unsupported(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise UnsupportedConstructError(
            [Diagnostic(self.path, tok.span, "error", message)]
        )

    def reject_unsupported(self):
        if self.peek().kind == "unsupported":
            self.error("", self.peek())

    def span_from(self, start: Span) -> Span:
        prev = self.tokens[max(self.pos - 1, 0)]
        return Span(start.line, start.col, start.start, prev.span.end)

    # -- declarations ------------------------------------------------------

    def parse_unit(self) -> list[ast.GlobalDecl | ast.FunctionDef]:
        decls: list[ast.GlobalDecl | ast.FunctionDef] = []
        while self.peek().kind != "eof":
            self.reject_unsupported()
            decls.append(self.parse_top_decl())
        return decls

    def parse_base_type(self) -> ast.Type:
        tok = self.peek()
        if self.accept("int"):
            ty: ast.Type = self.int_type
        elif self.accept("bool"):
            ty = ast.BoolType()
        elif self.accept("void"):
            ty = ast.VoidType()
        else:
            self.error("expected a type (int, bool or void)", tok)
        if self.at("*"):
            self.unsupported("pointers are not supported")
        return ty

    def parse_top_decl(self) -> ast.GlobalDecl | ast.FunctionDef:
        start = self.peek().span
        ty = self.parse_base_type()
        name_tok = self.peek()
        if name_tok.kind != "ident":
            self.error("expected a name", name_tok)
        self.advance()
        if self.at("("):
            return self.parse_function(ty, name_tok, start)
        if isinstance(ty, ast.VoidType):
            self.error("variables cannot have void type", name_tok)
        if self.accept("["):
            length_tok = self.expect_number()
            self.expect("]")
            if not isinstance(ty, ast.IntType):
                self.error("only int arrays are supported", name_tok)
            if length_tok[0] < 1:
                self.error("array length must be at least 1", length_tok[1])
            ty = ast.ArrayType(self.int_type, length_tok[0])
        init = None
        if self.accept("="):
            if isinstance(ty, ast.ArrayType):
                self.error("array initializers are not supported", self.peek())
            init = self.parse_const_init()
        self.expect(";")
        return ast.GlobalDecl(name_tok.text, ty, init, self.span_from(start))

    def expect_number(self) -> tuple[int, Token]:
        tok = self.peek()
        if tok.kind != "number":
            self.error("expected an integer literal", tok)
        self.advance()
        return int(tok.text, 0), tok

    def parse_const_init(self) -> ast.Expr:
        # Global initializers are literal constants, optionally negated.
        tok = self.peek()
        if self.accept("true"):
            return ast.BoolLit(tok.span, True)
        if self.accept("false"):
            return ast.BoolLit(tok.span, False)
        if self.accept("-"):
            value, num = self.expect_number()
            sp = Span(tok.span.line, tok.span.col, tok.span.start, num.span.end)
            return ast.Unary(sp, "-", ast.IntLit(num.span, value))
        if tok.kind == "number":
            self.advance()
            return ast.IntLit(tok.span, int(tok.text, 0))
        self.error("global initializers must be literal constants", tok)

    def parse_function(
        self, return_type: ast.Type, name_tok: Token, start: Span
    ) -> ast.FunctionDef:
        self.expect("(")
        params: list[ast.Param] = []
        if not self.at(")"):
            if self.at("void") and self.peek(1).text == ")":
                self.advance()  # `f(void)` style empty parameter list
            else:
                while True:
                    pstart = self.peek().span
                    pty = self.parse_base_type()
                    if isinstance(pty, ast.VoidType):
                        self.error("parameters cannot have void type", self.peek())
                    ptok = self.peek()
                    if ptok.kind != "ident":
                        self.error("expected a parameter name", ptok)
                    self.advance()
                    if self.at("["):
                        self.error(
                            "array parameters are not supported; use a global array",
                            self.peek(),
                        )
                    params.append(ast.Param(ptok.text, pty, self.span_from(pstart)))
                    if not self.accept(","):
                        break
        self.expect(")")
        body_start = self.peek().span
        body = self.parse_block()
        return ast.FunctionDef(
            name_tok.text,
            params,
            return_type,
            body,
            span=self.span_from(start),
            body_span=self.span_from(body_start),
        )

    # -- statements ----------------------------------------------------------

    def parse_block(self) -> ast.Block:
        start = self.expect("{").span
        stmts: list[ast.Stmt] = []
        while not self.at("}"):
            if self.peek().kind == "eof":
                self.error("unexpected end of file inside a block")
            stmts.append(self.parse_stmt())
        self.expect("}")
        return ast.Block(self.span_from(start), stmts)

    def parse_body(self) -> ast.Block:
        if self.at("{"):
            return self.parse_block()
        stmt = self.parse_stmt()
        return ast.Block(stmt.span, [stmt])

    def parse_stmt(self) -> ast.Stmt:
        self.reject_unsupported()
        tok = self.peek()
        start = tok.span
        if self.at("{"):
            return self.parse_block()
        if self.at("int") or self.at("bool"):
            return self.parse_var_decl()
        if self.accept("if"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then_body = self.parse_body()
            else_body = None
            if self.accept("else"):
                else_body = self.parse_body()
            return ast.If(self.span_from(start), cond, then_body, else_body)
        if self.accept("while"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            body = self.parse_body()
            return ast.While(self.span_from(start), cond, body)
        if self.accept("for"):
            return self.parse_for(start)
        if self.accept("return"):
            value = None if self.at(";") else self.parse_expr()
            self.expect(";")
            return ast.Return(self.span_from(start), value)
        if self.accept("assert"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            self.expect(";")
            return ast.Assert(self.span_from(start), cond)
        if self.accept("assume"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            self.expect(";")
            return ast.Assume(self.span_from(start), cond)
        stmt = self.parse_assign_or_expr()
        self.expect(";")
        return stmt

    def parse_var_decl(self) -> ast.VarDecl:
        start = self.peek().span
        ty = self.parse_base_type()
        tok = self.peek()
        if tok.kind != "ident":
            self.error("expected a variable name", tok)
        self.advance()
        if self.accept("["):
            length, ltok = self.expect_number()
            self.expect("]")
            if not isinstance(ty, ast.IntType):
                self.error("only int arrays are supported", ltok)
            if length < 1:
                self.error("array length must be at least 1", ltok)
            ty = ast.ArrayType(self.int_type, length)
        init = None
        if self.accept("="):
            if isinstance(ty, ast.ArrayType):
                self.error("array initializers are not supported", self.peek())
            init = self.parse_expr()
        self.expect(";")
        return ast.VarDecl(self.span_from(start), tok.text, ty, init)

    def parse_for(self, start: Span) -> ast.Stmt:
        self.expect("(")
        init: ast.Stmt | None = None
        if not self.at(";"):
            if self.at("int") or self.at("bool"):
                init = self.parse_var_decl()  # consumes the ';'
            else:
                init = self.parse_assign_or_expr()
                self.expect(";")
        else:
            self.expect(";")
        if self.at(";"):
            cond: ast.Expr = ast.BoolLit(self.peek().span, True)
        else:
            cond = self.parse_expr()
        self.expect(";")
        step: ast.Stmt | None = None
        if not self.at(")"):
            step = self.parse_assign_or_expr()
        self.expect(")")
        body = self.parse_body()
        full = self.span_from(start)
        stmts = list(body.stmts)
        if step is not None:
            stmts.append(step)
        loop = ast.While(full, cond, ast.Block(body.span, stmts))
        if init is None:
            return loop
        return ast.Block(full, [init, loop])

    def parse_assign_or_expr(self) -> ast.Stmt:
        start = self.peek().span
        expr = self.parse_expr()
        if self.at("="):
            if not isinstance(expr, (ast.VarRef, ast.ArrayIndex)):
                self.error("assignment target must be a variable or array element")
            self.advance()
            value = self.parse_expr()
            return ast.Assign(self.span_from(start), expr, value)
        self.reject_unsupported()
        return ast.ExprStmt(self.span_from(start), expr)

    # -- expressions ---------------------------------------------------------

    def parse_expr(self) -> ast.Expr:
        return self.parse_binary(0)

    def parse_binary(self, level: int) -> ast.Expr:
        if level >= len(ast.BINARY_PRECEDENCE):
            return self.parse_unary()
        ops = ast.BINARY_PRECEDENCE[level]
        left = self.parse_binary(level + 1)
        while True:
            self.reject_unsupported()
            tok = self.peek()
            if tok.kind == "op" and tok.text in ops:
                self.advance()
                right = self.parse_binary(level + 1)
                sp = Span(
                    left.span.line, left.span.col, left.span.start, right.span.end
                )
                left = ast.Binary(sp, tok.text, left, right)
            else:
                return left

    def parse_unary(self) -> ast.Expr:
        self.reject_unsupported()
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("-", "!", "~"):
            self.advance()
            operand = self.parse_unary()
            sp = Span(tok.span.line, tok.span.col, tok.span.start, operand.span.end)
            return ast.Unary(sp, tok.text, operand)
        if tok.kind == "op" and tok.text == "&":
            self.unsupported("the address-of operator is not supported", tok)
        if tok.kind == "op" and tok.text == "*":
            self.unsupported("pointer indirection is not supported", tok)
        return self.parse_postfix()

    def parse_postfix(self) -> ast.Expr:
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return ast.IntLit(tok.span, int(tok.text, 0))
        if self.accept("true"):
            return ast.BoolLit(tok.span, True)
        if self.accept("false"):
            return ast.BoolLit(tok.span, False)
        if self.accept("nondet_int"):
            self.expect("(")
            self.expect(")")
            return ast.NondetInt(self.span_from(tok.span))
        if self.accept("nondet_bool"):
            self.expect("(")
            self.expect(")")
            return ast.NondetBool(self.span_from(tok.span))
        if self.accept("("):
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if tok.kind == "ident":
            self.advance()
            if self.accept("("):
                args: list[ast.Expr] = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                return ast.Call(self.span_from(tok.span), tok.text, args)
            if self.accept("["):
                index = self.parse_expr()
                self.expect("]")
                return ast.ArrayIndex(self.span_from(tok.span), tok.text, index)
            return ast.VarRef(tok.span, tok.text)
        self.error(f"expected an expression, found {tok.text!r}", tok)


def parse_unit(source: str, path: str, width: int = 32) -> ast.SourceUnit:
    """Parse one translation unit.

    Raises MiniCSyntaxError or UnsupportedConstructError with positioned
    diagnostics on failure. The result still needs type checking.
    """
    if width not in ast.VALID_WIDTHS:
        raise ValueError(f"width must be one of {ast.VALID_WIDTHS}, got {width}")
    tokens, comments = tokenize(source, path)
    parser = _Parser(tokens, path, width)
    decls = parser.parse_unit()
    return ast.SourceUnit(path, decls, comments, source)
