"""Hand-rolled lexer for MiniC.

Comments are stripped from the token stream but kept (with spans) on the
side, since test section labels are taken from the comment directly above a
test function. Tokens carrying C operators that exist outside the subset
(`/`, `%`, `++`, `->`, ...) are emitted with kind UNSUPPORTED so the parser
can point at them with a precise diagnostic instead of a generic syntax
error. Preprocessor directives are rejected here.
"""

from __future__ import annotations

from dataclasses import dataclass

from cfv.errors import Diagnostic, UnsupportedConstructError
from cfv.minic.ast import Comment, Span

KEYWORDS = frozenset(
    {
        "int",
        "bool",
        "void",
        "true",
        "false",
        "if",
        "else",
        "while",
        "for",
        "return",
        "assert",
        "assume",
        "nondet_int",
        "nondet_bool",
    }
)

# Longest-match first. Supported multi-char operators.
OPERATORS = (
    "<<",
    ">>",
    "<=",
    ">=",
    "==",
    "!=",
    "&&",
    "||",
    "<",
    ">",
    "=",
    "!",
    "~",
    "&",
    "|",
    "^",
    "+",
    "-",
    "*",
    "(",
    ")",
    "{",
    "}",
    "[",
    "]",
    ";",
    ",",
)

# Recognized so the parser can say "unsupported" rather than "syntax error".
UNSUPPORTED_OPERATORS = (
    "<<=",
    ">>=",
    "++",
    "--",
    "+=",
    "-=",
    "*=",
    "/=",
    "%=",
    "&=",
    "|=",
    "^=",
    "->",
    "/",
    "%",
    "?",
    ":",
    ".",
)


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "number", "keyword", "op", "unsupported", "eof"
    text: str
    span: Span


def tokenize(source: str, path: str) -> tuple[list[Token], list[Comment]]:
    tokens: list[Token] = []
    comments: list[Comment] = []
    pos = 0
    line = 1
    col = 1
    n = len(source)

    def span(start: int, end: int, l: int, c: int) -> Span:
        return Span(l, c, start, end)

    def fail(msg: str, start: int, l: int, c: int) -> None:
        raise UnsupportedConstructError(
            [Diagnostic(path, span(start, start + 1, l, c), "error", msg)]
        )

    at_line_start = True
    while pos < n:
        ch = source[pos]
        if ch == "\n":
            pos += 1
            line += 1
            col = 1
            at_line_start = True
            continue
        if ch in " \t\r":
            pos += 1
            col += 1
            continue
        if ch == "#" and at_line_start:
            fail("preprocessor directives are not supported", pos, line, col)
        at_line_start = False
        if source.startswith("//", pos):
            end = source.find("\n", pos)
            if end == -1:
                end = n
            comments.append(
                Comment(source[pos + 2 : end].strip(), span(pos, end, line, col), line)
            )
            col += end - pos
            pos = end
            continue
        if source.startswith("/*", pos):
            end = source.find("*/", pos + 2)
            if end == -1:
                fail("unterminated block comment", pos, line, col)
            body = source[pos + 2 : end]
            start_line, start_col = line, col
            nl = body.count("\n")
            if nl:
                line += nl
                col = (len(body) - body.rfind("\n") - 1) + 3
            else:
                col += end + 2 - pos
            comments.append(
                Comment(
                    body.strip(),
                    span(pos, end + 2, start_line, start_col),
                    start_line + nl,
                )
            )
            pos = end + 2
            continue
        if ch.isdigit():
            start = pos
            if source.startswith("0x", pos) or source.startswith("0X", pos):
                pos += 2
                while pos < n and source[pos] in "0123456789abcdefABCDEF":
                    pos += 1
                if pos == start + 2:
                    fail("malformed hex literal", start, line, col)
            else:
                while pos < n and source[pos].isdigit():
                    pos += 1
            tokens.append(Token("number", source[start:pos], span(start, pos, line, col)))
            col += pos - start
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (source[pos].isalnum() or source[pos] == "_"):
                pos += 1
            text = source[start:pos]
            kind = "keyword" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, span(start, pos, line, col)))
            col += pos - start
            continue
        matched = None
        for op in UNSUPPORTED_OPERATORS:
            if source.startswith(op, pos):
                # A supported longer operator wins (e.g. "<<" over ":" never
                # conflicts, but "/" must not shadow nothing; "&&" handled below).
                matched = ("unsupported", op)
                break
        for op in OPERATORS:
            if source.startswith(op, pos) and (matched is None or len(op) > len(matched[1])):
                matched = ("op", op)
                break
        if matched is None:
            fail(f"unexpected character {ch!r}", pos, line, col)
        kind, text = matched
        tokens.append(Token(kind, text, span(pos, pos + len(text), line, col)))
        pos += len(text)
        col += len(text)

    tokens.append(Token("eof", "", Span(line, col, n, n)))
    return tokens, comments
