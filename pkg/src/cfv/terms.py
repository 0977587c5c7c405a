"""Bitvector/boolean term DAGs, the formula carrier for all solving paths.

Terms are immutable and hash-consed per TermBuilder: structurally identical
terms built through one builder are the same object, so untouched state
compared against itself folds away before any solver sees it. Builders also
apply deterministic constant folding and a few algebraic identities; the
same construction sequence always yields the same DAG.

Width 0 denotes bool. Bitvector values are kept as unsigned residues modulo
2**width; comparisons are signed two's complement, shift amounts are taken
modulo the width, and right shift is arithmetic.

A Formula is a bool root plus the ordered list of input symbols. The order
fixes the meaning of "lexicographically least model" everywhere: valuations
are compared as tuples of unsigned input values in slot order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BOOL = 0

_COMMUTATIVE = frozenset({"add", "mul", "band", "bor", "bxor", "and", "or", "xor", "eq"})


class Term:
    __slots__ = ("op", "args", "width", "value", "name", "uid")

    def __init__(self, op, args, width, value, name, uid):
        self.op = op
        self.args = args
        self.width = width
        self.value = value
        self.name = name
        self.uid = uid

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    def __repr__(self) -> str:
        if self.op == "const":
            return f"c{self.value}:{self.width}"
        if self.op == "input":
            return f"{self.name}:{self.width}"
        return f"({self.op} {' '.join(repr(a) for a in self.args)})"


def mask(width: int) -> int:
    return (1 << width) - 1


def to_signed(value: int, width: int) -> int:
    if value >= 1 << (width - 1):
        return value - (1 << width)
    return value


def to_unsigned(value: int, width: int) -> int:
    return value & mask(width)


class TermBuilder:
    """Factory and intern table for terms.

    One builder per solving task; terms from different builders must not be
    mixed. All ops validate operand widths.
    """

    def __init__(self) -> None:
        self._table: dict[tuple, Term] = {}
        self._inputs: dict[str, Term] = {}
        self._eq_cache: dict[tuple[int, int], Term] = {}
        # Linear decomposition per term: ((term, coeff), ...) plus constant.
        self._lin_cache: dict[int, tuple[tuple[tuple[Term, int], ...], int]] = {}
        self._uid = 0
        self.true = self._mk("const", (), BOOL, 1, None)
        self.false = self._mk("const", (), BOOL, 0, None)

    def _mk(self, op, args, width, value=None, name=None) -> Term:
        key = (op, tuple(a.uid for a in args), width, value, name)
        term = self._table.get(key)
        if term is None:
            term = Term(op, tuple(args), width, value, name, self._uid)
            self._uid += 1
            self._table[key] = term
        return term

    # -- leaves ---------------------------------------------------------------

    def const(self, value: int, width: int) -> Term:
        if width == BOOL:
            return self.true if value else self.false
        return self._mk("const", (), width, to_unsigned(value, width))

    def bool_const(self, value: bool) -> Term:
        return self.true if value else self.false

    def input(self, name: str, width: int) -> Term:
        term = self._inputs.get(name)
        if term is not None:
            if term.width != width:
                raise ValueError(
                    f"input {name!r} requested at width {width}, exists at {term.width}"
                )
            return term
        term = self._mk("input", (), width, None, name)
        self._inputs[name] = term
        return term

    # -- boolean layer ----------------------------------------------------------

    def not_(self, a: Term) -> Term:
        assert a.width == BOOL
        if a.is_const:
            return self.bool_const(not a.value)
        if a.op == "not":
            return a.args[0]
        return self._mk("not", (a,), BOOL)

    def and_(self, a: Term, b: Term) -> Term:
        assert a.width == BOOL and b.width == BOOL
        if a.is_const:
            return b if a.value else self.false
        if b.is_const:
            return a if b.value else self.false
        if a is b:
            return a
        if (a.op == "not" and a.args[0] is b) or (b.op == "not" and b.args[0] is a):
            return self.false
        a, b = self._sort2(a, b)
        return self._mk("and", (a, b), BOOL)

    def or_(self, a: Term, b: Term) -> Term:
        assert a.width == BOOL and b.width == BOOL
        if a.is_const:
            return self.true if a.value else b
        if b.is_const:
            return self.true if b.value else a
        if a is b:
            return a
        if (a.op == "not" and a.args[0] is b) or (b.op == "not" and b.args[0] is a):
            return self.true
        a, b = self._sort2(a, b)
        return self._mk("or", (a, b), BOOL)

    def xor(self, a: Term, b: Term) -> Term:
        assert a.width == BOOL and b.width == BOOL
        if a.is_const and b.is_const:
            return self.bool_const(bool(a.value) ^ bool(b.value))
        if a.is_const:
            return self.not_(b) if a.value else b
        if b.is_const:
            return self.not_(a) if b.value else a
        if a is b:
            return self.false
        a, b = self._sort2(a, b)
        return self._mk("xor", (a, b), BOOL)

    def implies(self, a: Term, b: Term) -> Term:
        return self.or_(self.not_(a), b)

    def all_(self, terms) -> Term:
        acc = self.true
        for t in terms:
            acc = self.and_(acc, t)
        return acc

    def any_(self, terms) -> Term:
        acc = self.false
        for t in terms:
            acc = self.or_(acc, t)
        return acc

    def _sort2(self, a: Term, b: Term) -> tuple[Term, Term]:
        return (a, b) if a.uid <= b.uid else (b, a)

    # -- comparisons ---------------------------------------------------------

    def eq(self, a: Term, b: Term) -> Term:
        if a.width != b.width:
            raise ValueError(f"eq width mismatch: {a.width} vs {b.width}")
        if a is b:
            return self.true
        if a.width == BOOL:
            return self.not_(self.xor(a, b))
        if a.is_const and b.is_const:
            return self.bool_const(a.value == b.value)
        if a.uid > b.uid:
            a, b = b, a
        key = (a.uid, b.uid)
        cached = self._eq_cache.get(key)
        if cached is not None:
            return cached
        # Push equality through if-then-else so that agreement of the guards
        # already decides it. Guarded state updates produce deep ite chains
        # over a shared initial value; without this, a plain DPLL search can
        # only discover "both sides left it untouched, hence equal" after
        # enumerating the untouched value. The pair cache bounds the
        # expansion by the number of distinct subterm pairs.
        if a.op == "ite" and b.op == "ite":
            c1, t1, e1 = a.args
            c2, t2, e2 = b.args
            if c1 is c2:
                result = self.ite(c1, self.eq(t1, t2), self.eq(e1, e2))
            else:
                result = self.ite(
                    c1,
                    self.ite(c2, self.eq(t1, t2), self.eq(t1, e2)),
                    self.ite(c2, self.eq(e1, t2), self.eq(e1, e2)),
                )
        elif a.op == "ite":
            c1, t1, e1 = a.args
            result = self.ite(c1, self.eq(t1, b), self.eq(e1, b))
        elif b.op == "ite":
            c2, t2, e2 = b.args
            result = self.ite(c2, self.eq(a, t2), self.eq(a, e2))
        else:
            result = self._mk("eq", (a, b), BOOL)
        self._eq_cache[key] = result
        return result

    def ne(self, a: Term, b: Term) -> Term:
        return self.not_(self.eq(a, b))

    def slt(self, a: Term, b: Term) -> Term:
        if a.width != b.width or a.width == BOOL:
            raise ValueError("slt needs equal bitvector widths")
        if a is b:
            return self.false
        if a.is_const and b.is_const:
            return self.bool_const(
                to_signed(a.value, a.width) < to_signed(b.value, b.width)
            )
        return self._mk("slt", (a, b), BOOL)

    def sle(self, a: Term, b: Term) -> Term:
        return self.not_(self.slt(b, a))

    def ite(self, c: Term, a: Term, b: Term) -> Term:
        assert c.width == BOOL
        if a.width != b.width:
            raise ValueError("ite branch width mismatch")
        if c.is_const:
            return a if c.value else b
        if a is b:
            return a
        if a.width == BOOL:
            # (c ? a : b) as a boolean gate network keeps the layer uniform.
            return self.or_(self.and_(c, a), self.and_(self.not_(c), b))
        return self._mk("ite", (c, a, b), a.width)

    # -- bitvector arithmetic -----------------------------------------------

    def _bv2(self, op: str, a: Term, b: Term, fold) -> Term:
        if a.width != b.width or a.width == BOOL:
            raise ValueError(f"{op} needs equal bitvector widths")
        if a.is_const and b.is_const:
            return self.const(fold(a.value, b.value, a.width), a.width)
        if op in _COMMUTATIVE:
            a, b = self._sort2(a, b)
        return self._mk(op, (a, b), a.width)

    # Sums normalize to one canonical linear combination: coefficients per
    # opaque term plus a constant, modulo 2**width. All associations and
    # orderings of the same sum become the same term, so differently written
    # but equal arithmetic folds away before it can burden the solver.

    def _linear_parts(self, t: Term) -> tuple[tuple[tuple[Term, int], ...], int]:
        cached = self._lin_cache.get(t.uid)
        if cached is not None:
            return cached
        m = mask(t.width)
        if t.op == "const":
            parts: tuple = ((), t.value)
        elif t.op == "add":
            parts = self._lin_merge(t.args[0], t.args[1], 1, m)
        elif t.op == "sub":
            parts = self._lin_merge(t.args[0], t.args[1], -1, m)
        elif t.op == "mul" and t.args[0].is_const:
            inner, c = self._linear_parts(t.args[1])
            k = t.args[0].value
            parts = (
                tuple((u, (co * k) & m) for u, co in inner),
                (c * k) & m,
            )
        else:
            parts = (((t, 1),), 0)
        self._lin_cache[t.uid] = parts
        return parts

    def _lin_merge(self, a: Term, b: Term, sign: int, m: int):
        pa, ca = self._linear_parts(a)
        pb, cb = self._linear_parts(b)
        acc: dict[int, tuple[Term, int]] = {u.uid: (u, c) for u, c in pa}
        for u, c in pb:
            prev = acc.get(u.uid)
            coeff = ((prev[1] if prev else 0) + sign * c) & m
            if coeff:
                acc[u.uid] = (u, coeff)
            else:
                acc.pop(u.uid, None)
        parts = tuple(acc[k] for k in sorted(acc))
        return parts, (ca + sign * cb) & m

    def _render_linear(self, parts, const_part: int, width: int) -> Term:
        m = mask(width)
        positives: list[Term] = []
        negatives: list[Term] = []
        for t, coeff in parts:
            signed = to_signed(coeff, width)
            if signed >= 0:
                positives.append(self._scaled(t, signed, width))
            else:
                negatives.append(self._scaled(t, -signed, width))
        acc: Term | None = None
        for t in positives:
            acc = t if acc is None else self._mk("add", self._sort2(acc, t), width)
        if const_part:
            c = self.const(const_part, width)
            acc = c if acc is None else self._mk("add", self._sort2(acc, c), width)
        if acc is None:
            acc = self.const(0, width)
        for t in negatives:
            acc = self._mk("sub", (acc, t), width)
        return acc

    def _scaled(self, t: Term, k: int, width: int) -> Term:
        if k == 1:
            return t
        return self._mk("mul", (self.const(k, width), t), width)

    def add(self, a: Term, b: Term) -> Term:
        if a.width != b.width or a.width == BOOL:
            raise ValueError("add needs equal bitvector widths")
        parts, c = self._lin_merge(a, b, 1, mask(a.width))
        return self._render_linear(parts, c, a.width)

    def sub(self, a: Term, b: Term) -> Term:
        if a.width != b.width or a.width == BOOL:
            raise ValueError("sub needs equal bitvector widths")
        parts, c = self._lin_merge(a, b, -1, mask(a.width))
        return self._render_linear(parts, c, a.width)

    def neg(self, a: Term) -> Term:
        return self.sub(self.const(0, a.width), a)

    def mul(self, a: Term, b: Term) -> Term:
        for x, y in ((a, b), (b, a)):
            if x.is_const:
                if x.value == 0:
                    return self.const(0, a.width)
                if x.value == 1:
                    return y
                parts, c = self._linear_parts(y)
                m = mask(a.width)
                scaled = tuple((u, (co * x.value) & m) for u, co in parts)
                scaled = tuple((u, co) for u, co in scaled if co)
                return self._render_linear(scaled, (c * x.value) & m, a.width)
        return self._bv2("mul", a, b, lambda x, y, w: x * y)

    def band(self, a: Term, b: Term) -> Term:
        if a is b:
            return a
        for x, y in ((a, b), (b, a)):
            if x.is_const:
                if x.value == 0:
                    return self.const(0, a.width)
                if x.value == mask(a.width):
                    return y
        return self._bv2("band", a, b, lambda x, y, w: x & y)

    def bor(self, a: Term, b: Term) -> Term:
        if a is b:
            return a
        for x, y in ((a, b), (b, a)):
            if x.is_const:
                if x.value == 0:
                    return y
                if x.value == mask(a.width):
                    return self.const(mask(a.width), a.width)
        return self._bv2("bor", a, b, lambda x, y, w: x | y)

    def bxor(self, a: Term, b: Term) -> Term:
        if a is b:
            return self.const(0, a.width)
        for x, y in ((a, b), (b, a)):
            if x.is_const and x.value == 0:
                return y
        return self._bv2("bxor", a, b, lambda x, y, w: x ^ y)

    def bnot(self, a: Term) -> Term:
        if a.is_const:
            return self.const(~a.value, a.width)
        if a.op == "bnot":
            return a.args[0]
        return self._mk("bnot", (a,), a.width)

    def shl(self, a: Term, b: Term) -> Term:
        if b.is_const:
            amt = b.value & (a.width - 1)
            if amt == 0:
                return a
            if a.is_const:
                return self.const(a.value << amt, a.width)
        return self._bv2("shl", a, b, lambda x, y, w: x << (y & (w - 1)))

    def ashr(self, a: Term, b: Term) -> Term:
        if b.is_const:
            amt = b.value & (a.width - 1)
            if amt == 0:
                return a
            if a.is_const:
                return self.const(to_signed(a.value, a.width) >> amt, a.width)
        return self._bv2(
            "ashr", a, b, lambda x, y, w: to_signed(x, w) >> (y & (w - 1))
        )


@dataclass
class Formula:
    """A bool root over an ordered tuple of input symbols."""

    builder: TermBuilder
    root: Term
    inputs: tuple[Term, ...]

    def __post_init__(self) -> None:
        if self.root.width != BOOL:
            raise ValueError("formula root must be bool")

    @property
    def input_bits(self) -> int:
        return sum(max(t.width, 1) for t in self.inputs)


def postorder(root: Term) -> list[Term]:
    """Iterative postorder over the DAG, each node once."""
    order: list[Term] = []
    seen: set[int] = set()
    stack: list[tuple[Term, bool]] = [(root, False)]
    while stack:
        term, expanded = stack.pop()
        if expanded:
            order.append(term)
            continue
        if term.uid in seen:
            continue
        seen.add(term.uid)
        stack.append((term, True))
        for a in term.args:
            if a.uid not in seen:
                stack.append((a, False))
    return order


def collect_inputs(root: Term) -> list[Term]:
    """Input terms reachable from root, in first-postorder-visit order."""
    return [t for t in postorder(root) if t.op == "input"]


def evaluate(root: Term, env: dict[str, int | bool]) -> int | bool:
    """Concrete evaluation; env maps input names to unsigned residues/bools."""
    values: dict[int, int] = {}
    for t in postorder(root):
        values[t.uid] = _eval_node(t, values, env)
    result = values[root.uid]
    return bool(result) if root.width == BOOL else result


def _eval_node(t: Term, values: dict[int, int], env) -> int:
    op = t.op
    if op == "const":
        return t.value
    if op == "input":
        v = env[t.name]
        return int(v) & mask(t.width) if t.width != BOOL else int(bool(v))
    a = values[t.args[0].uid] if t.args else 0
    b = values[t.args[1].uid] if len(t.args) > 1 else 0
    w = t.args[0].width if t.args else t.width
    if op == "not":
        return 1 - a
    if op == "and":
        return a & b
    if op == "or":
        return a | b
    if op == "xor":
        return a ^ b
    if op == "eq":
        return int(a == b)
    if op == "slt":
        return int(to_signed(a, w) < to_signed(b, w))
    if op == "ite":
        return values[t.args[1].uid] if a else values[t.args[2].uid]
    if op == "add":
        return (a + b) & mask(w)
    if op == "sub":
        return (a - b) & mask(w)
    if op == "mul":
        return (a * b) & mask(w)
    if op == "band":
        return a & b
    if op == "bor":
        return a | b
    if op == "bxor":
        return a ^ b
    if op == "bnot":
        return (~a) & mask(w)
    if op == "shl":
        return (a << (b & (w - 1))) & mask(w)
    if op == "ashr":
        return (to_signed(a, w) >> (b & (w - 1))) & mask(w)
    raise AssertionError(f"unknown op {op}")  # pragma: no cover


def bulk_evaluate(root: Term, env: dict[str, np.ndarray]) -> np.ndarray:
    """Vectorized evaluation over many valuations at once.

    Bitvector arrays are uint64 residues, bool terms become bool arrays.
    Used by the exhaustive enumeration oracle.
    """
    values: dict[int, np.ndarray] = {}
    with np.errstate(over="ignore"):
        for t in postorder(root):
            values[t.uid] = _bulk_node(t, values, env)
    return values[root.uid]


def _signed64(v: np.ndarray, w: int) -> np.ndarray:
    half = np.uint64(1 << (w - 1))
    return v.astype(np.int64) - ((v & half).astype(np.int64) << np.int64(1))


def _bulk_node(t: Term, values, env):
    op = t.op
    if op == "const":
        if t.width == BOOL:
            return np.bool_(bool(t.value))
        return np.uint64(t.value)
    if op == "input":
        return env[t.name]
    a = values[t.args[0].uid] if t.args else None
    b = values[t.args[1].uid] if len(t.args) > 1 else None
    w = t.args[0].width if t.args else t.width
    m = np.uint64(mask(w)) if w != BOOL else None
    if op == "not":
        return ~a
    if op == "and":
        return a & b
    if op == "or":
        return a | b
    if op == "xor":
        return a ^ b
    if op == "eq":
        return a == b
    if op == "slt":
        return _signed64(a, w) < _signed64(b, w)
    if op == "ite":
        return np.where(a, values[t.args[1].uid], values[t.args[2].uid])
    if op == "add":
        return (a + b) & m
    if op == "sub":
        return (a - b) & m
    if op == "mul":
        return (a * b) & m
    if op == "band":
        return a & b
    if op == "bor":
        return a | b
    if op == "bxor":
        return a ^ b
    if op == "bnot":
        return (~a) & m
    if op == "shl":
        return (a << (b & np.uint64(w - 1))) & m
    if op == "ashr":
        amt = (b & np.uint64(w - 1)).astype(np.int64)
        return (_signed64(a, w) >> amt).astype(np.uint64) & m
    raise AssertionError(f"unknown op {op}")  # pragma: no cover
