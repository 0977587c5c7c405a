"""Tseitin transformation from term DAGs to CNF.

Variable layout: variable 1 is the constant true (pinned by a unit clause),
then the formula inputs get variables in slot order with each bitvector's
bits allocated most-significant first, then one variable per logic gate in
DAG order. With the DPLL decision rule "lowest index first, false first"
this makes the solver enumerate input valuations in exactly the counting
order the exhaustive oracle uses, so the first model found is the
lexicographically least one.

Arithmetic is structural: ripple-carry adders, subtraction as a + ~b + 1,
shift-and-add multiplication, barrel shifters, and comparisons by
subtract-and-inspect. ITE gates carry the two redundant clauses so equal
branches propagate without a case split.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from cfv.errors import CfvError
from cfv.terms import BOOL, Formula, Term, postorder

TRUE_LIT = 1


class BlastTimeout(CfvError):
    """Raised when bit-blasting outruns its deadline."""


@dataclass
class CnfFormula:
    num_vars: int
    clauses: list[tuple[int, ...]]
    # input name -> variable index per bit, least significant first;
    # bools get a single entry.
    input_bits: dict[str, tuple[int, ...]]
    inputs: tuple[Term, ...] = ()

    def check(self) -> None:
        for clause in self.clauses:
            seen = set()
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"bad literal {lit}")
                if -lit in seen:
                    raise ValueError(f"clause contains {lit} and {-lit}")
                seen.add(lit)


class _Blaster:
    def __init__(self, deadline: float | None):
        self.clauses: list[tuple[int, ...]] = []
        self.num_vars = 1  # var 1 is constant true
        self.clauses.append((TRUE_LIT,))
        self.gate_cache: dict[tuple, int] = {}
        self.deadline = deadline
        self._ticks = 0

    def tick(self) -> None:
        self._ticks += 1
        if self.deadline is not None and self._ticks % 4096 == 0:
            if time.monotonic() > self.deadline:
                raise BlastTimeout("bit-blasting exceeded the time limit")

    def new_var(self) -> int:
        self.num_vars += 1
        return self.num_vars

    def add(self, *lits: int) -> None:
        self.clauses.append(tuple(lits))

    # -- gates ----------------------------------------------------------------
    # Constant operands are folded here as well: term-level folding misses
    # constants that only appear after bit decomposition.

    def and_gate(self, a: int, b: int) -> int:
        if a == -TRUE_LIT or b == -TRUE_LIT:
            return -TRUE_LIT
        if a == TRUE_LIT:
            return b
        if b == TRUE_LIT:
            return a
        if a == b:
            return a
        if a == -b:
            return -TRUE_LIT
        key = ("and",) + tuple(sorted((a, b)))
        g = self.gate_cache.get(key)
        if g is None:
            self.tick()
            g = self.new_var()
            self.add(-g, a)
            self.add(-g, b)
            self.add(g, -a, -b)
            self.gate_cache[key] = g
        return g

    def or_gate(self, a: int, b: int) -> int:
        return -self.and_gate(-a, -b)

    def xor_gate(self, a: int, b: int) -> int:
        if a == TRUE_LIT:
            return -b
        if a == -TRUE_LIT:
            return b
        if b == TRUE_LIT:
            return -a
        if b == -TRUE_LIT:
            return a
        if a == b:
            return -TRUE_LIT
        if a == -b:
            return TRUE_LIT
        # xor is invariant under double negation and flips under single
        # negation, so cache one gate per variable pair.
        flip = (a < 0) != (b < 0)
        x, y = abs(a), abs(b)
        if x > y:
            x, y = y, x
        key = ("xor", x, y)
        g = self.gate_cache.get(key)
        if g is None:
            self.tick()
            g = self.new_var()
            self.add(-g, x, y)
            self.add(-g, -x, -y)
            self.add(g, -x, y)
            self.add(g, x, -y)
            self.gate_cache[key] = g
        return -g if flip else g

    def maj_gate(self, a: int, b: int, c: int) -> int:
        lits = sorted((a, b, c))
        consts = [l for l in lits if abs(l) == TRUE_LIT]
        rest = [l for l in lits if abs(l) != TRUE_LIT]
        if len(consts) >= 2:
            pos = sum(1 for l in consts if l > 0)
            if pos >= 2:
                return TRUE_LIT
            if len(consts) - pos >= 2:
                return -TRUE_LIT
            return rest[0]  # one true and one false: majority is the third
        if len(consts) == 1:
            if consts[0] == TRUE_LIT:
                return self.or_gate(rest[0], rest[1])
            return self.and_gate(rest[0], rest[1])
        if a == b:
            return a
        if a == c:
            return a
        if b == c:
            return b
        if a == -b:
            return c
        if a == -c:
            return b
        if b == -c:
            return a
        key = ("maj",) + tuple(lits)
        g = self.gate_cache.get(key)
        if g is None:
            self.tick()
            g = self.new_var()
            a, b, c = lits
            self.add(-g, a, b)
            self.add(-g, a, c)
            self.add(-g, b, c)
            self.add(g, -a, -b)
            self.add(g, -a, -c)
            self.add(g, -b, -c)
            self.gate_cache[key] = g
        return g

    def ite_gate(self, c: int, a: int, b: int) -> int:
        if c == TRUE_LIT:
            return a
        if c == -TRUE_LIT:
            return b
        if a == b:
            return a
        if a == -b:
            return -self.xor_gate(c, a)  # c ? a : !a  ==  c <-> a
        if a == TRUE_LIT and b == -TRUE_LIT:
            return c
        if a == -TRUE_LIT and b == TRUE_LIT:
            return -c
        if a == c:
            return self.or_gate(c, b)  # c ? c : b
        if a == -c:
            return self.and_gate(-c, b)  # c ? !c : b
        if b == c:
            return self.and_gate(c, a)  # c ? a : c
        if b == -c:
            return self.or_gate(-c, a)  # c ? a : !c
        key = ("ite", c, a, b)
        g = self.gate_cache.get(key)
        if g is None:
            self.tick()
            g = self.new_var()
            self.add(-g, -c, a)
            self.add(-g, c, b)
            self.add(g, -c, -a)
            self.add(g, c, -b)
            # Redundant, but lets equal branches propagate g without deciding c.
            self.add(g, -a, -b)
            self.add(-g, a, b)
            self.gate_cache[key] = g
        return g

    def conjunction(self, lits: list[int]) -> int:
        acc = TRUE_LIT
        for l in lits:
            acc = self.and_gate(acc, l)
        return acc

    # -- word-level helpers (bit lists are LSB first) -------------------------

    def ripple_add(self, a: list[int], b: list[int], carry: int) -> list[int]:
        out = []
        for x, y in zip(a, b):
            out.append(self.xor_gate(self.xor_gate(x, y), carry))
            carry = self.maj_gate(x, y, carry)
        return out

    def negate_bits(self, a: list[int]) -> list[int]:
        zeros = [-TRUE_LIT] * len(a)
        return self.ripple_add(zeros, [-x for x in a], TRUE_LIT)

    def sub_bits(self, a: list[int], b: list[int]) -> list[int]:
        return self.ripple_add(a, [-x for x in b], TRUE_LIT)

    def mul_bits(self, a: list[int], b: list[int]) -> list[int]:
        w = len(a)
        acc = [self.and_gate(x, b[0]) for x in a]
        for i in range(1, w):
            shifted = [-TRUE_LIT] * i + a[: w - i]
            addend = [self.and_gate(x, b[i]) for x in shifted]
            acc = self.ripple_add(acc, addend, -TRUE_LIT)
        return acc

    def shift_bits(self, a: list[int], amount: list[int], arithmetic: bool, left: bool) -> list[int]:
        w = len(a)
        stages = w.bit_length() - 1  # w is a power of two
        cur = list(a)
        fill = a[-1] if arithmetic else -TRUE_LIT
        for s in range(stages):
            dist = 1 << s
            sel = amount[s]
            if left:
                shifted = [-TRUE_LIT] * dist + cur[: w - dist]
            else:
                shifted = cur[dist:] + [fill] * dist
            cur = [self.ite_gate(sel, sh, old) for sh, old in zip(shifted, cur)]
        return cur

    def equal_bits(self, a: list[int], b: list[int]) -> int:
        acc = TRUE_LIT
        for x, y in zip(a, b):
            acc = self.and_gate(acc, -self.xor_gate(x, y))
        return acc

    def slt_bits(self, a: list[int], b: list[int]) -> int:
        diff = self.sub_bits(a, b)
        sa, sb = a[-1], b[-1]
        return self.ite_gate(self.xor_gate(sa, sb), sa, diff[-1])


def bitblast(formula: Formula, deadline: float | None = None) -> CnfFormula:
    """Translate a formula into an equisatisfiable CNF.

    Deterministic: identical formulas produce identical CNFs. Raises
    BlastTimeout when the optional deadline passes.
    """
    blaster = _Blaster(deadline)
    input_bits: dict[str, tuple[int, ...]] = {}
    bits: dict[int, list[int]] = {}  # term uid -> literals (LSB first; bools 1 lit)

    for term in formula.inputs:
        if term.op != "input":
            raise ValueError("formula inputs must be input terms")
        width = max(term.width, 1)
        allocated = [blaster.new_var() for _ in range(width)]
        lsb_first = tuple(reversed(allocated))  # MSB got the lowest index
        input_bits[term.name] = lsb_first
        bits[term.uid] = list(lsb_first)

    for term in postorder(formula.root):
        if term.uid in bits:
            continue
        bits[term.uid] = _blast_node(blaster, term, bits)

    root_lit = bits[formula.root.uid][0]
    blaster.add(root_lit)
    return CnfFormula(
        blaster.num_vars, blaster.clauses, input_bits, tuple(formula.inputs)
    )


def _blast_node(bl: _Blaster, t: Term, bits: dict[int, list[int]]) -> list[int]:
    op = t.op
    if op == "const":
        if t.width == BOOL:
            return [TRUE_LIT if t.value else -TRUE_LIT]
        return [TRUE_LIT if (t.value >> i) & 1 else -TRUE_LIT for i in range(t.width)]
    if op == "input":
        # Inputs not declared in the formula slots (must not happen).
        raise ValueError(f"undeclared input {t.name!r} in formula")
    a = bits[t.args[0].uid] if t.args else None
    b = bits[t.args[1].uid] if len(t.args) > 1 else None
    if op == "not":
        return [-a[0]]
    if op == "and":
        return [bl.and_gate(a[0], b[0])]
    if op == "or":
        return [bl.or_gate(a[0], b[0])]
    if op == "xor":
        return [bl.xor_gate(a[0], b[0])]
    if op == "eq":
        return [bl.equal_bits(a, b)]
    if op == "slt":
        return [bl.slt_bits(a, b)]
    if op == "ite":
        c = a[0]
        x, y = bits[t.args[1].uid], bits[t.args[2].uid]
        return [bl.ite_gate(c, xi, yi) for xi, yi in zip(x, y)]
    if op == "add":
        return bl.ripple_add(a, b, -TRUE_LIT)
    if op == "sub":
        return bl.sub_bits(a, b)
    if op == "mul":
        return bl.mul_bits(a, b)
    if op == "band":
        return [bl.and_gate(x, y) for x, y in zip(a, b)]
    if op == "bor":
        return [bl.or_gate(x, y) for x, y in zip(a, b)]
    if op == "bxor":
        return [bl.xor_gate(x, y) for x, y in zip(a, b)]
    if op == "bnot":
        return [-x for x in a]
    if op == "shl":
        return bl.shift_bits(a, b, arithmetic=False, left=True)
    if op == "ashr":
        return bl.shift_bits(a, b, arithmetic=True, left=False)
    raise AssertionError(f"unknown op {op}")  # pragma: no cover
