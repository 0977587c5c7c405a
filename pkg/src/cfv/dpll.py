"""Complete DPLL SAT solver with two-watched-literal unit propagation.

Deliberately plain: no clause learning, no restarts, no heuristics beyond
the fixed decision rule (lowest-indexed unassigned variable, false before
true) and chronological backtracking. Together with the bit allocation in
bitblast this makes the search enumerate input valuations in counting
order, so verdicts and models are fully reproducible. Clause learning is
the obvious upgrade point if instances outgrow this.
"""

from __future__ import annotations

import time

UNASSIGNED = -1


class DpllResult:
    __slots__ = ("status", "assignment")

    def __init__(self, status: str, assignment: list[int] | None = None):
        self.status = status  # "sat", "unsat", "timeout"
        self.assignment = assignment


def solve_cnf(
    num_vars: int,
    clauses: list[tuple[int, ...]],
    timeout_s: float | None = None,
    deadline: float | None = None,
) -> DpllResult:
    """Decide a CNF. assignment[v] is 0/1 for v in 1..num_vars when sat."""
    if deadline is None and timeout_s is not None:
        deadline = time.monotonic() + timeout_s

    assign = [UNASSIGNED] * (num_vars + 1)
    # watches[lit] holds indices of clauses currently watching lit.
    watches: dict[int, list[int]] = {}
    watched: list[list[int]] = []  # two watched literals per clause
    trail: list[int] = []
    # decisions: (var, trail length before the decision, flipped already)
    decisions: list[tuple[int, int, bool]] = []
    units: list[int] = []

    for idx, clause in enumerate(clauses):
        if not clause:
            return DpllResult("unsat")
        if len(clause) == 1:
            units.append(clause[0])
            watched.append([clause[0], clause[0]])
            continue
        watched.append([clause[0], clause[1]])
        watches.setdefault(clause[0], []).append(idx)
        watches.setdefault(clause[1], []).append(idx)

    def value(lit: int) -> int:
        v = assign[abs(lit)]
        if v == UNASSIGNED:
            return UNASSIGNED
        return v if lit > 0 else 1 - v

    def enqueue(lit: int) -> bool:
        """Assign lit true; False on immediate contradiction."""
        v = abs(lit)
        desired = 1 if lit > 0 else 0
        if assign[v] != UNASSIGNED:
            return assign[v] == desired
        assign[v] = desired
        trail.append(v)
        prop_queue.append(lit)
        return True

    def propagate() -> bool:
        """Exhaust unit propagation; False on conflict."""
        while prop_queue:
            lit = prop_queue.pop()
            falsified = -lit
            clause_idxs = watches.get(falsified)
            if not clause_idxs:
                continue
            i = 0
            while i < len(clause_idxs):
                idx = clause_idxs[i]
                w = watched[idx]
                other = w[0] if w[1] == falsified else w[1]
                if value(other) == 1:
                    i += 1
                    continue
                clause = clauses[idx]
                moved = False
                for cand in clause:
                    if cand == other or cand == falsified:
                        continue
                    if value(cand) != 0:
                        # New watch found; move this clause over.
                        if w[0] == falsified:
                            w[0] = cand
                        else:
                            w[1] = cand
                        watches.setdefault(cand, []).append(idx)
                        clause_idxs[i] = clause_idxs[-1]
                        clause_idxs.pop()
                        moved = True
                        break
                if moved:
                    continue
                if value(other) == 0:
                    return False  # conflict
                if not enqueue(other):
                    return False
                i += 1
        return True

    prop_queue: list[int] = []
    for lit in units:
        if not enqueue(lit):
            return DpllResult("unsat")

    next_var = 1
    steps = 0
    while True:
        steps += 1
        if deadline is not None and steps % 512 == 0 and time.monotonic() > deadline:
            return DpllResult("timeout")
        if not propagate():
            # Chronological backtracking: undo to the most recent decision
            # still having its true-branch open.
            prop_queue.clear()
            while decisions:
                var, mark, flipped = decisions.pop()
                for v in trail[mark:]:
                    assign[v] = UNASSIGNED
                del trail[mark:]
                next_var = min(next_var, var)
                if not flipped:
                    decisions.append((var, mark, True))
                    enqueue(var)  # try the true branch
                    break
            else:
                return DpllResult("unsat")
            continue
        while next_var <= num_vars and assign[next_var] != UNASSIGNED:
            next_var += 1
        if next_var > num_vars:
            return DpllResult("sat", assign)
        decisions.append((next_var, len(trail), False))
        enqueue(-next_var)  # polarity false first
