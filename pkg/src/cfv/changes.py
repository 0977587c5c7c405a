"""Function-level change classification between two snapshots.

Name-matched functions with byte-identical bodies are unchanged; with
differing bodies they are modified. Names present on only one side are
first probed pairwise for renames (structural equivalence of bodies,
greedily in lexicographic order of old names); leftovers are removed or
added. A change to the initializer or type of a global also marks every
function that reads it as modified (paired with itself), since the initial
program state it observes shifts even though its own text did not.

The rename probe is the fast stage of equivalence checking: pure AST
comparison after canonical renaming, never a solver call, linear in tree
size.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from cfv.minic.ast import FunctionDef, GlobalDecl
from cfv.minic.normalize import normalize_alpha
from cfv.snapshot import Snapshot


@dataclass
class ChangeSet:
    added: list[str]
    removed: list[str]
    modified: list[tuple[FunctionDef, FunctionDef]]
    renamed: list[tuple[str, str]]
    unchanged: list[str]
    # Names in `modified` that are there because a global they read changed
    # its initial value or type rather than because their body changed.
    state_affected: frozenset[str] = frozenset()

    @property
    def modified_names(self) -> list[str]:
        return [new.name for _, new in self.modified]

    def category_partition(self) -> list[set[str]]:
        return [
            set(self.added),
            set(self.removed),
            set(self.modified_names),
            {old for old, _ in self.renamed} | {new for _, new in self.renamed},
            set(self.unchanged),
        ]


def structural_equiv(a: FunctionDef, b: FunctionDef) -> bool:
    """Stage-1 equivalence: equal ASTs after canonical alpha renaming.

    Positional parameter types and the return type must match. Spans and
    comments never matter; local names never matter; anything else
    (including operand order) does.
    """
    if len(a.params) != len(b.params) or a.return_type != b.return_type:
        return False
    if any(pa.ty != pb.ty for pa, pb in zip(a.params, b.params)):
        return False
    return normalize_alpha(a) == normalize_alpha(b)


def _global_signature(decl: GlobalDecl) -> tuple:
    init = decl.init
    value = None
    if init is not None:
        # Initializers are literal constants, possibly negated.
        from cfv.minic.ast import BoolLit, IntLit, Unary

        if isinstance(init, BoolLit):
            value = init.value
        elif isinstance(init, IntLit):
            value = init.value
        elif isinstance(init, Unary) and isinstance(init.operand, IntLit):
            value = -init.operand.value
    return (decl.ty, value)


def changed_globals(old: Snapshot, new: Snapshot) -> set[str]:
    """Globals present in both snapshots whose type or initializer changed."""
    out = set()
    for name, decl in old.globals.items():
        other = new.globals.get(name)
        if other is not None and _global_signature(decl) != _global_signature(other):
            out.add(name)
    return out


def compute_changeset(old: Snapshot, new: Snapshot) -> ChangeSet:
    old_names = set(old.functions)
    new_names = set(new.functions)

    unchanged: list[str] = []
    modified: list[tuple[FunctionDef, FunctionDef]] = []
    state_affected: set[str] = set()
    dirty_globals = changed_globals(old, new)

    for name in sorted(old_names & new_names):
        fn_old = old.functions[name]
        fn_new = new.functions[name]
        same_text = old.function_source(fn_old) == new.function_source(fn_new)
        if same_text and not (fn_new.reads_globals & dirty_globals):
            unchanged.append(name)
        else:
            modified.append((fn_old, fn_new))
            if same_text:
                state_affected.add(name)

    only_old = sorted(old_names - new_names)
    only_new = sorted(new_names - old_names)
    renamed: list[tuple[str, str]] = []
    for old_name in list(only_old):
        fn_old = old.functions[old_name]
        for new_name in only_new:
            if structural_equiv(fn_old, new.functions[new_name]):
                renamed.append((old_name, new_name))
                only_old.remove(old_name)
                only_new.remove(new_name)
                break

    return ChangeSet(
        added=only_new,
        removed=only_old,
        modified=modified,
        renamed=renamed,
        unchanged=unchanged,
        state_affected=frozenset(state_affected),
    )
