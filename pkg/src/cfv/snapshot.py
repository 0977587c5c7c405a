"""Snapshots: one type-checked version of a codebase.

A snapshot is loaded from a directory of `.c` files, from in-memory sources,
or from a base directory plus a unified diff (hunks are applied to the text
before parsing). All units of a snapshot share one global namespace and are
type-checked together at one integer width.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from cfv.errors import Diagnostic, FrontendError, InputError
from cfv.minic.ast import DUMMY_SPAN, FunctionDef, GlobalDecl, SourceUnit
from cfv.minic.parser import parse_unit
from cfv.minic.typecheck import Environment, type_check


@dataclass
class Snapshot:
    label: str
    units: list[SourceUnit]
    env: Environment
    width: int

    @property
    def functions(self) -> dict[str, FunctionDef]:
        return self.env.functions

    @property
    def globals(self) -> dict[str, GlobalDecl]:
        return self.env.globals

    def function_source(self, fn: FunctionDef) -> str:
        """Raw body text of a function, for byte-level change detection."""
        for unit in self.units:
            if fn in unit.functions:
                return unit.source_text[fn.body_span.start : fn.body_span.end]
        return ""


def snapshot_from_sources(
    sources: dict[str, str], label: str, width: int = 32
) -> Snapshot:
    """Build a snapshot from {path: source} mappings.

    Raises InputError carrying all parse/type diagnostics.
    """
    units: list[SourceUnit] = []
    diagnostics: list[Diagnostic] = []
    for path in sorted(sources):
        try:
            units.append(parse_unit(sources[path], path, width))
        except FrontendError as err:
            diagnostics.extend(err.diagnostics)
    if diagnostics:
        raise InputError(diagnostics)
    try:
        env = type_check(units, width)
    except FrontendError as err:
        raise InputError(err.diagnostics) from None
    return Snapshot(label, units, env, width)


def load_snapshot(directory: str | Path, width: int = 32, label: str | None = None) -> Snapshot:
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(
            [Diagnostic(str(directory), DUMMY_SPAN, "error", "not a directory")]
        )
    sources = {
        str(p.relative_to(directory)): p.read_text(encoding="utf-8")
        for p in sorted(directory.rglob("*.c"))
    }
    if not sources:
        raise InputError(
            [Diagnostic(str(directory), DUMMY_SPAN, "error", "no .c files found")]
        )
    return snapshot_from_sources(sources, label or directory.name, width)


# ---------------------------------------------------------------------------
# Unified diff support


class DiffError(ValueError):
    pass


def _parse_range(spec: str) -> tuple[int, int]:
    spec = spec.lstrip("-+")
    if "," in spec:
        start, count = spec.split(",")
        return int(start), int(count)
    return int(spec), 1


def apply_unified_diff(base: dict[str, str], diff_text: str) -> dict[str, str]:
    """Apply a unified diff to {path: text}, returning the patched mapping.

    Strict: context lines must match the base text exactly. Understands
    `a/`-`b/` prefixes and /dev/null for added or deleted files.
    """
    result = dict(base)
    lines = diff_text.splitlines()
    i = 0

    def strip_prefix(name: str) -> str:
        name = name.split("\t")[0].strip()
        if name.startswith(("a/", "b/")):
            return name[2:]
        return name

    while i < len(lines):
        if not lines[i].startswith("--- "):
            i += 1
            continue
        old_name = strip_prefix(lines[i][4:])
        if i + 1 >= len(lines) or not lines[i + 1].startswith("+++ "):
            raise DiffError(f"missing +++ line after line {i + 1}")
        new_name = strip_prefix(lines[i + 1][4:])
        i += 2
        if old_name == "/dev/null":
            old_lines: list[str] = []
        else:
            if old_name not in result:
                raise DiffError(f"diff refers to unknown file {old_name!r}")
            old_lines = result[old_name].splitlines()
        new_lines = list(old_lines)
        offset = 0
        while i < len(lines) and lines[i].startswith("@@"):
            header = lines[i]
            try:
                ranges = header.split("@@")[1].strip().split()
                old_start, old_count = _parse_range(ranges[0])
                _, new_count = _parse_range(ranges[1])
            except (IndexError, ValueError) as exc:
                raise DiffError(f"bad hunk header {header!r}") from exc
            i += 1
            cursor = max(old_start - 1, 0) + offset
            old_left, new_left = old_count, new_count
            while i < len(lines) and (old_left > 0 or new_left > 0):
                line = lines[i]
                tag = line[:1]
                if tag == " " or line == "":
                    expect = line[1:]
                    if cursor >= len(new_lines) or new_lines[cursor] != expect:
                        raise DiffError(f"context mismatch at {old_name}:{cursor + 1}")
                    cursor += 1
                    old_left -= 1
                    new_left -= 1
                elif tag == "-":
                    expect = line[1:]
                    if cursor >= len(new_lines) or new_lines[cursor] != expect:
                        raise DiffError(f"delete mismatch at {old_name}:{cursor + 1}")
                    del new_lines[cursor]
                    offset -= 1
                    old_left -= 1
                elif tag == "+":
                    new_lines.insert(cursor, line[1:])
                    cursor += 1
                    offset += 1
                    new_left -= 1
                elif tag == "\\":
                    pass  # "\ No newline at end of file"
                else:
                    raise DiffError(f"unexpected line in hunk: {line!r}")
                i += 1
            while i < len(lines) and lines[i].startswith("\\"):
                i += 1
        if new_name == "/dev/null":
            result.pop(old_name, None)
        else:
            result[new_name] = "\n".join(new_lines) + ("\n" if new_lines else "")
            if old_name != new_name and old_name != "/dev/null":
                result.pop(old_name, None)
    return result


def load_snapshot_from_diff(
    base_dir: str | Path,
    diff_path: str | Path,
    width: int = 32,
    label: str | None = None,
) -> Snapshot:
    """Snapshot of base_dir with a unified diff applied on top."""
    base_dir = Path(base_dir)
    sources = {
        str(p.relative_to(base_dir)): p.read_text(encoding="utf-8")
        for p in sorted(base_dir.rglob("*.c"))
    }
    diff_text = Path(diff_path).read_text(encoding="utf-8")
    try:
        patched = apply_unified_diff(sources, diff_text)
    except DiffError as err:
        raise InputError(
            [Diagnostic(str(diff_path), DUMMY_SPAN, "error", str(err))]
        ) from None
    return snapshot_from_sources(
        patched, label or f"{base_dir.name}+{Path(diff_path).name}", width
    )
