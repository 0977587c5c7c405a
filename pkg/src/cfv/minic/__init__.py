"""Frontend for the MiniC subset: lexing, parsing, types, normalization."""

from cfv.minic.metrics import cyclomatic_complexity
from cfv.minic.normalize import normalize_alpha
from cfv.minic.parser import parse_unit
from cfv.minic.printer import format_expr, format_function, format_unit
from cfv.minic.typecheck import Environment, type_check, type_check_unit

__all__ = [
    "Environment",
    "cyclomatic_complexity",
    "format_expr",
    "format_function",
    "format_unit",
    "normalize_alpha",
    "parse_unit",
    "type_check",
    "type_check_unit",
]
