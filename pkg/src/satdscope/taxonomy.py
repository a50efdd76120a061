"""Statement-type taxonomy: raw syntactic kinds and their category grouping.

The raw kind names follow srcML element naming. Each kind belongs to exactly
one of nine categories; kinds that carry no useful context (blocks, operators,
annotations, ...) are grouped under MISC and excluded from context metrics.
"""

from __future__ import annotations

import enum


class StatementCategory(enum.Enum):
    DEFN = "DEFN"
    DECL = "DECL"
    EXPR = "EXPR"
    CNDTNL = "CNDTNL"
    BRNCH = "BRNCH"
    EXCPTN = "EXCPTN"
    LOOPS = "LOOPS"
    DOC = "DOC"
    MISC = "MISC"


class HeaderKind(enum.Enum):
    CLASS = "CLASS"
    INTERFACE = "INTERFACE"
    ENUM = "ENUM"
    FUNCTION = "FUNCTION"
    CONSTRUCTOR = "CONSTRUCTOR"
    FILE = "FILE"


# The fixed kind -> category map. Unknown kinds fall back to MISC (see
# category_of); they never raise.
KIND_TO_CATEGORY: dict[str, StatementCategory] = {}

_GROUPS: dict[StatementCategory, tuple[str, ...]] = {
    StatementCategory.DEFN: (
        "function", "enum", "class", "interface", "constructor", "import", "package",
    ),
    StatementCategory.LOOPS: ("do", "for", "while", "range"),
    StatementCategory.EXPR: ("expr_stmt", "call"),
    StatementCategory.BRNCH: ("break", "return", "label", "continue"),
    StatementCategory.CNDTNL: (
        "if", "if_stmt", "else", "case", "switch", "then", "ternary", "default", "assert",
    ),
    StatementCategory.EXCPTN: ("catch", "throw", "try", "finally"),
    StatementCategory.DECL: ("decl_stmt", "function_decl", "constructor_decl"),
    StatementCategory.DOC: ("comment",),
    StatementCategory.MISC: (
        "argument", "argument_list", "block", "block_content", "condition", "index",
        "name", "operator", "parameter", "parameter_list", "specifier", "super",
        "expr", "decl", "empty_stmt", "EOF", "literal", "annotation", "annotation_defn",
    ),
}

for _cat, _names in _GROUPS.items():
    for _name in _names:
        KIND_TO_CATEGORY[_name] = _cat

#: Every kind name the taxonomy enumerates explicitly.
KNOWN_KINDS: frozenset[str] = frozenset(KIND_TO_CATEGORY)

#: The eight categories that participate in context metrics (MISC excluded).
CONTEXT_CATEGORIES: tuple[StatementCategory, ...] = (
    StatementCategory.DECL,
    StatementCategory.EXPR,
    StatementCategory.DEFN,
    StatementCategory.BRNCH,
    StatementCategory.CNDTNL,
    StatementCategory.LOOPS,
    StatementCategory.EXCPTN,
    StatementCategory.DOC,
)

#: Canonical header-kind ordering used by reports (alphabetical).
HEADER_KINDS: tuple[HeaderKind, ...] = (
    HeaderKind.CLASS,
    HeaderKind.CONSTRUCTOR,
    HeaderKind.ENUM,
    HeaderKind.FILE,
    HeaderKind.FUNCTION,
    HeaderKind.INTERFACE,
)


def category_of(kind: str) -> StatementCategory:
    """Category for a raw kind name; unrecognized kinds are MISC."""
    return KIND_TO_CATEGORY.get(kind, StatementCategory.MISC)
