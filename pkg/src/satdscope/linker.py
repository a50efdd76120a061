"""Link each logical comment to its locality and neighboring statements.

One CommentContextRecord per logical comment is the atom every metric and
report consumes. A comment is a header iff it announces a major construct
and is not trailing code on its own line; everything else is non-header and
carries both a preceding and a succeeding statement context.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .lexer import CommentSpan
from .satd import NOT_SATD, PatternSet, SatdLabel, match_etf
from .scanner import FileScan, context_after, context_before, detect_header_construct
from .taxonomy import HeaderKind, StatementCategory


class Locality(enum.Enum):
    HEADER = "HEADER"
    NON_HEADER = "NON_HEADER"


@dataclass(frozen=True)
class CommentContextRecord:
    file: str
    span: CommentSpan
    locality: Locality
    header_kind: HeaderKind | None
    preceding: tuple[str, StatementCategory] | None
    succeeding: tuple[str, StatementCategory] | None
    label: SatdLabel
    project: str

    def __post_init__(self) -> None:
        if (self.locality is Locality.HEADER) != (self.header_kind is not None):
            raise ValueError("header locality requires a header kind and vice versa")

    def with_label(self, label: SatdLabel) -> "CommentContextRecord":
        return replace(self, label=label)


def link(
    scan: FileScan,
    patterns: PatternSet | None = None,
    project: str = "",
) -> list[CommentContextRecord]:
    """Produce exactly one record per logical comment of a scanned file."""
    records: list[CommentContextRecord] = []
    for comment in scan.comments:
        header_kind = detect_header_construct(scan, comment)
        if header_kind is not None and not comment.trailing:
            locality = Locality.HEADER
        else:
            locality = Locality.NON_HEADER
            header_kind = None
        preceding = context_before(scan, comment.start_line, comment.start_col)
        succeeding = context_after(scan, comment.end_line, comment.end_col - 1)
        label = match_etf(comment.text, patterns) if patterns is not None else NOT_SATD
        records.append(
            CommentContextRecord(
                file=scan.source.path,
                span=comment,
                locality=locality,
                header_kind=header_kind,
                preceding=preceding,
                succeeding=succeeding,
                label=label,
                project=project,
            )
        )
    return records
