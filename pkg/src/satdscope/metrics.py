"""Per-project SATD density metrics and project sizing.

All ratios are plain proportions in [0, 1]. A ratio whose denominator is
empty is *undefined*, represented as None: a project with no header comments
says nothing about header SATD density, so undefined values are excluded
from cross-project aggregation and from statistical test vectors.
"""

from __future__ import annotations

import enum
import statistics
from dataclasses import dataclass, field

from .lexer import SourceFile
from .linker import CommentContextRecord, Locality
from .taxonomy import CONTEXT_CATEGORIES, HEADER_KINDS, HeaderKind, StatementCategory


class SizeBucket(enum.Enum):
    SMALL = "SMALL"  # (0, 100] KLOC; projects under 1 KLOC included
    MEDIUM = "MEDIUM"  # (100, 1000]
    LARGE = "LARGE"  # > 1000


@dataclass(frozen=True)
class ProjectSummary:
    project: str
    kloc: float
    bucket: SizeBucket | None
    analyzable: bool
    file_count: int
    line_count: int
    code_line_count: int
    cmt_h: int
    satd_h: int
    cmt_nh: int
    satd_nh: int


@dataclass(frozen=True)
class ContextBreakdown:
    """Per-direction ratios for the eight context categories.

    `excluded_cmt`/`excluded_satd` count comments whose context is MISC or
    missing; they are reported, never silently dropped.
    """

    ratios: dict[StatementCategory, float | None]
    excluded_cmt: int
    excluded_satd: int


@dataclass(frozen=True)
class MetricSet:
    n_header: float | None
    n_nonheader: float | None
    n_preceding: ContextBreakdown
    n_succeeding: ContextBreakdown
    header_succeeding: dict[HeaderKind, float | None]
    pattern: dict[tuple[StatementCategory, StatementCategory], float] | None
    pattern_total: int  # qualifying non-header SATD records in the grid


def size_bucket(kloc: float) -> SizeBucket:
    """Bucket boundaries are upper-inclusive: 100 KLOC is SMALL, 1000 MEDIUM."""
    if kloc <= 100:
        return SizeBucket.SMALL
    if kloc <= 1000:
        return SizeBucket.MEDIUM
    return SizeBucket.LARGE


def size_project(project: str, sources: list[SourceFile]) -> tuple[float, SizeBucket | None, bool]:
    """KLOC (thousands of non-blank, non-comment-only lines) and bucket."""
    if not sources:
        return 0.0, None, False
    code_lines = sum(s.code_line_count for s in sources)
    kloc = code_lines / 1000.0
    if code_lines == 0:
        return kloc, None, False
    return kloc, size_bucket(kloc), True


def summarize_project(
    project: str,
    sources: list[SourceFile],
    records: list[CommentContextRecord],
) -> ProjectSummary:
    kloc, bucket, analyzable = size_project(project, sources)
    header = [r for r in records if r.locality is Locality.HEADER]
    nonheader = [r for r in records if r.locality is Locality.NON_HEADER]
    return ProjectSummary(
        project=project,
        kloc=kloc,
        bucket=bucket,
        analyzable=analyzable,
        file_count=len(sources),
        line_count=sum(s.line_count for s in sources),
        code_line_count=sum(s.code_line_count for s in sources),
        cmt_h=len(header),
        satd_h=sum(1 for r in header if r.label.satd),
        cmt_nh=len(nonheader),
        satd_nh=sum(1 for r in nonheader if r.label.satd),
    )


def n_locality(records: list[CommentContextRecord], locality: Locality) -> float | None:
    """Share of SATD among the comments at one locality (None if no comments)."""
    at = [r for r in records if r.locality is locality]
    if not at:
        return None
    return sum(1 for r in at if r.label.satd) / len(at)


def _context_category(record: CommentContextRecord, direction: str) -> StatementCategory | None:
    ctx = record.preceding if direction == "preceding" else record.succeeding
    return None if ctx is None else ctx[1]


def n_context(
    records: list[CommentContextRecord],
    direction: str,
    key: StatementCategory | HeaderKind,
) -> float | None:
    """SATD share among comments whose context in `direction` is `key`.

    StatementCategory keys range over non-header comments; HeaderKind keys
    range over header comments and only make sense for direction
    "succeeding" (a header's context is the construct it precedes).
    """
    if direction not in ("preceding", "succeeding"):
        raise ValueError(f"unknown direction {direction!r}")
    if isinstance(key, HeaderKind):
        if direction != "succeeding":
            raise ValueError("header-kind context is only defined for direction 'succeeding'")
        at = [
            r
            for r in records
            if r.locality is Locality.HEADER and r.header_kind is key
        ]
    else:
        at = [
            r
            for r in records
            if r.locality is Locality.NON_HEADER
            and _context_category(r, direction) is key
        ]
    if not at:
        return None
    return sum(1 for r in at if r.label.satd) / len(at)


def context_breakdown(records: list[CommentContextRecord], direction: str) -> ContextBreakdown:
    ratios = {cat: n_context(records, direction, cat) for cat in CONTEXT_CATEGORIES}
    excluded = [
        r
        for r in records
        if r.locality is Locality.NON_HEADER
        and _context_category(r, direction) not in CONTEXT_CATEGORIES
    ]
    return ContextBreakdown(
        ratios=ratios,
        excluded_cmt=len(excluded),
        excluded_satd=sum(1 for r in excluded if r.label.satd),
    )


def _qualifying_pattern_records(
    records: list[CommentContextRecord],
) -> list[CommentContextRecord]:
    return [
        r
        for r in records
        if r.locality is Locality.NON_HEADER
        and r.label.satd
        and _context_category(r, "preceding") in CONTEXT_CATEGORIES
        and _context_category(r, "succeeding") in CONTEXT_CATEGORIES
    ]


def n_pattern(
    records: list[CommentContextRecord],
    preceding: StatementCategory,
    succeeding: StatementCategory,
) -> float | None:
    """Share of SATD with the given (preceding, succeeding) category pair.

    The denominator is the count of non-header SATD records whose contexts
    both fall in the eight non-MISC categories, so the 8x8 grid sums to 1.
    """
    qualifying = _qualifying_pattern_records(records)
    if not qualifying:
        return None
    hits = sum(
        1
        for r in qualifying
        if _context_category(r, "preceding") is preceding
        and _context_category(r, "succeeding") is succeeding
    )
    return hits / len(qualifying)


def pattern_grid(
    records: list[CommentContextRecord],
) -> tuple[dict[tuple[StatementCategory, StatementCategory], float] | None, int]:
    qualifying = _qualifying_pattern_records(records)
    if not qualifying:
        return None, 0
    counts: dict[tuple[StatementCategory, StatementCategory], int] = {
        (p, s): 0 for p in CONTEXT_CATEGORIES for s in CONTEXT_CATEGORIES
    }
    for r in qualifying:
        p = _context_category(r, "preceding")
        s = _context_category(r, "succeeding")
        counts[(p, s)] += 1
    total = len(qualifying)
    return {cell: c / total for cell, c in counts.items()}, total


def metric_set(records: list[CommentContextRecord]) -> MetricSet:
    """All per-project metric slices from one project's records."""
    grid, total = pattern_grid(records)
    return MetricSet(
        n_header=n_locality(records, Locality.HEADER),
        n_nonheader=n_locality(records, Locality.NON_HEADER),
        n_preceding=context_breakdown(records, "preceding"),
        n_succeeding=context_breakdown(records, "succeeding"),
        header_succeeding={
            kind: n_context(records, "succeeding", kind) for kind in HEADER_KINDS
        },
        pattern=grid,
        pattern_total=total,
    )


def mean_defined(values: list[float | None]) -> float | None:
    defined = [v for v in values if v is not None]
    return statistics.fmean(defined) if defined else None


def median_defined(values: list[float | None]) -> float | None:
    defined = [v for v in values if v is not None]
    return statistics.median(defined) if defined else None
