from __future__ import annotations

import pytest

from satdscope.lexer import CommentSpan, SourceFile
from satdscope.linker import CommentContextRecord, Locality
from satdscope.metrics import (
    ContextBreakdown,
    SizeBucket,
    context_breakdown,
    mean_defined,
    median_defined,
    metric_set,
    n_context,
    n_locality,
    n_pattern,
    pattern_grid,
    size_bucket,
    size_project,
    summarize_project,
)
from satdscope.satd import LabelSource, SatdKind, SatdLabel
from satdscope.taxonomy import CONTEXT_CATEGORIES, HeaderKind, StatementCategory

C = StatementCategory


def rec(
    locality: Locality = Locality.NON_HEADER,
    header_kind: HeaderKind | None = None,
    prec: C | None = None,
    succ: C | None = None,
    satd: bool = False,
    line: int = 1,
) -> CommentContextRecord:
    span = CommentSpan("line", line, line, 1, 10, "t", False, "F.java")
    label = (
        SatdLabel(satd=True, kind=SatdKind.ETF, source=LabelSource.RULE, matched_pattern="todo")
        if satd
        else SatdLabel(satd=False)
    )
    return CommentContextRecord(
        file="F.java",
        span=span,
        locality=locality,
        header_kind=header_kind,
        preceding=("k", prec) if prec else None,
        succeeding=("k", succ) if succ else None,
        label=label,
        project="p",
    )


def header(kind: HeaderKind, satd: bool = False, line: int = 1):
    return rec(Locality.HEADER, kind, satd=satd, line=line)


# -- n_locality ---------------------------------------------------------------

def test_locality_one_satd_header_among_four():
    records = [header(HeaderKind.CLASS, satd=True)] + [header(HeaderKind.FUNCTION)] * 3
    assert n_locality(records, Locality.HEADER) == 0.25


def test_locality_empty_denominator_is_undefined():
    assert n_locality([], Locality.HEADER) is None
    assert n_locality([header(HeaderKind.CLASS)], Locality.NON_HEADER) is None


def test_locality_two_of_seven():
    records = [rec(satd=True), rec(satd=True)] + [rec()] * 5
    assert n_locality(records, Locality.NON_HEADER) == 2 / 7


# -- n_context ------------------------------------------------------------------

def test_context_three_cndtnl_one_satd():
    records = [
        rec(succ=C.CNDTNL, satd=True),
        rec(succ=C.CNDTNL),
        rec(succ=C.CNDTNL),
        rec(succ=C.BRNCH, satd=True),
    ]
    assert n_context(records, "succeeding", C.CNDTNL) == 1 / 3
    assert n_context(records, "succeeding", C.BRNCH) == 1.0


def test_context_no_comments_with_key_is_undefined():
    assert n_context([rec(prec=C.EXPR)], "preceding", C.LOOPS) is None


def test_context_header_kind_keys():
    records = [
        header(HeaderKind.CLASS, satd=True),
        header(HeaderKind.CLASS),
        header(HeaderKind.FILE),
        rec(succ=C.DEFN, satd=True),
    ]
    assert n_context(records, "succeeding", HeaderKind.CLASS) == 0.5
    assert n_context(records, "succeeding", HeaderKind.FILE) == 0.0
    assert n_context(records, "succeeding", HeaderKind.ENUM) is None


def test_context_header_kind_with_preceding_direction_is_usage_error():
    with pytest.raises(ValueError):
        n_context([header(HeaderKind.CLASS)], "preceding", HeaderKind.CLASS)


def test_context_headers_never_count_in_category_ratios():
    records = [header(HeaderKind.CLASS, satd=True), rec(succ=C.DEFN)]
    assert n_context(records, "succeeding", C.DEFN) == 0.0


def test_excluded_bucket_counts_misc_and_missing():
    records = [
        rec(succ=C.EXPR, satd=True),
        rec(succ=C.MISC, satd=True),
        rec(succ=None),
        header(HeaderKind.CLASS, satd=True),
    ]
    breakdown = context_breakdown(records, "succeeding")
    assert breakdown.excluded_cmt == 2
    assert breakdown.excluded_satd == 1
    assert breakdown.ratios[C.EXPR] == 1.0


def test_conservation_of_nonheader_satd():
    records = [
        rec(succ=C.EXPR, satd=True),
        rec(succ=C.DEFN, satd=True),
        rec(succ=C.DEFN, satd=True),
        rec(succ=C.MISC, satd=True),
        rec(succ=None, satd=True),
        rec(succ=C.LOOPS),
        header(HeaderKind.CLASS, satd=True),
    ]
    nonheader = [r for r in records if r.locality is Locality.NON_HEADER]
    total_satd = sum(1 for r in nonheader if r.label.satd)
    per_category = 0
    for cat in CONTEXT_CATEGORIES:
        per_category += sum(
            1
            for r in nonheader
            if r.label.satd and r.succeeding and r.succeeding[1] is cat
        )
    breakdown = context_breakdown(records, "succeeding")
    assert per_category + breakdown.excluded_satd == total_satd == 5


# -- n_pattern --------------------------------------------------------------------

def test_pattern_degenerate_corpus_single_cell():
    records = [rec(prec=C.BRNCH, succ=C.DEFN, satd=True) for _ in range(5)]
    assert n_pattern(records, C.BRNCH, C.DEFN) == 1.0
    assert n_pattern(records, C.DECL, C.DECL) == 0.0


def test_pattern_quarter_cell():
    records = [
        rec(prec=C.DECL, succ=C.DECL, satd=True),
        rec(prec=C.EXPR, succ=C.DEFN, satd=True),
        rec(prec=C.BRNCH, succ=C.DEFN, satd=True),
        rec(prec=C.CNDTNL, succ=C.EXPR, satd=True),
    ]
    assert n_pattern(records, C.DECL, C.DECL) == 0.25


def test_pattern_excludes_misc_none_nonsatd_and_headers():
    records = [
        rec(prec=C.DECL, succ=C.DECL, satd=True),
        rec(prec=C.MISC, succ=C.DECL, satd=True),  # excluded: MISC context
        rec(prec=C.DECL, succ=None, satd=True),  # excluded: boundary
        rec(prec=C.DECL, succ=C.DECL),  # excluded: not SATD
        header(HeaderKind.CLASS, satd=True),  # excluded: header
    ]
    grid, total = pattern_grid(records)
    assert total == 1
    assert grid[(C.DECL, C.DECL)] == 1.0


def test_pattern_grid_sums_to_one():
    records = [
        rec(prec=p, succ=s, satd=True)
        for p in (C.DECL, C.EXPR, C.BRNCH)
        for s in (C.DEFN, C.CNDTNL)
    ] + [rec(prec=C.LOOPS, succ=C.DOC, satd=True)]
    grid, total = pattern_grid(records)
    assert total == 7
    assert abs(sum(grid.values()) - 1.0) <= 1e-9
    assert len(grid) == 64


def test_pattern_with_no_qualifying_records_is_undefined():
    grid, total = pattern_grid([rec(prec=C.DECL, succ=C.DECL)])
    assert grid is None and total == 0
    assert n_pattern([], C.DECL, C.DECL) is None


# -- properties ---------------------------------------------------------------------

def test_scale_invariance_duplicating_records():
    records = [
        rec(prec=C.DECL, succ=C.DEFN, satd=True),
        rec(prec=C.EXPR, succ=C.CNDTNL),
        header(HeaderKind.CLASS, satd=True),
        header(HeaderKind.FUNCTION),
    ]
    doubled = records + records
    ms1, ms2 = metric_set(records), metric_set(doubled)
    assert ms1.n_header == ms2.n_header
    assert ms1.n_nonheader == ms2.n_nonheader
    assert ms1.n_preceding.ratios == ms2.n_preceding.ratios
    assert ms1.n_succeeding.ratios == ms2.n_succeeding.ratios
    assert ms1.header_succeeding == ms2.header_succeeding
    assert ms1.pattern == ms2.pattern


def test_monotonicity_relabeling_never_decreases_density():
    records = [rec(satd=False), rec(satd=True), rec(satd=False)]
    before = n_locality(records, Locality.NON_HEADER)
    relabeled = [records[0].with_label(records[1].label)] + records[1:]
    after = n_locality(relabeled, Locality.NON_HEADER)
    assert after >= before


# -- sizing -----------------------------------------------------------------------

def src_file(code_lines: int, total: int | None = None) -> SourceFile:
    total = total if total is not None else code_lines
    return SourceFile("A.java", (), total, code_lines)


def test_size_fifty_kloc_small():
    kloc, bucket, analyzable = size_project("p", [src_file(50_000)])
    assert (kloc, bucket, analyzable) == (50.0, SizeBucket.SMALL, True)


def test_size_bucket_boundaries_upper_inclusive():
    assert size_bucket(100.0) is SizeBucket.SMALL
    assert size_bucket(100.001) is SizeBucket.MEDIUM
    assert size_bucket(1000.0) is SizeBucket.MEDIUM
    assert size_bucket(1000.001) is SizeBucket.LARGE


def test_sub_kloc_projects_are_small():
    kloc, bucket, analyzable = size_project("p", [src_file(48)])
    assert (kloc, bucket) == (0.048, SizeBucket.SMALL)


def test_mixed_fixture_hand_count():
    files = [src_file(10 - 2, 10), src_file(20 - 4, 20), src_file(30 - 6, 30)]
    kloc, bucket, analyzable = size_project("p", files)
    assert kloc == 0.048
    assert bucket is SizeBucket.SMALL


def test_zero_code_lines_is_unanalyzable():
    kloc, bucket, analyzable = size_project("p", [src_file(0, 5)])
    assert not analyzable and bucket is None
    assert not size_project("p", [])[2]


def test_summarize_project_counts():
    records = [
        header(HeaderKind.CLASS, satd=True),
        header(HeaderKind.FUNCTION),
        rec(satd=True),
        rec(),
        rec(),
    ]
    summary = summarize_project("p", [src_file(500)], records)
    assert (summary.cmt_h, summary.satd_h) == (2, 1)
    assert (summary.cmt_nh, summary.satd_nh) == (3, 1)
    assert summary.kloc == 0.5
    assert summary.bucket is SizeBucket.SMALL


# -- aggregation helpers ---------------------------------------------------------

def test_mean_median_exclude_undefined():
    assert mean_defined([0.2, None, 0.4]) == pytest.approx(0.3)
    assert median_defined([0.2, None, 0.4, 0.9]) == 0.4
    assert mean_defined([None, None]) is None
    assert median_defined([]) is None
