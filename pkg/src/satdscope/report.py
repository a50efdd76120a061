"""Analysis outputs and result tables.

`analyze_caches` turns scanned caches into `metrics.json` and `tests.json`.
`build_bundle` derives the result tables from those files; renderers write
markdown, per-table CSVs, and `report.json`. The JSON bundle carries every
number at full precision; markdown and CSV render the same values rounded
(percentages to 2 decimals, means/medians to 3, p-values below 0.001 as
"<0.001"). Rendering is pure: the same inputs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .corpus import ConfigError, load_corpus
from .metrics import (
    MetricSet,
    ProjectSummary,
    SizeBucket,
    mean_defined,
    median_defined,
    metric_set,
)
from .stats import (
    ComparisonOutcome,
    PlanEntry,
    ProjectMetrics,
    hypothesis_suite,
    parse_plan,
)
from .taxonomy import CONTEXT_CATEGORIES, HEADER_KINDS

METRICS_SCHEMA = "satd-scope/metrics/1"
TESTS_SCHEMA = "satd-scope/tests/1"
REPORT_SCHEMA = "satd-scope/report/1"

BUCKET_ORDER = ("SMALL", "MEDIUM", "LARGE")
BUCKET_LABELS = {"SMALL": "1-100", "MEDIUM": "100-1000", "LARGE": ">1000"}

CSV_TABLES = (
    "localization",
    "tests",
    "header_ns",
    "nonheader_np",
    "nonheader_ns",
    "pattern_small",
    "pattern_medium",
    "pattern_large",
)


def default_plan() -> list[PlanEntry]:
    """Locality comparisons (non-header vs header) per bucket and overall."""
    entries = [
        PlanEntry(f"rq1-{bucket.lower()}", "n_locality", "NON_HEADER", "HEADER", bucket)
        for bucket in BUCKET_ORDER
    ]
    entries.append(PlanEntry("rq1-all", "n_locality", "NON_HEADER", "HEADER", "ALL"))
    return entries


def _summary_from_row(row: dict) -> ProjectSummary:
    return ProjectSummary(
        project=row["project"],
        kloc=row["kloc"],
        bucket=SizeBucket(row["bucket"]) if row["bucket"] else None,
        analyzable=row["analyzable"],
        file_count=row["file_count"],
        line_count=row["line_count"],
        code_line_count=row["code_line_count"],
        cmt_h=row["cmt_h"],
        satd_h=row["satd_h"],
        cmt_nh=row["cmt_nh"],
        satd_nh=row["satd_nh"],
    )


def _project_dict(row: dict, ms: MetricSet) -> dict:
    return {
        "project": row["project"],
        "kloc": row["kloc"],
        "bucket": row["bucket"],
        "analyzable": row["analyzable"],
        "file_count": row["file_count"],
        "line_count": row["line_count"],
        "code_line_count": row["code_line_count"],
        "cmt_h": row["cmt_h"],
        "satd_h": row["satd_h"],
        "cmt_nh": row["cmt_nh"],
        "satd_nh": row["satd_nh"],
        "n_header": ms.n_header,
        "n_nonheader": ms.n_nonheader,
        "n_preceding": {c.value: ms.n_preceding.ratios[c] for c in CONTEXT_CATEGORIES},
        "n_preceding_excluded": {
            "cmt": ms.n_preceding.excluded_cmt,
            "satd": ms.n_preceding.excluded_satd,
        },
        "n_succeeding": {c.value: ms.n_succeeding.ratios[c] for c in CONTEXT_CATEGORIES},
        "n_succeeding_excluded": {
            "cmt": ms.n_succeeding.excluded_cmt,
            "satd": ms.n_succeeding.excluded_satd,
        },
        "header_succeeding": {k.value: ms.header_succeeding[k] for k in HEADER_KINDS},
        "pattern": (
            {f"{p.value}|{s.value}": v for (p, s), v in ms.pattern.items()}
            if ms.pattern is not None
            else None
        ),
        "pattern_total": ms.pattern_total,
    }


def _outcome_dict(outcome: ComparisonOutcome, alpha: float) -> dict:
    entry = outcome.entry
    base = {
        "name": entry.name,
        "metric": entry.metric,
        "group_a": entry.group_a,
        "group_b": entry.group_b,
        "bucket": entry.bucket,
        "skipped": outcome.skipped_reason,
    }
    if outcome.result is None:
        base.update(
            u_statistic=None, p_value=None, r=None, abs_r=None,
            effect_label=None, n1=None, n2=None, method=None, significant=None,
        )
    else:
        res = outcome.result
        base.update(
            u_statistic=res.u_statistic,
            p_value=res.p_value,
            r=res.r,
            abs_r=abs(res.r),
            effect_label=res.effect_label.value,
            n1=res.n1,
            n2=res.n2,
            method=res.method,
            significant=res.p_value < alpha,
        )
    return base


def analyze_caches(
    cache_dir: str | Path,
    plan_path: str | Path | None = None,
    alpha: float = 0.001,
    out_dir: str | Path | None = None,
) -> tuple[Path, Path]:
    """Compute per-project metrics and planned tests; write the two JSONs."""
    loaded = load_corpus(cache_dir)
    if plan_path is not None:
        try:
            lines = Path(plan_path).read_text("utf-8").splitlines()
        except FileNotFoundError:
            raise ConfigError(f"plan file not found: {plan_path}") from None
        plan = parse_plan(lines)
    else:
        plan = default_plan()

    project_metrics: list[ProjectMetrics] = []
    project_dicts: list[dict] = []
    for summary_row, records in loaded:
        ms = metric_set(records)
        project_metrics.append(ProjectMetrics(_summary_from_row(summary_row), ms))
        project_dicts.append(_project_dict(summary_row, ms))

    outcomes = hypothesis_suite(project_metrics, plan, alpha=alpha)

    metrics_data = {"schema": METRICS_SCHEMA, "projects": project_dicts}
    tests_data = {
        "schema": TESTS_SCHEMA,
        "alpha": alpha,
        "comparisons": [_outcome_dict(o, alpha) for o in outcomes],
    }
    target = Path(out_dir) if out_dir is not None else Path(cache_dir)
    target.mkdir(parents=True, exist_ok=True)
    metrics_path = target / "metrics.json"
    tests_path = target / "tests.json"
    _write_json(metrics_path, metrics_data)
    _write_json(tests_path, tests_data)
    return metrics_path, tests_path


def _write_json(path: Path, data: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as out:
        out.write(json.dumps(data, ensure_ascii=False, indent=2) + "\n")


# ---------------------------------------------------------------------------
# report bundle

def _bucket_projects(projects: list[dict]) -> dict[str, list[dict]]:
    by_bucket: dict[str, list[dict]] = {b: [] for b in BUCKET_ORDER}
    for p in projects:
        if p["analyzable"] and p["bucket"] in by_bucket:
            by_bucket[p["bucket"]].append(p)
    return by_bucket


def _share_table(
    projects_by_bucket: dict[str, list[dict]], field: str, keys: list[str]
) -> dict:
    """Cross-project mean ratios per key, and those means normalized to 100%."""
    means: dict[str, dict[str, float | None]] = {}
    shares: dict[str, dict[str, float | None]] = {}
    for bucket, projects in projects_by_bucket.items():
        bucket_means = {
            key: mean_defined([p[field][key] for p in projects]) for key in keys
        }
        total = sum(v for v in bucket_means.values() if v is not None)
        bucket_shares = {
            key: (None if v is None or total == 0 else 100.0 * v / total)
            for key, v in bucket_means.items()
        }
        means[bucket] = bucket_means
        shares[bucket] = bucket_shares
    return {"means": means, "shares": shares}


def _pattern_table(projects: list[dict]) -> dict:
    cells: dict[str, float] = {}
    grids = [p["pattern"] for p in projects if p["pattern"] is not None]
    if grids:
        for key in grids[0]:
            cells[key] = 100.0 * sum(g[key] for g in grids) / len(grids)
    ranked = sorted(cells.items(), key=lambda kv: (-kv[1], kv[0]))
    top = [
        {"preceding": k.split("|")[0], "succeeding": k.split("|")[1], "pct": v}
        for k, v in ranked[:3]
        if v > 0
    ]
    return {"projects": len(grids), "cells": cells, "top": top}


def build_bundle(metrics_data: dict, tests_data: dict | None) -> dict:
    """Full-precision report bundle; every rendered number comes from here."""
    projects = metrics_data["projects"]
    by_bucket = _bucket_projects(projects)
    buckets = [b for b in BUCKET_ORDER if by_bucket[b]]
    tests = tests_data.get("comparisons", []) if tests_data else []
    alpha = tests_data.get("alpha") if tests_data else None

    localization = []
    for bucket in buckets:
        rows = by_bucket[bucket]
        p_value = next(
            (
                t["p_value"]
                for t in tests
                if t["metric"] == "n_locality" and t["bucket"] == bucket and not t["skipped"]
            ),
            None,
        )
        localization.append(
            {
                "bucket": bucket,
                "projects": len(rows),
                "mean_n_header": mean_defined([p["n_header"] for p in rows]),
                "median_n_header": median_defined([p["n_header"] for p in rows]),
                "mean_n_nonheader": mean_defined([p["n_nonheader"] for p in rows]),
                "median_n_nonheader": median_defined([p["n_nonheader"] for p in rows]),
                "p_value": p_value,
            }
        )

    category_keys = [c.value for c in CONTEXT_CATEGORIES]
    header_keys = [k.value for k in HEADER_KINDS]
    present = {b: by_bucket[b] for b in buckets}

    diagnostics = {
        "unanalyzable_projects": [p["project"] for p in projects if not p["analyzable"]],
        "excluded_contexts": {
            bucket: {
                "preceding": {
                    "cmt": sum(p["n_preceding_excluded"]["cmt"] for p in rows),
                    "satd": sum(p["n_preceding_excluded"]["satd"] for p in rows),
                },
                "succeeding": {
                    "cmt": sum(p["n_succeeding_excluded"]["cmt"] for p in rows),
                    "satd": sum(p["n_succeeding_excluded"]["satd"] for p in rows),
                },
            }
            for bucket, rows in present.items()
        },
    }

    return {
        "schema": REPORT_SCHEMA,
        "alpha": alpha,
        "buckets": buckets,
        "localization": localization,
        "header_succeeding": _share_table(present, "header_succeeding", header_keys),
        "nonheader_preceding": _share_table(present, "n_preceding", category_keys),
        "nonheader_succeeding": _share_table(present, "n_succeeding", category_keys),
        "patterns": {bucket: _pattern_table(rows) for bucket, rows in present.items()},
        "tests": tests,
        "diagnostics": diagnostics,
    }


# ---------------------------------------------------------------------------
# rendering

def _fmt(value: float | None, places: int) -> str:
    return "" if value is None else f"{value:.{places}f}"


def _fmt_p(p: float | None) -> str:
    if p is None:
        return ""
    return "<0.001" if p < 0.001 else f"{p:.3f}"


def _md_table(headers: list[str], rows: list[list[str]]) -> list[str]:
    lines = ["| " + " | ".join(headers) + " |"]
    lines.append("|" + "|".join(" --- " for _ in headers) + "|")
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return lines


def _localization_rows(bundle: dict) -> tuple[list[str], list[list[str]]]:
    headers = [
        "Project Size (KLOC)", "Projects", "Header Mean", "Header Median",
        "Non-Header Mean", "Non-Header Median", "p-value",
    ]
    rows = [
        [
            BUCKET_LABELS[entry["bucket"]],
            str(entry["projects"]),
            _fmt(entry["mean_n_header"], 3),
            _fmt(entry["median_n_header"], 3),
            _fmt(entry["mean_n_nonheader"], 3),
            _fmt(entry["median_n_nonheader"], 3),
            _fmt_p(entry["p_value"]),
        ]
        for entry in bundle["localization"]
    ]
    return headers, rows


def _share_rows(bundle: dict, table: str, keys: list[str]) -> tuple[list[str], list[list[str]]]:
    buckets = bundle["buckets"]
    headers = ["Category"] + [BUCKET_LABELS[b] for b in buckets]
    shares = bundle[table]["shares"]
    rows = []
    if buckets:
        for key in keys:
            rows.append([key] + [_fmt(shares[b][key], 2) for b in buckets])
    return headers, rows


def _pattern_rows(bundle: dict, bucket: str) -> tuple[list[str], list[list[str]]]:
    categories = [c.value for c in CONTEXT_CATEGORIES]
    headers = ["Succeeding \\ Preceding"] + categories
    table = bundle["patterns"].get(bucket)
    rows = []
    if table and table["cells"]:
        for succ in categories:
            rows.append(
                [succ] + [_fmt(table["cells"][f"{prec}|{succ}"], 2) for prec in categories]
            )
    return headers, rows


def _tests_rows(bundle: dict) -> tuple[list[str], list[list[str]]]:
    headers = [
        "Comparison", "Bucket", "n1", "n2", "U-Statistic", "p-value",
        "|R| Coefficient", "Effect Size", "Method",
    ]
    rows = []
    for t in bundle["tests"]:
        if t["skipped"]:
            rows.append(
                [t["name"], t["bucket"], "", "", "", "", "", f"skipped: {t['skipped']}", ""]
            )
        else:
            rows.append(
                [
                    t["name"],
                    t["bucket"],
                    str(t["n1"]),
                    str(t["n2"]),
                    f"{t['u_statistic']:.1f}",
                    _fmt_p(t["p_value"]),
                    _fmt(t["abs_r"], 3),
                    t["effect_label"],
                    t["method"],
                ]
            )
    return headers, rows


def render_markdown(bundle: dict) -> str:
    lines: list[str] = []
    lines.append("# SATD context report")
    lines.append("")
    lines.append(
        "Normalized SATD densities by comment locality and statement context. "
        "Context tables show cross-project mean densities normalized to "
        "percentage shares per size bucket; pattern tables show intra-SATD "
        "shares and sum to 100%. Effect sizes are rank-biserial; the "
        "\"medium\" label corresponds to the moderate range."
    )
    lines.append("")

    lines.append("## SATD localization distribution")
    lines.append("")
    headers, rows = _localization_rows(bundle)
    lines.extend(_md_table(headers, rows))
    lines.append("")

    lines.append("## Header SATD by succeeding construct (%)")
    lines.append("")
    headers, rows = _share_rows(bundle, "header_succeeding", [k.value for k in HEADER_KINDS])
    lines.extend(_md_table(headers, rows))
    lines.append("")

    categories = [c.value for c in CONTEXT_CATEGORIES]
    lines.append("## Non-header SATD by preceding statement (%)")
    lines.append("")
    headers, rows = _share_rows(bundle, "nonheader_preceding", categories)
    lines.extend(_md_table(headers, rows))
    lines.append("")

    lines.append("## Non-header SATD by succeeding statement (%)")
    lines.append("")
    headers, rows = _share_rows(bundle, "nonheader_succeeding", categories)
    lines.extend(_md_table(headers, rows))
    lines.append("")

    for bucket in bundle["buckets"]:
        lines.append(f"## Non-header SATD pattern frequency (%), {BUCKET_LABELS[bucket]} KLOC")
        lines.append("")
        headers, rows = _pattern_rows(bundle, bucket)
        lines.extend(_md_table(headers, rows))
        lines.append("")
        top = bundle["patterns"][bucket]["top"]
        if top:
            ranked = ", ".join(
                f"{t['preceding']} -> {t['succeeding']} ({t['pct']:.2f}%)" for t in top
            )
            lines.append(f"Top patterns: {ranked}")
            lines.append("")

    lines.append("## Hypothesis tests")
    lines.append("")
    if bundle["alpha"] is not None:
        lines.append(f"Significance level: {bundle['alpha']}")
        lines.append("")
    headers, rows = _tests_rows(bundle)
    lines.extend(_md_table(headers, rows))
    lines.append("")

    diag = bundle["diagnostics"]
    lines.append("## Diagnostics")
    lines.append("")
    lines.append(f"Unanalyzable projects: {len(diag['unanalyzable_projects'])}")
    for bucket, info in diag["excluded_contexts"].items():
        lines.append(
            f"- {BUCKET_LABELS[bucket]} KLOC: excluded contexts "
            f"(MISC or file boundary): preceding {info['preceding']['cmt']} comments "
            f"({info['preceding']['satd']} SATD), succeeding {info['succeeding']['cmt']} "
            f"comments ({info['succeeding']['satd']} SATD)"
        )
    lines.append("")
    return "\n".join(lines)


def _csv_text(headers: list[str], rows: list[list[str]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    return out.getvalue()


def render_csvs(bundle: dict) -> dict[str, str]:
    categories = [c.value for c in CONTEXT_CATEGORIES]
    tables: dict[str, str] = {}
    headers, rows = _localization_rows(bundle)
    tables["localization.csv"] = _csv_text(headers, rows)
    headers, rows = _tests_rows(bundle)
    tables["tests.csv"] = _csv_text(headers, rows)
    headers, rows = _share_rows(bundle, "header_succeeding", [k.value for k in HEADER_KINDS])
    tables["header_ns.csv"] = _csv_text(headers, rows)
    headers, rows = _share_rows(bundle, "nonheader_preceding", categories)
    tables["nonheader_np.csv"] = _csv_text(headers, rows)
    headers, rows = _share_rows(bundle, "nonheader_succeeding", categories)
    tables["nonheader_ns.csv"] = _csv_text(headers, rows)
    for bucket, name in (
        ("SMALL", "pattern_small.csv"),
        ("MEDIUM", "pattern_medium.csv"),
        ("LARGE", "pattern_large.csv"),
    ):
        headers, rows = _pattern_rows(bundle, bucket)
        tables[name] = _csv_text(headers, rows)
    return tables


def render_reports(
    metrics_path: str | Path,
    tests_path: str | Path | None,
    out_dir: str | Path,
    formats: list[str],
) -> list[Path]:
    """Render the requested formats; returns the files written."""
    try:
        metrics_data = json.loads(Path(metrics_path).read_text("utf-8"))
    except FileNotFoundError:
        raise ConfigError(
            f"metrics file not found: {metrics_path}; run `satd-scope analyze` first"
        ) from None
    tests_data = None
    if tests_path is not None and Path(tests_path).is_file():
        tests_data = json.loads(Path(tests_path).read_text("utf-8"))
    bundle = build_bundle(metrics_data, tests_data)

    unknown = set(formats) - {"md", "csv", "json"}
    if unknown:
        raise ConfigError(f"unknown report formats: {', '.join(sorted(unknown))}")

    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if "json" in formats:
        path = target / "report.json"
        _write_json(path, bundle)
        written.append(path)
    if "md" in formats:
        path = target / "report.md"
        with open(path, "w", encoding="utf-8", newline="\n") as out:
            out.write(render_markdown(bundle))
        written.append(path)
    if "csv" in formats:
        for name, text in render_csvs(bundle).items():
            path = target / name
            with open(path, "w", encoding="utf-8", newline="\n") as out:
                out.write(text)
            written.append(path)
    return written
