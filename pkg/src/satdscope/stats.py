"""Nonparametric test machinery: normality screen, two-group comparison,
effect size.

The Mann-Whitney U here is U1 = #{(i, j): a_i > b_j} + 0.5 * #ties. The
two-sided p is exact (full enumeration of rank assignments) for groups of
at most 10 without ties, otherwise a normal approximation with tie-corrected
variance and continuity correction. Both paths are deterministic; p-values
are bit-reproducible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

from .metrics import MetricSet, ProjectSummary, SizeBucket
from .taxonomy import HeaderKind, StatementCategory

EXACT_LIMIT = 10

AD_CRITICAL_VALUES = {
    0.15: 0.576,
    0.10: 0.656,
    0.05: 0.787,
    0.025: 0.918,
    0.01: 1.092,
}


class DegenerateSampleError(ValueError):
    """Sample too small or without variance for the requested test."""


class PlanError(ValueError):
    """A hypothesis plan entry does not name a known comparison."""


class EffectLabel(enum.Enum):
    NEGLIGIBLE = "negligible"
    SMALL = "small"
    MEDIUM = "medium"
    LARGE = "large"


@dataclass(frozen=True)
class NormalityResult:
    a_squared: float
    adjusted: float
    critical: float
    level: float
    reject: bool


@dataclass(frozen=True)
class TestResult:
    name: str
    u_statistic: float
    p_value: float
    r: float
    effect_label: EffectLabel
    n1: int
    n2: int
    method: str  # "exact" | "normal_approx"


def _norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _norm_sf(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def average_ranks(values: list[float]) -> list[float]:
    """Fractional ranking: ties get the mean of the ranks they cover."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


@lru_cache(maxsize=None)
def _u_count(m: int, k: int, u: int) -> int:
    """Number of rank arrangements of m 'a' and k 'b' values with U == u."""
    if u < 0:
        return 0
    if m == 0 or k == 0:
        return 1 if u == 0 else 0
    return _u_count(m - 1, k, u - k) + _u_count(m, k - 1, u)


def _exact_two_sided_p(u1: int, n1: int, n2: int) -> float:
    total = math.comb(n1 + n2, n1)
    le = sum(_u_count(n1, n2, u) for u in range(0, u1 + 1))
    ge = sum(_u_count(n1, n2, u) for u in range(u1, n1 * n2 + 1))
    return min(1.0, 2.0 * min(le, ge) / total)


def mann_whitney_u(a: list[float], b: list[float]) -> tuple[float, float, str]:
    """U1 for group a, two-sided p, and which method produced the p."""
    if not a or not b:
        raise ValueError("mann_whitney_u requires two non-empty groups")
    for v in list(a) + list(b):
        if not math.isfinite(v):
            raise ValueError("sample values must be finite")
    n1, n2 = len(a), len(b)
    combined = list(a) + list(b)
    ranks = average_ranks(combined)
    r1 = sum(ranks[:n1])
    u1 = r1 - n1 * (n1 + 1) / 2.0

    has_ties = len(set(combined)) != len(combined)
    if not has_ties and n1 <= EXACT_LIMIT and n2 <= EXACT_LIMIT:
        return u1, _exact_two_sided_p(int(round(u1)), n1, n2), "exact"

    n = n1 + n2
    tie_sum = 0
    for value in set(combined):
        t = combined.count(value)
        tie_sum += t * t * t - t
    variance = (n1 * n2 / 12.0) * ((n + 1) - tie_sum / (n * (n - 1)))
    if variance <= 0:
        return u1, 1.0, "normal_approx"
    mu = n1 * n2 / 2.0
    diff = u1 - mu
    if diff > 0:
        diff -= 0.5
    elif diff < 0:
        diff += 0.5
    z = diff / math.sqrt(variance)
    return u1, min(1.0, 2.0 * _norm_sf(abs(z))), "normal_approx"


def effect_label(r: float) -> EffectLabel:
    magnitude = abs(r)
    if magnitude < 0.1:
        return EffectLabel.NEGLIGIBLE
    if magnitude < 0.24:
        return EffectLabel.SMALL
    if magnitude < 0.37:
        return EffectLabel.MEDIUM
    return EffectLabel.LARGE


def rank_biserial(u1: float, n1: int, n2: int) -> tuple[float, EffectLabel]:
    """r = 2*U1/(n1*n2) - 1: -1 when group a is uniformly smaller, +1 larger."""
    if n1 < 1 or n2 < 1:
        raise ValueError("group sizes must be at least 1")
    if not 0 <= u1 <= n1 * n2:
        raise ValueError(f"U1 must lie in [0, {n1 * n2}], got {u1}")
    r = 2.0 * u1 / (n1 * n2) - 1.0
    return r, effect_label(r)


def anderson_darling(sample: list[float], level: float = 0.05) -> NormalityResult:
    """A-squared against a normal with parameters estimated from the sample.

    Uses the Stephens small-sample adjustment A2 * (1 + 0.75/n + 2.25/n^2)
    against fixed critical values; the raw statistic matches the usual
    reference implementations.
    """
    n = len(sample)
    if n < 8:
        raise DegenerateSampleError(f"need at least 8 observations, got {n}")
    if level not in AD_CRITICAL_VALUES:
        raise ValueError(f"level must be one of {sorted(AD_CRITICAL_VALUES)}")
    mean = math.fsum(sample) / n
    var = math.fsum((x - mean) ** 2 for x in sample) / (n - 1)
    if var <= 0:
        raise DegenerateSampleError("sample variance is zero")
    sd = math.sqrt(var)
    z = sorted((x - mean) / sd for x in sample)
    tiny = 1e-300
    total = 0.0
    for i in range(n):
        lo = max(_norm_cdf(z[i]), tiny)
        hi = max(1.0 - _norm_cdf(z[n - 1 - i]), tiny)
        total += (2 * i + 1) * (math.log(lo) + math.log(hi))
    a_squared = -n - total / n
    adjusted = a_squared * (1.0 + 0.75 / n + 2.25 / (n * n))
    critical = AD_CRITICAL_VALUES[level]
    return NormalityResult(
        a_squared=a_squared,
        adjusted=adjusted,
        critical=critical,
        level=level,
        reject=adjusted > critical,
    )


# ---------------------------------------------------------------------------
# plan-driven comparisons over per-project metric vectors


@dataclass(frozen=True)
class PlanEntry:
    name: str
    metric: str  # n_locality | n_preceding | n_succeeding | header_succeeding
    group_a: str
    group_b: str
    bucket: str  # SMALL | MEDIUM | LARGE | ALL


@dataclass(frozen=True)
class ProjectMetrics:
    summary: ProjectSummary
    metrics: MetricSet


@dataclass(frozen=True)
class ComparisonOutcome:
    entry: PlanEntry
    result: TestResult | None
    skipped_reason: str | None = None


_LOCALITY_SELECTORS = ("HEADER", "NON_HEADER")
_METRICS = ("n_locality", "n_preceding", "n_succeeding", "header_succeeding")
_BUCKETS = ("SMALL", "MEDIUM", "LARGE", "ALL")


def validate_plan_entry(entry: PlanEntry) -> None:
    if entry.metric not in _METRICS:
        raise PlanError(f"unknown metric {entry.metric!r}")
    if entry.bucket not in _BUCKETS:
        raise PlanError(f"unknown bucket {entry.bucket!r}")
    for selector in (entry.group_a, entry.group_b):
        if entry.metric == "n_locality":
            if selector not in _LOCALITY_SELECTORS:
                raise PlanError(f"unknown locality selector {selector!r}")
        elif entry.metric == "header_succeeding":
            if selector not in HeaderKind.__members__:
                raise PlanError(f"unknown header kind {selector!r}")
        else:
            if selector not in StatementCategory.__members__ or selector == "MISC":
                raise PlanError(f"unknown category selector {selector!r}")


def _selector_value(pm: ProjectMetrics, metric: str, selector: str) -> float | None:
    ms = pm.metrics
    if metric == "n_locality":
        return ms.n_header if selector == "HEADER" else ms.n_nonheader
    if metric == "n_preceding":
        return ms.n_preceding.ratios[StatementCategory[selector]]
    if metric == "n_succeeding":
        return ms.n_succeeding.ratios[StatementCategory[selector]]
    if metric == "header_succeeding":
        return ms.header_succeeding[HeaderKind[selector]]
    raise PlanError(f"unknown metric {metric!r}")


def _bucket_filter(projects: list[ProjectMetrics], bucket: str) -> list[ProjectMetrics]:
    analyzable = [p for p in projects if p.summary.analyzable]
    if bucket == "ALL":
        return analyzable
    return [p for p in analyzable if p.summary.bucket is SizeBucket[bucket]]


def metric_vector(
    projects: list[ProjectMetrics], metric: str, selector: str, bucket: str
) -> list[float]:
    """Defined per-project values for one metric slice."""
    values = [
        _selector_value(p, metric, selector) for p in _bucket_filter(projects, bucket)
    ]
    return [v for v in values if v is not None]


def hypothesis_suite(
    projects: list[ProjectMetrics],
    plan: list[PlanEntry],
    alpha: float = 0.001,
) -> list[ComparisonOutcome]:
    """Run every planned comparison; under-filled groups are skipped, not run."""
    outcomes: list[ComparisonOutcome] = []
    for entry in plan:
        validate_plan_entry(entry)
        a = metric_vector(projects, entry.metric, entry.group_a, entry.bucket)
        b = metric_vector(projects, entry.metric, entry.group_b, entry.bucket)
        if len(a) < 2 or len(b) < 2:
            outcomes.append(
                ComparisonOutcome(
                    entry=entry,
                    result=None,
                    skipped_reason=(
                        f"need at least 2 defined values per group, got {len(a)} and {len(b)}"
                    ),
                )
            )
            continue
        u1, p, method = mann_whitney_u(a, b)
        r, label = rank_biserial(u1, len(a), len(b))
        outcomes.append(
            ComparisonOutcome(
                entry=entry,
                result=TestResult(
                    name=entry.name,
                    u_statistic=u1,
                    p_value=p,
                    r=r,
                    effect_label=label,
                    n1=len(a),
                    n2=len(b),
                    method=method,
                ),
            )
        )
    return outcomes


def parse_plan(lines: list[str]) -> list[PlanEntry]:
    """Parse the comparison plan CSV: name,metric,group_a,group_b,bucket."""
    import csv

    rows = list(csv.reader(lines))
    if not rows:
        raise PlanError("plan file is empty")
    header = [c.strip() for c in rows[0]]
    expected = ["name", "metric", "group_a", "group_b", "bucket"]
    if header != expected:
        raise PlanError(f"line 1: expected header {','.join(expected)}, got {','.join(header)}")
    entries: list[PlanEntry] = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 5:
            raise PlanError(f"line {lineno}: expected 5 fields, got {len(row)}")
        entry = PlanEntry(*(c.strip() for c in row))
        try:
            validate_plan_entry(entry)
        except PlanError as exc:
            raise PlanError(f"line {lineno}: {exc}") from None
        entries.append(entry)
    return entries
