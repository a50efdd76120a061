"""Corpus walking, record persistence, and external label ingestion.

Each project is scanned into two cache files, `<project>.records.jsonl` and
`<project>.summary.json`, with stable field order and `\n` newlines so two
scans over the same corpus are byte-identical. Every record row carries a
content hash; a corrupted cache triggers a full re-scan of that project.
"""

from __future__ import annotations

import csv
import fnmatch
import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .lexer import CommentSpan, SourceFile
from .linker import CommentContextRecord, Locality, link
from .satd import (
    LabelSource,
    Pattern,
    PatternSet,
    SatdKind,
    SatdLabel,
    external_label,
    load_pattern_file,
)
from .scanner import scan_file
from .taxonomy import HeaderKind, StatementCategory

SCHEMA_VERSION = "satd-scope/cache/1"
CACHE_ENV_VAR = "SATD_SCOPE_CACHE"


class ConfigError(ValueError):
    """Invalid configuration; maps to exit status 2 at the CLI."""


class IngestionError(ConfigError):
    """External label table cannot be ingested."""


@dataclass
class CorpusConfig:
    roots: list[str]
    include: list[str] = field(default_factory=lambda: ["**/*.java"])
    exclude: list[str] = field(default_factory=list)
    pattern_file: str | None = None
    use_default_patterns: bool = True
    external_labels: str | None = None
    label_columns: dict[str, str] | None = None
    workers: int = 1
    cache_dir: str | None = None
    roots_are_projects: bool = False
    max_warnings: int = 0

    @staticmethod
    def from_dict(data: dict) -> "CorpusConfig":
        known = {f for f in CorpusConfig.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if not data.get("roots"):
            raise ConfigError("config must list at least one root")
        return CorpusConfig(**data)

    @staticmethod
    def from_file(path: str | Path) -> "CorpusConfig":
        try:
            data = json.loads(Path(path).read_text("utf-8"))
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        return CorpusConfig.from_dict(data)

    def resolved_cache_dir(self) -> Path:
        cache = self.cache_dir or os.environ.get(CACHE_ENV_VAR)
        if not cache:
            raise ConfigError(
                f"no cache directory: set cache_dir in the config or ${CACHE_ENV_VAR}"
            )
        return Path(cache)

    def validate(self) -> None:
        if not self.roots:
            raise ConfigError("config must list at least one root")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        for root in self.roots:
            if not Path(root).is_dir():
                raise ConfigError(f"root does not exist: {root}")
        self.resolved_cache_dir()

    def load_patterns(self) -> PatternSet:
        extra: list[Pattern] = []
        if self.pattern_file:
            try:
                extra = load_pattern_file(self.pattern_file)
            except FileNotFoundError:
                raise ConfigError(f"pattern file not found: {self.pattern_file}") from None
        if self.use_default_patterns:
            base = PatternSet.default()
            return base.extended(extra, version="default+file") if extra else base
        if not extra:
            raise ConfigError("use_default_patterns is false but no pattern_file given")
        return PatternSet(extra, version="file")


# ---------------------------------------------------------------------------
# external labels

_LABEL_COLUMNS = ("project", "file", "line", "label")
LabelKey = tuple[str, str, int]


@dataclass
class ExternalLabelTable:
    rows: dict[LabelKey, SatdKind]
    provenance: dict[LabelKey, str]
    rejects: list[str]

    def __len__(self) -> int:
        return len(self.rows)


def load_external_labels(
    path: str | Path, columns: dict[str, str] | None = None
) -> ExternalLabelTable:
    """Ingest a label CSV with columns project, file, line, label.

    `columns` maps those logical names onto the actual header names of a
    foreign dump. Malformed rows are collected as rejects; duplicate keys and
    missing columns are fatal.
    """
    mapping = {name: name for name in _LABEL_COLUMNS}
    mapping["provenance"] = "provenance"
    if columns:
        mapping.update(columns)
    try:
        handle = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise IngestionError(f"label file not found: {path}") from None
    with handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise IngestionError(f"{path}: label file has no header row")
        missing = [
            mapping[name] for name in _LABEL_COLUMNS if mapping[name] not in reader.fieldnames
        ]
        if missing:
            raise IngestionError(f"{path}: missing required columns: {', '.join(missing)}")
        rows: dict[LabelKey, SatdKind] = {}
        provenance: dict[LabelKey, str] = {}
        rejects: list[str] = []
        duplicates: list[str] = []
        for lineno, row in enumerate(reader, start=2):
            raw_label = (row.get(mapping["label"]) or "").strip()
            raw_line = (row.get(mapping["line"]) or "").strip()
            project = (row.get(mapping["project"]) or "").strip()
            file_path = (row.get(mapping["file"]) or "").strip()
            if raw_label not in SatdKind.__members__:
                rejects.append(f"line {lineno}: unknown label {raw_label!r}")
                continue
            try:
                line_no = int(raw_line)
            except ValueError:
                rejects.append(f"line {lineno}: line number {raw_line!r} is not an integer")
                continue
            if not project or not file_path:
                rejects.append(f"line {lineno}: empty project or file")
                continue
            key = (project, file_path, line_no)
            if key in rows:
                duplicates.append(f"{project}:{file_path}:{line_no}")
                continue
            rows[key] = SatdKind[raw_label]
            provenance[key] = (row.get(mapping["provenance"]) or "").strip()
        if duplicates:
            raise IngestionError(
                f"{path}: duplicate label keys: {', '.join(sorted(duplicates))}"
            )
    return ExternalLabelTable(rows=rows, provenance=provenance, rejects=rejects)


def apply_external_labels(
    records: list[CommentContextRecord], table: ExternalLabelTable
) -> tuple[list[CommentContextRecord], set[LabelKey]]:
    """Apply external labels over rule labels; returns records and matched keys."""
    updated: list[CommentContextRecord] = []
    matched: set[LabelKey] = set()
    for record in records:
        key = (record.project, record.file, record.span.start_line)
        kind = table.rows.get(key)
        if kind is None:
            updated.append(record)
        else:
            matched.add(key)
            updated.append(record.with_label(external_label(kind)))
    return updated, matched


# ---------------------------------------------------------------------------
# record (de)serialization

_ROW_FIELDS = (
    "project", "file", "start_line", "end_line", "start_col", "end_col",
    "style", "trailing", "text", "locality", "header_kind",
    "preceding_kind", "preceding_category", "succeeding_kind",
    "succeeding_category", "satd", "satd_kind", "satd_source", "satd_pattern",
)


def _row_hash(row: dict) -> str:
    payload = json.dumps(row, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def record_to_row(record: CommentContextRecord) -> dict:
    span = record.span
    row = {
        "project": record.project,
        "file": record.file,
        "start_line": span.start_line,
        "end_line": span.end_line,
        "start_col": span.start_col,
        "end_col": span.end_col,
        "style": span.style,
        "trailing": span.trailing,
        "text": span.text,
        "locality": record.locality.value,
        "header_kind": record.header_kind.value if record.header_kind else None,
        "preceding_kind": record.preceding[0] if record.preceding else None,
        "preceding_category": record.preceding[1].value if record.preceding else None,
        "succeeding_kind": record.succeeding[0] if record.succeeding else None,
        "succeeding_category": record.succeeding[1].value if record.succeeding else None,
        "satd": record.label.satd,
        "satd_kind": record.label.kind.value,
        "satd_source": record.label.source.value if record.label.source else None,
        "satd_pattern": record.label.matched_pattern,
    }
    row["hash"] = _row_hash(row)
    return row


class CacheCorruption(Exception):
    pass


def row_to_record(row: dict) -> CommentContextRecord:
    expected = {k: v for k, v in row.items() if k != "hash"}
    if row.get("hash") != _row_hash(expected):
        raise CacheCorruption("record hash mismatch")
    span = CommentSpan(
        style=row["style"],
        start_line=row["start_line"],
        end_line=row["end_line"],
        start_col=row["start_col"],
        end_col=row["end_col"],
        text=row["text"],
        trailing=row["trailing"],
        file=row["file"],
    )
    preceding = (
        (row["preceding_kind"], StatementCategory(row["preceding_category"]))
        if row["preceding_kind"] is not None
        else None
    )
    succeeding = (
        (row["succeeding_kind"], StatementCategory(row["succeeding_category"]))
        if row["succeeding_kind"] is not None
        else None
    )
    source = LabelSource(row["satd_source"]) if row["satd_source"] else None
    label = SatdLabel(
        satd=row["satd"],
        kind=SatdKind(row["satd_kind"]),
        source=source,
        matched_pattern=row["satd_pattern"],
    )
    return CommentContextRecord(
        file=row["file"],
        span=span,
        locality=Locality(row["locality"]),
        header_kind=HeaderKind(row["header_kind"]) if row["header_kind"] else None,
        preceding=preceding,
        succeeding=succeeding,
        label=label,
        project=row["project"],
    )


def _dump_json_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# scanning

@dataclass
class ProjectScan:
    summary_row: dict
    records: list[CommentContextRecord]
    sources: list[SourceFile]
    warnings: list[str]
    reused: bool


@dataclass
class ScanReport:
    cache_dir: str
    projects: list[dict]  # summary rows, scan order
    warnings: list[str]
    unmatched_labels: list[str]
    label_rejects: list[str]
    record_count: int


def discover_projects(config: CorpusConfig) -> list[tuple[str, Path]]:
    """(project id, directory) pairs; project identity is the directory name."""
    projects: list[tuple[str, Path]] = []
    seen: set[str] = set()
    for root in config.roots:
        root_path = Path(root)
        if not root_path.is_dir():
            raise ConfigError(f"root does not exist: {root}")
        candidates = (
            [root_path]
            if config.roots_are_projects
            else sorted((p for p in root_path.iterdir() if p.is_dir()), key=lambda p: p.name)
        )
        for directory in candidates:
            name = directory.name
            if name in seen:
                raise ConfigError(f"duplicate project name across roots: {name}")
            seen.add(name)
            projects.append((name, directory))
    if not projects:
        raise ConfigError("no projects found under the configured roots")
    return projects


def project_files(config: CorpusConfig, directory: Path) -> list[tuple[str, Path]]:
    """Sorted (relative posix path, absolute path) pairs for one project."""
    selected: dict[str, Path] = {}
    for pattern in config.include:
        for path in directory.glob(pattern):
            if not path.is_file() or path.suffix != JAVA_SUFFIX:
                continue
            rel = path.relative_to(directory).as_posix()
            if any(fnmatch.fnmatch(rel, pat) for pat in config.exclude):
                continue
            selected[rel] = path
    return sorted(selected.items())


JAVA_SUFFIX = ".java"


def _config_fingerprint(config: CorpusConfig, patterns: PatternSet) -> str:
    material = {
        "include": sorted(config.include),
        "exclude": sorted(config.exclude),
        "patterns": [(p.id, p.mode, p.text) for p in patterns.patterns],
        "labels": None,
    }
    if config.external_labels:
        try:
            digest = hashlib.sha256(Path(config.external_labels).read_bytes()).hexdigest()
        except OSError:
            digest = "unreadable"
        material["labels"] = digest
    payload = json.dumps(material, ensure_ascii=False, separators=(",", ":"), sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _file_stamp(path: Path) -> dict:
    stat = path.stat()
    return {"size": stat.st_size, "mtime_ns": stat.st_mtime_ns}


def _scan_one_file(args: tuple[str, Path]) -> tuple[str, object]:
    rel, path = args
    try:
        return rel, scan_file(path, display_path=rel)
    except OSError as exc:
        return rel, exc


def scan_project(
    project: str,
    directory: Path,
    config: CorpusConfig,
    patterns: PatternSet,
    table: ExternalLabelTable | None,
    fingerprint: str,
) -> ProjectScan:
    from .metrics import summarize_project

    files = project_files(config, directory)
    warnings: list[str] = []
    stamps = {rel: _file_stamp(path) for rel, path in files}

    cache_dir = config.resolved_cache_dir()
    cached = _try_reuse(cache_dir, project, stamps, fingerprint)
    if cached is not None:
        summary_row, records = cached
        return ProjectScan(summary_row, records, [], [], reused=True)

    if config.workers > 1 and len(files) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            scans = list(pool.map(_scan_one_file, files))
    else:
        scans = [_scan_one_file(f) for f in files]

    sources: list[SourceFile] = []
    records: list[CommentContextRecord] = []
    for rel, outcome in scans:
        if isinstance(outcome, Exception):
            warnings.append(f"{project}/{rel}: unreadable: {outcome}")
            continue
        sources.append(outcome.source)
        warnings.extend(f"{project}/{d}" for d in outcome.diagnostics)
        records.extend(link(outcome, patterns, project))
    records.sort(key=lambda r: (r.file, r.span.start_line))

    if table is not None:
        records, _ = apply_external_labels(records, table)

    summary = summarize_project(project, sources, records)
    if not summary.analyzable:
        warnings.append(f"{project}: unanalyzable (no code lines)")
    summary_row = {
        "schema": SCHEMA_VERSION,
        "project": project,
        "fingerprint": fingerprint,
        "kloc": summary.kloc,
        "bucket": summary.bucket.value if summary.bucket else None,
        "analyzable": summary.analyzable,
        "file_count": summary.file_count,
        "line_count": summary.line_count,
        "code_line_count": summary.code_line_count,
        "cmt_h": summary.cmt_h,
        "satd_h": summary.satd_h,
        "cmt_nh": summary.cmt_nh,
        "satd_nh": summary.satd_nh,
        "files": [
            {"path": rel, **stamps[rel]}
            for rel, _ in files
        ],
        "warnings": warnings,
    }
    return ProjectScan(summary_row, records, sources, warnings, reused=False)


def _records_path(cache_dir: Path, project: str) -> Path:
    return cache_dir / f"{project}.records.jsonl"


def _summary_path(cache_dir: Path, project: str) -> Path:
    return cache_dir / f"{project}.summary.json"


def _try_reuse(
    cache_dir: Path, project: str, stamps: dict[str, dict], fingerprint: str
) -> tuple[dict, list[CommentContextRecord]] | None:
    summary_path = _summary_path(cache_dir, project)
    records_path = _records_path(cache_dir, project)
    if not summary_path.is_file() or not records_path.is_file():
        return None
    try:
        summary_row = json.loads(summary_path.read_text("utf-8"))
        if summary_row.get("schema") != SCHEMA_VERSION:
            return None
        if summary_row.get("fingerprint") != fingerprint:
            return None
        cached_stamps = {
            f["path"]: {"size": f["size"], "mtime_ns": f["mtime_ns"]}
            for f in summary_row.get("files", [])
        }
        if cached_stamps != stamps:
            return None
        records = load_records(records_path)
    except (json.JSONDecodeError, KeyError, ValueError, CacheCorruption, OSError):
        return None
    return summary_row, records


def load_records(records_path: Path) -> list[CommentContextRecord]:
    """Parse a records cache, verifying every row hash."""
    records: list[CommentContextRecord] = []
    with open(records_path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                row = json.loads(raw)
            except json.JSONDecodeError:
                raise CacheCorruption(f"{records_path}:{lineno}: not valid JSON") from None
            records.append(row_to_record(row))
    return records


def write_project_cache(cache_dir: Path, scan: ProjectScan) -> None:
    project = scan.summary_row["project"]
    cache_dir.mkdir(parents=True, exist_ok=True)
    with open(_records_path(cache_dir, project), "w", encoding="utf-8", newline="\n") as out:
        for record in scan.records:
            out.write(_dump_json_line(record_to_row(record)))
    with open(_summary_path(cache_dir, project), "w", encoding="utf-8", newline="\n") as out:
        out.write(json.dumps(scan.summary_row, ensure_ascii=False, indent=2) + "\n")


def scan_corpus(config: CorpusConfig) -> ScanReport:
    """Scan every project under the configured roots into the cache."""
    config.validate()
    patterns = config.load_patterns()
    table = (
        load_external_labels(config.external_labels, config.label_columns)
        if config.external_labels
        else None
    )
    fingerprint = _config_fingerprint(config, patterns)
    cache_dir = config.resolved_cache_dir()

    projects = discover_projects(config)
    summaries: list[dict] = []
    warnings: list[str] = []
    record_index: set[LabelKey] = set()
    record_count = 0
    for project, directory in projects:
        scan = scan_project(project, directory, config, patterns, table, fingerprint)
        if not scan.reused:
            write_project_cache(cache_dir, scan)
        summaries.append(scan.summary_row)
        warnings.extend(scan.summary_row.get("warnings", []))
        record_count += len(scan.records)
        if table is not None:
            record_index.update(
                (r.project, r.file, r.span.start_line) for r in scan.records
            )

    unmatched = []
    rejects = []
    if table is not None:
        unmatched = [
            f"{p}:{f}:{line}" for (p, f, line) in sorted(table.rows) if (p, f, line) not in record_index
        ]
        rejects = list(table.rejects)
    return ScanReport(
        cache_dir=str(cache_dir),
        projects=summaries,
        warnings=warnings,
        unmatched_labels=unmatched,
        label_rejects=rejects,
        record_count=record_count,
    )


def load_corpus(cache_dir: str | Path) -> list[tuple[dict, list[CommentContextRecord]]]:
    """Load every cached project (summary row, records), sorted by project."""
    cache = Path(cache_dir)
    if not cache.is_dir():
        raise ConfigError(
            f"cache directory not found: {cache}; run `satd-scope scan --config <path>` first"
        )
    summaries = sorted(cache.glob("*.summary.json"))
    if not summaries:
        raise ConfigError(
            f"no project caches under {cache}; run `satd-scope scan --config <path>` first"
        )
    loaded = []
    for summary_path in summaries:
        summary_row = json.loads(summary_path.read_text("utf-8"))
        project = summary_row["project"]
        records_path = _records_path(cache, project)
        if not records_path.is_file():
            raise ConfigError(
                f"records cache missing for {project}; run `satd-scope scan --config <path>` again"
            )
        try:
            records = load_records(records_path)
        except CacheCorruption as exc:
            raise ConfigError(
                f"cache for {project} is corrupt ({exc}); run `satd-scope scan --config <path>` again"
            ) from None
        loaded.append((summary_row, records))
    return loaded
