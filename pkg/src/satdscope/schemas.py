"""Request/response models for the analysis service."""

from __future__ import annotations

from pydantic import BaseModel, Field

from .corpus import CorpusConfig


class CorpusConfigModel(BaseModel):
    roots: list[str]
    include: list[str] = ["**/*.java"]
    exclude: list[str] = []
    pattern_file: str | None = None
    use_default_patterns: bool = True
    external_labels: str | None = None
    label_columns: dict[str, str] | None = None
    workers: int = Field(default=1, ge=1)
    cache_dir: str | None = None
    roots_are_projects: bool = False
    max_warnings: int = 0

    def to_config(self) -> CorpusConfig:
        return CorpusConfig(**self.model_dump())


class ScanRequest(BaseModel):
    config: CorpusConfigModel | None = None
    config_path: str | None = None


class ProjectSummaryModel(BaseModel):
    project: str
    kloc: float
    bucket: str | None
    analyzable: bool
    file_count: int
    line_count: int
    code_line_count: int
    cmt_h: int
    satd_h: int
    cmt_nh: int
    satd_nh: int


class ScanResponse(BaseModel):
    cache_dir: str
    projects: list[ProjectSummaryModel]
    record_count: int
    warnings: list[str]
    unmatched_labels: list[str]
    label_rejects: list[str]
    max_warnings: int


class AnalyzeRequest(BaseModel):
    cache_dir: str | None = None
    plan_path: str | None = None
    alpha: float = 0.001
    out_dir: str | None = None


class AnalyzeResponse(BaseModel):
    metrics_path: str
    tests_path: str
    projects: int
    comparisons: int
    skipped: int


class ReportRequest(BaseModel):
    metrics_path: str
    tests_path: str | None = None
    out_dir: str
    formats: list[str] = ["md", "csv", "json"]


class ReportResponse(BaseModel):
    written: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str
