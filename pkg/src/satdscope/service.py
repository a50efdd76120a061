"""FastAPI service wrapping the scan/analyze/report pipeline.

Configuration problems surface as HTTP 400 with an {"error": "config", ...}
body; the CLI maps those onto exit status 2. Paths in requests are resolved
on the service host: clients name corpora and caches that live where the
service runs.
"""

from __future__ import annotations

import json
import os

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .corpus import CACHE_ENV_VAR, ConfigError, CorpusConfig, scan_corpus
from .report import analyze_caches, render_reports
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    HealthResponse,
    ProjectSummaryModel,
    ReportRequest,
    ReportResponse,
    ScanRequest,
    ScanResponse,
)
from .stats import PlanError


def create_app() -> FastAPI:
    app = FastAPI(title="satd-scope", version=__version__)

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": "config", "detail": str(exc)})

    @app.exception_handler(PlanError)
    async def _plan_error(request: Request, exc: PlanError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": "config", "detail": str(exc)})

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/scan", response_model=ScanResponse)
    def scan(request: ScanRequest) -> ScanResponse:
        if (request.config is None) == (request.config_path is None):
            raise ConfigError("provide exactly one of config or config_path")
        if request.config_path is not None:
            config = CorpusConfig.from_file(request.config_path)
        else:
            config = request.config.to_config()
        report = scan_corpus(config)
        return ScanResponse(
            cache_dir=report.cache_dir,
            projects=[
                ProjectSummaryModel(
                    project=row["project"],
                    kloc=row["kloc"],
                    bucket=row["bucket"],
                    analyzable=row["analyzable"],
                    file_count=row["file_count"],
                    line_count=row["line_count"],
                    code_line_count=row["code_line_count"],
                    cmt_h=row["cmt_h"],
                    satd_h=row["satd_h"],
                    cmt_nh=row["cmt_nh"],
                    satd_nh=row["satd_nh"],
                )
                for row in report.projects
            ],
            record_count=report.record_count,
            warnings=report.warnings,
            unmatched_labels=report.unmatched_labels,
            label_rejects=report.label_rejects,
            max_warnings=config.max_warnings,
        )

    @app.post("/analyze", response_model=AnalyzeResponse)
    def analyze(request: AnalyzeRequest) -> AnalyzeResponse:
        cache_dir = request.cache_dir or os.environ.get(CACHE_ENV_VAR)
        if not cache_dir:
            raise ConfigError(f"no cache directory: pass cache_dir or set ${CACHE_ENV_VAR}")
        metrics_path, tests_path = analyze_caches(
            cache_dir,
            plan_path=request.plan_path,
            alpha=request.alpha,
            out_dir=request.out_dir,
        )
        tests_data = json.loads(tests_path.read_text("utf-8"))
        metrics_data = json.loads(metrics_path.read_text("utf-8"))
        comparisons = tests_data["comparisons"]
        return AnalyzeResponse(
            metrics_path=str(metrics_path),
            tests_path=str(tests_path),
            projects=len(metrics_data["projects"]),
            comparisons=len(comparisons),
            skipped=sum(1 for c in comparisons if c["skipped"]),
        )

    @app.post("/report", response_model=ReportResponse)
    def report(request: ReportRequest) -> ReportResponse:
        tests_path = request.tests_path
        if tests_path is None:
            sibling = os.path.join(os.path.dirname(request.metrics_path), "tests.json")
            tests_path = sibling if os.path.isfile(sibling) else None
        written = render_reports(
            request.metrics_path,
            tests_path,
            request.out_dir,
            request.formats,
        )
        return ReportResponse(written=[str(p) for p in written])

    return app


app = create_app()
