"""Command-line front end.

The CLI is a thin client of the analysis service: every subcommand builds a
request and posts it over HTTP. Without --server it runs the service
in-process (same wire format, no daemon needed); with --server it talks to a
running instance, in which case all paths are resolved on the server host.

Exit status: 0 success, 1 partial-scan warnings above the configured
threshold, 2 configuration errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .corpus import CACHE_ENV_VAR

EXIT_OK = 0
EXIT_WARNINGS = 1
EXIT_CONFIG = 2


def _make_client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server)
    from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app())


def _post(client, path: str, payload: dict) -> tuple[int, dict]:
    response = client.post(path, json=payload)
    try:
        body = response.json()
    except (ValueError, json.JSONDecodeError):
        body = {"detail": response.text}
    return response.status_code, body


def _fail(body: dict, status: int) -> int:
    detail = body.get("detail") or body.get("error") or str(body)
    print(f"error: {detail}", file=sys.stderr)
    if status in (400, 422):
        return EXIT_CONFIG
    return EXIT_WARNINGS


def _cmd_scan(args: argparse.Namespace) -> int:
    with _make_client(args.server) as client:
        status, body = _post(client, "/scan", {"config_path": args.config})
        if status != 200:
            return _fail(body, status)
    for row in body["projects"]:
        bucket = row["bucket"] or "-"
        print(
            f"{row['project']}: {row['kloc']:.3f} KLOC [{bucket}] "
            f"comments H={row['cmt_h']} (satd {row['satd_h']}) "
            f"NH={row['cmt_nh']} (satd {row['satd_nh']})"
        )
    print(f"cache: {body['cache_dir']} ({body['record_count']} records)")
    for warning in body["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    for unmatched in body["unmatched_labels"]:
        print(f"unmatched label: {unmatched}", file=sys.stderr)
    for reject in body["label_rejects"]:
        print(f"label reject: {reject}", file=sys.stderr)
    if len(body["warnings"]) > body["max_warnings"]:
        return EXIT_WARNINGS
    return EXIT_OK


def _cmd_analyze(args: argparse.Namespace) -> int:
    payload = {
        "cache_dir": args.cache,
        "plan_path": args.plan,
        "alpha": args.alpha,
        "out_dir": args.out,
    }
    with _make_client(args.server) as client:
        status, body = _post(client, "/analyze", payload)
        if status != 200:
            return _fail(body, status)
    print(f"metrics: {body['metrics_path']}")
    print(f"tests: {body['tests_path']}")
    print(
        f"{body['projects']} projects, {body['comparisons']} comparisons "
        f"({body['skipped']} skipped)"
    )
    return EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    formats = sorted({f for spec in args.format for f in spec.split(",") if f})
    payload = {
        "metrics_path": args.metrics,
        "tests_path": args.tests,
        "out_dir": args.out,
        "formats": formats or ["md", "csv", "json"],
    }
    with _make_client(args.server) as client:
        status, body = _post(client, "/report", payload)
        if status != 200:
            return _fail(body, status)
    for path in body["written"]:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    uvicorn.run("satdscope.service:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="satd-scope",
        description="Analyze SATD comment density by code context across a Java corpus",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running satd-scope service (default: run in-process)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="scan a corpus into the record cache")
    scan.add_argument("--config", required=True, help="path to a JSON corpus config")
    scan.set_defaults(func=_cmd_scan)

    analyze = sub.add_parser("analyze", help="compute metrics and hypothesis tests")
    analyze.add_argument(
        "--cache",
        default=os.environ.get(CACHE_ENV_VAR),
        help=f"cache directory (default: ${CACHE_ENV_VAR})",
    )
    analyze.add_argument("--plan", default=None, help="comparison plan CSV")
    analyze.add_argument("--alpha", type=float, default=0.001)
    analyze.add_argument("--out", default=None, help="output directory (default: cache)")
    analyze.set_defaults(func=_cmd_analyze)

    report = sub.add_parser("report", help="render result tables")
    report.add_argument("--metrics", required=True, help="metrics.json from analyze")
    report.add_argument("--tests", default=None, help="tests.json (default: sibling)")
    report.add_argument(
        "--format",
        action="append",
        default=[],
        help="md, csv, or json (repeatable or comma-separated; default all)",
    )
    report.add_argument("--out", required=True, help="output directory")
    report.set_defaults(func=_cmd_report)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
