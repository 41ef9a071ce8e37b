"""Batch command line: validate, import transcripts, report, compare, serve.

Exit codes: 0 ok, 1 validation errors, 2 I/O failures, 3 usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .comparison import compare_cases, summarize_case
from .errors import (
    BindFailureError,
    CorruptFileError,
    InvalidTimelineError,
    IoFailureError,
    ScopelineError,
    SchemaVersionUnsupportedError,
)
from .model import Severity, has_errors, validate_timeline
from .reporting import RenderFormat, generate_report, render_report
from .serialize import phase_times_to_dict
from .store import load_project, save_project
from .timeline_ops import compute_phase_times, phase_ratio_warning
from . import transcript as transcript_mod

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_USAGE = 3


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 3, not argparse's default 2
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scopeline", description="Colonoscopy annotation project tools")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_validate = sub.add_parser("validate", help="check a project file and print diagnostics")
    p_validate.add_argument("project", type=Path)

    p_import = sub.add_parser("import-transcript", help="apply a timestamped transcript as tags")
    p_import.add_argument("project", type=Path)
    p_import.add_argument("transcript", type=Path)

    p_report = sub.add_parser("report", help="render a draft report from a project")
    p_report.add_argument("project", type=Path)
    p_report.add_argument("--format", choices=["structured", "document"], default="structured")
    p_report.add_argument("--out", type=Path, default=None)

    p_compare = sub.add_parser("compare", help="build the comparison table for several projects")
    p_compare.add_argument("projects", nargs="+", type=Path, metavar="project")
    p_compare.add_argument("--out", type=Path, default=None)

    p_phase = sub.add_parser("phase-times", help="print insertion/withdrawal/dwell times")
    p_phase.add_argument("project", type=Path)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--port", type=int, default=8800)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--data-dir", type=Path, required=True)

    return parser


def _write_output(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        out.write_bytes(data)


def _cmd_validate(args) -> int:
    project = load_project(args.project, require_valid=False)
    diagnostics = validate_timeline(project.timeline)
    for diag in diagnostics:
        subject = f" [{diag.subject}]" if diag.subject else ""
        print(f"{diag.severity.value}: {diag.code.value}: {diag.message}{subject}")
    if has_errors(diagnostics):
        return EXIT_VALIDATION
    print(f"ok: {len([d for d in diagnostics if d.severity is Severity.WARNING])} warning(s), 0 errors")
    return EXIT_OK


def _cmd_import_transcript(args) -> int:
    project = load_project(args.project)
    try:
        raw = args.transcript.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailureError(f"cannot read transcript {args.transcript}: {exc}") from exc
    parsed = transcript_mod.parse_transcript(raw)
    if parsed.errors:
        for err in parsed.errors:
            print(f"line {err.line_number}: {err.reason}: {err.content}", file=sys.stderr)
        print(f"import aborted: {len(parsed.errors)} malformed line(s), nothing written", file=sys.stderr)
        return EXIT_VALIDATION
    events = transcript_mod.interpret_transcript(parsed.lines)
    timeline, diagnostics = transcript_mod.apply_events(project.timeline, events)
    for diag in diagnostics:
        print(f"{diag.severity.value}: {diag.code.value}: {diag.message}", file=sys.stderr)
    from dataclasses import replace

    save_project(args.project, replace(project, timeline=timeline))
    print(f"imported {len(events)} tag(s) from {len(parsed.lines)} line(s)")
    return EXIT_OK


def _cmd_report(args) -> int:
    project = load_project(args.project)
    report = generate_report(project.timeline, {})
    fmt = RenderFormat.STRUCTURED if args.format == "structured" else RenderFormat.DOCUMENT
    _write_output(render_report(report, fmt), args.out)
    return EXIT_OK


def _cmd_compare(args) -> int:
    summaries = [summarize_case(load_project(path).timeline) for path in args.projects]
    table = compare_cases(summaries)
    _write_output(table.to_csv().encode("utf-8"), args.out)
    return EXIT_OK


def _cmd_phase_times(args) -> int:
    project = load_project(args.project)
    times = compute_phase_times(project.timeline)
    body = phase_times_to_dict(times)
    warning = phase_ratio_warning(times)
    if warning is not None:
        body["warnings"] = [warning.message]
    print(json.dumps(body, sort_keys=True))
    return EXIT_OK


def _cmd_serve(args) -> int:
    import socket

    import uvicorn

    from .service import create_app

    if not args.data_dir.is_dir():
        raise IoFailureError(f"data directory {args.data_dir} does not exist")
    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((args.host, args.port))
        probe.close()
    except OSError as exc:
        raise BindFailureError(f"cannot bind {args.host}:{args.port}: {exc}") from exc
    app = create_app(args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


_COMMANDS = {
    "validate": _cmd_validate,
    "import-transcript": _cmd_import_transcript,
    "report": _cmd_report,
    "compare": _cmd_compare,
    "phase-times": _cmd_phase_times,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (IoFailureError, CorruptFileError, SchemaVersionUnsupportedError, BindFailureError) as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidTimelineError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        for diag in exc.diagnostics:
            print(f"  {diag.severity.value}: {diag.code.value}: {diag.message}", file=sys.stderr)
        return EXIT_VALIDATION
    except ScopelineError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: IoFailure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
