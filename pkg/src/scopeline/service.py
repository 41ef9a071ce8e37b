"""HTTP API over the project store; the single-page UI drives this.

Every mutation is serialized per procedure, persisted via the atomic
store before the response goes out (read-your-writes), and guarded by
optimistic concurrency: a request may carry the revision it observed and
gets 409 RevisionConflict when it is stale. Error mapping: validation
failures are 422, conflicts 409, unknown ids 404.
"""

from __future__ import annotations

import datetime as dt
import logging
import re
import threading
from dataclasses import replace
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel

from . import transcript as transcript_mod
from .comparison import compare_cases, summarize_case, ANOMALY_LABELS, SEGMENT_LABELS
from .errors import (
    AlreadyCompleteError,
    BadDistanceGranularityError,
    BadThresholdError,
    CorruptFileError,
    EmptyInputError,
    EmptyTagError,
    InvalidTimelineError,
    IoFailureError,
    MissingRecommendationError,
    OutOfBoundsError,
    RevisionConflictError,
    ScopelineError,
    SchemaVersionUnsupportedError,
    SegmentOverlapError,
    UnknownAnnotationError,
    UnknownLabelCodeError,
    UnknownProcedureError,
    UnknownReportError,
    UnlocatedFindingError,
)
from .model import Diagnostic, Interval, Label, Timeline, label_from_code, validate_timeline
from .reporting import Report, ReportStatus, finalize_report, generate_report, set_manual_sections
from .serialize import phase_times_to_dict, report_to_dict
from .store import ProjectFile, load_project, project_to_dict, save_project
from .timeline_ops import (
    add_annotation,
    add_tag,
    compute_phase_times,
    hierarchy_layout,
    phase_ratio_warning,
    remove_annotation,
)

log = logging.getLogger(__name__)

_STATUS_BY_ERROR: dict[type, int] = {
    UnknownProcedureError: 404,
    UnknownAnnotationError: 404,
    UnknownReportError: 404,
    SegmentOverlapError: 409,
    RevisionConflictError: 409,
    AlreadyCompleteError: 409,
    OutOfBoundsError: 422,
    EmptyTagError: 422,
    BadDistanceGranularityError: 422,
    UnknownLabelCodeError: 422,
    InvalidTimelineError: 422,
    MissingRecommendationError: 422,
    UnlocatedFindingError: 422,
    BadThresholdError: 422,
    EmptyInputError: 422,
    CorruptFileError: 500,
    SchemaVersionUnsupportedError: 500,
    IoFailureError: 500,
}

_SAFE_ID = re.compile(r"[A-Za-z0-9._-]+")


class AnnotationBody(BaseModel):
    start_frame: int
    end_frame: int
    label: str
    note: str | None = None
    revision: int | None = None


class TagBody(BaseModel):
    frame: int
    distance_cm: int | None = None
    findings: str | None = None
    impressions: str | None = None
    revision: int | None = None


class ManualSectionsBody(BaseModel):
    preparation: str = ""
    procedure_notes: str = ""
    complications: str = ""
    recommendations: str = ""
    revision: int | None = None


class ReportRequestBody(BaseModel):
    patient_context: dict[str, str] = {}
    revision: int | None = None


class ProcedureStore:
    """Cache of loaded projects with per-procedure write locks."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self._cache: dict[str, ProjectFile] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def path_for(self, procedure_id: str) -> Path:
        return self.data_dir / f"{procedure_id}.json"

    def lock_for(self, procedure_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(procedure_id, threading.Lock())

    def get(self, procedure_id: str) -> ProjectFile:
        if not _SAFE_ID.fullmatch(procedure_id):
            raise UnknownProcedureError(f"no procedure {procedure_id!r}")
        cached = self._cache.get(procedure_id)
        if cached is not None:
            return cached
        path = self.path_for(procedure_id)
        if not path.exists():
            raise UnknownProcedureError(f"no procedure {procedure_id!r}")
        project = load_project(path)
        self._cache[procedure_id] = project
        return project

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.data_dir.glob("*.json"))

    def persist(self, procedure_id: str, project: ProjectFile) -> ProjectFile:
        persisted = save_project(
            self.path_for(procedure_id), project, saved_at=dt.datetime.now(dt.timezone.utc)
        )
        self._cache[procedure_id] = persisted
        return persisted


def _diagnostic_to_dict(diag: Diagnostic) -> dict[str, Any]:
    return {
        "severity": diag.severity.value,
        "code": diag.code.value,
        "message": diag.message,
        "subject": diag.subject,
    }


def _layout_to_list(timeline: Timeline) -> list[dict[str, Any]]:
    return [
        {
            "layer": row.layer,
            "entries": [
                {
                    "start_frame": entry.interval.start_frame,
                    "end_frame": entry.interval.end_frame,
                    "label": entry.label.code,
                    "annotation_id": entry.annotation_id,
                }
                for entry in row.entries
            ],
        }
        for row in hierarchy_layout(timeline)
    ]


def _check_revision(project: ProjectFile, observed: int | None) -> None:
    if observed is not None and observed != project.revision:
        raise RevisionConflictError(
            f"revision {observed} is stale, the project is at revision {project.revision}"
        )


def _latest_report(project: ProjectFile) -> Report:
    if not project.reports:
        raise UnknownReportError("no report has been generated for this procedure")
    return project.reports[-1]


def create_app(data_dir: str | Path) -> FastAPI:
    store = ProcedureStore(Path(data_dir))
    app = FastAPI(title="scopeline", docs_url=None, redoc_url=None)
    app.state.store = store

    @app.exception_handler(ScopelineError)
    async def scopeline_error_handler(_request: Request, exc: ScopelineError) -> JSONResponse:
        status = _STATUS_BY_ERROR.get(type(exc), 500)
        body: dict[str, Any] = {"error": exc.code, "message": str(exc)}
        if isinstance(exc, InvalidTimelineError):
            body["diagnostics"] = [_diagnostic_to_dict(d) for d in exc.diagnostics]
        return JSONResponse(body, status_code=status)

    @app.exception_handler(ValueError)
    async def value_error_handler(_request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse({"error": "ValidationError", "message": str(exc)}, status_code=422)

    @app.get("/procedures")
    def list_procedures() -> list[dict[str, Any]]:
        items = []
        for procedure_id in store.list_ids():
            try:
                project = store.get(procedure_id)
            except ScopelineError as exc:
                log.warning("skipping unreadable project %s: %s", procedure_id, exc)
                continue
            items.append(
                {
                    "procedure_id": procedure_id,
                    "revision": project.revision,
                    "saved_at": project.saved_at.isoformat(),
                    "video_id": project.timeline.video.video_id,
                    "frame_count": project.timeline.video.frame_count,
                    "fps": project.timeline.video.fps,
                }
            )
        return items

    @app.get("/procedures/{procedure_id}")
    def get_procedure(procedure_id: str) -> dict[str, Any]:
        project = store.get(procedure_id)
        body = project_to_dict(project)
        body["layout"] = _layout_to_list(project.timeline)
        return body

    @app.post("/procedures/{procedure_id}/annotations", status_code=201)
    def post_annotation(procedure_id: str, body: AnnotationBody) -> dict[str, Any]:
        with store.lock_for(procedure_id):
            project = store.get(procedure_id)
            _check_revision(project, body.revision)
            interval = Interval(body.start_frame, body.end_frame)
            timeline, annotation_id = add_annotation(
                project.timeline, interval, label_from_code(body.label), body.note
            )
            persisted = store.persist(procedure_id, replace(project, timeline=timeline))
        return {"annotation_id": annotation_id, "revision": persisted.revision}

    @app.delete("/procedures/{procedure_id}/annotations/{annotation_id}")
    def delete_annotation(
        procedure_id: str, annotation_id: str, revision: int | None = None
    ) -> dict[str, Any]:
        with store.lock_for(procedure_id):
            project = store.get(procedure_id)
            _check_revision(project, revision)
            timeline = remove_annotation(project.timeline, annotation_id)
            persisted = store.persist(procedure_id, replace(project, timeline=timeline))
        return {"revision": persisted.revision}

    @app.post("/procedures/{procedure_id}/tags", status_code=201)
    def post_tag(procedure_id: str, body: TagBody) -> dict[str, Any]:
        with store.lock_for(procedure_id):
            project = store.get(procedure_id)
            _check_revision(project, body.revision)
            timeline, tag_id = add_tag(
                project.timeline,
                body.frame,
                distance_cm=body.distance_cm,
                findings=body.findings,
                impressions=body.impressions,
            )
            persisted = store.persist(procedure_id, replace(project, timeline=timeline))
            tag = next(t for t in persisted.timeline.tags if t.tag_id == tag_id)
        return {
            "tag_id": tag_id,
            "revision": persisted.revision,
            "classification": "distance_mark" if tag.is_distance_mark else "full_tag",
        }

    @app.get("/procedures/{procedure_id}/diagnostics")
    def get_diagnostics(procedure_id: str) -> dict[str, Any]:
        project = store.get(procedure_id)
        return {"diagnostics": [_diagnostic_to_dict(d) for d in validate_timeline(project.timeline)]}

    @app.get("/procedures/{procedure_id}/phase-times")
    def get_phase_times(procedure_id: str) -> dict[str, Any]:
        project = store.get(procedure_id)
        times = compute_phase_times(project.timeline)
        body = phase_times_to_dict(times)
        warning = phase_ratio_warning(times)
        body["warnings"] = [_diagnostic_to_dict(warning)] if warning else []
        return body

    @app.post("/procedures/{procedure_id}/transcript")
    async def post_transcript(procedure_id: str, request: Request) -> JSONResponse:
        raw = (await request.body()).decode("utf-8")
        revision_header = request.headers.get("if-match-revision")
        observed = int(revision_header) if revision_header is not None else None
        parsed = transcript_mod.parse_transcript(raw)
        if parsed.errors:
            return JSONResponse(
                {
                    "error": "MalformedLine",
                    "message": f"{len(parsed.errors)} malformed transcript line(s)",
                    "lines": [
                        {"line_number": e.line_number, "content": e.content, "reason": e.reason}
                        for e in parsed.errors
                    ],
                },
                status_code=422,
            )
        events = transcript_mod.interpret_transcript(parsed.lines)
        with store.lock_for(procedure_id):
            project = store.get(procedure_id)
            _check_revision(project, observed)
            timeline, diagnostics = transcript_mod.apply_events(project.timeline, events)
            persisted = store.persist(procedure_id, replace(project, timeline=timeline))
        return JSONResponse(
            {
                "added_tags": len(events),
                "warnings": [_diagnostic_to_dict(d) for d in diagnostics],
                "revision": persisted.revision,
            },
            status_code=200,
        )

    @app.post("/procedures/{procedure_id}/report", status_code=201)
    def post_report(procedure_id: str, body: ReportRequestBody | None = None) -> dict[str, Any]:
        body = body or ReportRequestBody()
        with store.lock_for(procedure_id):
            project = store.get(procedure_id)
            _check_revision(project, body.revision)
            report = generate_report(project.timeline, body.patient_context)
            kept = tuple(r for r in project.reports if r.status is ReportStatus.COMPLETE)
            persisted = store.persist(procedure_id, replace(project, reports=kept + (report,)))
        return {"report": report_to_dict(report), "revision": persisted.revision}

    @app.put("/procedures/{procedure_id}/report/manual-sections")
    def put_manual_sections(procedure_id: str, body: ManualSectionsBody) -> dict[str, Any]:
        with store.lock_for(procedure_id):
            project = store.get(procedure_id)
            _check_revision(project, body.revision)
            report = set_manual_sections(
                _latest_report(project),
                preparation=body.preparation,
                procedure_notes=body.procedure_notes,
                complications=body.complications,
                recommendations=body.recommendations,
            )
            persisted = store.persist(procedure_id, replace(project, reports=project.reports[:-1] + (report,)))
        return {"report": report_to_dict(report), "revision": persisted.revision}

    @app.post("/procedures/{procedure_id}/report/finalize")
    def post_finalize(procedure_id: str, body: ReportRequestBody | None = None) -> dict[str, Any]:
        body = body or ReportRequestBody()
        with store.lock_for(procedure_id):
            project = store.get(procedure_id)
            _check_revision(project, body.revision)
            report = finalize_report(_latest_report(project))
            persisted = store.persist(procedure_id, replace(project, reports=project.reports[:-1] + (report,)))
        return {"report": report_to_dict(report), "revision": persisted.revision}

    @app.get("/compare")
    def get_compare(ids: str) -> dict[str, Any]:
        id_list = [part for part in ids.split(",") if part]
        summaries = [summarize_case(store.get(procedure_id).timeline) for procedure_id in id_list]
        table = compare_cases(summaries)
        rows = []
        for row in table.rows:
            segments = {
                seg.code: {label.code: row.counts.get(seg, {}).get(label, 0) for label in ANOMALY_LABELS}
                for seg in SEGMENT_LABELS
            }
            unsegmented = {
                label.code: row.counts.get(None, {}).get(label, 0) for label in ANOMALY_LABELS
            }
            rows.append(
                {
                    "case": row.procedure_id,
                    "segments": segments,
                    "unsegmented": unsegmented,
                    "insertion_s": row.insertion_s,
                    "withdrawal_s": row.withdrawal_s,
                    "complete": row.complete,
                    "phase_ratio_warning": row.phase_ratio_flag,
                }
            )
        return {"rows": rows, "csv": table.to_csv()}

    @app.get("/procedures/{procedure_id}/video")
    def get_video(procedure_id: str) -> Response:
        project = store.get(procedure_id)
        uri = project.timeline.video.source_uri
        if uri is None:
            raise UnknownProcedureError(f"procedure {procedure_id!r} has no video source")
        path = Path(uri[len("file://"):]) if uri.startswith("file://") else Path(uri)
        if not path.is_absolute():
            path = store.data_dir / path
        if not path.is_file():
            raise UnknownProcedureError(f"video for procedure {procedure_id!r} not found")

        def stream():
            with open(path, "rb") as handle:
                while chunk := handle.read(1 << 16):
                    yield chunk

        return StreamingResponse(stream(), media_type="application/octet-stream")

    return app
