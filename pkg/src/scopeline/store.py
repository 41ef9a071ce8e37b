"""Versioned project-file persistence, one JSON file per procedure.

A project file holds the timeline, its reports, a schema version and a
monotonically increasing revision. Writes are atomic (temp file + rename
in the same directory), so a crash mid-write never corrupts the primary
path, and the revision is bumped before the bytes hit disk. Loading
re-validates everything: schema version, structure, and all timeline
invariants.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import tempfile
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any

from .errors import (
    CorruptFileError,
    InvalidTimelineError,
    IoFailureError,
    SchemaVersionUnsupportedError,
)
from .model import Timeline, has_errors, validate_timeline
from .reporting import Report
from .serialize import (
    canonical_json_bytes,
    report_from_dict,
    report_to_dict,
    timeline_from_dict,
    timeline_to_dict,
)

SCHEMA_VERSION = 1

# Deterministic birth stamp for projects no service has touched yet; the
# HTTP service overrides it with wall-clock time on every write.
EPOCH = dt.datetime(1970, 1, 1, tzinfo=dt.timezone.utc)


@dataclass(frozen=True)
class ProjectFile:
    timeline: Timeline
    reports: tuple[Report, ...] = ()
    schema_version: int = SCHEMA_VERSION
    revision: int = 0
    saved_at: dt.datetime = EPOCH


def new_project(timeline: Timeline) -> ProjectFile:
    return ProjectFile(timeline=timeline)


def project_to_dict(project: ProjectFile) -> dict[str, Any]:
    return {
        "schema_version": project.schema_version,
        "revision": project.revision,
        "saved_at": project.saved_at.isoformat(),
        "timeline": timeline_to_dict(project.timeline),
        "reports": [report_to_dict(r) for r in project.reports],
    }


def project_to_bytes(project: ProjectFile) -> bytes:
    return canonical_json_bytes(project_to_dict(project))


def project_from_dict(data: Any) -> ProjectFile:
    if not isinstance(data, dict):
        raise CorruptFileError("project file must hold a JSON object")
    if "schema_version" not in data:
        raise CorruptFileError("project file is missing 'schema_version'")
    schema_version = data["schema_version"]
    if not isinstance(schema_version, int) or isinstance(schema_version, bool):
        raise CorruptFileError(f"schema_version must be an integer, got {schema_version!r}")
    if schema_version != SCHEMA_VERSION:
        raise SchemaVersionUnsupportedError(
            f"schema version {schema_version} is not supported (this build reads version {SCHEMA_VERSION})"
        )
    for key in ("revision", "saved_at", "timeline", "reports"):
        if key not in data:
            raise CorruptFileError(f"project file is missing {key!r}")
    revision = data["revision"]
    if not isinstance(revision, int) or isinstance(revision, bool) or revision < 0:
        raise CorruptFileError(f"revision must be a non-negative integer, got {revision!r}")
    if not isinstance(data["saved_at"], str):
        raise CorruptFileError("saved_at must be an ISO-8601 string")
    try:
        saved_at = dt.datetime.fromisoformat(data["saved_at"])
    except ValueError:
        raise CorruptFileError(f"saved_at {data['saved_at']!r} is not an ISO-8601 timestamp") from None
    if not isinstance(data["reports"], list):
        raise CorruptFileError("reports must be an array")
    return ProjectFile(
        timeline=timeline_from_dict(data["timeline"]),
        reports=tuple(report_from_dict(r) for r in data["reports"]),
        schema_version=schema_version,
        revision=revision,
        saved_at=saved_at,
    )


def project_from_bytes(raw: bytes) -> ProjectFile:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorruptFileError(f"project file is not valid UTF-8: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptFileError(f"project file is not valid JSON: {exc}") from None
    return project_from_dict(data)


def save_project(
    path: str | Path, project: ProjectFile, *, saved_at: dt.datetime | None = None
) -> ProjectFile:
    """Persist atomically with revision+1 and return the persisted value.

    ``saved_at`` is only restamped when the caller supplies a time; batch
    tools rely on that to produce byte-identical files for identical
    inputs.
    """
    diagnostics = validate_timeline(project.timeline)
    if has_errors(diagnostics):
        raise InvalidTimelineError("refusing to save a timeline with errors", diagnostics)
    persisted = replace(
        project,
        revision=project.revision + 1,
        saved_at=saved_at if saved_at is not None else project.saved_at,
    )
    payload = project_to_bytes(persisted)
    target = Path(path)
    try:
        fd, temp_name = tempfile.mkstemp(dir=str(target.parent), prefix=f".{target.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(payload)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(temp_name, target)
        except BaseException:
            try:
                os.unlink(temp_name)
            except OSError:
                pass
            raise
    except OSError as exc:
        raise IoFailureError(f"cannot write project file {target}: {exc}") from exc
    return persisted


def load_project(path: str | Path, *, require_valid: bool = True) -> ProjectFile:
    """Read and fully re-validate a project file.

    ``require_valid=False`` skips only the timeline-invariant gate so the
    CLI can load a broken project in order to report its diagnostics.
    """
    target = Path(path)
    try:
        raw = target.read_bytes()
    except OSError as exc:
        raise IoFailureError(f"cannot read project file {target}: {exc}") from exc
    project = project_from_bytes(raw)
    if require_valid:
        diagnostics = validate_timeline(project.timeline)
        if has_errors(diagnostics):
            raise InvalidTimelineError(f"project file {target} holds an invalid timeline", diagnostics)
    return project
