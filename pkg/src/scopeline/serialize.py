"""Canonical dict/JSON conversion for the domain types.

Canonical form is JSON with lexicographically sorted keys, no
insignificant whitespace, UTF-8, and absent optional fields omitted.
Equal values serialize to identical bytes, which makes byte-equality a
valid test for project files and structured reports.

Parsing is strict: any structural problem raises CorruptFileError with a
description of the offending field.
"""

from __future__ import annotations

import datetime as dt
import json
from typing import Any, Mapping

from .errors import CorruptFileError
from .model import (
    Annotation,
    Interval,
    Label,
    Tag,
    TagOrigin,
    Timeline,
    VideoMeta,
    label_from_code,
)
from .reporting import CompoundAttribute, FindingEntry, Report, ReportStatus
from .timeline_ops import PhaseTimes


def canonical_json_bytes(payload: Any) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode(
        "utf-8"
    )


def _fail(detail: str) -> CorruptFileError:
    return CorruptFileError(detail)


def _require(data: Mapping[str, Any], key: str, context: str) -> Any:
    if not isinstance(data, Mapping):
        raise _fail(f"{context} must be an object")
    if key not in data:
        raise _fail(f"{context} is missing {key!r}")
    return data[key]


def _as_int(value: Any, context: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(f"{context} must be an integer, got {value!r}")
    return value


def _as_number(value: Any, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _fail(f"{context} must be a number, got {value!r}")
    return float(value)


def _as_str(value: Any, context: str) -> str:
    if not isinstance(value, str):
        raise _fail(f"{context} must be a string, got {value!r}")
    return value


def _opt_str(data: Mapping[str, Any], key: str, context: str) -> str | None:
    if key not in data or data[key] is None:
        return None
    return _as_str(data[key], f"{context}.{key}")


def _label(value: Any, context: str) -> Label:
    code = _as_str(value, context)
    try:
        return label_from_code(code)
    except Exception:
        raise _fail(f"{context} holds unknown label code {code!r}") from None


def video_to_dict(video: VideoMeta) -> dict[str, Any]:
    data: dict[str, Any] = {
        "video_id": video.video_id,
        "frame_count": video.frame_count,
        "fps": video.fps,
    }
    if video.source_uri is not None:
        data["source_uri"] = video.source_uri
    return data


def video_from_dict(data: Mapping[str, Any]) -> VideoMeta:
    try:
        return VideoMeta(
            video_id=_as_str(_require(data, "video_id", "video"), "video.video_id"),
            frame_count=_as_int(_require(data, "frame_count", "video"), "video.frame_count"),
            fps=_as_number(_require(data, "fps", "video"), "video.fps"),
            source_uri=_opt_str(data, "source_uri", "video"),
        )
    except ValueError as exc:
        raise _fail(f"video metadata invalid: {exc}") from None


def annotation_to_dict(annotation: Annotation) -> dict[str, Any]:
    data: dict[str, Any] = {
        "annotation_id": annotation.annotation_id,
        "start_frame": annotation.interval.start_frame,
        "end_frame": annotation.interval.end_frame,
        "label": annotation.label.code,
    }
    if annotation.note is not None:
        data["note"] = annotation.note
    return data


def annotation_from_dict(data: Mapping[str, Any]) -> Annotation:
    context = "annotation"
    try:
        interval = Interval(
            _as_int(_require(data, "start_frame", context), f"{context}.start_frame"),
            _as_int(_require(data, "end_frame", context), f"{context}.end_frame"),
        )
    except ValueError as exc:
        raise _fail(f"annotation interval invalid: {exc}") from None
    return Annotation(
        annotation_id=_as_str(_require(data, "annotation_id", context), f"{context}.annotation_id"),
        interval=interval,
        label=_label(_require(data, "label", context), f"{context}.label"),
        note=_opt_str(data, "note", context),
    )


def tag_to_dict(tag: Tag) -> dict[str, Any]:
    data: dict[str, Any] = {"tag_id": tag.tag_id, "frame": tag.frame, "origin": tag.origin.value}
    if tag.distance_cm is not None:
        data["distance_cm"] = tag.distance_cm
    if tag.findings is not None:
        data["findings"] = tag.findings
    if tag.impressions is not None:
        data["impressions"] = tag.impressions
    return data


def tag_from_dict(data: Mapping[str, Any]) -> Tag:
    context = "tag"
    origin_value = _as_str(_require(data, "origin", context), f"{context}.origin")
    try:
        origin = TagOrigin(origin_value)
    except ValueError:
        raise _fail(f"tag.origin holds unknown value {origin_value!r}") from None
    distance = data.get("distance_cm")
    if distance is not None:
        distance = _as_int(distance, f"{context}.distance_cm")
    tag = Tag(
        tag_id=_as_str(_require(data, "tag_id", context), f"{context}.tag_id"),
        frame=_as_int(_require(data, "frame", context), f"{context}.frame"),
        distance_cm=distance,
        findings=_opt_str(data, "findings", context),
        impressions=_opt_str(data, "impressions", context),
        origin=origin,
    )
    if tag.is_empty:
        raise _fail(f"tag {tag.tag_id!r} carries no distance, findings or impressions")
    return tag


def timeline_to_dict(timeline: Timeline) -> dict[str, Any]:
    data: dict[str, Any] = {
        "procedure_id": timeline.procedure_id,
        "video": video_to_dict(timeline.video),
        "annotations": [annotation_to_dict(a) for a in timeline.annotations],
        "tags": [tag_to_dict(t) for t in timeline.tags],
    }
    if timeline.patient_ref is not None:
        data["patient_ref"] = timeline.patient_ref
    if timeline.procedure_date is not None:
        data["procedure_date"] = timeline.procedure_date.isoformat()
    return data


def timeline_from_dict(data: Mapping[str, Any]) -> Timeline:
    context = "timeline"
    annotations_raw = _require(data, "annotations", context)
    tags_raw = _require(data, "tags", context)
    if not isinstance(annotations_raw, list) or not isinstance(tags_raw, list):
        raise _fail("timeline annotations/tags must be arrays")
    procedure_date = None
    if data.get("procedure_date") is not None:
        raw_date = _as_str(data["procedure_date"], "timeline.procedure_date")
        try:
            procedure_date = dt.date.fromisoformat(raw_date)
        except ValueError:
            raise _fail(f"timeline.procedure_date {raw_date!r} is not an ISO date") from None
    try:
        return Timeline(
            procedure_id=_as_str(_require(data, "procedure_id", context), "timeline.procedure_id"),
            video=video_from_dict(_require(data, "video", context)),
            annotations=tuple(annotation_from_dict(a) for a in annotations_raw),
            tags=tuple(tag_from_dict(t) for t in tags_raw),
            patient_ref=_opt_str(data, "patient_ref", context),
            procedure_date=procedure_date,
        )
    except ValueError as exc:
        raise _fail(f"timeline invalid: {exc}") from None


def phase_times_to_dict(times: PhaseTimes) -> dict[str, Any]:
    data: dict[str, Any] = {"complete": times.complete}
    if times.complete:
        data["insertion_s"] = times.insertion_s
        data["cecum_dwell_s"] = times.cecum_dwell_s
        data["withdrawal_s"] = times.withdrawal_s
    return data


def phase_times_from_dict(data: Mapping[str, Any]) -> PhaseTimes:
    complete = _require(data, "complete", "phase_times")
    if not isinstance(complete, bool):
        raise _fail("phase_times.complete must be a boolean")
    if not complete:
        return PhaseTimes(complete=False)
    return PhaseTimes(
        complete=True,
        insertion_s=_as_number(_require(data, "insertion_s", "phase_times"), "phase_times.insertion_s"),
        cecum_dwell_s=_as_number(
            _require(data, "cecum_dwell_s", "phase_times"), "phase_times.cecum_dwell_s"
        ),
        withdrawal_s=_as_number(
            _require(data, "withdrawal_s", "phase_times"), "phase_times.withdrawal_s"
        ),
    )


def finding_to_dict(entry: FindingEntry) -> dict[str, Any]:
    data: dict[str, Any] = {
        "anomaly_label": entry.anomaly_label.code,
        "snapshot_frame": entry.snapshot_frame,
        "compound_attributes": sorted(attr.value for attr in entry.compound_attributes),
        "source_annotation_id": entry.source_annotation_id,
        "blood_clot_annotation_ids": list(entry.blood_clot_annotation_ids),
    }
    if entry.segment is not None:
        data["segment"] = entry.segment.code
    if entry.distance_cm is not None:
        data["distance_cm"] = entry.distance_cm
    if entry.findings_text is not None:
        data["findings_text"] = entry.findings_text
    if entry.impressions_text is not None:
        data["impressions_text"] = entry.impressions_text
    return data


def finding_from_dict(data: Mapping[str, Any]) -> FindingEntry:
    context = "finding"
    attrs_raw = _require(data, "compound_attributes", context)
    if not isinstance(attrs_raw, list):
        raise _fail("finding.compound_attributes must be an array")
    try:
        attributes = frozenset(CompoundAttribute(value) for value in attrs_raw)
    except ValueError:
        raise _fail(f"finding.compound_attributes holds an unknown attribute: {attrs_raw!r}") from None
    clot_ids_raw = _require(data, "blood_clot_annotation_ids", context)
    if not isinstance(clot_ids_raw, list):
        raise _fail("finding.blood_clot_annotation_ids must be an array")
    distance = data.get("distance_cm")
    if distance is not None:
        distance = _as_int(distance, f"{context}.distance_cm")
    segment = None
    if data.get("segment") is not None:
        segment = _label(data["segment"], f"{context}.segment")
    return FindingEntry(
        anomaly_label=_label(_require(data, "anomaly_label", context), f"{context}.anomaly_label"),
        segment=segment,
        distance_cm=distance,
        findings_text=_opt_str(data, "findings_text", context),
        impressions_text=_opt_str(data, "impressions_text", context),
        snapshot_frame=_as_int(_require(data, "snapshot_frame", context), f"{context}.snapshot_frame"),
        compound_attributes=attributes,
        source_annotation_id=_as_str(
            _require(data, "source_annotation_id", context), f"{context}.source_annotation_id"
        ),
        blood_clot_annotation_ids=tuple(
            _as_str(cid, f"{context}.blood_clot_annotation_ids[]") for cid in clot_ids_raw
        ),
    )


def report_to_dict(report: Report) -> dict[str, Any]:
    return {
        "status": report.status.value,
        "findings": [finding_to_dict(entry) for entry in report.findings],
        "phase_times": phase_times_to_dict(report.phase_times),
        "general_information": report.general_information,
        "clinical_history_and_physicals": report.clinical_history_and_physicals,
        "consent": report.consent,
        "medications": report.medications,
        "impressions": report.impressions,
        "preparation": report.preparation,
        "procedure_notes": report.procedure_notes,
        "complications": report.complications,
        "recommendations": report.recommendations,
    }


def report_from_dict(data: Mapping[str, Any]) -> Report:
    context = "report"
    status_value = _as_str(_require(data, "status", context), "report.status")
    try:
        status = ReportStatus(status_value)
    except ValueError:
        raise _fail(f"report.status holds unknown value {status_value!r}") from None
    findings_raw = _require(data, "findings", context)
    if not isinstance(findings_raw, list):
        raise _fail("report.findings must be an array")
    text_fields = {}
    for key in (
        "general_information",
        "clinical_history_and_physicals",
        "consent",
        "medications",
        "impressions",
        "preparation",
        "procedure_notes",
        "complications",
        "recommendations",
    ):
        text_fields[key] = _as_str(_require(data, key, context), f"report.{key}")
    return Report(
        findings=tuple(finding_from_dict(entry) for entry in findings_raw),
        phase_times=phase_times_from_dict(_require(data, "phase_times", context)),
        status=status,
        **text_fields,
    )
