"""Draft report assembly from an annotated timeline.

The auto-filled part of a report is derived entirely from annotations and
tags, so nothing depends on the physician's recall: each polyp/IBD
annotation becomes a finding entry located by segment and by the nearest
tagged distance, blood-clot annotations fold into the polyp they overlap
(or stand alone), and phase times come from the cecum annotation.
Preparation, procedure notes, complications and recommendations are typed
in afterwards; finalizing flips the report to complete only when the
recommendation exists and every finding is located in a segment.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Mapping

from .errors import (
    AlreadyCompleteError,
    InvalidTimelineError,
    MissingRecommendationError,
    UnlocatedFindingError,
)
from .model import Annotation, Label, Tag, Timeline, has_errors, validate_timeline
from .timeline_ops import PhaseTimes, compute_phase_times, segment_at

# Frames on each side of an anomaly interval searched for a distance tag:
# 10 s of footage at the typical 15 fps capture rate.
DISTANCE_WINDOW_FRAMES = 150


class CompoundAttribute(enum.Enum):
    WITH_BLOOD_CLOT = "WithBloodClot"


class ReportStatus(enum.Enum):
    DRAFT = "draft"
    COMPLETE = "complete"


class RenderFormat(enum.Enum):
    STRUCTURED = "structured"
    DOCUMENT = "document"


@dataclass(frozen=True)
class FindingEntry:
    """One report finding, sourced from a single anomaly annotation."""

    anomaly_label: Label
    segment: Label | None
    distance_cm: int | None
    findings_text: str | None
    impressions_text: str | None
    snapshot_frame: int
    compound_attributes: frozenset[CompoundAttribute]
    source_annotation_id: str
    blood_clot_annotation_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class Report:
    findings: tuple[FindingEntry, ...]
    phase_times: PhaseTimes
    general_information: str = ""
    clinical_history_and_physicals: str = ""
    consent: str = ""
    medications: str = ""
    impressions: str = ""
    preparation: str = ""
    procedure_notes: str = ""
    complications: str = ""
    recommendations: str = ""
    status: ReportStatus = ReportStatus.DRAFT


def _interval_frame_gap(frame: int, annotation: Annotation) -> int:
    """Distance in frames from a tag frame to an annotation's interval (0 inside)."""
    interval = annotation.interval
    if frame < interval.start_frame:
        return interval.start_frame - frame
    if frame >= interval.end_frame:
        return frame - (interval.end_frame - 1)
    return 0


def _nearest_distance(annotation: Annotation, tags: tuple[Tag, ...]) -> int | None:
    candidates = [
        (gap, t.frame, t.tag_id, t.distance_cm)
        for t in tags
        if t.distance_cm is not None and (gap := _interval_frame_gap(t.frame, annotation)) <= DISTANCE_WINDOW_FRAMES
    ]
    if not candidates:
        return None
    # nearest wins; ties go to the earlier tag
    return min(candidates)[3]


def _texts_from_interval(annotation: Annotation, tags: tuple[Tag, ...]) -> tuple[str | None, str | None]:
    inside = [
        t for t in tags
        if annotation.interval.contains_frame(t.frame) and not t.is_distance_mark and not t.is_empty
    ]
    if not inside:
        return None, None
    tag = min(inside, key=lambda t: (t.frame, t.tag_id))
    return tag.findings, tag.impressions


def _overlap_frames(a: Annotation, b: Annotation) -> int:
    return max(
        0,
        min(a.interval.end_frame, b.interval.end_frame)
        - max(a.interval.start_frame, b.interval.start_frame),
    )


def derive_findings(timeline: Timeline) -> tuple[FindingEntry, ...]:
    """Turn anomaly annotations into finding entries, shared with comparison.

    Every anomaly annotation is accounted for exactly once: polyps and IBDs
    each produce an entry; a blood clot folds into the overlapping polyp
    with the greatest overlap, or produces its own entry when it touches no
    polyp. Entries are ordered proximal-to-cecum first (distance
    descending), unknown distances last.
    """
    polyps = [a for a in timeline.annotations if a.label is Label.POLYP]
    ibds = [a for a in timeline.annotations if a.label is Label.IBD]
    clots = [a for a in timeline.annotations if a.label is Label.BLOOD_CLOT]

    attached: dict[str, list[str]] = {p.annotation_id: [] for p in polyps}
    standalone_clots: list[Annotation] = []
    for clot in clots:
        overlapping = [(p, _overlap_frames(p, clot)) for p in polyps]
        overlapping = [(p, frames) for p, frames in overlapping if frames > 0]
        if not overlapping:
            standalone_clots.append(clot)
            continue
        host = min(
            overlapping,
            key=lambda item: (-item[1], item[0].interval.start_frame, item[0].annotation_id),
        )[0]
        attached[host.annotation_id].append(clot.annotation_id)

    entries: list[FindingEntry] = []
    for source in polyps + ibds + standalone_clots:
        attributes: frozenset[CompoundAttribute] = frozenset()
        clot_ids: tuple[str, ...] = ()
        if source.label is Label.POLYP:
            if any(_overlap_frames(source, clot) > 0 for clot in clots):
                attributes = frozenset({CompoundAttribute.WITH_BLOOD_CLOT})
            clot_ids = tuple(sorted(attached[source.annotation_id]))
        findings_text, impressions_text = _texts_from_interval(source, timeline.tags)
        entries.append(
            FindingEntry(
                anomaly_label=source.label,
                segment=segment_at(timeline, source.interval.start_frame),
                distance_cm=_nearest_distance(source, timeline.tags),
                findings_text=findings_text,
                impressions_text=impressions_text,
                snapshot_frame=source.interval.start_frame,
                compound_attributes=attributes,
                source_annotation_id=source.annotation_id,
                blood_clot_annotation_ids=clot_ids,
            )
        )

    def order(entry: FindingEntry) -> tuple:
        return (
            entry.distance_cm is None,
            -(entry.distance_cm or 0),
            entry.snapshot_frame,
            entry.source_annotation_id,
        )

    return tuple(sorted(entries, key=order))


def _merged_impressions(timeline: Timeline) -> str:
    texts = [t.impressions for t in timeline.tags if t.impressions is not None]
    return "\n".join(texts)


def generate_report(timeline: Timeline, patient_context: Mapping[str, str]) -> Report:
    """Assemble a draft report; the timeline must be free of errors."""
    diagnostics = validate_timeline(timeline)
    if has_errors(diagnostics):
        raise InvalidTimelineError("cannot report on a timeline with errors", diagnostics)
    return Report(
        findings=derive_findings(timeline),
        phase_times=compute_phase_times(timeline),
        general_information=patient_context.get("general_information", ""),
        clinical_history_and_physicals=patient_context.get("clinical_history_and_physicals", ""),
        consent=patient_context.get("consent", ""),
        medications=patient_context.get("medications", ""),
        impressions=_merged_impressions(timeline),
    )


def set_manual_sections(
    report: Report,
    preparation: str,
    procedure_notes: str,
    complications: str,
    recommendations: str,
) -> Report:
    if report.status is not ReportStatus.DRAFT:
        raise AlreadyCompleteError("manual sections can only be set on a draft report")
    return replace(
        report,
        preparation=preparation,
        procedure_notes=procedure_notes,
        complications=complications,
        recommendations=recommendations,
    )


def finalize_report(report: Report) -> Report:
    """Mark a draft complete; refuses unlocated findings and a missing recommendation."""
    if report.status is not ReportStatus.DRAFT:
        raise AlreadyCompleteError("report is already complete")
    if not report.recommendations.strip():
        raise MissingRecommendationError("a recommendation is required before completion")
    for entry in report.findings:
        if entry.segment is None:
            raise UnlocatedFindingError(
                f"finding from annotation {entry.source_annotation_id} lies in a segment gap",
                entry.source_annotation_id,
            )
    return replace(report, status=ReportStatus.COMPLETE)


def finding_line(entry: FindingEntry) -> str:
    segment = entry.segment.display_name if entry.segment is not None else "unlocated"
    distance = (
        f"{entry.distance_cm} cm from anus" if entry.distance_cm is not None else "distance unknown"
    )
    line = f"{entry.anomaly_label.display_name} — {segment} — {distance} — frame {entry.snapshot_frame}"
    if CompoundAttribute.WITH_BLOOD_CLOT in entry.compound_attributes:
        line += " — with blood clot"
    return line


def _document_lines(report: Report) -> list[str]:
    lines = [f"Procedure report ({report.status.value})", ""]

    def section(heading: str, body: list[str]) -> None:
        lines.append(heading)
        lines.append("-" * len(heading))
        lines.extend(body)
        lines.append("")

    general = [report.general_information] if report.general_information else []
    times = report.phase_times
    if times.complete:
        general += [
            f"Insertion time: {times.insertion_s:.1f} s",
            f"Cecum dwell time: {times.cecum_dwell_s:.1f} s",
            f"Withdrawal time: {times.withdrawal_s:.1f} s",
        ]
    else:
        general.append("Procedure incomplete: cecum not annotated, phase times not computed.")

    section("General Information", general)
    section(
        "Clinical History and Physicals",
        [report.clinical_history_and_physicals] if report.clinical_history_and_physicals else [],
    )
    section("Consent", [report.consent] if report.consent else [])
    section("Medications", [report.medications] if report.medications else [])
    section("Findings", [finding_line(entry) for entry in report.findings])
    section("Impressions", report.impressions.splitlines())
    section("Preparation", [report.preparation] if report.preparation else [])
    section("Procedure", [report.procedure_notes] if report.procedure_notes else [])
    section("Complications", [report.complications] if report.complications else [])
    section("Recommendations", [report.recommendations] if report.recommendations else [])
    return lines


def render_report(report: Report, fmt: RenderFormat) -> bytes:
    """Render to canonical JSON bytes or a plain-text document; both deterministic."""
    if fmt is RenderFormat.STRUCTURED:
        from .serialize import canonical_json_bytes, report_to_dict

        return canonical_json_bytes(report_to_dict(report))
    return ("\n".join(_document_lines(report)) + "\n").encode("utf-8")
