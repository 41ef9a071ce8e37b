"""Mutation API for timelines, phase-time computation, and row layout.

Every mutator is a persistent update: it returns a new :class:`Timeline`
and leaves its input untouched. Mutators reject invalid states up front,
so a timeline built exclusively through this module always validates with
zero errors.

Phase times follow the cecum convention: insertion runs from frame 0 to
the start of the earliest cecum annotation, cecum dwell spans that
annotation, and withdrawal runs from its end to the last frame. Without a
cecum annotation the procedure is incomplete and no times are reported.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

from .errors import (
    InvalidTimelineError,
    OutOfBoundsError,
    SegmentOverlapError,
    EmptyTagError,
    BadDistanceGranularityError,
    UnknownAnnotationError,
)
from .model import (
    Annotation,
    Diagnostic,
    DiagnosticCode,
    Interval,
    Label,
    LabelKind,
    Severity,
    Tag,
    TagOrigin,
    Timeline,
    has_errors,
    validate_timeline,
)

ANNOTATION_ID_PREFIX = "a"
TAG_ID_PREFIX = "t"

N_LAYERS = 4


@dataclass(frozen=True)
class PhaseTimes:
    """Insertion/withdrawal/dwell durations; absent unless a cecum exists."""

    complete: bool
    insertion_s: float | None = None
    cecum_dwell_s: float | None = None
    withdrawal_s: float | None = None


@dataclass(frozen=True)
class LayoutEntry:
    interval: Interval
    label: Label
    annotation_id: str


@dataclass(frozen=True)
class LayoutRow:
    layer: int
    entries: tuple[LayoutEntry, ...]


def _fresh_id(prefix: str, existing: set[str]) -> str:
    pattern = re.compile(re.escape(prefix) + r"(\d+)$")
    highest = 0
    for existing_id in existing:
        m = pattern.fullmatch(existing_id)
        if m:
            highest = max(highest, int(m.group(1)))
    n = highest + 1
    candidate = f"{prefix}{n}"
    while candidate in existing:
        n += 1
        candidate = f"{prefix}{n}"
    return candidate


def _check_interval_bounds(timeline: Timeline, interval: Interval) -> None:
    if interval.end_frame > timeline.video.frame_count:
        raise OutOfBoundsError(
            f"interval [{interval.start_frame}, {interval.end_frame}) exceeds the "
            f"video's {timeline.video.frame_count} frames"
        )


def add_annotation(
    timeline: Timeline, interval: Interval, label: Label, note: str | None = None
) -> tuple[Timeline, str]:
    """Add a labelled interval; segments are refused if they overlap layer 0."""
    _check_interval_bounds(timeline, interval)
    if label.kind is LabelKind.SEGMENT:
        for existing in timeline.segments():
            if existing.interval.intersects(interval):
                raise SegmentOverlapError(
                    f"{label.display_name} interval [{interval.start_frame}, {interval.end_frame}) "
                    f"overlaps segment {existing.annotation_id} "
                    f"[{existing.interval.start_frame}, {existing.interval.end_frame})"
                )
    annotation_id = _fresh_id(ANNOTATION_ID_PREFIX, {a.annotation_id for a in timeline.annotations})
    annotation = Annotation(annotation_id, interval, label, note)
    return replace(timeline, annotations=timeline.annotations + (annotation,)), annotation_id


def remove_annotation(timeline: Timeline, annotation_id: str) -> Timeline:
    if timeline.annotation_by_id(annotation_id) is None:
        raise UnknownAnnotationError(f"no annotation with id {annotation_id!r}")
    remaining = tuple(a for a in timeline.annotations if a.annotation_id != annotation_id)
    return replace(timeline, annotations=remaining)


def add_tag(
    timeline: Timeline,
    frame: int,
    distance_cm: int | None = None,
    findings: str | None = None,
    impressions: str | None = None,
    origin: TagOrigin = TagOrigin.MANUAL,
) -> tuple[Timeline, str]:
    """Add a point tag; a distance-only tag becomes a distance mark.

    Empty or whitespace-only text fields count as absent. Manual distances
    must already sit on the endoscope's 5 cm marks; transcript input is
    snapped before it reaches this function.
    """
    if findings is not None and not findings.strip():
        findings = None
    if impressions is not None and not impressions.strip():
        impressions = None
    if distance_cm is None and findings is None and impressions is None:
        raise EmptyTagError("a tag needs a distance, findings or impressions")
    if distance_cm is not None and (distance_cm < 0 or distance_cm % 5 != 0):
        raise BadDistanceGranularityError(
            f"distance {distance_cm} cm is not a non-negative multiple of 5"
        )
    if not 0 <= frame < timeline.video.frame_count:
        raise OutOfBoundsError(
            f"frame {frame} is outside [0, {timeline.video.frame_count})"
        )
    tag_id = _fresh_id(TAG_ID_PREFIX, {t.tag_id for t in timeline.tags})
    tag = Tag(tag_id, frame, distance_cm, findings, impressions, origin)
    return replace(timeline, tags=timeline.tags + (tag,)), tag_id


def first_cecum(timeline: Timeline) -> Annotation | None:
    """Earliest cecum annotation by start frame; phase logic keys off it."""
    cecums = [a for a in timeline.annotations if a.label is Label.CECUM]
    if not cecums:
        return None
    return min(cecums, key=lambda a: (a.interval.start_frame, a.interval.end_frame, a.annotation_id))


def compute_phase_times(timeline: Timeline) -> PhaseTimes:
    """Split the video duration at the earliest cecum annotation.

    insertion + cecum dwell + withdrawal always reassembles the full video
    duration; an uncompleted procedure (no cecum) reports nothing.
    """
    cecum = first_cecum(timeline)
    if cecum is None:
        return PhaseTimes(complete=False)
    fps = timeline.video.fps
    return PhaseTimes(
        complete=True,
        insertion_s=cecum.interval.start_frame / fps,
        cecum_dwell_s=cecum.interval.length / fps,
        withdrawal_s=(timeline.video.frame_count - cecum.interval.end_frame) / fps,
    )


def phase_ratio_warning(times: PhaseTimes) -> Diagnostic | None:
    """Advisory check: a normal procedure withdraws slower than it inserts."""
    if not times.complete:
        return None
    if times.insertion_s >= times.withdrawal_s:
        return Diagnostic(
            Severity.WARNING,
            DiagnosticCode.PHASE_RATIO,
            f"insertion time {times.insertion_s:.1f} s is not shorter than "
            f"withdrawal time {times.withdrawal_s:.1f} s",
        )
    return None


def segment_at(timeline: Timeline, frame: int) -> Label | None:
    """The colon segment containing a frame, or None over a gap."""
    if not 0 <= frame < timeline.video.frame_count:
        raise OutOfBoundsError(f"frame {frame} is outside [0, {timeline.video.frame_count})")
    for seg in timeline.segments():
        if seg.interval.contains_frame(frame):
            return seg.label
    return None


def hierarchy_layout(timeline: Timeline) -> list[LayoutRow]:
    """Arrange annotations into the four fixed rendering rows.

    Row 0 holds the colon segments, rows 1-3 the anomaly layers; every
    annotation lands in exactly one row, sorted by start frame. Requires an
    error-free timeline.
    """
    diagnostics = validate_timeline(timeline)
    if has_errors(diagnostics):
        raise InvalidTimelineError("timeline has error-level diagnostics", diagnostics)
    rows: list[list[LayoutEntry]] = [[] for _ in range(N_LAYERS)]
    for a in timeline.annotations:
        rows[a.layer].append(LayoutEntry(a.interval, a.label, a.annotation_id))
    return [
        LayoutRow(
            layer,
            tuple(sorted(entries, key=lambda e: (e.interval.start_frame, e.interval.end_frame, e.annotation_id))),
        )
        for layer, entries in enumerate(rows)
    ]
