"""Domain model for colonoscopy procedure timelines.

A :class:`Timeline` binds a video to a set of interval annotations (colon
segments and anomalies) and point tags (distance marks, findings,
impressions). Everything here is an immutable value object; mutation goes
through :mod:`scopeline.timeline_ops`, and rule checking lives in
:func:`validate_timeline`, which reports rather than raises.

Annotations are layered: colon segments form the outermost row (layer 0)
and must not overlap each other; polyp, IBD and blood-clot annotations sit
on layers 1-3 and may overlap anything. Intervals are half-open in frames,
so adjacent segments never count as overlapping.
"""

from __future__ import annotations

import datetime as dt
import enum
from dataclasses import dataclass, field

from .errors import UnknownLabelCodeError


class LabelKind(enum.Enum):
    SEGMENT = "segment"
    ANOMALY = "anomaly"


class Label(enum.Enum):
    """The nine annotation labels: six colon segments plus three anomalies."""

    RECTUM = "R"
    SIGMOID = "S"
    DESCENDING = "D"
    TRANSVERSE = "T"
    ASCENDING = "A"
    CECUM = "C"
    POLYP = "P"
    IBD = "I"
    BLOOD_CLOT = "B"

    @property
    def code(self) -> str:
        return self.value

    @property
    def kind(self) -> LabelKind:
        return LabelKind.ANOMALY if self in _ANOMALY_LAYERS else LabelKind.SEGMENT

    @property
    def layer(self) -> int:
        """Timeline row: 0 for segments, then P=1, I=2, B=3."""
        return _ANOMALY_LAYERS.get(self, 0)

    @property
    def anatomical_index(self) -> int | None:
        """Position from rectum (0) to cecum (5); None for anomaly labels."""
        try:
            return SEGMENT_LABELS.index(self)
        except ValueError:
            return None

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]


SEGMENT_LABELS: tuple[Label, ...] = (
    Label.RECTUM,
    Label.SIGMOID,
    Label.DESCENDING,
    Label.TRANSVERSE,
    Label.ASCENDING,
    Label.CECUM,
)

ANOMALY_LABELS: tuple[Label, ...] = (Label.POLYP, Label.IBD, Label.BLOOD_CLOT)

_ANOMALY_LAYERS = {Label.POLYP: 1, Label.IBD: 2, Label.BLOOD_CLOT: 3}

_DISPLAY_NAMES = {
    Label.RECTUM: "rectum",
    Label.SIGMOID: "sigmoid",
    Label.DESCENDING: "descending",
    Label.TRANSVERSE: "transverse",
    Label.ASCENDING: "ascending",
    Label.CECUM: "cecum",
    Label.POLYP: "polyp",
    Label.IBD: "IBD",
    Label.BLOOD_CLOT: "blood clot",
}


def label_from_code(code: str) -> Label:
    """Return the label for a single-letter code, e.g. ``"C"`` -> cecum."""
    try:
        return Label(code)
    except ValueError:
        raise UnknownLabelCodeError(f"unknown label code: {code!r}") from None


@dataclass(frozen=True)
class VideoMeta:
    """Identity and clock of the procedure video.

    Duration is always derived from frame_count and fps, never stored.
    """

    video_id: str
    frame_count: int
    fps: float
    source_uri: str | None = None

    def __post_init__(self) -> None:
        if self.frame_count < 1:
            raise ValueError(f"frame_count must be >= 1, got {self.frame_count}")
        if not self.fps > 0:
            raise ValueError(f"fps must be > 0, got {self.fps}")

    @property
    def duration_seconds(self) -> float:
        return self.frame_count / self.fps


@dataclass(frozen=True)
class Interval:
    """Half-open frame range [start_frame, end_frame)."""

    start_frame: int
    end_frame: int

    def __post_init__(self) -> None:
        if self.start_frame < 0:
            raise ValueError(f"start_frame must be >= 0, got {self.start_frame}")
        if self.end_frame <= self.start_frame:
            raise ValueError(
                f"end_frame must exceed start_frame, got [{self.start_frame}, {self.end_frame})"
            )

    @property
    def length(self) -> int:
        return self.end_frame - self.start_frame

    def intersects(self, other: Interval) -> bool:
        return self.start_frame < other.end_frame and other.start_frame < self.end_frame

    def contains_frame(self, frame: int) -> bool:
        return self.start_frame <= frame < self.end_frame


@dataclass(frozen=True)
class Annotation:
    """A labelled interval on the timeline."""

    annotation_id: str
    interval: Interval
    label: Label
    note: str | None = None

    @property
    def layer(self) -> int:
        return self.label.layer


class TagOrigin(enum.Enum):
    MANUAL = "manual"
    TRANSCRIPT = "transcript"


@dataclass(frozen=True)
class Tag:
    """A point event on a frame: distance-from-anus, findings, impressions.

    A tag carrying only a distance is a distance mark (a plain tick on the
    timeline); once findings or impressions are present it is a full tag.
    The constructor does not enforce payload rules — mutators reject bad
    tags up front and validate_timeline reports them on hand-built data.
    """

    tag_id: str
    frame: int
    distance_cm: int | None = None
    findings: str | None = None
    impressions: str | None = None
    origin: TagOrigin = TagOrigin.MANUAL

    @property
    def is_distance_mark(self) -> bool:
        return self.distance_cm is not None and self.findings is None and self.impressions is None

    @property
    def is_empty(self) -> bool:
        return self.distance_cm is None and self.findings is None and self.impressions is None


@dataclass(frozen=True)
class Timeline:
    """Per-procedure container of annotations and tags, bound to one video.

    Annotations and tags are stored in a canonical order (by position, then
    id), so two timelines holding the same sets compare equal regardless of
    insertion order. Ids must be unique within their kind.
    """

    procedure_id: str
    video: VideoMeta
    annotations: tuple[Annotation, ...] = ()
    tags: tuple[Tag, ...] = ()
    patient_ref: str | None = None
    procedure_date: dt.date | None = None

    def __post_init__(self) -> None:
        annotations = tuple(
            sorted(
                self.annotations,
                key=lambda a: (a.interval.start_frame, a.interval.end_frame, a.layer, a.annotation_id),
            )
        )
        tags = tuple(sorted(self.tags, key=lambda t: (t.frame, t.tag_id)))
        object.__setattr__(self, "annotations", annotations)
        object.__setattr__(self, "tags", tags)
        ann_ids = [a.annotation_id for a in annotations]
        if len(set(ann_ids)) != len(ann_ids):
            raise ValueError("duplicate annotation ids on one timeline")
        tag_ids = [t.tag_id for t in tags]
        if len(set(tag_ids)) != len(tag_ids):
            raise ValueError("duplicate tag ids on one timeline")

    def segments(self) -> tuple[Annotation, ...]:
        return tuple(a for a in self.annotations if a.label.kind is LabelKind.SEGMENT)

    def anomalies(self) -> tuple[Annotation, ...]:
        return tuple(a for a in self.annotations if a.label.kind is LabelKind.ANOMALY)

    def annotation_by_id(self, annotation_id: str) -> Annotation | None:
        for a in self.annotations:
            if a.annotation_id == annotation_id:
                return a
        return None


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


class DiagnosticCode(enum.Enum):
    SEGMENT_OVERLAP = "SegmentOverlap"
    OUT_OF_BOUNDS = "OutOfBounds"
    BAD_DISTANCE_GRANULARITY = "BadDistanceGranularity"
    ANOMALY_OUTSIDE_SEGMENT = "AnomalyOutsideSegment"
    SEGMENT_ORDER = "SegmentOrder"
    DISTANCE_SNAPPED = "DistanceSnapped"
    PHASE_RATIO = "PhaseRatio"


@dataclass(frozen=True)
class Diagnostic:
    """One finding of validate_timeline (or of the transcript/phase checks).

    Errors mark invariant violations and block persistence; warnings never
    do — segment gaps over blurry footage are legal, so coverage and
    ordering problems stay advisory.
    """

    severity: Severity
    code: DiagnosticCode
    message: str
    subject: str | None = None


_SEVERITY_RANK = {Severity.ERROR: 0, Severity.WARNING: 1}


def _merged_segment_cover(segments: tuple[Annotation, ...]) -> list[tuple[int, int]]:
    """Union of segment intervals as maximal disjoint [start, end) pieces."""
    pieces: list[tuple[int, int]] = []
    for seg in sorted(segments, key=lambda a: a.interval.start_frame):
        start, end = seg.interval.start_frame, seg.interval.end_frame
        if pieces and start <= pieces[-1][1]:
            pieces[-1] = (pieces[-1][0], max(pieces[-1][1], end))
        else:
            pieces.append((start, end))
    return pieces


def validate_timeline(timeline: Timeline) -> list[Diagnostic]:
    """Check every timeline rule and return the findings, never raising.

    Output is deterministic: errors before warnings, then by start frame
    (tag frame for tag findings), then code, then subject id.
    """
    found: list[tuple[int, Diagnostic]] = []
    frame_count = timeline.video.frame_count

    def add(frame: int, severity: Severity, code: DiagnosticCode, message: str, subject: str | None) -> None:
        found.append((frame, Diagnostic(severity, code, message, subject)))

    for a in timeline.annotations:
        if a.interval.end_frame > frame_count:
            add(
                a.interval.start_frame,
                Severity.ERROR,
                DiagnosticCode.OUT_OF_BOUNDS,
                f"annotation {a.annotation_id} ends at frame {a.interval.end_frame}, "
                f"past the video's {frame_count} frames",
                a.annotation_id,
            )

    for t in timeline.tags:
        if not 0 <= t.frame < frame_count:
            add(
                t.frame,
                Severity.ERROR,
                DiagnosticCode.OUT_OF_BOUNDS,
                f"tag {t.tag_id} sits on frame {t.frame}, outside [0, {frame_count})",
                t.tag_id,
            )
        if t.distance_cm is not None and (t.distance_cm < 0 or t.distance_cm % 5 != 0):
            add(
                t.frame,
                Severity.ERROR,
                DiagnosticCode.BAD_DISTANCE_GRANULARITY,
                f"tag {t.tag_id} distance {t.distance_cm} cm is not a non-negative multiple of 5",
                t.tag_id,
            )

    segments = timeline.segments()
    for i, first in enumerate(segments):
        for second in segments[i + 1 :]:
            if second.interval.start_frame >= first.interval.end_frame:
                break
            if first.interval.intersects(second.interval):
                add(
                    second.interval.start_frame,
                    Severity.ERROR,
                    DiagnosticCode.SEGMENT_OVERLAP,
                    f"segments {first.annotation_id} and {second.annotation_id} overlap on "
                    f"[{second.interval.start_frame}, {min(first.interval.end_frame, second.interval.end_frame)})",
                    second.annotation_id,
                )

    cover = _merged_segment_cover(segments)
    for a in timeline.anomalies():
        covered = any(s <= a.interval.start_frame and a.interval.end_frame <= e for s, e in cover)
        if not covered:
            add(
                a.interval.start_frame,
                Severity.WARNING,
                DiagnosticCode.ANOMALY_OUTSIDE_SEGMENT,
                f"{a.label.display_name} annotation {a.annotation_id} is not fully inside "
                "any annotated colon segment",
                a.annotation_id,
            )

    first_cecum = next((s for s in segments if s.label is Label.CECUM), None)
    if first_cecum is None:
        insertion, withdrawal = list(segments), []
    else:
        insertion = [s for s in segments if s.interval.start_frame < first_cecum.interval.start_frame]
        withdrawal = [
            s
            for s in segments
            if s is not first_cecum and s.interval.start_frame > first_cecum.interval.start_frame
        ]
    for phase, expect_descending in ((insertion, False), (withdrawal, True)):
        for prev, cur in zip(phase, phase[1:]):
            prev_idx, cur_idx = prev.label.anatomical_index, cur.label.anatomical_index
            out_of_order = cur_idx > prev_idx if expect_descending else cur_idx < prev_idx
            if out_of_order:
                phase_name = "withdrawal" if expect_descending else "insertion"
                add(
                    cur.interval.start_frame,
                    Severity.WARNING,
                    DiagnosticCode.SEGMENT_ORDER,
                    f"{cur.label.display_name} segment {cur.annotation_id} breaks the "
                    f"{phase_name}-phase anatomical order after {prev.label.display_name}",
                    cur.annotation_id,
                )

    found.sort(key=lambda item: (_SEVERITY_RANK[item[1].severity], item[0], item[1].code.value, item[1].subject or ""))
    return [diag for _, diag in found]


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)
