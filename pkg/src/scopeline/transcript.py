"""Timestamped say-out-loud transcript parsing and tag import.

During a procedure the endoscopist calls out findings and
distances-from-anus; with the audio transcribed to ``<seconds> TAB
<utterance>`` lines, this module turns utterances into tag events and
applies them to a timeline.

The keyword grammar is deliberately small and case-insensitive:

* G1 — a distance: an integer or spelled-out number (zero through three
  hundred) followed by ``cm``/``centimeter``/``centimeters``.
* G2 — a colon segment keyword: rectum, sigmoid, descending, transverse,
  ascending, cecum.
* G3 — an anomaly keyword: ``polyp``; ``ibd``/``inflammation``/``crohn``;
  ``bleeding``/``blood clot``/``blood``.
* G4 — a landmark phrase: splenic flexure, hepatic flexure, ileocecal
  valve, appendiceal orifice.

Whatever the grammar cannot place is not discarded silently: each
contiguous run of three or more unmatched words becomes a free-text
finding, so descriptive speech survives into the tags.

Spoken distances are noisy, so they are snapped to the endoscope's 5 cm
marks instead of rejected; a snap is reported as a warning carrying the
raw value. Segment keywords yield suggestion tags only — an interval needs
an end frame the speaker has not reached yet.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import OutOfBoundsError
from .model import (
    Diagnostic,
    DiagnosticCode,
    Label,
    LabelKind,
    Severity,
    TagOrigin,
    Timeline,
)
from . import timeline_ops


@dataclass(frozen=True)
class TranscriptLine:
    time_s: float
    text: str


@dataclass(frozen=True)
class MalformedLine:
    line_number: int
    content: str
    reason: str


@dataclass(frozen=True)
class ParseResult:
    """Lenient parse output: good lines plus per-line errors."""

    lines: tuple[TranscriptLine, ...]
    errors: tuple[MalformedLine, ...]


class Landmark(enum.Enum):
    SPLENIC_FLEXURE = "splenic flexure"
    HEPATIC_FLEXURE = "hepatic flexure"
    ILEOCECAL_VALVE = "ileocecal valve"
    APPENDICEAL_ORIFICE = "appendiceal orifice"

    @property
    def phrase(self) -> str:
        return self.value


@dataclass(frozen=True)
class DistanceCall:
    raw_cm: int


@dataclass(frozen=True)
class SegmentCall:
    label: Label


@dataclass(frozen=True)
class AnomalyCall:
    label: Label


@dataclass(frozen=True)
class LandmarkCall:
    landmark: Landmark


@dataclass(frozen=True)
class FreeFinding:
    text: str


EventPayload = Union[DistanceCall, SegmentCall, AnomalyCall, LandmarkCall, FreeFinding]


@dataclass(frozen=True)
class UtteranceEvent:
    at_s: float
    payload: EventPayload


def parse_transcript(raw: str) -> ParseResult:
    """Parse transcript text, collecting malformed lines instead of raising.

    Records are ``<seconds as decimal> TAB <utterance>``; ``#`` lines are
    comments and blank lines are skipped. Output is sorted by timestamp,
    ties keeping file order.
    """
    lines: list[TranscriptLine] = []
    errors: list[MalformedLine] = []
    for line_number, line in enumerate(raw.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        timestamp_part, sep, utterance = line.partition("\t")
        if not sep:
            errors.append(MalformedLine(line_number, line, "no TAB between timestamp and utterance"))
            continue
        try:
            time_s = float(timestamp_part.strip())
        except ValueError:
            errors.append(MalformedLine(line_number, line, f"timestamp {timestamp_part.strip()!r} is not a number"))
            continue
        if not math.isfinite(time_s) or time_s < 0:
            errors.append(MalformedLine(line_number, line, f"timestamp {time_s} must be a finite non-negative number"))
            continue
        if not utterance.strip():
            errors.append(MalformedLine(line_number, line, "empty utterance"))
            continue
        lines.append(TranscriptLine(time_s, utterance.strip()))
    lines.sort(key=lambda entry: entry.time_s)
    return ParseResult(tuple(lines), tuple(errors))


_UNITS = {
    "zero": 0, "one": 1, "two": 2, "three": 3, "four": 4,
    "five": 5, "six": 6, "seven": 7, "eight": 8, "nine": 9,
}
_TEENS = {
    "ten": 10, "eleven": 11, "twelve": 12, "thirteen": 13, "fourteen": 14,
    "fifteen": 15, "sixteen": 16, "seventeen": 17, "eighteen": 18, "nineteen": 19,
}
_TENS = {
    "twenty": 20, "thirty": 30, "forty": 40, "fifty": 50,
    "sixty": 60, "seventy": 70, "eighty": 80, "ninety": 90,
}
_MAX_NUMBER_WORDS = 300

_DISTANCE_UNITS = {"cm", "centimeter", "centimeters"}

_SEGMENT_KEYWORDS = {label.display_name.lower(): label for label in Label if label.kind is LabelKind.SEGMENT}

_ANOMALY_KEYWORDS = {
    "polyp": Label.POLYP,
    "ibd": Label.IBD,
    "inflammation": Label.IBD,
    "crohn": Label.IBD,
    "bleeding": Label.BLOOD_CLOT,
    "blood": Label.BLOOD_CLOT,
}

_ANOMALY_PHRASES = {("blood", "clot"): Label.BLOOD_CLOT}

_LANDMARK_PHRASES = {tuple(landmark.phrase.split()): landmark for landmark in Landmark}

_TOKEN_RE = re.compile(r"\d+|[a-zA-Z]+(?:'[a-zA-Z]+)*")


@dataclass(frozen=True)
class _Token:
    raw: str
    norm: str


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    for match in _TOKEN_RE.finditer(text):
        raw = match.group(0)
        norm = raw.lower()
        if norm.endswith("'s"):
            norm = norm[:-2]
        tokens.append(_Token(raw, norm))
    return tokens


def _parse_number(tokens: list[_Token], i: int) -> tuple[int, int] | None:
    """Parse an integer or number words at position i -> (value, next index)."""
    if i >= len(tokens):
        return None
    if tokens[i].norm.isdigit():
        return int(tokens[i].norm), i + 1

    value = 0
    j = i
    if j < len(tokens) and tokens[j].norm in _UNITS and j + 1 < len(tokens) and tokens[j + 1].norm == "hundred":
        value = _UNITS[tokens[j].norm] * 100
        j += 2
        if j < len(tokens) and tokens[j].norm == "and" and j + 1 < len(tokens) and (
            tokens[j + 1].norm in _TENS or tokens[j + 1].norm in _TEENS or tokens[j + 1].norm in _UNITS
        ):
            j += 1
    if j < len(tokens) and tokens[j].norm in _TENS:
        value += _TENS[tokens[j].norm]
        j += 1
        if j < len(tokens) and tokens[j].norm in _UNITS and tokens[j].norm != "zero":
            value += _UNITS[tokens[j].norm]
            j += 1
    elif j < len(tokens) and tokens[j].norm in _TEENS:
        value += _TEENS[tokens[j].norm]
        j += 1
    elif j < len(tokens) and tokens[j].norm in _UNITS:
        # bare unit, or the tail of "<unit> hundred <unit>"
        value += _UNITS[tokens[j].norm]
        j += 1

    if j == i or value > _MAX_NUMBER_WORDS:
        return None
    return value, j


def interpret_line(line: TranscriptLine) -> list[UtteranceEvent]:
    """Apply the G1-G4 grammar to one utterance, left to right.

    Never raises: anything the grammar cannot read degrades to a free
    finding (runs of >= 3 unmatched words) or to nothing.
    """
    tokens = _tokenize(line.text)
    events: list[UtteranceEvent] = []
    residual: list[str] = []

    def flush_residual() -> None:
        if len(residual) >= 3:
            events.append(UtteranceEvent(line.time_s, FreeFinding(" ".join(residual))))
        residual.clear()

    i = 0
    while i < len(tokens):
        pair = (tokens[i].norm, tokens[i + 1].norm) if i + 1 < len(tokens) else None

        if pair in _LANDMARK_PHRASES:
            flush_residual()
            events.append(UtteranceEvent(line.time_s, LandmarkCall(_LANDMARK_PHRASES[pair])))
            i += 2
            continue

        number = _parse_number(tokens, i)
        if number is not None and number[1] < len(tokens) and tokens[number[1]].norm in _DISTANCE_UNITS:
            flush_residual()
            events.append(UtteranceEvent(line.time_s, DistanceCall(number[0])))
            i = number[1] + 1
            continue

        if pair in _ANOMALY_PHRASES:
            flush_residual()
            events.append(UtteranceEvent(line.time_s, AnomalyCall(_ANOMALY_PHRASES[pair])))
            i += 2
            continue

        norm = tokens[i].norm
        if norm in _SEGMENT_KEYWORDS:
            flush_residual()
            events.append(UtteranceEvent(line.time_s, SegmentCall(_SEGMENT_KEYWORDS[norm])))
            i += 1
            continue
        if norm in _ANOMALY_KEYWORDS:
            flush_residual()
            events.append(UtteranceEvent(line.time_s, AnomalyCall(_ANOMALY_KEYWORDS[norm])))
            i += 1
            continue

        residual.append(tokens[i].raw)
        i += 1

    flush_residual()
    return events


def interpret_transcript(lines: tuple[TranscriptLine, ...] | list[TranscriptLine]) -> list[UtteranceEvent]:
    events: list[UtteranceEvent] = []
    for line in lines:
        events.extend(interpret_line(line))
    return events


def snap5(distance_cm: int) -> int:
    """Round to the nearest endoscope mark (5 cm), half away from zero."""
    return 5 * math.floor(distance_cm / 5 + 0.5)


def _frame_for(at_s: float, timeline: Timeline) -> int:
    frame = math.floor(at_s * timeline.video.fps + 0.5)
    return min(max(frame, 0), timeline.video.frame_count - 1)


def _findings_text(payload: EventPayload) -> str:
    if isinstance(payload, AnomalyCall):
        return payload.label.display_name
    if isinstance(payload, SegmentCall):
        return f"segment: {payload.label.display_name}"
    if isinstance(payload, LandmarkCall):
        return payload.landmark.phrase
    if isinstance(payload, FreeFinding):
        return payload.text
    raise TypeError(f"no findings text for {payload!r}")


def apply_events(
    timeline: Timeline, events: list[UtteranceEvent]
) -> tuple[Timeline, list[Diagnostic]]:
    """Turn utterance events into transcript-origin tags, one tag per event.

    Distance calls become distance marks (snapped to 5 cm, with a warning
    when snapping changed the value); every other event becomes a full tag
    whose findings text is the call's canonical name or the free text.
    Applies atomically: timestamps are bounds-checked before any tag is
    created.
    """
    duration = timeline.video.duration_seconds
    for event in events:
        if event.at_s > duration:
            raise OutOfBoundsError(
                f"event at {event.at_s} s is past the video duration of {duration} s"
            )

    diagnostics: list[Diagnostic] = []
    for event in events:
        frame = _frame_for(event.at_s, timeline)
        if isinstance(event.payload, DistanceCall):
            snapped = snap5(event.payload.raw_cm)
            timeline, tag_id = timeline_ops.add_tag(
                timeline, frame, distance_cm=snapped, origin=TagOrigin.TRANSCRIPT
            )
            if snapped != event.payload.raw_cm:
                diagnostics.append(
                    Diagnostic(
                        Severity.WARNING,
                        DiagnosticCode.DISTANCE_SNAPPED,
                        f"distance {event.payload.raw_cm} cm at {event.at_s} s snapped to {snapped} cm",
                        tag_id,
                    )
                )
        else:
            timeline, _ = timeline_ops.add_tag(
                timeline,
                frame,
                findings=_findings_text(event.payload),
                origin=TagOrigin.TRANSCRIPT,
            )
    return timeline, diagnostics
