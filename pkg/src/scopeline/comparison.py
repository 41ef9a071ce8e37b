"""Cross-procedure comparison: case digests, the multi-case table, and
anomaly alignment between two procedures.

Case summaries reuse the report module's finding derivation, so the
comparison table and the report always agree on what was found where.
Alignment pairs anomalies of the same label in the same segment whose
tagged distances agree within a threshold, which is what a follow-up
review needs: "is this the same polyp we saw last year?".
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import BadThresholdError, EmptyInputError, InvalidTimelineError
from .model import Label, SEGMENT_LABELS, ANOMALY_LABELS, Timeline, has_errors, validate_timeline
from .reporting import CompoundAttribute, derive_findings
from .timeline_ops import PhaseTimes, compute_phase_times, phase_ratio_warning

DEFAULT_MATCH_THRESHOLD_CM = 10

ABSENT_CELL = "—"  # em dash, the table's "not available" marker

CSV_HEADER = "case,R,S,D,T,A,C,insertion_s,withdrawal_s,complete"


@dataclass(frozen=True)
class AnomalyRecord:
    """One anomaly of a case digest: label, location, tagged distance."""

    label: Label
    segment: Label | None
    distance_cm: int | None
    compound_attributes: frozenset[CompoundAttribute]
    source_annotation_id: str


@dataclass(frozen=True, eq=True)
class CaseSummary:
    procedure_id: str
    anomalies: tuple[AnomalyRecord, ...]
    counts_by_segment: dict[Label | None, dict[Label, int]] = field(compare=False)
    phase_times: PhaseTimes = PhaseTimes(complete=False)

    @property
    def complete(self) -> bool:
        return self.phase_times.complete


class MatchStatus(enum.Enum):
    MATCHED = "matched"
    ONLY_LEFT = "only_left"
    ONLY_RIGHT = "only_right"


@dataclass(frozen=True)
class AnomalyMatch:
    left: AnomalyRecord | None
    right: AnomalyRecord | None
    delta_distance_cm: int
    status: MatchStatus


@dataclass(frozen=True)
class ComparisonRow:
    procedure_id: str
    counts: dict[Label | None, dict[Label, int]]
    insertion_s: float | None
    withdrawal_s: float | None
    complete: bool
    phase_ratio_flag: bool

    def total_anomalies(self) -> int:
        return sum(sum(by_label.values()) for by_label in self.counts.values())


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]

    def to_csv(self) -> str:
        """Fixed-header delimiter-separated export; unsegmented anomalies are
        not representable in the six segment columns and are left out."""
        lines = [CSV_HEADER]
        for row in self.rows:
            cells = [row.procedure_id]
            for segment in SEGMENT_LABELS:
                by_label = row.counts.get(segment, {})
                cells.append(
                    "P{}/I{}/B{}".format(*(by_label.get(label, 0) for label in ANOMALY_LABELS))
                )
            cells.append(f"{row.insertion_s:.1f}" if row.insertion_s is not None else ABSENT_CELL)
            cells.append(f"{row.withdrawal_s:.1f}" if row.withdrawal_s is not None else ABSENT_CELL)
            cells.append("true" if row.complete else "false")
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


def summarize_case(timeline: Timeline) -> CaseSummary:
    """Digest a procedure for the comparison table; requires a clean timeline."""
    diagnostics = validate_timeline(timeline)
    if has_errors(diagnostics):
        raise InvalidTimelineError("cannot summarize a timeline with errors", diagnostics)
    anomalies = tuple(
        AnomalyRecord(
            label=entry.anomaly_label,
            segment=entry.segment,
            distance_cm=entry.distance_cm,
            compound_attributes=entry.compound_attributes,
            source_annotation_id=entry.source_annotation_id,
        )
        for entry in derive_findings(timeline)
    )
    counts: dict[Label | None, dict[Label, int]] = {}
    for record in anomalies:
        by_label = counts.setdefault(record.segment, {})
        by_label[record.label] = by_label.get(record.label, 0) + 1
    return CaseSummary(
        procedure_id=timeline.procedure_id,
        anomalies=anomalies,
        counts_by_segment=counts,
        phase_times=compute_phase_times(timeline),
    )


def compare_cases(summaries: list[CaseSummary]) -> ComparisonTable:
    """One table row per case, in input order."""
    if not summaries:
        raise EmptyInputError("no case summaries to compare")
    rows = []
    for summary in summaries:
        times = summary.phase_times
        rows.append(
            ComparisonRow(
                procedure_id=summary.procedure_id,
                counts={seg: dict(by_label) for seg, by_label in summary.counts_by_segment.items()},
                insertion_s=times.insertion_s,
                withdrawal_s=times.withdrawal_s,
                complete=summary.complete,
                phase_ratio_flag=phase_ratio_warning(times) is not None,
            )
        )
    return ComparisonTable(tuple(rows))


def _sort_group_key(key: tuple[Label, Label | None]) -> tuple:
    label, segment = key
    return (label.layer, segment is None, segment.code if segment is not None else "")


def align_anomalies(
    left: CaseSummary, right: CaseSummary, threshold_cm: int = DEFAULT_MATCH_THRESHOLD_CM
) -> list[AnomalyMatch]:
    """Greedily pair up anomalies of two cases for follow-up review.

    Only anomalies with the same label in the same segment can match, and
    their distances must agree within the threshold; distances differ
    across procedures when the scope loops, so closest-first greedy
    matching is used for its explainability. Anomalies without a distance
    match only each other. Unmatched anomalies surface as only-left /
    only-right entries.
    """
    if threshold_cm < 0 or threshold_cm % 5 != 0:
        raise BadThresholdError(
            f"threshold must be a non-negative multiple of 5, got {threshold_cm}"
        )

    groups: dict[tuple[Label, Label | None], tuple[list[AnomalyRecord], list[AnomalyRecord]]] = {}
    for record in left.anomalies:
        groups.setdefault((record.label, record.segment), ([], []))[0].append(record)
    for record in right.anomalies:
        groups.setdefault((record.label, record.segment), ([], []))[1].append(record)

    matches: list[AnomalyMatch] = []
    for key in sorted(groups, key=_sort_group_key):
        group_left, group_right = groups[key]
        matches.extend(_align_group(group_left, group_right, threshold_cm))
    return matches


def _align_group(
    lefts: list[AnomalyRecord], rights: list[AnomalyRecord], threshold_cm: int
) -> list[AnomalyMatch]:
    matched: list[AnomalyMatch] = []
    unmatched_left = list(lefts)
    unmatched_right = list(rights)

    # distance-less anomalies pair with each other (delta 0), in listed order
    no_distance_left = [r for r in unmatched_left if r.distance_cm is None]
    no_distance_right = [r for r in unmatched_right if r.distance_cm is None]
    for l, r in zip(no_distance_left, no_distance_right):
        matched.append(AnomalyMatch(l, r, 0, MatchStatus.MATCHED))
        unmatched_left.remove(l)
        unmatched_right.remove(r)

    def candidates() -> list[tuple[int, int, int, AnomalyRecord, AnomalyRecord]]:
        pairs = []
        for l in unmatched_left:
            if l.distance_cm is None:
                continue
            for r in unmatched_right:
                if r.distance_cm is None:
                    continue
                delta = abs(l.distance_cm - r.distance_cm)
                if delta <= threshold_cm:
                    pairs.append((delta, l.distance_cm, r.distance_cm, l, r))
        return pairs

    while True:
        pairs = candidates()
        if not pairs:
            break
        _, _, _, l, r = min(pairs, key=lambda p: p[:3])
        matched.append(AnomalyMatch(l, r, r.distance_cm - l.distance_cm, MatchStatus.MATCHED))
        unmatched_left.remove(l)
        unmatched_right.remove(r)

    for l in unmatched_left:
        matched.append(AnomalyMatch(l, None, 0, MatchStatus.ONLY_LEFT))
    for r in unmatched_right:
        matched.append(AnomalyMatch(None, r, 0, MatchStatus.ONLY_RIGHT))
    return matched
