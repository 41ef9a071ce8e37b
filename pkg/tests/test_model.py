from __future__ import annotations

import pytest

from scopeline.errors import UnknownLabelCodeError
from scopeline.model import (
    ANOMALY_LABELS,
    SEGMENT_LABELS,
    Annotation,
    Diagnostic,
    DiagnosticCode,
    Interval,
    Label,
    LabelKind,
    Severity,
    Tag,
    Timeline,
    VideoMeta,
    has_errors,
    label_from_code,
    validate_timeline,
)

VIDEO = VideoMeta("v", 27000, 15.0)


def annotation(aid, start, end, code):
    return Annotation(aid, Interval(start, end), label_from_code(code))


class TestLabel:
    def test_cecum_is_segment_five(self):
        label = label_from_code("C")
        assert label.kind is LabelKind.SEGMENT
        assert label.anatomical_index == 5
        assert label.layer == 0

    def test_polyp_is_anomaly_layer_one(self):
        label = label_from_code("P")
        assert label.kind is LabelKind.ANOMALY
        assert label.layer == 1
        assert label.anatomical_index is None

    def test_unknown_code_rejected(self):
        with pytest.raises(UnknownLabelCodeError):
            label_from_code("X")

    def test_exactly_nine_codes(self):
        assert {label.code for label in Label} == set("RSDTACPIB")

    def test_layering_is_exhaustive_and_fixed(self):
        # every code maps to exactly one layer; segments outermost
        layers = {label: label.layer for label in Label}
        for label in SEGMENT_LABELS:
            assert layers[label] == 0
        assert layers[Label.POLYP] == 1
        assert layers[Label.IBD] == 2
        assert layers[Label.BLOOD_CLOT] == 3

    def test_anatomical_order(self):
        assert [label.anatomical_index for label in SEGMENT_LABELS] == [0, 1, 2, 3, 4, 5]

    def test_kind_partition(self):
        assert set(SEGMENT_LABELS) | set(ANOMALY_LABELS) == set(Label)
        assert not set(SEGMENT_LABELS) & set(ANOMALY_LABELS)


class TestValueObjects:
    def test_interval_rejects_empty_and_negative(self):
        with pytest.raises(ValueError):
            Interval(100, 100)
        with pytest.raises(ValueError):
            Interval(-1, 100)
        with pytest.raises(ValueError):
            Interval(200, 100)

    def test_video_meta_rejects_bad_clock(self):
        with pytest.raises(ValueError):
            VideoMeta("v", 0, 15.0)
        with pytest.raises(ValueError):
            VideoMeta("v", 100, 0.0)

    def test_duration_is_derived(self):
        assert VideoMeta("v", 27000, 15.0).duration_seconds == 1800.0

    def test_tag_classification(self):
        distance_only = Tag("t1", 10, distance_cm=45)
        assert distance_only.is_distance_mark
        with_findings = Tag("t2", 10, distance_cm=45, findings="sessile polyp")
        assert not with_findings.is_distance_mark

    def test_timeline_order_is_canonical(self):
        a1 = annotation("a1", 0, 100, "R")
        a2 = annotation("a2", 100, 200, "S")
        one = Timeline("p", VIDEO, annotations=(a1, a2))
        other = Timeline("p", VIDEO, annotations=(a2, a1))
        assert one == other
        assert [a.annotation_id for a in one.annotations] == ["a1", "a2"]

    def test_timeline_rejects_duplicate_ids(self):
        a1 = annotation("a1", 0, 100, "R")
        dup = annotation("a1", 200, 300, "S")
        with pytest.raises(ValueError):
            Timeline("p", VIDEO, annotations=(a1, dup))


class TestValidateTimeline:
    def test_clean_timeline_has_no_diagnostics(self, case1_timeline):
        assert validate_timeline(case1_timeline) == []

    def test_segment_overlap_is_an_error(self):
        timeline = Timeline(
            "p",
            VIDEO,
            annotations=(annotation("a1", 100, 200, "T"), annotation("a2", 150, 300, "A")),
        )
        diagnostics = validate_timeline(timeline)
        assert [d.code for d in diagnostics] == [DiagnosticCode.SEGMENT_OVERLAP]
        assert diagnostics[0].severity is Severity.ERROR
        assert diagnostics[0].subject == "a2"

    def test_anomaly_outside_segment_is_a_warning(self):
        timeline = Timeline("p", VIDEO, annotations=(annotation("a1", 500, 520, "P"),))
        diagnostics = validate_timeline(timeline)
        assert [d.code for d in diagnostics] == [DiagnosticCode.ANOMALY_OUTSIDE_SEGMENT]
        assert diagnostics[0].severity is Severity.WARNING
        assert not has_errors(diagnostics)

    def test_partially_covered_anomaly_warns(self):
        timeline = Timeline(
            "p",
            VIDEO,
            annotations=(annotation("a1", 100, 200, "T"), annotation("a2", 150, 250, "P")),
        )
        codes = [d.code for d in validate_timeline(timeline)]
        assert DiagnosticCode.ANOMALY_OUTSIDE_SEGMENT in codes

    def test_anomaly_covered_by_adjacent_segments(self):
        # the union of touching half-open segments covers across the seam
        timeline = Timeline(
            "p",
            VIDEO,
            annotations=(
                annotation("a1", 100, 200, "T"),
                annotation("a2", 200, 300, "A"),
                annotation("a3", 150, 250, "P"),
            ),
        )
        assert validate_timeline(timeline) == []

    def test_insertion_phase_order_warning(self):
        # R,S,T,D reads anatomical indices 0,1,3,2: one inversion at D
        timeline = Timeline(
            "p",
            VIDEO,
            annotations=(
                annotation("a1", 0, 100, "R"),
                annotation("a2", 100, 200, "S"),
                annotation("a3", 200, 300, "T"),
                annotation("a4", 300, 400, "D"),
            ),
        )
        diagnostics = validate_timeline(timeline)
        assert [d.code for d in diagnostics] == [DiagnosticCode.SEGMENT_ORDER]
        assert diagnostics[0].subject == "a4"

    def test_withdrawal_phase_order_warning(self):
        # after the cecum the indices must not increase
        timeline = Timeline(
            "p",
            VIDEO,
            annotations=(
                annotation("a1", 0, 100, "A"),
                annotation("a2", 100, 200, "C"),
                annotation("a3", 200, 300, "D"),
                annotation("a4", 300, 400, "T"),
            ),
        )
        diagnostics = validate_timeline(timeline)
        assert [d.code for d in diagnostics] == [DiagnosticCode.SEGMENT_ORDER]
        assert diagnostics[0].subject == "a4"

    def test_out_of_bounds_annotation_and_tag(self):
        timeline = Timeline(
            "p",
            VideoMeta("v", 1000, 15.0),
            annotations=(annotation("a1", 900, 1200, "R"),),
            tags=(Tag("t1", 1000, distance_cm=45),),
        )
        codes = [d.code for d in validate_timeline(timeline)]
        assert codes.count(DiagnosticCode.OUT_OF_BOUNDS) == 2

    def test_bad_distance_granularity(self):
        timeline = Timeline("p", VIDEO, tags=(Tag("t1", 10, distance_cm=47),))
        diagnostics = validate_timeline(timeline)
        assert [d.code for d in diagnostics] == [DiagnosticCode.BAD_DISTANCE_GRANULARITY]
        assert diagnostics[0].severity is Severity.ERROR

    def test_errors_sort_before_warnings(self):
        timeline = Timeline(
            "p",
            VIDEO,
            annotations=(annotation("a1", 500, 520, "P"),),
            tags=(Tag("t1", 9000, distance_cm=47),),
        )
        diagnostics = validate_timeline(timeline)
        assert [d.severity for d in diagnostics] == [Severity.ERROR, Severity.WARNING]

    def test_validation_is_pure(self, case3_timeline):
        assert validate_timeline(case3_timeline) == validate_timeline(case3_timeline)
        broken = Timeline(
            "p",
            VIDEO,
            annotations=(annotation("a1", 100, 200, "T"), annotation("a2", 150, 300, "A")),
        )
        assert validate_timeline(broken) == validate_timeline(broken)
