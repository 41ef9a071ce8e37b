from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from scopeline.errors import OutOfBoundsError
from scopeline.model import (
    DiagnosticCode,
    Label,
    TagOrigin,
    Timeline,
    VideoMeta,
    validate_timeline,
)
from scopeline.transcript import (
    AnomalyCall,
    DistanceCall,
    FreeFinding,
    Landmark,
    LandmarkCall,
    SegmentCall,
    TranscriptLine,
    apply_events,
    interpret_line,
    interpret_transcript,
    parse_transcript,
    snap5,
    UtteranceEvent,
)

VIDEO = VideoMeta("v", 27000, 15.0)


def line(text, at=0.0):
    return TranscriptLine(at, text)


def payloads(text):
    return [event.payload for event in interpret_line(line(text))]


class TestParseTranscript:
    def test_basic_line(self):
        result = parse_transcript("240.0\tforty five centimeters\n")
        assert result.errors == ()
        assert result.lines == (TranscriptLine(240.0, "forty five centimeters"),)

    def test_comments_and_blanks_skipped(self):
        result = parse_transcript("# prep notes\n\n   \n12.5\tpolyp\n")
        assert len(result.lines) == 1
        assert result.errors == ()

    def test_malformed_timestamp_collected(self):
        result = parse_transcript("abc\tpolyp\n10\tcecum\n")
        assert len(result.errors) == 1
        assert result.errors[0].line_number == 1
        assert len(result.lines) == 1  # parsing continues past the bad line

    def test_missing_tab_is_malformed(self):
        result = parse_transcript("240.0 polyp\n")
        assert len(result.errors) == 1

    def test_negative_timestamp_is_malformed(self):
        result = parse_transcript("-3\tpolyp\n")
        assert len(result.errors) == 1

    def test_empty_utterance_is_malformed(self):
        result = parse_transcript("240.0\t   \n")
        assert len(result.errors) == 1

    def test_output_sorted_with_stable_ties(self):
        raw = "20\tsecond\n10\tfirst\n20\tthird\n"
        result = parse_transcript(raw)
        assert [entry.text for entry in result.lines] == ["first", "second", "third"]

    def test_parse_is_pure(self):
        raw = "20\ttwo\n10\tone\nbroken\n"
        assert parse_transcript(raw) == parse_transcript(raw)


class TestGrammar:
    def test_g1_integer_distance(self):
        assert payloads("45 centimeters") == [DistanceCall(45)]
        assert payloads("105 cm") == [DistanceCall(105)]
        assert payloads("45cm") == [DistanceCall(45)]

    def test_g1_number_words(self):
        assert payloads("forty five centimeters") == [DistanceCall(45)]
        assert payloads("forty-five cm") == [DistanceCall(45)]
        assert payloads("twelve cm") == [DistanceCall(12)]
        assert payloads("one hundred five cm") == [DistanceCall(105)]
        assert payloads("one hundred and five cm") == [DistanceCall(105)]
        assert payloads("two hundred thirty five cm") == [DistanceCall(235)]
        assert payloads("three hundred centimeters") == [DistanceCall(300)]
        assert payloads("zero cm") == [DistanceCall(0)]

    def test_number_without_unit_is_not_a_distance(self):
        assert payloads("45") == []
        assert payloads("polyp at 45") == [AnomalyCall(Label.POLYP)]

    def test_g2_segment_keywords(self):
        for word, label in [
            ("rectum", Label.RECTUM),
            ("sigmoid", Label.SIGMOID),
            ("descending", Label.DESCENDING),
            ("transverse", Label.TRANSVERSE),
            ("ascending", Label.ASCENDING),
            ("cecum", Label.CECUM),
        ]:
            assert payloads(word) == [SegmentCall(label)]

    def test_g2_in_context(self):
        assert payloads("entering the transverse colon") == [SegmentCall(Label.TRANSVERSE)]

    def test_g3_anomaly_keywords(self):
        assert payloads("polyp") == [AnomalyCall(Label.POLYP)]
        for word in ("ibd", "inflammation", "crohn"):
            assert payloads(word) == [AnomalyCall(Label.IBD)]
        for phrase in ("bleeding", "blood clot", "blood"):
            assert payloads(phrase) == [AnomalyCall(Label.BLOOD_CLOT)]

    def test_g3_possessive_crohns(self):
        assert payloads("crohn's") == [AnomalyCall(Label.IBD)]

    def test_g4_landmark_phrases(self):
        assert payloads("splenic flexure") == [LandmarkCall(Landmark.SPLENIC_FLEXURE)]
        assert payloads("hepatic flexure") == [LandmarkCall(Landmark.HEPATIC_FLEXURE)]
        assert payloads("ileocecal valve") == [LandmarkCall(Landmark.ILEOCECAL_VALVE)]
        assert payloads("appendiceal orifice") == [LandmarkCall(Landmark.APPENDICEAL_ORIFICE)]

    def test_multiple_rules_fire_left_to_right(self):
        assert payloads("polyp at 105 cm") == [AnomalyCall(Label.POLYP), DistanceCall(105)]

    def test_case_insensitive(self):
        assert payloads("POLYP AT 105 CM") == [AnomalyCall(Label.POLYP), DistanceCall(105)]

    def test_unmatched_long_run_becomes_free_finding(self):
        assert payloads("patient tolerating procedure well") == [
            FreeFinding("patient tolerating procedure well")
        ]

    def test_short_residual_runs_are_dropped(self):
        # "entering the" (2 words) and "colon" (1 word) never reach 3 words
        assert payloads("entering the transverse colon") == [SegmentCall(Label.TRANSVERSE)]
        assert payloads("at the cecum") == [SegmentCall(Label.CECUM)]

    def test_residual_run_alongside_matches(self):
        result = payloads("we can see a small sessile polyp")
        assert result == [
            FreeFinding("we can see a small sessile"),
            AnomalyCall(Label.POLYP),
        ]

    def test_interpret_is_pure(self):
        sample = line("polyp at 105 cm near the splenic flexure")
        assert interpret_line(sample) == interpret_line(sample)


class TestSnap5:
    @pytest.mark.parametrize("raw,expected", [(47, 45), (48, 50), (45, 45), (2, 0), (3, 5), (0, 0)])
    def test_examples(self, raw, expected):
        assert snap5(raw) == expected

    @given(st.integers(0, 300))
    def test_divisible_and_close(self, distance):
        snapped = snap5(distance)
        assert snapped % 5 == 0
        assert abs(snapped - distance) <= 2
        assert snapped >= 0


class TestApplyEvents:
    def test_snapped_distance_call(self):
        timeline = Timeline("p", VIDEO)
        event = UtteranceEvent(240.0, DistanceCall(47))
        timeline, diagnostics = apply_events(timeline, [event])
        tag = timeline.tags[0]
        assert tag.frame == 3600
        assert tag.distance_cm == 45
        assert tag.origin is TagOrigin.TRANSCRIPT
        assert tag.is_distance_mark
        assert [d.code for d in diagnostics] == [DiagnosticCode.DISTANCE_SNAPPED]
        assert "47" in diagnostics[0].message

    def test_exact_distance_has_no_warning(self):
        timeline, diagnostics = apply_events(
            Timeline("p", VIDEO), [UtteranceEvent(240.0, DistanceCall(45))]
        )
        assert diagnostics == []
        assert timeline.tags[0].distance_cm == 45

    def test_empty_event_list_is_identity(self):
        timeline = Timeline("p", VIDEO)
        applied, diagnostics = apply_events(timeline, [])
        assert applied == timeline
        assert diagnostics == []

    def test_event_past_duration_rejected_atomically(self):
        timeline = Timeline("p", VIDEO)
        events = [
            UtteranceEvent(10.0, DistanceCall(45)),
            UtteranceEvent(1800.5, DistanceCall(50)),
        ]
        with pytest.raises(OutOfBoundsError):
            apply_events(timeline, events)

    def test_event_at_exact_duration_clamps_to_last_frame(self):
        timeline, _ = apply_events(Timeline("p", VIDEO), [UtteranceEvent(1800.0, DistanceCall(45))])
        assert timeline.tags[0].frame == 26999

    def test_one_tag_per_event_and_no_annotations(self, case2_timeline):
        events = interpret_transcript(
            [
                line("45 centimeters", 10.0),
                line("polyp at 105 cm", 20.0),
                line("entering the transverse colon", 30.0),
                line("splenic flexure", 40.0),
                line("patient tolerating procedure well", 50.0),
            ]
        )
        before = len(case2_timeline.tags)
        applied, _ = apply_events(case2_timeline, events)
        assert len(applied.tags) == before + len(events)
        assert applied.annotations == case2_timeline.annotations

    def test_call_tags_carry_canonical_findings(self):
        events = [
            UtteranceEvent(1.0, AnomalyCall(Label.IBD)),
            UtteranceEvent(2.0, SegmentCall(Label.TRANSVERSE)),
            UtteranceEvent(3.0, LandmarkCall(Landmark.ILEOCECAL_VALVE)),
            UtteranceEvent(4.0, FreeFinding("small flat lesion")),
        ]
        timeline, _ = apply_events(Timeline("p", VIDEO), events)
        findings = [tag.findings for tag in timeline.tags]
        assert findings == ["IBD", "segment: transverse", "ileocecal valve", "small flat lesion"]
        assert all(not tag.is_distance_mark for tag in timeline.tags)

    def test_transcript_tags_satisfy_model_invariants(self):
        raw_lines = [line(f"{d} cm", float(d)) for d in range(0, 300, 7)]
        events = interpret_transcript(raw_lines)
        timeline, _ = apply_events(Timeline("p", VIDEO), events)
        assert not any(d.severity.value == "error" for d in validate_timeline(timeline))
