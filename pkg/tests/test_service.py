from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from scopeline.model import Interval, Label, Timeline, VideoMeta
from scopeline.service import create_app
from scopeline.store import load_project, new_project, save_project
from scopeline.timeline_ops import add_annotation

import cases


@pytest.fixture
def data_dir(tmp_path):
    for name, builder in cases.ALL_CASES.items():
        save_project(tmp_path / f"{name}.json", new_project(builder()))
    return tmp_path


@pytest.fixture
def client(data_dir):
    with TestClient(create_app(data_dir)) as c:
        yield c


class TestReads:
    def test_list_procedures(self, client):
        body = client.get("/procedures").json()
        assert [p["procedure_id"] for p in body] == ["case1", "case2", "case3", "case4"]
        assert all(p["revision"] == 1 for p in body)

    def test_get_procedure_includes_layout(self, client):
        body = client.get("/procedures/case2").json()
        assert body["schema_version"] == 1
        assert [row["layer"] for row in body["layout"]] == [0, 1, 2, 3]
        assert len(body["layout"][1]["entries"]) == 1

    def test_unknown_procedure_404(self, client):
        response = client.get("/procedures/ghost")
        assert response.status_code == 404

    def test_diagnostics_endpoint(self, client):
        body = client.get("/procedures/case1/diagnostics").json()
        assert body == {"diagnostics": []}

    def test_phase_times_endpoint(self, client):
        body = client.get("/procedures/case2/phase-times").json()
        assert body["complete"] is True
        assert body["insertion_s"] == 600.0
        assert body["withdrawal_s"] == 1100.0
        assert body["warnings"] == []


class TestAnnotationMutations:
    def test_post_then_read_your_writes(self, client, data_dir):
        response = client.post(
            "/procedures/case2/annotations",
            json={"start_frame": 16000, "end_frame": 16200, "label": "P"},
        )
        assert response.status_code == 201
        annotation_id = response.json()["annotation_id"]
        body = client.get("/procedures/case2").json()
        ids = [a["annotation_id"] for a in body["timeline"]["annotations"]]
        assert annotation_id in ids
        # persisted before the response: the file on disk already has it
        on_disk = load_project(data_dir / "case2.json")
        assert on_disk.timeline.annotation_by_id(annotation_id) is not None

    def test_overlapping_segment_conflict(self, client):
        response = client.post(
            "/procedures/case2/annotations",
            json={"start_frame": 9100, "end_frame": 9200, "label": "A"},
        )
        assert response.status_code == 409
        assert response.json()["error"] == "SegmentOverlap"

    def test_unknown_label_422(self, client):
        response = client.post(
            "/procedures/case2/annotations",
            json={"start_frame": 100, "end_frame": 200, "label": "X"},
        )
        assert response.status_code == 422
        assert response.json()["error"] == "UnknownLabelCode"

    def test_out_of_bounds_422(self, client):
        response = client.post(
            "/procedures/case2/annotations",
            json={"start_frame": 26000, "end_frame": 28000, "label": "P"},
        )
        assert response.status_code == 422
        assert response.json()["error"] == "OutOfBounds"

    def test_inverted_interval_422(self, client):
        response = client.post(
            "/procedures/case2/annotations",
            json={"start_frame": 300, "end_frame": 200, "label": "P"},
        )
        assert response.status_code == 422

    def test_stale_revision_conflict(self, client):
        current = client.get("/procedures/case2").json()["revision"]
        response = client.post(
            "/procedures/case2/annotations",
            json={"start_frame": 100, "end_frame": 200, "label": "P", "revision": current + 5},
        )
        assert response.status_code == 409
        assert response.json()["error"] == "RevisionConflict"

    def test_matching_revision_accepted(self, client):
        current = client.get("/procedures/case2").json()["revision"]
        response = client.post(
            "/procedures/case2/annotations",
            json={"start_frame": 16000, "end_frame": 16100, "label": "P", "revision": current},
        )
        assert response.status_code == 201
        assert response.json()["revision"] == current + 1

    def test_delete_annotation(self, client):
        created = client.post(
            "/procedures/case2/annotations",
            json={"start_frame": 16000, "end_frame": 16100, "label": "P"},
        ).json()
        response = client.delete(f"/procedures/case2/annotations/{created['annotation_id']}")
        assert response.status_code == 200
        ids = [
            a["annotation_id"]
            for a in client.get("/procedures/case2").json()["timeline"]["annotations"]
        ]
        assert created["annotation_id"] not in ids

    def test_delete_unknown_annotation_404(self, client):
        response = client.delete("/procedures/case2/annotations/nope")
        assert response.status_code == 404
        assert response.json()["error"] == "UnknownAnnotation"


class TestTagMutations:
    def test_distance_mark_classification(self, client):
        response = client.post("/procedures/case2/tags", json={"frame": 4000, "distance_cm": 45})
        assert response.status_code == 201
        assert response.json()["classification"] == "distance_mark"

    def test_full_tag_classification(self, client):
        response = client.post(
            "/procedures/case2/tags",
            json={"frame": 4000, "distance_cm": 45, "findings": "sessile polyp"},
        )
        assert response.json()["classification"] == "full_tag"

    def test_empty_tag_422(self, client):
        response = client.post("/procedures/case2/tags", json={"frame": 4000})
        assert response.status_code == 422
        assert response.json()["error"] == "EmptyTag"

    def test_off_granularity_422(self, client):
        response = client.post("/procedures/case2/tags", json={"frame": 4000, "distance_cm": 47})
        assert response.status_code == 422
        assert response.json()["error"] == "BadDistanceGranularity"


class TestTranscriptImport:
    def test_import_adds_tags(self, client):
        text = "240.0\tforty seven centimeters\n303.5\tpolyp at 105 cm\n"
        response = client.post("/procedures/case2/transcript", content=text.encode("utf-8"))
        assert response.status_code == 200
        body = response.json()
        assert body["added_tags"] == 3
        assert [w["code"] for w in body["warnings"]] == ["DistanceSnapped"]
        tags = client.get("/procedures/case2").json()["timeline"]["tags"]
        transcript_tags = [t for t in tags if t["origin"] == "transcript"]
        assert len(transcript_tags) == 3

    def test_malformed_transcript_422(self, client):
        response = client.post("/procedures/case2/transcript", content=b"garbage line\n")
        assert response.status_code == 422
        assert response.json()["error"] == "MalformedLine"


class TestReports:
    def test_generate_manual_sections_finalize(self, client):
        created = client.post(
            "/procedures/case1/report", json={"patient_context": {"consent": "signed"}}
        )
        assert created.status_code == 201
        report = created.json()["report"]
        assert report["status"] == "draft"
        assert len(report["findings"]) == 4
        assert report["consent"] == "signed"

        updated = client.put(
            "/procedures/case1/report/manual-sections",
            json={"preparation": "split dose", "recommendations": "repeat in 5 years"},
        )
        assert updated.status_code == 200

        finalized = client.post("/procedures/case1/report/finalize")
        assert finalized.status_code == 200
        assert finalized.json()["report"]["status"] == "complete"

        again = client.post("/procedures/case1/report/finalize")
        assert again.status_code == 409
        assert again.json()["error"] == "AlreadyComplete"

    def test_finalize_without_recommendation_422(self, client):
        client.post("/procedures/case2/report", json={})
        response = client.post("/procedures/case2/report/finalize")
        assert response.status_code == 422
        assert response.json()["error"] == "MissingRecommendation"

    def test_manual_sections_without_report_404(self, client):
        response = client.put(
            "/procedures/case3/report/manual-sections", json={"recommendations": "x"}
        )
        assert response.status_code == 404

    def test_report_on_invalid_timeline_422(self, client, data_dir):
        # hand-corrupt a stored project with overlapping segments
        path = data_dir / "case4.json"
        data = json.loads(path.read_text())
        data["timeline"]["annotations"].append(
            {"annotation_id": "zz", "start_frame": 0, "end_frame": 2000, "label": "T"}
        )
        path.write_text(json.dumps(data))
        response = client.post("/procedures/case4/report", json={})
        assert response.status_code == 422


class TestCompareAndVideo:
    def test_compare_rows(self, client):
        body = client.get("/compare", params={"ids": "case1,case2,case4"}).json()
        assert [row["case"] for row in body["rows"]] == ["case1", "case2", "case4"]
        case1_row = body["rows"][0]
        assert case1_row["segments"]["C"]["I"] == 1
        assert case1_row["segments"]["T"]["P"] == 1
        case4_row = body["rows"][2]
        assert case4_row["complete"] is False
        assert case4_row["insertion_s"] is None
        assert body["csv"].splitlines()[0] == "case,R,S,D,T,A,C,insertion_s,withdrawal_s,complete"

    def test_compare_unknown_id_404(self, client):
        assert client.get("/compare", params={"ids": "case1,ghost"}).status_code == 404

    def test_phase_ratio_warning_surfaces(self, client, data_dir):
        timeline = Timeline("rushed", VideoMeta("v", 27000, 15.0))
        timeline, _ = add_annotation(timeline, Interval(20000, 21000), Label.CECUM)
        save_project(data_dir / "rushed.json", new_project(timeline))
        body = client.get("/procedures/rushed/phase-times").json()
        assert [w["code"] for w in body["warnings"]] == ["PhaseRatio"]
        compare = client.get("/compare", params={"ids": "rushed,case1"}).json()
        assert compare["rows"][0]["phase_ratio_warning"] is True
        assert compare["rows"][1]["phase_ratio_warning"] is False

    def test_video_stream(self, client, data_dir, tmp_path):
        payload = b"fake video bytes" * 100
        video_file = data_dir / "clip.bin"
        video_file.write_bytes(payload)
        timeline = Timeline("withvideo", VideoMeta("v", 100, 15.0, source_uri="clip.bin"))
        save_project(data_dir / "withvideo.json", new_project(timeline))
        response = client.get("/procedures/withvideo/video")
        assert response.status_code == 200
        assert response.content == payload

    def test_video_missing_404(self, client):
        assert client.get("/procedures/case1/video").status_code == 404
