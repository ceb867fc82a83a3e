import json

import pytest
from fastapi.testclient import TestClient

from wise.server import create_app


@pytest.fixture
def client(fixtures_dir):
    app = create_app(allow_dir=fixtures_dir)
    return TestClient(app)


@pytest.fixture
def norm_doc(fixtures_dir):
    return json.loads((fixtures_dir / "example_norm.json").read_text())


@pytest.fixture
def loaded(client, norm_doc):
    reply = client.post("/api/session", json={"log_path": "sample_50.xes", "norm": norm_doc})
    assert reply.status_code == 200, reply.text
    return client


class TestHealth:
    def test_fresh_start(self, client):
        reply = client.get("/api/health")
        assert reply.status_code == 200
        body = reply.json()
        assert body["ok"] is True
        assert body["data"] == {"status": "ok", "session": None}

    def test_after_load(self, loaded):
        body = loaded.get("/api/health").json()
        assert body["data"]["session"]["session_id"]

    def test_unknown_path_is_enveloped_404(self, client):
        reply = client.get("/api/not-here")
        assert reply.status_code == 404
        assert reply.json()["ok"] is False


class TestSession:
    def test_load_lists_views_and_features(self, client, norm_doc):
        reply = client.post(
            "/api/session", json={"log_path": "sample_50.xes", "norm": norm_doc}
        )
        data = reply.json()["data"]
        assert data["views"] == ["standardization"]
        assert data["n_cases"] == 50
        names = {f["name"] for f in data["feature_catalog"]}
        assert {"Category", "Vendor"} <= names
        assert any(w["activity"] == "Change Vendor" for w in data["warnings"])

    def test_bad_weight_400(self, client, norm_doc):
        bad = json.loads(json.dumps(norm_doc))
        bad["views"][0]["weights"]["exclusion"] = 2.0
        reply = client.post("/api/session", json={"log_path": "sample_50.xes", "norm": bad})
        assert reply.status_code == 400
        assert reply.json()["error"]["code"] in ("SchemaViolation", "WeightOutOfRange")

    def test_unknown_log_path_404(self, client, norm_doc):
        reply = client.post("/api/session", json={"log_path": "missing.xes", "norm": norm_doc})
        assert reply.status_code == 404
        assert reply.json()["error"]["code"] == "UnknownLogPath"

    def test_path_escape_blocked(self, client, norm_doc):
        reply = client.post(
            "/api/session", json={"log_path": "../pyproject.toml", "norm": norm_doc}
        )
        assert reply.status_code == 404

    def test_parse_failure_422(self, tmp_path, norm_doc):
        (tmp_path / "broken.xes").write_bytes(b"<log><trace>")
        client = TestClient(create_app(allow_dir=tmp_path))
        reply = client.post("/api/session", json={"log_path": "broken.xes", "norm": norm_doc})
        assert reply.status_code == 422
        assert reply.json()["error"]["code"] == "MalformedXml"

    def test_csv_session(self, tmp_path, norm_doc, fixtures_dir):
        from wise.log_io import ColumnMapping, parse_xes, write_csv

        log = parse_xes((fixtures_dir / "sample_50.xes").read_bytes())
        mapping = ColumnMapping("case_id", "activity", "timestamp")
        (tmp_path / "log.csv").write_bytes(write_csv(log, mapping))
        client = TestClient(create_app(allow_dir=tmp_path))
        reply = client.post(
            "/api/session",
            json={
                "log_path": "log.csv",
                "format": "csv",
                "mapping": {"case_col": "case_id", "activity_col": "activity", "time_col": "timestamp"},
                "norm": norm_doc,
            },
        )
        assert reply.status_code == 200
        assert reply.json()["data"]["n_cases"] == 50


class TestScores:
    def test_pagination(self, loaded):
        page = loaded.get("/api/scores", params={"view": "standardization", "limit": 2}).json()
        assert len(page["data"]["rows"]) == 2
        assert page["data"]["total"] == 50
        assert page["data"]["rows"][0]["case_id"] == "case-00000"

    def test_offset_beyond_end(self, loaded):
        page = loaded.get(
            "/api/scores", params={"view": "standardization", "offset": 1000}
        ).json()
        assert page["data"]["rows"] == []

    def test_unknown_view_404(self, loaded):
        reply = loaded.get("/api/scores", params={"view": "nope"})
        assert reply.status_code == 404
        assert reply.json()["error"]["code"] == "UnknownView"

    def test_no_session_404(self, client):
        assert client.get("/api/scores", params={"view": "x"}).status_code == 404

    def test_stable_pagination_is_trace_order(self, loaded):
        a = loaded.get("/api/scores", params={"view": "standardization", "offset": 0, "limit": 5})
        b = loaded.get("/api/scores", params={"view": "standardization", "offset": 0, "limit": 5})
        assert a.content == b.content


class TestHeatmap:
    def test_matches_library_result(self, loaded, fixtures_dir):
        from wise.aggregation import build_heatmap
        from wise.log_io import parse_xes
        from wise.norm import load_norm
        from wise.scoring import score_log

        reply = loaded.post(
            "/api/heatmap", json={"view": "standardization", "feature": "Category"}
        )
        assert reply.status_code == 200
        data = reply.json()["data"]

        view = load_norm((fixtures_dir / "example_norm.json").read_bytes()).views[0]
        log = parse_xes((fixtures_dir / "sample_50.xes").read_bytes())
        matrix = build_heatmap(score_log(view, log), log, "Category")
        assert data["rows"] == matrix.rows
        assert data["volumes"] == matrix.volumes
        assert data["cells"] == matrix.cells

    def test_filter_drilldown(self, loaded):
        full = loaded.post(
            "/api/heatmap", json={"view": "standardization", "feature": "Vendor"}
        ).json()["data"]
        filtered = loaded.post(
            "/api/heatmap",
            json={
                "view": "standardization",
                "feature": "Vendor",
                "filter": {"equals": [["Category", "Logistic"]]},
            },
        ).json()["data"]
        assert sum(filtered["volumes"]) < sum(full["volumes"])

    def test_empty_filter_result_is_200_empty_matrix(self, loaded):
        reply = loaded.post(
            "/api/heatmap",
            json={
                "view": "standardization",
                "feature": "Vendor",
                "filter": {"equals": [["Category", "Ghost"]]},
            },
        )
        assert reply.status_code == 200
        data = reply.json()["data"]
        assert data["rows"] == [] and data["cells"] == []

    def test_unknown_feature_404(self, loaded):
        reply = loaded.post("/api/heatmap", json={"view": "standardization", "feature": "Nope"})
        assert reply.status_code == 404
        assert reply.json()["error"]["code"] == "UnknownFeature"

    def test_unknown_view_404(self, loaded):
        reply = loaded.post("/api/heatmap", json={"view": "nope", "feature": "Category"})
        assert reply.status_code == 404

    def test_repeated_requests_byte_identical(self, loaded):
        payload = {"view": "standardization", "feature": "Category"}
        a = loaded.post("/api/heatmap", json=payload)
        b = loaded.post("/api/heatmap", json=payload)
        assert a.content == b.content


class TestFindings:
    def test_mirror_of_insights(self, loaded, fixtures_dir):
        from wise.aggregation import aggregate
        from wise.insights import derive_findings
        from wise.log_io import parse_xes
        from wise.norm import load_norm
        from wise.scoring import score_log

        reply = loaded.post(
            "/api/findings", json={"view": "standardization", "k": 3, "min_support": 1}
        )
        assert reply.status_code == 200
        rows = reply.json()["data"]

        view = load_norm((fixtures_dir / "example_norm.json").read_bytes()).views[0]
        log = parse_xes((fixtures_dir / "sample_50.xes").read_bytes())
        table = score_log(view, log)
        cells = []
        for info in log.feature_catalog:
            if info.level == "case" and info.kind == "categorical":
                cells.extend(aggregate(table, log, info.name))
        expected = derive_findings(cells, k=3, min_support=1)
        assert [(r["feature"], r["value"], r["layer"]) for r in rows] == [
            (f.feature, f.value, f.layer.key) for f in expected
        ]

    def test_unknown_view_404(self, loaded):
        reply = loaded.post("/api/findings", json={"view": "nope", "k": 1})
        assert reply.status_code == 404
