import json
import socket
import threading
import time

import pytest
from fastapi.testclient import TestClient

from mathdoc import modelkg, rulemine, workflowdoc
from mathdoc.boolpoly import TermOrder
from mathdoc.service import BadConfig, BindFailure, ServiceConfig, create_app, load_config
from mathdoc.service.app import serve
from mathdoc.service.jobs import JobManager

from helpers import FIXTURES, FIXTURE_ANSWERS, fixture_graph

TWO_ROWS = (FIXTURES / "datasets" / "two_rows.csv").read_bytes()


@pytest.fixture
def config(tmp_path):
    return ServiceConfig(data_dir=tmp_path / "data", fixtures_path=FIXTURES)


@pytest.fixture
def client(config):
    with TestClient(create_app(config)) as c:
        yield c


def wait_for_job(client, job_id, timeout=10.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        state = client.get(f"/api/analysis/jobs/{job_id}").json()
        if state["state"] in ("done", "failed"):
            return state
        time.sleep(0.02)
    raise AssertionError("job did not finish")


class TestMeta:
    def test_health_returns_version(self, client):
        body = client.get("/api/health").json()
        assert body["name"] == "mathdoc"
        assert body["version"]

    def test_template_matches_library(self, client):
        assert client.get("/api/template").json() == workflowdoc.default_template().to_dict()


class TestSessionRoutes:
    def test_full_fixture_flow_over_http(self, client, data_dir):
        session_id = client.post("/api/sessions").json()["session_id"]
        for qid, value in FIXTURE_ANSWERS:
            response = client.put(
                f"/api/sessions/{session_id}/answers/{qid}", json={"value": value}
            )
            assert response.status_code == 200, response.text

        completeness = client.get(f"/api/sessions/{session_id}/completeness").json()
        assert completeness == {"missing": [], "complete": True}

        suggestions = client.get(
            f"/api/sessions/{session_id}/suggest/general.publication"
        ).json()["candidates"]
        assert [c["provenance"] for c in suggestions] == ["external"]

        exported = client.post(
            f"/api/sessions/{session_id}/export", json={"dedup_policy": "reuse"}
        ).json()
        assert exported["wiki_markdown"].startswith("# Logical Data Analysis")
        assert "Logical Data Analysis" in exported["wiki_markdown"]
        report = exported["export_report"]
        assert report["created"]
        again = client.post(
            f"/api/sessions/{session_id}/export", json={"dedup_policy": "reuse"}
        ).json()["export_report"]
        assert again["created"] == []
        # wiki content identical to the golden file except entity refs stay inline
        golden = (data_dir / "golden_wiki.md").read_text()
        assert exported["wiki_markdown"] == golden

    def test_answer_validation_errors(self, client):
        session_id = client.post("/api/sessions").json()["session_id"]
        bad_type = client.put(
            f"/api/sessions/{session_id}/answers/repro.data_available", json={"value": "x"}
        )
        assert bad_type.status_code == 400
        assert bad_type.json()["code"] == "type_mismatch"
        unknown = client.put(
            f"/api/sessions/{session_id}/answers/general.nope", json={"value": "x"}
        )
        assert unknown.status_code == 404
        missing = client.get("/api/sessions/does-not-exist")
        assert missing.status_code == 404
        assert missing.json()["code"] == "not_found"

    def test_wiki_route_and_force(self, client):
        session_id = client.post("/api/sessions").json()["session_id"]
        draft = client.get(f"/api/sessions/{session_id}/wiki")
        assert draft.status_code == 409
        forced = client.get(f"/api/sessions/{session_id}/wiki", params={"force": "true"})
        assert forced.status_code == 200
        assert forced.json()["markdown"].count("## ") == 4

    def test_export_incomplete_conflict(self, client):
        session_id = client.post("/api/sessions").json()["session_id"]
        response = client.post(f"/api/sessions/{session_id}/export", json={})
        assert response.status_code == 409
        assert response.json()["code"] == "incomplete_session"

    def test_sessions_survive_restart(self, config):
        with TestClient(create_app(config)) as first:
            session_id = first.post("/api/sessions").json()["session_id"]
            first.put(
                f"/api/sessions/{session_id}/answers/general.title", json={"value": "Persisted"}
            )
        with TestClient(create_app(config)) as second:
            body = second.get(f"/api/sessions/{session_id}").json()
            assert body["answers"]["general.title"] == "Persisted"


class TestKgRoutes:
    def test_create_find_card_equivalence(self, client, tmp_path):
        created = client.post(
            "/api/kg/entities",
            json={"kind": "MathematicalModel", "label": "Object Comparison Model"},
        )
        assert created.status_code == 201
        model_id = created.json()["id"]
        again = client.post(
            "/api/kg/entities",
            json={"kind": "MathematicalModel", "label": "Object Comparison Model"},
        ).json()
        assert again["id"] == model_id and again["created"] is False

        task = client.post(
            "/api/kg/entities",
            json={"kind": "ComputationalTask", "label": "Extraction of Logical Rules"},
        ).json()["id"]
        assert client.post(
            "/api/kg/relations", json={"src": task, "kind": "appliesModel", "dst": model_id}
        ).status_code == 201

        # equivalence with a direct library call on the same persisted store
        hits = client.get(
            "/api/kg/entities", params={"kind": "MathematicalModel", "q": "comparison"}
        ).json()["entities"]
        exported = client.get("/api/kg/export").content
        graph = modelkg.import_json(exported)
        assert hits == [e.to_dict() for e in graph.find_entities(kind="MathematicalModel", label_substring="comparison")]
        card = client.get(f"/api/kg/entities/{model_id}/card").json()
        assert card == graph.model_card(model_id)

    def test_error_mapping(self, client):
        model = client.post(
            "/api/kg/entities", json={"kind": "MathematicalModel", "label": "M"}
        ).json()["id"]
        strict = client.post(
            "/api/kg/entities",
            json={"kind": "MathematicalModel", "label": "M", "dedup_policy": "strict"},
        )
        assert strict.status_code == 409
        assert strict.json()["code"] == "duplicate_entity"
        bad_kind = client.post("/api/kg/entities", json={"kind": "Nope", "label": "x"})
        assert bad_kind.status_code == 400
        quantity = client.post(
            "/api/kg/entities", json={"kind": "QuantityKind", "label": "boolean"}
        ).json()["id"]
        violation = client.post(
            "/api/kg/relations", json={"src": model, "kind": "hasQuantityKind", "dst": quantity}
        )
        assert violation.status_code == 400
        assert violation.json()["code"] == "domain_range_violation"
        assert client.get("/api/kg/entities/ghost").status_code == 404

    def test_export_formats_and_validate(self, client):
        client.post("/api/kg/entities", json={"kind": "Software", "label": "Tool"})
        as_json = client.get("/api/kg/export")
        assert as_json.headers["content-type"].startswith("application/json")
        triples = client.get("/api/kg/export", params={"format": "triples"})
        assert b"rdf-syntax-ns#type" in triples.content
        bad = client.get("/api/kg/export", params={"format": "xml"})
        assert bad.status_code == 400
        report = client.get("/api/kg/validate").json()
        assert report["empty"] is True

    def test_write_through_persistence(self, config):
        with TestClient(create_app(config)) as client:
            client.post("/api/kg/entities", json={"kind": "Software", "label": "Tool"})
            on_disk = json.loads((config.data_dir / "kg.json").read_text())
            assert [e["label"] for e in on_disk["entities"]] == ["Tool"]


class TestAnalysisJobs:
    def test_job_lifecycle_and_rules(self, client):
        submitted = client.post(
            "/api/analysis/jobs",
            files={"file": ("two_rows.csv", TWO_ROWS, "text/csv")},
            data={"order": "deglex"},
        )
        assert submitted.status_code == 202
        job_id = submitted.json()["job_id"]
        state = wait_for_job(client, job_id)
        assert state["state"] == "done"
        rules = client.get(f"/api/analysis/jobs/{job_id}/rules")
        expected = rulemine.export_rules_json(
            rulemine.mine_rules(rulemine.load_csv(TWO_ROWS), TermOrder.DEGLEX)
        )
        assert rules.content == expected

    def test_job_determinism_across_jobs(self, client):
        results = []
        for _ in range(2):
            job_id = client.post(
                "/api/analysis/jobs", files={"file": ("r.csv", TWO_ROWS, "text/csv")}
            ).json()["job_id"]
            wait_for_job(client, job_id)
            results.append(client.get(f"/api/analysis/jobs/{job_id}/rules").content)
        assert results[0] == results[1]

    def test_malformed_csv_is_a_request_error(self, client):
        response = client.post(
            "/api/analysis/jobs", files={"file": ("bad.csv", b"object_id,p\nS1,2\n", "text/csv")}
        )
        assert response.status_code == 400
        assert response.json()["code"] == "non_binary_cell"

    def test_unknown_order_rejected(self, client):
        response = client.post(
            "/api/analysis/jobs",
            files={"file": ("r.csv", TWO_ROWS, "text/csv")},
            data={"order": "mystery"},
        )
        assert response.status_code == 400

    def test_oversize_upload_rejected(self, tmp_path):
        config = ServiceConfig(data_dir=tmp_path, max_upload_bytes=64)
        with TestClient(create_app(config)) as client:
            response = client.post(
                "/api/analysis/jobs", files={"file": ("big.csv", b"x" * 4096, "text/csv")}
            )
            assert response.status_code == 413

    def test_rules_unavailable_until_done(self, client):
        job_id = client.post(
            "/api/analysis/jobs", files={"file": ("r.csv", TWO_ROWS, "text/csv")}
        ).json()["job_id"]
        response = client.get(f"/api/analysis/jobs/{job_id}/rules")
        assert response.status_code in (200, 400)  # depending on completion timing
        assert client.get("/api/analysis/jobs/ghost").status_code == 404

    def test_shutdown_marks_unfinished_jobs_aborted(self):
        release = threading.Event()

        def slow_runner(csv_bytes, order):
            release.wait(5.0)
            return b"{}"

        manager = JobManager(max_workers=1, runner=slow_runner)
        first = manager.submit(TWO_ROWS, TermOrder.DEGREVLEX)
        second = manager.submit(TWO_ROWS, TermOrder.DEGREVLEX)
        time.sleep(0.05)
        manager.shutdown()
        release.set()
        assert manager.get(first).state == "failed"
        assert manager.get(first).error == "aborted"
        assert manager.get(second).state == "failed"

    def test_retention_evicts_oldest_finished(self):
        manager = JobManager(max_workers=1, retention=2)
        ids = [manager.submit(TWO_ROWS, TermOrder.DEGREVLEX) for _ in range(4)]
        deadline = time.time() + 5
        while time.time() < deadline:
            jobs = [manager.get(i) for i in ids]
            if all(j is None or j.state == "done" for j in jobs):
                break
            time.sleep(0.02)
        manager.shutdown()
        alive = [i for i in ids if manager.get(i) is not None]
        assert len(alive) <= 3  # retention bound plus at most one in flight


class TestConfigAndServe:
    def test_defaults_and_env_override(self, tmp_path, monkeypatch):
        path = tmp_path / "conf.json"
        path.write_text(json.dumps({"port": 9000}))
        config = load_config(path, env={"MATHDOC_PORT": "9100", "MATHDOC_RESOLVER_MODE": "offline"})
        assert config.port == 9100

    def test_bad_config(self, tmp_path):
        with pytest.raises(BadConfig):
            load_config(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("[1,2]")
        with pytest.raises(BadConfig):
            load_config(bad)
        worse = tmp_path / "worse.json"
        worse.write_text(json.dumps({"port": 99999}))
        with pytest.raises(BadConfig):
            load_config(worse)

    def test_occupied_port_is_bind_failure(self, tmp_path):
        blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        blocker.bind(("127.0.0.1", 0))
        blocker.listen(1)
        port = blocker.getsockname()[1]
        try:
            with pytest.raises(BindFailure):
                serve(ServiceConfig(host="127.0.0.1", port=port, data_dir=tmp_path))
        finally:
            blocker.close()


class TestApiLibraryEquivalence:
    def test_preloaded_fixture_graph_reads(self, tmp_path):
        graph = fixture_graph()
        data_dir = tmp_path / "store"
        data_dir.mkdir()
        (data_dir / "kg.json").write_bytes(modelkg.export_json(graph))
        config = ServiceConfig(data_dir=data_dir, fixtures_path=FIXTURES)
        with TestClient(create_app(config)) as client:
            exported = client.get("/api/kg/export").content
            assert exported == modelkg.export_json(graph)
            triples = client.get(
                "/api/kg/export", params={"format": "triples", "base_iri": "https://example.org/x/"}
            ).content
            assert triples == modelkg.export_triples(graph, "https://example.org/x/")
            model = graph.find_entities(kind="MathematicalModel")[0]
            assert client.get(f"/api/kg/entities/{model.id}").json() == model.to_dict()
            assert (
                client.get(f"/api/kg/entities/{model.id}/card").json()
                == graph.model_card(model.id)
            )
            hits = client.get("/api/kg/entities", params={"q": "logical"}).json()["entities"]
            assert hits == [
                e.to_dict() for e in graph.find_entities(label_substring="logical")
            ]
            report = client.get("/api/kg/validate").json()
            assert report["empty"] == graph.validate().empty()
