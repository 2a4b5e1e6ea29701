import json

import pytest
from fastapi.testclient import TestClient

from resyduo import KnnConfig, build_projection, build_similarity_model, generate_synthetic_corpus
from resyduo.service import (
    ModelBundle,
    create_app,
    recommend_type1,
    recommend_type2,
    recommend_type3,
)
from resyduo.store import ProjectStore


@pytest.fixture(scope="module")
def corpus():
    return generate_synthetic_corpus(40, 12, 16, 12, 4, 0.2, seed=6)


@pytest.fixture(scope="module")
def bundle(corpus):
    cfg = KnnConfig(k=10)
    return ModelBundle(
        T=build_similarity_model(build_projection(corpus, "T"), cfg),
        P=build_similarity_model(build_projection(corpus, "P"), cfg),
        L=build_similarity_model(build_projection(corpus, "L"), cfg),
        component_names={c.id: c.name for p in corpus.projects for c in p.components},
    )


@pytest.fixture
def client(bundle, tmp_path):
    vocab = set(bundle.P.training_matrix.col_labels)
    store = ProjectStore(tmp_path / "projects.json", vocabulary=vocab)
    return TestClient(create_app(bundle, store))


def test_health(client):
    r = client.get("/api/v1/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "models": {"T": True, "P": True, "L": True}}


def test_health_reports_missing_models(tmp_path, bundle):
    app = create_app(ModelBundle(T=bundle.T), ProjectStore(tmp_path / "p.json"))
    r = TestClient(app).get("/api/v1/health")
    assert r.json()["models"] == {"T": True, "P": False, "L": False}


def test_tag_catalog_prefix_filter(client, bundle):
    tags = client.get("/api/v1/catalog/tags").json()
    assert tags == list(bundle.T.training_matrix.row_labels)
    some = client.get("/api/v1/catalog/tags", params={"prefix": "tag00"}).json()
    assert some and all(t.startswith("tag00") for t in some)
    assert client.get("/api/v1/catalog/tags", params={"prefix": "zzz"}).json() == []


def test_component_catalog_includes_names(client, bundle):
    comps = client.get("/api/v1/catalog/components").json()
    assert [c["id"] for c in comps] == list(bundle.P.training_matrix.col_labels)
    assert all(c["name"].startswith("component ") for c in comps)
    # prefix matches either the id or the display name
    by_id = client.get("/api/v1/catalog/components", params={"prefix": "c00"}).json()
    assert by_id and all(c["id"].startswith("c00") for c in by_id)
    by_name = client.get("/api/v1/catalog/components", params={"prefix": "component 00"}).json()
    assert by_name and all(c["name"].startswith("component 00") for c in by_name)


def test_recommend_by_tags_matches_library_call(client, bundle):
    tags = list(bundle.T.training_matrix.row_labels[:2])
    r = client.post("/api/v1/recommend/components-by-tags", json={"tags": tags, "n": 4})
    assert r.status_code == 200
    want = recommend_type1(bundle.T, tags, 4)
    assert r.json() == {"items": [{"id": c, "score": s} for c, s in want.entries]}


def test_recommend_by_tags_normalizes_and_dedupes(client, bundle):
    tag = bundle.T.training_matrix.row_labels[0]
    messy = [f"  {tag.upper()} ", tag]
    r = client.post("/api/v1/recommend/components-by-tags", json={"tags": messy, "n": 3})
    clean = client.post("/api/v1/recommend/components-by-tags", json={"tags": [tag], "n": 3})
    assert r.json() == clean.json()


def test_recommend_by_tags_unknown(client):
    r = client.post(
        "/api/v1/recommend/components-by-tags", json={"tags": ["not-a-real-tag"], "n": 3}
    )
    assert r.status_code == 400
    body = r.json()
    assert body["error"]["code"] == "unknown_tags"
    assert "message" in body["error"]


def test_recommend_by_project_matches_library_call(client, bundle):
    comps = list(bundle.P.training_matrix.col_labels[:3])
    r = client.post(
        "/api/v1/recommend/components-by-project", json={"components": comps, "n": 5}
    )
    assert r.status_code == 200
    want = recommend_type2(bundle.P, comps, 5)
    assert r.json() == {"items": [{"id": c, "score": s} for c, s in want.entries]}
    # the inputs themselves never come back
    assert not set(comps) & {item["id"] for item in r.json()["items"]}


def test_recommend_by_project_no_overlap(client):
    r = client.post(
        "/api/v1/recommend/components-by-project", json={"components": ["ghost"], "n": 5}
    )
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "insufficient_overlap"


def test_recommend_libraries_matches_library_call(client, bundle):
    comps = list(bundle.L.training_matrix.row_labels[:2])
    r = client.post("/api/v1/recommend/libraries", json={"components": comps, "n": 4})
    assert r.status_code == 200
    want = recommend_type3(bundle.L, comps, 4)
    assert r.json() == {"items": [{"name": c, "score": s} for c, s in want.entries]}


def test_recommend_libraries_unknown_components(client):
    r = client.post("/api/v1/recommend/libraries", json={"components": ["ghost"], "n": 4})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "unknown_components"


def test_request_validation_errors_are_wrapped(client):
    r = client.post("/api/v1/recommend/components-by-tags", json={"tags": [], "n": 3})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "bad_request"
    r = client.post("/api/v1/recommend/components-by-tags", json={"n": 3})
    assert r.status_code == 400
    r = client.post("/api/v1/recommend/components-by-tags", json={"tags": ["iot"], "n": 0})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "bad_request"


def test_missing_model_yields_503(tmp_path, bundle):
    app = create_app(ModelBundle(P=bundle.P), ProjectStore(tmp_path / "p.json"))
    c = TestClient(app)
    r = c.post("/api/v1/recommend/components-by-tags", json={"tags": ["iot"], "n": 3})
    assert r.status_code == 503
    assert r.json()["error"]["code"] == "model_not_loaded"
    # catalogs fall back to whatever model is present
    assert c.get("/api/v1/catalog/components").status_code == 200
    assert c.get("/api/v1/catalog/tags").status_code == 503


def test_project_crud_flow(client, bundle):
    comp = bundle.P.training_matrix.col_labels[0]
    created = client.post(
        "/api/v1/projects",
        json={"name": "my robot", "selected_components": [comp], "sketch": "void loop() {}"},
    )
    assert created.status_code == 201
    draft = created.json()
    assert draft["id"] == "d000001"
    assert draft["selected_components"] == [comp]

    listing = client.get("/api/v1/projects").json()
    assert [d["id"] for d in listing["items"]] == [draft["id"]]

    got = client.get(f"/api/v1/projects/{draft['id']}")
    assert got.json() == draft

    updated = client.put(f"/api/v1/projects/{draft['id']}", json={"name": "my rover"})
    assert updated.status_code == 200
    assert updated.json()["name"] == "my rover"
    assert updated.json()["selected_components"] == [comp]

    deleted = client.delete(f"/api/v1/projects/{draft['id']}")
    assert deleted.status_code == 204
    assert client.get(f"/api/v1/projects/{draft['id']}").status_code == 404


def test_project_unknown_component_rejected(client):
    r = client.post(
        "/api/v1/projects", json={"name": "bad", "selected_components": ["flux-capacitor"]}
    )
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "unknown_components"


def test_project_not_found_shape(client):
    r = client.get("/api/v1/projects/d424242")
    assert r.status_code == 404
    assert r.json()["error"]["code"] == "not_found"


def test_sketch_round_trip_is_byte_exact(client):
    draft = client.post("/api/v1/projects", json={"name": "sketchy"}).json()
    body = "#include <Servo.h>\n\nvoid setup() {\n  // üñï\n}\n".encode()
    put = client.put(
        f"/api/v1/projects/{draft['id']}/sketch",
        content=body,
        headers={"content-type": "text/plain; charset=utf-8"},
    )
    assert put.status_code == 204
    got = client.get(f"/api/v1/projects/{draft['id']}/sketch")
    assert got.status_code == 200
    assert got.headers["content-type"].startswith("text/plain")
    assert got.content == body


def test_sketch_rejects_invalid_utf8(client):
    draft = client.post("/api/v1/projects", json={"name": "s"}).json()
    r = client.put(f"/api/v1/projects/{draft['id']}/sketch", content=b"\xff\xfe\x00")
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "bad_request"


def test_static_dir_served_when_present(bundle, tmp_path):
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<!doctype html><title>resyduo</title>")
    app = create_app(bundle, ProjectStore(tmp_path / "p.json"), static_dir=str(ui))
    c = TestClient(app)
    assert "resyduo" in c.get("/").text
    # API routes still take precedence
    assert c.get("/api/v1/health").json()["status"] == "ok"
