import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from mddbayes.artifact import build_artifact, load_artifact
from mddbayes.cli import main
from mddbayes.service import create_app


@pytest.fixture(scope="module")
def artifact_path(tmp_path_factory):
    workdir = tmp_path_factory.mktemp("svc")
    data = workdir / "data.csv"
    assert main(["simulate", "--n", "100", "--seed", "4", "--out", str(data)]) == 0
    path = workdir / "model.json"
    assert main([
        "fit", "--data", str(data), "--artifact", str(path),
        "--chains", "2", "--warmup", "120", "--draws", "80", "--seed", "2",
    ]) == 0
    return path


@pytest.fixture(scope="module")
def client(artifact_path):
    return TestClient(create_app(artifact_path))


def test_health(client):
    r = client.get("/v1/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_model_metadata(client):
    r = client.get("/v1/model")
    assert r.status_code == 200
    body = r.json()
    assert body["dims"] == {"age_groups": 4, "symptoms": 8, "measures": 16}
    assert body["encodings"]["symptoms"][2] == "sleep"
    assert len(body["dag"]["adjacency"]) == 8
    assert "raw" not in body  # never raw training data


def test_scenarios_listing(client):
    r = client.get("/v1/scenarios")
    assert r.status_code == 200
    scenarios = r.json()["scenarios"]
    assert len(scenarios) == 16
    names = [s["name"] for s in scenarios]
    assert "confounds_only" in names and "all_activities" in names
    all_act = next(s for s in scenarios if s["name"] == "all_activities")
    assert all_act["measure_indices"] == list(range(16))
    assert all_act["targets"][0] == "condition"


def test_predict_empty_evidence_is_prior_predictive(client):
    r = client.post("/v1/predict", json={"evidence": {}})
    assert r.status_code == 200
    body = r.json()
    assert set(body["targets"]) == {"condition"} | {f"s{i}" for i in range(8)}
    cond = body["targets"]["condition"]
    assert 0.0 < cond["mean"] < 1.0
    assert cond["ci95"][0] <= cond["mean"] <= cond["ci95"][1]


def test_predict_deterministic(client):
    req = {"evidence": {"age_group": 1, "gender": 0, "measures": {"0": 0.25}}}
    r1 = client.post("/v1/predict", json=req)
    r2 = client.post("/v1/predict", json=req)
    assert r1.status_code == 200
    assert r1.content == r2.content


def test_predict_echoes_evidence(client):
    req = {"evidence": {"age_group": 1, "symptoms": {"2": 1}}}
    body = client.post("/v1/predict", json=req).json()
    assert body["evidence"] == {"age_group": 1, "symptoms": {"2": 1}}
    assert "s2" not in body["targets"]


def test_predict_malformed_evidence_400(client):
    assert client.post("/v1/predict", json={"evidence": {"gender": 3}}).status_code == 400
    assert client.post("/v1/predict", json={"evidence": {"bogus": 1}}).status_code == 400
    assert (
        client.post("/v1/predict", json={"evidence": {"measures": {"x": "y"}}}).status_code
        == 400
    )
    assert (
        client.post("/v1/predict", json={"evidence": {"measures": {"99": 0.0}}}).status_code
        == 400
    )


def test_predict_overlap_422(client):
    r = client.post(
        "/v1/predict",
        json={"evidence": {"condition": 1}, "targets": ["condition"]},
    )
    assert r.status_code == 422


def test_concurrent_predictions_identical(client):
    # Stateless service: racing identical queries yields identical bodies.
    from concurrent.futures import ThreadPoolExecutor

    req = {"evidence": {"age_group": 2, "measures": {"1": -0.5}}}
    with ThreadPoolExecutor(max_workers=8) as pool:
        bodies = list(
            pool.map(lambda _: client.post("/v1/predict", json=req).content, range(16))
        )
    assert all(b == bodies[0] for b in bodies)


def test_no_artifact_503():
    bare = TestClient(create_app(None))
    assert bare.get("/v1/health").status_code == 200
    assert bare.get("/v1/model").status_code == 503
    assert bare.post("/v1/predict", json={"evidence": {}}).status_code == 503


def test_artifact_roundtrip_prediction_bitwise(artifact_path, tmp_path):
    """save -> load -> predict equals predictions from the reloaded copy."""
    art = load_artifact(artifact_path)
    copy_path = tmp_path / "copy.json"
    art.save(copy_path)
    again = load_artifact(copy_path)
    assert np.array_equal(art.draws.matrix, again.draws.matrix)

    from mddbayes.enumeration import predict
    from mddbayes.types import Evidence

    ev = Evidence(age_group=2, measures={3: 0.7})
    r1 = predict(art.draws, ev)
    r2 = predict(again.draws, ev)
    assert r1.targets["condition"].mean == r2.targets["condition"].mean
    assert r1.targets["condition"].lower == r2.targets["condition"].lower


def test_artifact_hash_tamper_detected(artifact_path, tmp_path):
    payload = json.loads(artifact_path.read_text())
    payload["dims"]["symptoms"] = 7
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(payload))
    from mddbayes.errors import DataError

    with pytest.raises(DataError, match="hash"):
        load_artifact(bad)
