#!/usr/bin/env python3
"""Record service fixtures for the UI test suite.

Builds the demo artifact deterministically (simulate + fit with fixed
seeds), starts the service in-process, and records:

* 20 /v1/predict request/response pairs covering the evidence shapes the
  form can produce (predict_fixtures.json)
* a four-step A -> D evidence nesting for one synthetic participant:
  confounds, + n-back measures, + paragraph measures, + sleep symptom
  (nesting_fixture.json)
* /v1/model and /v1/scenarios snapshots (model.json, scenarios.json)

Rerun after changing the model, the service, or the demo seeds:

    python3 frontend/scripts/record_fixtures.py
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
SIM_SEED, FIT_SEED = 13, 3


def build_artifact(tmp: Path) -> Path:
    from mddbayes.cli import main

    data = tmp / "demo.csv"
    assert main(["simulate", "--n", "200", "--seed", str(SIM_SEED), "--out", str(data)]) == 0
    artifact = tmp / "demo_model.json"
    assert main([
        "fit", "--data", str(data), "--artifact", str(artifact),
        "--chains", "2", "--warmup", "200", "--draws", "150",
        "--seed", str(FIT_SEED),
    ]) == 0
    return artifact, data


def demo_participant_measures(artifact_path: Path, data_path: Path) -> dict:
    """Pipeline-space measures of the first control-ish participant."""
    from mddbayes.artifact import load_artifact
    from mddbayes.dataset import read_csv
    from mddbayes.pipeline import apply_pipeline

    art = load_artifact(artifact_path)
    dataset = read_csv(data_path)
    measures = apply_pipeline(dataset.group_matrices(), art.pipeline)
    row = measures[0]
    record = {
        "age_group": int(dataset.age_group[0]),
        "gender": int(dataset.gender[0]),
        "device": int(dataset.device[0]),
        "measures": {str(m): float(row[m]) for m in range(16)},
    }
    return record


def evidence_bodies(participant: dict) -> list[dict]:
    confs = {k: participant[k] for k in ("age_group", "gender", "device")}
    nback = {m: participant["measures"][m] for m in ("0", "1")}
    paragraph = {m: participant["measures"][m] for m in ("12", "13", "14", "15")}
    image = {m: participant["measures"][m] for m in map(str, range(2, 12))}
    bodies = [
        {},
        {"age_group": 0},
        {"age_group": 3, "gender": 1},
        confs,
        {**confs, "measures": nback},
        {**confs, "measures": {**nback, **paragraph}},
        {**confs, "measures": {**nback, **paragraph, **image}},
        {**confs, "measures": {**nback, **paragraph}, "symptoms": {"2": 1}},
        {"symptoms": {"2": 1}},
        {"symptoms": {"2": 0}},
        {"symptoms": {"0": 1, "1": 1}},
        {"condition": 1},
        {"condition": 0, "gender": 0},
        {"measures": {"0": -1.0}},
        {"measures": {"5": 2.0, "9": -0.75}},
        {"gender": 1, "device": 0, "symptoms": {"6": 1}},
        {"age_group": 1, "measures": {"12": 0.5}},
        {"device": 1},
        {"age_group": 2, "gender": 0, "device": 1, "symptoms": {"4": 0}},
        {**confs, "measures": participant["measures"]},
    ]
    assert len(bodies) == 20
    return bodies


def main() -> int:
    from mddbayes.service import create_app

    FIXTURES.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as td:
        tmp = Path(td)
        artifact, data = build_artifact(tmp)
        participant = demo_participant_measures(artifact, data)
        client = TestClient(create_app(artifact))

        fixtures = []
        for body in evidence_bodies(participant):
            request = {"evidence": body}
            response = client.post("/v1/predict", json=request)
            assert response.status_code == 200, response.text
            fixtures.append({"request": request, "response": response.json()})
        (FIXTURES / "predict_fixtures.json").write_text(
            json.dumps({"sim_seed": SIM_SEED, "fit_seed": FIT_SEED,
                        "fixtures": fixtures}, indent=2, sort_keys=True) + "\n"
        )

        confs = {k: participant[k] for k in ("age_group", "gender", "device")}
        nback = {m: participant["measures"][m] for m in ("0", "1")}
        paragraph = {m: participant["measures"][m] for m in ("12", "13", "14", "15")}
        steps = [
            ("A", confs),
            ("B", {**confs, "measures": dict(nback)}),
            ("C", {**confs, "measures": {**nback, **paragraph}}),
            ("D", {**confs, "measures": {**nback, **paragraph}, "symptoms": {"2": 1}}),
        ]
        nesting = []
        for label, body in steps:
            response = client.post("/v1/predict", json={"evidence": body})
            assert response.status_code == 200, response.text
            nesting.append({"label": label, "request": {"evidence": body},
                            "response": response.json()})
        (FIXTURES / "nesting_fixture.json").write_text(
            json.dumps({"participant": participant, "steps": nesting},
                       indent=2, sort_keys=True) + "\n"
        )

        (FIXTURES / "model.json").write_text(
            json.dumps(client.get("/v1/model").json(), indent=2, sort_keys=True) + "\n"
        )
        (FIXTURES / "scenarios.json").write_text(
            json.dumps(client.get("/v1/scenarios").json(), indent=2, sort_keys=True) + "\n"
        )
    print(f"wrote fixtures to {FIXTURES}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
