"""HTTP inference service over a fitted model artifact.

The service is read-only: every response depends only on the loaded
artifact and the request body, so concurrent requests need no locking. A
semaphore bounds concurrent enumeration jobs.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles

from ..artifact import ModelArtifact, jsonable, load_artifact
from ..enumeration import predict
from ..errors import InvalidParameterError, QueryError, StructuralError
from ..scenarios import full_scenario_grid
from ..wire import evidence_from_dict, prediction_to_dict
from .schemas import (
    HealthResponse,
    PredictRequest,
    PredictResponse,
    ScenarioListResponse,
    ScenarioModel,
)


def create_app(
    artifact: ModelArtifact | str | Path | None = None,
    max_workers: int = 4,
    static_dir: str | Path | None = None,
) -> FastAPI:
    if isinstance(artifact, (str, Path)):
        artifact = load_artifact(artifact)

    app = FastAPI(title="mddbayes inference service", version="0.1.0")
    app.state.artifact = artifact
    app.state.semaphore = threading.Semaphore(max_workers)

    def require_artifact() -> ModelArtifact:
        if app.state.artifact is None:
            raise HTTPException(status_code=503, detail="no model artifact loaded")
        return app.state.artifact

    @app.get("/v1/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok")

    @app.get("/v1/model")
    def model_info():
        return jsonable(require_artifact().metadata())

    @app.get("/v1/scenarios", response_model=ScenarioListResponse)
    def scenarios():
        require_artifact()
        return ScenarioListResponse(
            scenarios=[
                ScenarioModel(
                    name=sc.name,
                    activities=list(sc.activities),
                    measure_indices=list(sc.measure_indices),
                    symptoms=list(sc.symptoms),
                    targets=list(sc.targets),
                )
                for sc in full_scenario_grid()
            ]
        )

    @app.post("/v1/predict", response_model=PredictResponse)
    def predict_endpoint(request: PredictRequest):
        art = require_artifact()
        try:
            evidence = evidence_from_dict(request.evidence)
        except (InvalidParameterError, StructuralError) as e:
            raise HTTPException(status_code=400, detail=str(e))

        targets = tuple(request.targets) if request.targets else None
        if targets:
            observed = evidence.observed_discrete()
            overlap = [t for t in targets if t in observed]
            if overlap:
                raise HTTPException(
                    status_code=422,
                    detail=f"targets also present in evidence: {overlap}",
                )
        with app.state.semaphore:
            try:
                result = predict(art.draws, evidence, targets=targets)
            except (InvalidParameterError, StructuralError, QueryError) as e:
                raise HTTPException(status_code=400, detail=str(e))
        return PredictResponse(**prediction_to_dict(result))

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
