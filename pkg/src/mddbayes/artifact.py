"""Model artifact: everything needed to serve predictions, in one JSON file.

Posterior draws are stored in full (chain-tagged, flattened unconstrained
vectors) because prediction enumerates per draw for faithful credible
intervals. Floats are serialized with shortest round-trip representations,
so save -> load -> predict is bitwise identical to in-memory prediction.
The content hash (sha256 over the canonical payload) is verified on load.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dag import SymptomDag
from .errors import DataError
from .fit import PosteriorDraws
from .pipeline import PipelineState
from .transforms import ParamLayout
from .types import VARIABLE_ENCODINGS

SCHEMA_VERSION = 1


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def jsonable(obj):
    """Recursively replace non-finite floats with None (JSON has no NaN)."""
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if np.isfinite(v) else None
    return obj


def content_hash(payload: dict) -> str:
    body = {k: v for k, v in payload.items() if k != "content_hash"}
    return "sha256:" + hashlib.sha256(canonical_json(body).encode()).hexdigest()


@dataclass
class ModelArtifact:
    draws: PosteriorDraws
    pipeline: PipelineState | None
    fit_config: dict
    encodings: dict

    @property
    def dag(self) -> SymptomDag:
        return self.draws.dag

    def metadata(self) -> dict:
        lay = self.draws.layout
        diag = self.draws.diagnostics
        return {
            "schema_version": SCHEMA_VERSION,
            "encodings": self.encodings,
            "dims": {
                "age_groups": lay.n_age,
                "symptoms": lay.n_symptoms,
                "measures": lay.n_measures,
            },
            "dag": self.dag.to_dict(),
            "fit_config": self.fit_config,
            "n_chains": self.draws.n_chains,
            "kept_per_chain": self.draws.kept_per_chain,
            "divergences": self.draws.divergences.tolist(),
            "max_rhat": diag.get("max_rhat"),
            "min_ess_bulk": diag.get("min_ess_bulk"),
        }

    def to_payload(self) -> dict:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "encodings": self.encodings,
            "dims": {
                "age_groups": self.draws.layout.n_age,
                "symptoms": self.draws.layout.n_symptoms,
                "measures": self.draws.layout.n_measures,
            },
            "dag": self.dag.to_dict(),
            "pipeline": self.pipeline.to_dict() if self.pipeline else None,
            "fit_config": self.fit_config,
            "diagnostics": jsonable(self.draws.diagnostics),
            "draws": {
                "chains": self.draws.n_chains,
                "kept_per_chain": self.draws.kept_per_chain,
                "param_names": list(self.draws.layout.param_names),
                "matrix": [
                    [float(v) for v in row] for row in self.draws.flat
                ],
                "chain_ids": self.draws.chain_ids.tolist(),
            },
        }
        payload["content_hash"] = content_hash(payload)
        return payload

    def save(self, path) -> None:
        Path(path).write_text(canonical_json(self.to_payload()))


def load_artifact(path) -> ModelArtifact:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"cannot read artifact {path}: {e}")
    if payload.get("schema_version") != SCHEMA_VERSION:
        raise DataError(
            f"unsupported artifact schema_version {payload.get('schema_version')!r}"
        )
    expected = payload.get("content_hash")
    actual = content_hash(payload)
    if expected != actual:
        raise DataError(f"artifact content hash mismatch: {expected} != {actual}")

    dag = SymptomDag.from_dict(payload["dag"])
    dims = payload["dims"]
    layout = ParamLayout(dag, n_measures=dims["measures"], n_age=dims["age_groups"])
    d = payload["draws"]
    matrix = np.asarray(d["matrix"], dtype=float)
    if matrix.shape != (d["chains"] * d["kept_per_chain"], layout.dim):
        raise DataError("draw matrix shape inconsistent with dims and DAG")
    draws = PosteriorDraws(
        layout=layout,
        matrix=matrix.reshape(d["chains"], d["kept_per_chain"], layout.dim),
        divergences=np.asarray(payload["diagnostics"].get("divergences", [0] * d["chains"])),
        diagnostics=payload["diagnostics"],
    )
    pipeline = (
        PipelineState.from_dict(payload["pipeline"]) if payload.get("pipeline") else None
    )
    return ModelArtifact(
        draws=draws,
        pipeline=pipeline,
        fit_config=payload["fit_config"],
        encodings=payload["encodings"],
    )


def build_artifact(
    draws: PosteriorDraws, pipeline: PipelineState | None, fit_config: dict
) -> ModelArtifact:
    return ModelArtifact(
        draws=draws,
        pipeline=pipeline,
        fit_config=fit_config,
        encodings=VARIABLE_ENCODINGS,
    )
