"""Pydantic request/response models for the inference service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class PredictRequest(BaseModel):
    # Evidence is validated by the domain layer so malformed values map to
    # 400 rather than pydantic's default 422 (which is reserved for
    # evidence/target overlap).
    evidence: dict = Field(default_factory=dict)
    targets: list[str] | None = None


class TargetSummaryModel(BaseModel):
    mean: float | list[float]
    ci95: list  # [lo, hi] scalars, or [[lo...], [hi...]] for categoricals


class PredictResponse(BaseModel):
    targets: dict[str, TargetSummaryModel]
    evidence: dict


class HealthResponse(BaseModel):
    status: str


class ScenarioModel(BaseModel):
    name: str
    activities: list[str]
    measure_indices: list[int]
    symptoms: list[int]
    targets: list[str]


class ScenarioListResponse(BaseModel):
    scenarios: list[ScenarioModel]


class ErrorResponse(BaseModel):
    detail: str
