"""JSON wire format for evidence and prediction results.

Evidence object keys: ``age_group``, ``gender``, ``device``, ``condition``
(integer codes), plus ``symptoms`` and ``measures`` mapping string indices
to values. Target names: ``condition``, ``age_group``, ``gender``,
``device``, ``s0``..``s7``.
"""

from __future__ import annotations

import numpy as np

from .enumeration import PredictionResult
from .errors import InvalidParameterError
from .types import Evidence

_SCALAR_FIELDS = ("age_group", "gender", "device", "condition")


def _as_code(value, name: str) -> int:
    """Integer code from JSON: ints or integral floats (JSON does not
    distinguish 2 from 2.0), never booleans."""
    if isinstance(value, bool):
        raise InvalidParameterError(f"{name} must be an integer code, got a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise InvalidParameterError(f"{name} must be an integer code, got {value!r}")


def evidence_from_dict(d: dict) -> Evidence:
    if not isinstance(d, dict):
        raise InvalidParameterError("evidence must be a JSON object")
    unknown = set(d) - set(_SCALAR_FIELDS) - {"symptoms", "measures"}
    if unknown:
        raise InvalidParameterError(f"unknown evidence fields: {sorted(unknown)}")
    kwargs = {}
    for name in _SCALAR_FIELDS:
        if name in d and d[name] is not None:
            kwargs[name] = _as_code(d[name], name)
    for group in ("symptoms", "measures"):
        raw = d.get(group) or {}
        if not isinstance(raw, dict):
            raise InvalidParameterError(f"{group} must map index -> value")
        parsed = {}
        for key, value in raw.items():
            try:
                idx = int(key)
            except (TypeError, ValueError):
                raise InvalidParameterError(f"{group} index {key!r} is not an integer")
            if str(idx) != str(key):
                raise InvalidParameterError(f"{group} index {key!r} is not canonical")
            if value is None:
                continue
            if group == "symptoms":
                parsed[idx] = _as_code(value, f"symptoms[{key}]")
            else:
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise InvalidParameterError(
                        f"{group}[{key}] value {value!r} is not a number"
                    )
                parsed[idx] = float(value)
        kwargs[group] = parsed
    return Evidence(**kwargs)


def evidence_to_dict(ev: Evidence) -> dict:
    out = {}
    for name in _SCALAR_FIELDS:
        v = getattr(ev, name)
        if v is not None:
            out[name] = int(v)
    if ev.symptoms:
        out["symptoms"] = {str(k): int(v) for k, v in sorted(ev.symptoms.items())}
    if ev.measures:
        out["measures"] = {str(k): float(v) for k, v in sorted(ev.measures.items())}
    return out


def prediction_to_dict(result: PredictionResult) -> dict:
    targets = {}
    for name, summary in result.targets.items():
        if np.ndim(summary.mean) == 0:
            targets[name] = {
                "mean": float(summary.mean),
                "ci95": [float(summary.lower), float(summary.upper)],
            }
        else:
            targets[name] = {
                "mean": [float(v) for v in summary.mean],
                "ci95": [
                    [float(v) for v in summary.lower],
                    [float(v) for v in summary.upper],
                ],
            }
    return {"targets": targets, "evidence": evidence_to_dict(result.evidence)}
