"""Domain types for the joint condition/symptom/measure network.

Variable encodings (persisted in every model artifact):

* age_group: 0..3 for bands 18-25, 26-35, 36-45, 46-100
* gender:    0 = male, 1 = female
* device:    0 = smartphone, 1 = PC
* condition: 1 iff PHQ-8 total >= 10
* symptoms:  8 binarized PHQ-8 items, 0 = low, 1 = high
* measures:  16 activity components, indices 0-1 n-Back, 2-11 Image,
             12-15 Paragraph
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .dag import SymptomDag
from .errors import InvalidParameterError, StructuralError

AGE_BANDS = ("18-25", "26-35", "36-45", "46-100")
GENDER_LABELS = ("male", "female")
DEVICE_LABELS = ("smartphone", "PC")
SYMPTOM_LABELS = (
    "anhedonia",
    "depressed_mood",
    "sleep",
    "fatigue",
    "appetite",
    "self_worth",
    "concentration",
    "psychomotor",
)
ACTIVITIES = ("nback", "image", "paragraph")
PHQ8_CUTOFF = 10

N_AGE_GROUPS = 4
N_SYMPTOMS = 8
N_MEASURES = 16

# Canonical measure layout for the full model: activity -> measure indices.
MEASURE_SLICES = {"nback": range(0, 2), "image": range(2, 12), "paragraph": range(12, 16)}

VARIABLE_ENCODINGS = {
    "age_group": {"bands": list(AGE_BANDS)},
    "gender": {"0": GENDER_LABELS[0], "1": GENDER_LABELS[1]},
    "device": {"0": DEVICE_LABELS[0], "1": DEVICE_LABELS[1]},
    "condition": {"1": f"PHQ-8 >= {PHQ8_CUTOFF}"},
    "symptoms": list(SYMPTOM_LABELS),
}


def check_code(name: str, value: int, upper: int) -> int:
    """Validate an integer code in [0, upper)."""
    v = int(value)
    if v != value or not 0 <= v < upper:
        raise InvalidParameterError(f"{name} must be an integer in 0..{upper - 1}, got {value!r}")
    return v


@dataclass(frozen=True)
class ModelParams:
    """One full parameter assignment for the network.

    Weight vector layouts (intercept first, then covariates in factor order):

    * cond_w:    [w0, w_age, w_gender]
    * symp_w[s]: [w0, w_age, w_gender, w_cond] ++ parent weights (ascending
                 parent index, length dag.k(s))
    * meas_w[m]: [w0, w_age, w_gender, w_device, w_cond] ++ one weight per
                 symptom

    Age enters every linear predictor as its scalar code 0..3.
    """

    age_probs: np.ndarray  # (n_age,)
    gender_prob: float
    device_prob: float
    cond_w: np.ndarray  # (3,)
    symp_w: tuple[np.ndarray, ...]  # s -> (4 + k_s,)
    meas_w: np.ndarray  # (M, 5 + S)
    meas_sigma: np.ndarray  # (M,)
    dag: SymptomDag

    def __post_init__(self):
        object.__setattr__(self, "age_probs", _frozen(self.age_probs))
        object.__setattr__(self, "gender_prob", float(self.gender_prob))
        object.__setattr__(self, "device_prob", float(self.device_prob))
        object.__setattr__(self, "cond_w", _frozen(self.cond_w))
        object.__setattr__(self, "symp_w", tuple(_frozen(w) for w in self.symp_w))
        object.__setattr__(self, "meas_w", _frozen(self.meas_w))
        object.__setattr__(self, "meas_sigma", _frozen(self.meas_sigma))
        self._check_shapes()

    def _check_shapes(self):
        S = self.dag.n_symptoms
        if self.age_probs.ndim != 1:
            raise StructuralError("age_probs must be a vector")
        if self.cond_w.shape != (3,):
            raise StructuralError(f"cond_w must have shape (3,), got {self.cond_w.shape}")
        if len(self.symp_w) != S:
            raise StructuralError(f"expected {S} symptom weight vectors, got {len(self.symp_w)}")
        for s, w in enumerate(self.symp_w):
            expected = 4 + self.dag.k(s)
            if w.shape != (expected,):
                raise StructuralError(
                    f"symp_w[{s}] must have length {expected} (4 + k_s), got {w.shape}"
                )
        M = self.meas_sigma.shape[0]
        if self.meas_w.shape != (M, 5 + S):
            raise StructuralError(
                f"meas_w must have shape ({M}, {5 + S}), got {self.meas_w.shape}"
            )

    def validate(self) -> "ModelParams":
        """Check numeric invariants; raises InvalidParameterError."""
        if not np.all(np.isfinite(self.age_probs)) or np.any(self.age_probs <= 0):
            raise InvalidParameterError("age_probs entries must be finite and > 0")
        if abs(float(self.age_probs.sum()) - 1.0) > 1e-12:
            raise InvalidParameterError("age_probs must sum to 1 within 1e-12")
        for name in ("gender_prob", "device_prob"):
            p = getattr(self, name)
            if not (0.0 < p < 1.0):
                raise InvalidParameterError(f"{name} must lie in (0, 1), got {p}")
        for w in (self.cond_w, *self.symp_w, self.meas_w):
            if not np.all(np.isfinite(w)):
                raise InvalidParameterError("weights must be finite")
        if not np.all(np.isfinite(self.meas_sigma)) or np.any(self.meas_sigma <= 0):
            raise InvalidParameterError("meas_sigma entries must be finite and > 0")
        return self

    @property
    def n_symptoms(self) -> int:
        return self.dag.n_symptoms

    @property
    def n_measures(self) -> int:
        return int(self.meas_sigma.shape[0])

    @property
    def n_age_groups(self) -> int:
        return int(self.age_probs.shape[0])


def _frozen(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.flags.writeable = False
    return out


def params_to_dict(p: ModelParams) -> dict:
    return {
        "age_probs": p.age_probs.tolist(),
        "gender_prob": p.gender_prob,
        "device_prob": p.device_prob,
        "cond_w": p.cond_w.tolist(),
        "symp_w": [w.tolist() for w in p.symp_w],
        "meas_w": p.meas_w.tolist(),
        "meas_sigma": p.meas_sigma.tolist(),
        "dag": p.dag.to_dict(),
    }


def params_from_dict(d: dict) -> ModelParams:
    return ModelParams(
        age_probs=np.asarray(d["age_probs"]),
        gender_prob=d["gender_prob"],
        device_prob=d["device_prob"],
        cond_w=np.asarray(d["cond_w"]),
        symp_w=tuple(np.asarray(w) for w in d["symp_w"]),
        meas_w=np.asarray(d["meas_w"]),
        meas_sigma=np.asarray(d["meas_sigma"]),
        dag=SymptomDag.from_dict(d["dag"]),
    )


@dataclass(frozen=True)
class ParticipantRecord:
    """One participant as ingested from a dataset.

    ``features`` maps an activity name to its raw feature vector; an activity
    is present or absent wholesale. ``phq8_items`` are the raw 0-3 item
    scores. ``condition`` is derived from the item total when items are
    present.
    """

    participant_id: str
    age_group: int
    gender: int
    device: int
    phq8_items: tuple[int, ...] | None = None
    condition: int | None = None
    features: Mapping[str, np.ndarray] = field(default_factory=dict)
    metadata: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        check_code("age_group", self.age_group, N_AGE_GROUPS)
        check_code("gender", self.gender, 2)
        check_code("device", self.device, 2)
        if self.phq8_items is not None:
            items = tuple(int(v) for v in self.phq8_items)
            if len(items) != N_SYMPTOMS:
                raise StructuralError(f"phq8_items must have {N_SYMPTOMS} entries")
            for v in items:
                if not 0 <= v <= 3:
                    raise InvalidParameterError(f"phq8 item scores must be 0..3, got {v}")
            object.__setattr__(self, "phq8_items", items)
            derived = int(sum(items) >= PHQ8_CUTOFF)
            if self.condition is None:
                object.__setattr__(self, "condition", derived)
            elif int(self.condition) != derived:
                raise InvalidParameterError(
                    f"condition={self.condition} inconsistent with PHQ-8 total {sum(items)}"
                )
        if self.condition is not None:
            check_code("condition", self.condition, 2)


@dataclass(frozen=True)
class Observation:
    """A fully observed model-space case: confounds, condition, binarized
    symptoms, and all measures. This is the unit the joint density and the
    fitter consume."""

    age_group: int
    gender: int
    device: int
    condition: int
    symptoms: tuple[int, ...]
    measures: tuple[float, ...]

    def __post_init__(self):
        check_code("age_group", self.age_group, N_AGE_GROUPS)
        check_code("gender", self.gender, 2)
        check_code("device", self.device, 2)
        check_code("condition", self.condition, 2)
        sym = tuple(int(v) for v in self.symptoms)
        if any(v not in (0, 1) for v in sym):
            raise InvalidParameterError("symptoms must be binary")
        object.__setattr__(self, "symptoms", sym)
        meas = tuple(float(v) for v in self.measures)
        if not all(np.isfinite(meas)):
            raise StructuralError("measures must all be observed and finite")
        object.__setattr__(self, "measures", meas)


@dataclass(frozen=True)
class Evidence:
    """Partial assignment of network variables for a prediction query.

    ``symptoms`` and ``measures`` map variable index to observed value;
    anything absent is unobserved. Unobserved measures are leaves of the
    network and marginalize out exactly by omission.
    """

    age_group: int | None = None
    gender: int | None = None
    device: int | None = None
    condition: int | None = None
    symptoms: Mapping[int, int] = field(default_factory=dict)
    measures: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.age_group is not None:
            check_code("age_group", self.age_group, N_AGE_GROUPS)
        if self.gender is not None:
            check_code("gender", self.gender, 2)
        if self.device is not None:
            check_code("device", self.device, 2)
        if self.condition is not None:
            check_code("condition", self.condition, 2)
        sym = {}
        for s, v in dict(self.symptoms).items():
            s = int(s)
            if s < 0:
                raise InvalidParameterError(f"symptom index {s} out of range")
            sym[s] = check_code(f"symptom {s}", v, 2)
        object.__setattr__(self, "symptoms", sym)
        meas = {}
        for m, v in dict(self.measures).items():
            m = int(m)
            if m < 0:
                raise InvalidParameterError(f"measure index {m} out of range")
            v = float(v)
            if not np.isfinite(v):
                raise InvalidParameterError(f"measure {m} value must be finite")
            meas[m] = v
        object.__setattr__(self, "measures", meas)

    def observed_discrete(self) -> dict[str, int]:
        out = {}
        for name in ("age_group", "gender", "device", "condition"):
            v = getattr(self, name)
            if v is not None:
                out[name] = int(v)
        for s, v in self.symptoms.items():
            out[f"s{s}"] = int(v)
        return out
