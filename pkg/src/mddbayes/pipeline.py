"""Feature pipeline: raw per-activity features -> 16 activity measures, plus
PHQ-8 item binarization. All statistics are fitted on training folds only.

Each activity contributes one or more feature *groups* (column sets); a
group is standardized (population std) and reduced to its first two
supervised-PCA components. Group outputs are concatenated in fixed activity
order (n-Back, Image, Paragraph) to form the measure vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DataError, StructuralError
from .types import ACTIVITIES, N_SYMPTOMS

NEWTON_MAX_ITER = 25
NEWTON_TOL = 1e-10


@dataclass(frozen=True)
class ScalerState:
    mean: np.ndarray  # (d,) over retained features
    std: np.ndarray  # (d,) population std, > 0
    kept: np.ndarray  # indices of retained input columns
    dropped: np.ndarray  # indices of zero-variance input columns

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "kept": self.kept.tolist(),
            "dropped": self.dropped.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerState":
        return cls(
            mean=np.asarray(d["mean"], dtype=float),
            std=np.asarray(d["std"], dtype=float),
            kept=np.asarray(d["kept"], dtype=int),
            dropped=np.asarray(d["dropped"], dtype=int),
        )


def fit_scaler(X: np.ndarray) -> ScalerState:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise DataError("scaler needs a 2-d matrix with n >= 2")
    mean = X.mean(axis=0)
    std = X.std(axis=0)  # population convention (divide by n)
    kept = np.flatnonzero(std > 0)
    dropped = np.flatnonzero(std == 0)
    return ScalerState(mean=mean[kept], std=std[kept], kept=kept, dropped=dropped)


def transform_scaler(X: np.ndarray, state: ScalerState) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return (X[:, state.kept] - state.mean) / state.std


@dataclass(frozen=True)
class SupervisedPcaState:
    loadings: np.ndarray  # (d, 2), orthonormal columns
    mu: float  # supervision strength
    eigenvalues: np.ndarray  # (2,), descending

    def to_dict(self) -> dict:
        return {
            "loadings": self.loadings.tolist(),
            "mu": self.mu,
            "eigenvalues": self.eigenvalues.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SupervisedPcaState":
        return cls(
            loadings=np.asarray(d["loadings"], dtype=float),
            mu=float(d["mu"]),
            eigenvalues=np.asarray(d["eigenvalues"], dtype=float),
        )


def fit_supervised_pca(
    X: np.ndarray, y: np.ndarray, mu: float = 1.0, k: int = 2
) -> SupervisedPcaState:
    """Top-k eigenvectors of X'X + mu * X'y y'X over standardized X.

    mu = 0 reduces to ordinary PCA. Sign convention: the largest-magnitude
    entry of each loading is positive.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, d = X.shape
    if d < k:
        raise DataError(f"need at least {k} features for {k} components, got {d}")
    if n <= k:
        raise DataError(f"need more than {k} samples")
    if mu < 0:
        raise ValueError("supervision strength mu must be >= 0")
    xty = X.T @ y
    m = X.T @ X + mu * np.outer(xty, xty)
    eigvals, eigvecs = np.linalg.eigh(m)
    top = np.argsort(eigvals)[::-1][:k]
    loadings = eigvecs[:, top]
    for j in range(k):
        lead = np.argmax(np.abs(loadings[:, j]))
        if loadings[lead, j] < 0:
            loadings[:, j] = -loadings[:, j]
    return SupervisedPcaState(
        loadings=loadings, mu=float(mu), eigenvalues=eigvals[top]
    )


def project(X: np.ndarray, state: SupervisedPcaState) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.shape[1] != state.loadings.shape[0]:
        raise StructuralError(
            f"expected {state.loadings.shape[0]} columns, got {X.shape[1]}"
        )
    return X @ state.loadings


@dataclass(frozen=True)
class BinarizerState:
    thresholds: tuple[int, ...]  # per symptom, in {1, 2, 3}; high iff score >= t
    fallbacks: tuple[int, ...] = ()  # symptom indices where no 0.5 crossing existed

    def __post_init__(self):
        for t in self.thresholds:
            if t not in (1, 2, 3):
                raise StructuralError(f"binarization threshold must be 1..3, got {t}")

    def to_dict(self) -> dict:
        return {"thresholds": list(self.thresholds), "fallbacks": list(self.fallbacks)}

    @classmethod
    def from_dict(cls, d: dict) -> "BinarizerState":
        return cls(
            thresholds=tuple(d["thresholds"]), fallbacks=tuple(d.get("fallbacks", ()))
        )


def _logistic_newton(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Univariate logistic regression of y on x; capped Newton iterations so
    separated data terminates with a steep but finite slope."""
    beta = np.zeros(2)
    design = np.column_stack([np.ones_like(x), x])
    for _ in range(NEWTON_MAX_ITER):
        p = expit(design @ beta)
        w = np.maximum(p * (1.0 - p), 1e-12)
        grad = design.T @ (y - p)
        hess = design.T @ (design * w[:, None])
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        beta = beta + step
        if float(np.max(np.abs(step))) < NEWTON_TOL:
            break
    return float(beta[0]), float(beta[1])


def fit_binarizer(items: np.ndarray, condition: np.ndarray) -> BinarizerState:
    """Per-symptom threshold: smallest raw score in {1,2,3} whose predicted
    p(condition=1 | score) reaches 0.5; falls back to 2 when the regression
    never crosses."""
    items = np.asarray(items, dtype=float)
    condition = np.asarray(condition, dtype=float)
    if items.ndim != 2 or items.shape[1] != N_SYMPTOMS:
        raise StructuralError(f"items must be (n, {N_SYMPTOMS})")
    classes = np.unique(condition)
    if len(classes) < 2:
        raise DataError("binarizer needs both condition classes present")
    thresholds = []
    fallbacks = []
    for s in range(N_SYMPTOMS):
        b0, b1 = _logistic_newton(items[:, s], condition)
        t_s = None
        for t in (1, 2, 3):
            if expit(b0 + b1 * t) >= 0.5:
                t_s = t
                break
        if t_s is None:
            t_s = 2
            fallbacks.append(s)
        thresholds.append(t_s)
    return BinarizerState(thresholds=tuple(thresholds), fallbacks=tuple(fallbacks))


def binarize(items: np.ndarray, state: BinarizerState) -> np.ndarray:
    items = np.asarray(items)
    thr = np.asarray(state.thresholds)
    return (items >= thr).astype(int)


@dataclass(frozen=True)
class FeatureGroup:
    """One feature set: an activity plus the columns that belong to it."""

    activity: str
    name: str
    columns: tuple[str, ...]

    def __post_init__(self):
        if self.activity not in ACTIVITIES:
            raise StructuralError(f"unknown activity {self.activity!r}")


@dataclass(frozen=True)
class PipelineState:
    """Fitted transforms for every feature group plus the item binarizer.

    Groups appear in measure order: measures 2*i and 2*i+1 come from
    groups[i].
    """

    groups: tuple[FeatureGroup, ...]
    scalers: tuple[ScalerState, ...]
    spcas: tuple[SupervisedPcaState, ...]
    binarizer: BinarizerState
    mu: float

    @property
    def n_measures(self) -> int:
        return 2 * len(self.groups)

    def measure_indices(self, activity: str) -> list[int]:
        out = []
        for i, grp in enumerate(self.groups):
            if grp.activity == activity:
                out.extend([2 * i, 2 * i + 1])
        return out

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "groups": [
                {
                    "activity": g.activity,
                    "name": g.name,
                    "columns": list(g.columns),
                    "scaler": sc.to_dict(),
                    "spca": sp.to_dict(),
                }
                for g, sc, sp in zip(self.groups, self.scalers, self.spcas)
            ],
            "binarizer": self.binarizer.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineState":
        groups, scalers, spcas = [], [], []
        for g in d["groups"]:
            groups.append(
                FeatureGroup(
                    activity=g["activity"], name=g["name"], columns=tuple(g["columns"])
                )
            )
            scalers.append(ScalerState.from_dict(g["scaler"]))
            spcas.append(SupervisedPcaState.from_dict(g["spca"]))
        return cls(
            groups=tuple(groups),
            scalers=tuple(scalers),
            spcas=tuple(spcas),
            binarizer=BinarizerState.from_dict(d["binarizer"]),
            mu=float(d["mu"]),
        )


def group_feature_columns(columns) -> tuple[FeatureGroup, ...]:
    """Group feature columns named ``<activity>_<group>_<i>`` by their
    ``<activity>_<group>`` prefix, in activity order then first appearance."""
    buckets: dict[tuple[str, str], list[str]] = {}
    for col in columns:
        parts = col.split("_")
        if len(parts) < 3 or parts[0] not in ACTIVITIES:
            raise StructuralError(
                f"feature column {col!r} must be named <activity>_<group>_<index>"
            )
        key = (parts[0], "_".join(parts[1:-1]))
        buckets.setdefault(key, []).append(col)
    groups = []
    for activity in ACTIVITIES:
        for (act, name), cols in buckets.items():
            if act == activity:
                groups.append(FeatureGroup(activity=act, name=name, columns=tuple(cols)))
    return tuple(groups)


def fit_pipeline(
    feature_matrices: dict[str, np.ndarray],
    groups: tuple[FeatureGroup, ...],
    condition: np.ndarray,
    items: np.ndarray,
    mu: float = 1.0,
) -> PipelineState:
    """Fit all group transforms and the binarizer on training data.

    ``feature_matrices`` maps group name (``activity/name``) to its raw
    training matrix with rows aligned to ``condition``.
    """
    scalers, spcas = [], []
    for grp in groups:
        X = feature_matrices[f"{grp.activity}/{grp.name}"]
        if not np.all(np.isfinite(X)):
            raise DataError(f"group {grp.activity}/{grp.name} has missing values in training data")
        scaler = fit_scaler(X)
        Xs = transform_scaler(X, scaler)
        spcas.append(fit_supervised_pca(Xs, condition, mu=mu))
        scalers.append(scaler)
    binarizer = fit_binarizer(items, condition)
    return PipelineState(
        groups=tuple(groups),
        scalers=tuple(scalers),
        spcas=tuple(spcas),
        binarizer=binarizer,
        mu=float(mu),
    )


def apply_pipeline(
    feature_matrices: dict[str, np.ndarray], state: PipelineState
) -> np.ndarray:
    """Project raw features to the measure matrix (n, 2 * n_groups).

    Rows with a missing activity (NaN inputs) produce NaN measures for that
    group's columns.
    """
    mats = []
    for grp, scaler, spca in zip(state.groups, state.scalers, state.spcas):
        X = np.asarray(feature_matrices[f"{grp.activity}/{grp.name}"], dtype=float)
        out = np.full((X.shape[0], 2), np.nan)
        present = np.all(np.isfinite(X), axis=1)
        if present.any():
            out[present] = project(transform_scaler(X[present], scaler), spca)
        mats.append(out)
    return np.hstack(mats)
