"""Dataset CSV schema: strict ingestion, canonical writing.

Column layout: ``participant_id, age_group, gender, device, phq8_1..phq8_8,
<feature columns...>[, country]``. Feature columns are named
``<activity>_<group>_<index>`` with activity one of nback/image/paragraph.
Blanks are allowed only in PHQ-8 cells, feature cells (an activity is blank
wholesale per row), and country. Any out-of-range cell fails ingestion with
its row and column named; nothing is coerced silently.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError, SchemaError
from .pipeline import FeatureGroup, group_feature_columns
from .types import ACTIVITIES, N_SYMPTOMS, PHQ8_CUTOFF, ParticipantRecord

SCHEMA_VERSION = 1
FIXED_COLUMNS = ("participant_id", "age_group", "gender", "device") + tuple(
    f"phq8_{i}" for i in range(1, N_SYMPTOMS + 1)
)


@dataclass
class Dataset:
    participant_ids: list[str]
    age_group: np.ndarray  # (n,) int
    gender: np.ndarray  # (n,) int
    device: np.ndarray  # (n,) int
    phq8: np.ndarray  # (n, 8) float, NaN where blank
    feature_columns: tuple[str, ...]
    features: np.ndarray  # (n, F) float, NaN where blank
    country: list | None = None

    @property
    def n(self) -> int:
        return len(self.participant_ids)

    def condition(self) -> np.ndarray:
        """1 iff PHQ-8 total >= 10; NaN where any item is missing."""
        out = np.full(self.n, np.nan)
        complete = ~np.isnan(self.phq8).any(axis=1)
        out[complete] = (self.phq8[complete].sum(axis=1) >= PHQ8_CUTOFF).astype(float)
        return out

    def complete_mask(self) -> np.ndarray:
        """Rows with all PHQ-8 items and every activity present."""
        ok = ~np.isnan(self.phq8).any(axis=1)
        if self.features.shape[1]:
            ok &= ~np.isnan(self.features).any(axis=1)
        return ok

    def feature_groups(self) -> tuple[FeatureGroup, ...]:
        return group_feature_columns(self.feature_columns)

    def group_matrices(self, groups=None) -> dict[str, np.ndarray]:
        groups = groups or self.feature_groups()
        col_idx = {c: i for i, c in enumerate(self.feature_columns)}
        return {
            f"{g.activity}/{g.name}": self.features[:, [col_idx[c] for c in g.columns]]
            for g in groups
        }

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return Dataset(
            participant_ids=[self.participant_ids[i] for i in idx],
            age_group=self.age_group[idx],
            gender=self.gender[idx],
            device=self.device[idx],
            phq8=self.phq8[idx],
            feature_columns=self.feature_columns,
            features=self.features[idx],
            country=[self.country[i] for i in idx] if self.country is not None else None,
        )

    def records(self) -> list[ParticipantRecord]:
        groups = self.feature_groups()
        col_idx = {c: i for i, c in enumerate(self.feature_columns)}
        activity_cols = {
            a: [col_idx[c] for g in groups if g.activity == a for c in g.columns]
            for a in ACTIVITIES
        }
        out = []
        for i in range(self.n):
            items = self.phq8[i]
            features = {}
            for a, cols in activity_cols.items():
                if cols and not np.isnan(self.features[i, cols]).any():
                    features[a] = self.features[i, cols]
            meta = {}
            if self.country is not None and self.country[i]:
                meta["country"] = self.country[i]
            out.append(
                ParticipantRecord(
                    participant_id=self.participant_ids[i],
                    age_group=int(self.age_group[i]),
                    gender=int(self.gender[i]),
                    device=int(self.device[i]),
                    phq8_items=(
                        tuple(int(v) for v in items) if not np.isnan(items).any() else None
                    ),
                    features=features,
                    metadata=meta,
                )
            )
        return out


def _parse_int(value: str, lo: int, hi: int, row: int, col: str) -> int:
    try:
        v = int(value)
    except ValueError:
        raise SchemaError(f"row {row}, column {col}: {value!r} is not an integer")
    if not lo <= v <= hi:
        raise SchemaError(f"row {row}, column {col}: {v} outside {lo}..{hi}")
    return v


def _parse_float(value: str, row: int, col: str) -> float:
    try:
        v = float(value)
    except ValueError:
        raise SchemaError(f"row {row}, column {col}: {value!r} is not a number")
    if not np.isfinite(v):
        raise SchemaError(f"row {row}, column {col}: value must be finite")
    return v


def read_csv(path) -> Dataset:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file")
        rows = list(reader)

    if tuple(header[: len(FIXED_COLUMNS)]) != FIXED_COLUMNS:
        raise SchemaError(
            f"{path}: header must start with {', '.join(FIXED_COLUMNS)}"
        )
    rest = header[len(FIXED_COLUMNS):]
    has_country = bool(rest) and rest[-1] == "country"
    feature_columns = tuple(rest[:-1] if has_country else rest)
    for col in feature_columns:
        parts = col.split("_")
        if len(parts) < 3 or parts[0] not in ACTIVITIES:
            raise SchemaError(
                f"{path}: column {col!r} is neither a feature column "
                f"(<activity>_<group>_<index>) nor a trailing 'country'"
            )
    groups = group_feature_columns(feature_columns)  # validates grouping
    col_of = {c: i + len(FIXED_COLUMNS) for i, c in enumerate(feature_columns)}
    activity_offsets = {
        a: [col_of[c] for g in groups if g.activity == a for c in g.columns]
        for a in ACTIVITIES
    }

    n = len(rows)
    ids: list[str] = []
    age = np.empty(n, dtype=int)
    gender = np.empty(n, dtype=int)
    device = np.empty(n, dtype=int)
    phq8 = np.full((n, N_SYMPTOMS), np.nan)
    features = np.full((n, len(feature_columns)), np.nan)
    country: list = []

    width = len(header)
    for r, row in enumerate(rows):
        rownum = r + 2  # 1-based with header
        if len(row) != width:
            raise SchemaError(f"row {rownum}: expected {width} cells, got {len(row)}")
        ids.append(row[0])
        age[r] = _parse_int(row[1], 0, 3, rownum, "age_group")
        gender[r] = _parse_int(row[2], 0, 1, rownum, "gender")
        device[r] = _parse_int(row[3], 0, 1, rownum, "device")
        for s in range(N_SYMPTOMS):
            cell = row[4 + s]
            if cell != "":
                phq8[r, s] = _parse_int(cell, 0, 3, rownum, f"phq8_{s + 1}")
        for j, col in enumerate(feature_columns):
            cell = row[len(FIXED_COLUMNS) + j]
            if cell != "":
                features[r, j] = _parse_float(cell, rownum, col)
        for a, cols in activity_offsets.items():
            present = [row[c] != "" for c in cols]
            if any(present) and not all(present):
                raise SchemaError(
                    f"row {rownum}: activity {a!r} must be blank or filled wholesale"
                )
        country.append(row[-1] if has_country and row[-1] != "" else None)

    if len(set(ids)) != len(ids):
        raise DataError(f"{path}: duplicate participant_id values")
    return Dataset(
        participant_ids=ids,
        age_group=age,
        gender=gender,
        device=device,
        phq8=phq8,
        feature_columns=feature_columns,
        features=features,
        country=country if has_country else None,
    )


def format_float(v: float) -> str:
    """Shortest exact decimal representation (round-trips bitwise)."""
    return repr(float(v))


def write_csv(dataset: Dataset, path) -> None:
    path = Path(path)
    header = list(FIXED_COLUMNS) + list(dataset.feature_columns)
    if dataset.country is not None:
        header.append("country")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for i in range(dataset.n):
            row = [
                dataset.participant_ids[i],
                str(int(dataset.age_group[i])),
                str(int(dataset.gender[i])),
                str(int(dataset.device[i])),
            ]
            for s in range(N_SYMPTOMS):
                v = dataset.phq8[i, s]
                row.append("" if np.isnan(v) else str(int(v)))
            for j in range(len(dataset.feature_columns)):
                v = dataset.features[i, j]
                row.append("" if np.isnan(v) else format_float(v))
            if dataset.country is not None:
                row.append(dataset.country[i] or "")
            writer.writerow(row)
