"""Stratified k-fold assignment over gender x age-group x condition strata."""

from __future__ import annotations

import numpy as np

from .errors import DataError


def stratified_kfold(
    gender, age_group, condition, k: int = 5, seed: int = 0
) -> list[np.ndarray]:
    """Fold index sets preserving stratum proportions.

    Members of each stratum are shuffled (seeded) and dealt round-robin onto
    folds; the dealing pointer continues across strata so small strata are
    spread as evenly as possible.
    """
    gender = np.asarray(gender)
    age_group = np.asarray(age_group)
    condition = np.asarray(condition)
    n = gender.shape[0]
    if n < k:
        raise DataError(f"need at least k={k} records, got {n}")

    keys = [(int(g), int(a), int(c)) for g, a, c in zip(gender, age_group, condition)]
    strata: dict[tuple, list[int]] = {}
    for idx, key in enumerate(keys):
        strata.setdefault(key, []).append(idx)

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 101])))
    folds: list[list[int]] = [[] for _ in range(k)]
    pointer = 0
    for key in sorted(strata):
        members = np.array(strata[key])
        rng.shuffle(members)
        for idx in members:
            folds[pointer % k].append(int(idx))
            pointer += 1
    return [np.array(sorted(f), dtype=int) for f in folds]
