"""Ancestral sampling from the generative model, plus a raw-feature lift so
the feature pipeline has real work to do. Substitute for the private corpus.

Sampling order follows the factorization: confounds, condition, symptoms in
DAG order, then measures. Raw PHQ-8 items are synthesized inside the band
implied by each binary symptom level (fixed true threshold 2) under the
constraint that the item total reproduces the sampled condition, so derived
labels stay consistent with the network's condition variable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .dag import SymptomDag, empty_dag
from .dataset import Dataset
from .errors import StructuralError
from .types import ModelParams, N_MEASURES, N_SYMPTOMS

TRUE_ITEM_THRESHOLD = 2  # high symptom iff raw score >= 2 in synthetic data

# Feature groups of the standard 16-measure model: (activity, group, raw dim).
DEFAULT_FEATURE_GROUPS = (
    ("nback", "cog", 6),
    ("image", "video", 8),
    ("image", "egemaps", 8),
    ("image", "linguistic", 6),
    ("image", "gaze", 6),
    ("image", "motion", 6),
    ("paragraph", "egemaps", 8),
    ("paragraph", "formants", 6),
)


@dataclass(frozen=True)
class GroundTruth:
    """The parameters a synthetic dataset was simulated from."""

    params: ModelParams
    seed: int
    n: int

    def __post_init__(self):
        self.params.validate()
        if self.n < 1:
            raise StructuralError("n must be >= 1")


@dataclass(frozen=True)
class LatentTables:
    """Model-space draws underlying a synthetic dataset."""

    a: np.ndarray
    g: np.ndarray
    d: np.ndarray
    c: np.ndarray
    s: np.ndarray  # (n, S)
    m: np.ndarray  # (n, M)


def default_dag() -> SymptomDag:
    """A small fixed chain among the first symptoms: 0 -> 1 -> 2, 3 -> 4."""
    adj = np.zeros((N_SYMPTOMS, N_SYMPTOMS), dtype=np.int8)
    adj[0, 1] = adj[1, 2] = adj[3, 4] = 1
    return SymptomDag(adjacency=adj, order=tuple(range(N_SYMPTOMS)))


def default_ground_truth(
    seed: int = 0,
    n: int = 2000,
    dag: SymptomDag | None = None,
    n_measures: int = N_MEASURES,
    condition_effect: float = 0.8,
    measure_effect: float = 1.0,
    confound_effect: float = 0.4,
    sigma_range: tuple[float, float] = (3.5, 4.5),
) -> GroundTruth:
    """Moderate-effect parameters for demos and tests.

    Symptom-condition effects have magnitude ``condition_effect``,
    measure-condition effects magnitude ``measure_effect``, and every
    age/gender/device coefficient scales with ``confound_effect`` (zero gives
    a fairness-null model). Measurement noise is drawn from ``sigma_range``,
    sized so the all-activities condition AUC lands in the mid-0.7s rather
    than saturating.
    """
    dag = dag or default_dag()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 7])))
    S = dag.n_symptoms
    signs = lambda size: rng.choice([-1.0, 1.0], size=size)

    cond_w = np.array([-0.6, *(confound_effect * signs(2))])
    symp_w = []
    for s in range(S):
        base = np.array(
            [
                -0.4 + 0.2 * rng.standard_normal(),
                *(0.6 * confound_effect * signs(2)),
            ]
        )
        w_c = condition_effect * (1.0 + 0.25 * rng.random())
        parents = 0.3 * signs(dag.k(s))
        symp_w.append(np.concatenate([base, [w_c], parents]))
    meas_w = np.empty((n_measures, 5 + S))
    meas_w[:, 0] = 0.3 * rng.standard_normal(n_measures)
    meas_w[:, 1:4] = 0.5 * confound_effect * rng.standard_normal((n_measures, 3))
    meas_w[:, 4] = measure_effect * signs(n_measures)
    meas_w[:, 5:] = 0.3 * rng.standard_normal((n_measures, S))
    params = ModelParams(
        age_probs=rng.dirichlet(5.0 * np.ones(4)),
        gender_prob=float(rng.uniform(0.4, 0.6)),
        device_prob=float(rng.uniform(0.55, 0.8)),
        cond_w=cond_w,
        symp_w=tuple(symp_w),
        meas_w=meas_w,
        meas_sigma=rng.uniform(*sigma_range, size=n_measures),
        dag=dag,
    )
    return GroundTruth(params=params.validate(), seed=seed, n=n)


def sample_latents(params: ModelParams, n: int, rng: np.random.Generator) -> LatentTables:
    """Draw n complete model-space cases by ancestral sampling."""
    S, M = params.n_symptoms, params.n_measures
    a = rng.choice(params.n_age_groups, size=n, p=params.age_probs)
    g = (rng.random(n) < params.gender_prob).astype(int)
    d = (rng.random(n) < params.device_prob).astype(int)
    f_c = params.cond_w[0] + params.cond_w[1] * a + params.cond_w[2] * g
    c = (rng.random(n) < expit(f_c)).astype(int)
    s = np.zeros((n, S), dtype=int)
    for idx in params.dag.order:
        w = params.symp_w[idx]
        f = w[0] + w[1] * a + w[2] * g + w[3] * c
        parents = params.dag.parents(idx)
        if parents:
            f = f + s[:, parents] @ w[4:]
        s[:, idx] = rng.random(n) < expit(f)
    x_meas = np.column_stack([np.ones(n), a, g, d, c, s]).astype(float)
    means = x_meas @ params.meas_w.T
    m = means + rng.standard_normal((n, M)) * params.meas_sigma
    return LatentTables(a=a, g=g, d=d, c=c, s=s, m=m)


def _items_from_symptoms(s_row: np.ndarray, c: int, rng: np.random.Generator) -> np.ndarray:
    """Raw 0-3 items inside each symptom's band with total consistent with c.

    High symptoms draw from {2, 3}, low from {0, 1}; rejection sampling is
    followed by a deterministic in-band adjustment when the total misses the
    cutoff. Infeasible (s, c) pairs are resolved upstream.
    """
    high = s_row.astype(bool)
    for _ in range(60):
        items = np.where(high, 2 + (rng.random(len(s_row)) < 0.4), rng.random(len(s_row)) < 0.4)
        total = int(items.sum())
        if (total >= 10) == bool(c):
            return items.astype(int)
    items = np.where(high, 2, 0).astype(int)
    if c == 1:
        order = rng.permutation(len(s_row))
        for i in order:  # push scores to band tops until the cutoff is met
            if items.sum() >= 10:
                break
            items[i] = 3 if high[i] else 1
    # c == 0: band minima give total 2 * (#high) <= 9 once feasible
    return items


def _symptom_feasible(s_row: np.ndarray, c: int) -> bool:
    h = int(s_row.sum())
    return (2 * h + len(s_row) >= 10) if c == 1 else (2 * h <= 9)


def sample_items(latents: LatentTables, params: ModelParams, rng: np.random.Generator):
    """Raw PHQ-8 items for each case; resamples the symptom vector (given its
    parents' factorization) in the rare infeasible cases, updating measures
    accordingly is unnecessary because measures are generated after this in
    sample_dataset."""
    n, S = latents.s.shape
    items = np.empty((n, S), dtype=int)
    s = latents.s.copy()
    for i in range(n):
        tries = 0
        while not _symptom_feasible(s[i], latents.c[i]) and tries < 200:
            s[i] = _resample_symptom_row(
                params, latents.a[i], latents.g[i], latents.c[i], rng
            )
            tries += 1
        if not _symptom_feasible(s[i], latents.c[i]):
            # force: all high for condition, all low for control
            s[i] = 1 if latents.c[i] else 0
        items[i] = _items_from_symptoms(s[i], latents.c[i], rng)
    return items, s


def _resample_symptom_row(params, a, g, c, rng) -> np.ndarray:
    s = np.zeros(params.n_symptoms, dtype=int)
    for idx in params.dag.order:
        w = params.symp_w[idx]
        f = w[0] + w[1] * a + w[2] * g + w[3] * c
        parents = params.dag.parents(idx)
        if parents:
            f += float(s[list(parents)] @ w[4:])
        s[idx] = rng.random() < expit(f)
    return s


def sample_dataset(
    gt: GroundTruth,
    feature_groups=DEFAULT_FEATURE_GROUPS,
    lift_noise: float = 0.05,
    with_country: bool = True,
) -> tuple[Dataset, LatentTables]:
    """Simulate a full dataset and its raw-feature lift.

    Each measure pair is mapped to its group's raw features through a fixed
    random linear map plus independent noise. Country labels, when present,
    are independent 50/50 UK/US draws, so they carry no effect (useful as a
    fairness null).
    """
    params = gt.params
    if 2 * len(feature_groups) != params.n_measures:
        raise StructuralError(
            f"{len(feature_groups)} feature groups cannot produce "
            f"{params.n_measures} measures (2 per group)"
        )
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([gt.seed, 11])))
    lift_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([gt.seed, 12])))

    latents = sample_latents(params, gt.n, rng)
    items, s_final = sample_items(latents, params, rng)
    latents = LatentTables(
        a=latents.a, g=latents.g, d=latents.d, c=latents.c, s=s_final, m=latents.m
    )
    # Regenerate measures from the final symptom vectors so the joint stays
    # exactly the network's.
    n = gt.n
    x_meas = np.column_stack(
        [np.ones(n), latents.a, latents.g, latents.d, latents.c, s_final]
    ).astype(float)
    m = x_meas @ params.meas_w.T + rng.standard_normal((n, params.n_measures)) * params.meas_sigma
    latents = LatentTables(
        a=latents.a, g=latents.g, d=latents.d, c=latents.c, s=s_final, m=m
    )

    columns: list[str] = []
    blocks: list[np.ndarray] = []
    for gi, (activity, name, dim) in enumerate(feature_groups):
        pair = latents.m[:, 2 * gi: 2 * gi + 2]
        lift = lift_rng.standard_normal((dim, 2))
        offset = lift_rng.standard_normal(dim)
        block = pair @ lift.T + offset + lift_noise * rng.standard_normal((n, dim))
        blocks.append(block)
        columns += [f"{activity}_{name}_{i}" for i in range(dim)]

    country = None
    if with_country:
        country = [("UK", "US")[int(v)] for v in rng.random(n) < 0.5]

    dataset = Dataset(
        participant_ids=[f"p{i:05d}" for i in range(n)],
        age_group=latents.a,
        gender=latents.g,
        device=latents.d,
        phq8=items.astype(float),
        feature_columns=tuple(columns),
        features=np.hstack(blocks),
        country=country,
    )
    return dataset, latents
