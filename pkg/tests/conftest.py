import itertools
import math

import numpy as np
import pytest
from scipy.stats import norm

from mddbayes.dag import SymptomDag, empty_dag
from mddbayes.types import Evidence, ModelParams


def random_dag(rng: np.random.Generator, d: int = 8, p_edge: float = 0.3) -> SymptomDag:
    """Random DAG: lower-triangular mask under a random permutation."""
    perm = rng.permutation(d)
    adj = np.zeros((d, d), dtype=np.int8)
    for i in range(d):
        for j in range(i + 1, d):
            if rng.random() < p_edge:
                adj[perm[i], perm[j]] = 1
    return SymptomDag(adjacency=adj, order=tuple(int(v) for v in perm))


def random_params(
    rng: np.random.Generator,
    dag: SymptomDag | None = None,
    n_measures: int = 16,
    scale: float = 1.0,
) -> ModelParams:
    dag = dag if dag is not None else random_dag(rng)
    S = dag.n_symptoms
    return ModelParams(
        age_probs=rng.dirichlet(np.ones(4)),
        gender_prob=float(rng.uniform(0.1, 0.9)),
        device_prob=float(rng.uniform(0.1, 0.9)),
        cond_w=scale * rng.standard_normal(3),
        symp_w=tuple(scale * rng.standard_normal(4 + dag.k(s)) for s in range(S)),
        meas_w=scale * rng.standard_normal((n_measures, 5 + S)),
        meas_sigma=rng.uniform(0.5, 2.0, size=n_measures),
        dag=dag,
    ).validate()


def zero_params(dag: SymptomDag | None = None, n_measures: int = 16) -> ModelParams:
    dag = dag if dag is not None else empty_dag(8)
    S = dag.n_symptoms
    return ModelParams(
        age_probs=np.full(4, 0.25),
        gender_prob=0.5,
        device_prob=0.5,
        cond_w=np.zeros(3),
        symp_w=tuple(np.zeros(4 + dag.k(s)) for s in range(S)),
        meas_w=np.zeros((n_measures, 5 + S)),
        meas_sigma=np.ones(n_measures),
        dag=dag,
    ).validate()


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(1234))


def small_params(rng, n_symptoms=3, n_measures=4) -> ModelParams:
    """Compact model with one inter-symptom edge, for exhaustive oracles."""
    adj = np.zeros((n_symptoms, n_symptoms), dtype=np.int8)
    adj[0, 1] = 1
    dag = SymptomDag(adjacency=adj, order=tuple(range(n_symptoms)))
    return ModelParams(
        age_probs=rng.dirichlet(np.ones(4)),
        gender_prob=float(rng.uniform(0.2, 0.8)),
        device_prob=float(rng.uniform(0.2, 0.8)),
        cond_w=rng.standard_normal(3),
        symp_w=tuple(rng.standard_normal(4 + dag.k(s)) for s in range(n_symptoms)),
        meas_w=rng.standard_normal((n_measures, 5 + n_symptoms)),
        meas_sigma=rng.uniform(0.5, 2.0, size=n_measures),
        dag=dag,
    ).validate()


def brute_force_joint(p: ModelParams, evidence: Evidence):
    """Straight-line full-joint construction over every discrete assignment.

    Walks the complete cartesian product with plain Python loops and
    scipy.stats densities, conditioning by filtering; shares no code with
    the enumeration module.
    """
    S = p.n_symptoms
    table = {}
    for a in range(p.n_age_groups):
        for g in range(2):
            for d in range(2):
                for c in range(2):
                    for s in itertools.product((0, 1), repeat=S):
                        w = p.age_probs[a]
                        w *= p.gender_prob if g else 1 - p.gender_prob
                        w *= p.device_prob if d else 1 - p.device_prob
                        fc = p.cond_w @ [1, a, g]
                        pc = 1 / (1 + math.exp(-fc))
                        w *= pc if c else 1 - pc
                        for i in range(S):
                            x = [1, a, g, c] + [s[j] for j in p.dag.parents(i)]
                            fs = float(p.symp_w[i] @ np.asarray(x, dtype=float))
                            ps = 1 / (1 + math.exp(-fs))
                            w *= ps if s[i] else 1 - ps
                        for m, value in evidence.measures.items():
                            x = np.asarray([1, a, g, d, c, *s], dtype=float)
                            fm = float(p.meas_w[m] @ x)
                            w *= norm.pdf(value, loc=fm, scale=p.meas_sigma[m])
                        table[(a, g, d, c) + tuple(s)] = w

    obs = evidence.observed_discrete()
    names = ["age_group", "gender", "device", "condition"] + [f"s{i}" for i in range(S)]
    keep = {}
    for key, w in table.items():
        if all(key[names.index(k)] == v for k, v in obs.items()):
            keep[key] = w
    total = sum(keep.values())
    return {k: v / total for k, v in keep.items()}, names


def brute_force_marginal(p: ModelParams, evidence: Evidence, name: str, domain: int):
    """Marginal of one variable from the brute-force joint."""
    joint, names = brute_force_joint(p, evidence)
    pos = names.index(name)
    out = np.zeros(domain)
    for key, w in joint.items():
        out[key[pos]] += w
    return out


def random_small_evidence(rng, n_symptoms=3, n_measures=4) -> Evidence:
    kwargs = {}
    if rng.random() < 0.7:
        kwargs["age_group"] = int(rng.integers(4))
    if rng.random() < 0.7:
        kwargs["gender"] = int(rng.integers(2))
    if rng.random() < 0.5:
        kwargs["device"] = int(rng.integers(2))
    if rng.random() < 0.25:
        kwargs["condition"] = int(rng.integers(2))
    symptoms = {}
    if rng.random() < 0.4:
        symptoms[int(rng.integers(n_symptoms))] = int(rng.integers(2))
    measures = {}
    for m in range(n_measures):
        if rng.random() < 0.5:
            measures[m] = float(rng.standard_normal() * 2)
    return Evidence(symptoms=symptoms, measures=measures, **kwargs)
