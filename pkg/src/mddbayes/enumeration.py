"""Exact inference over the discrete variables by enumeration.

For a partial-evidence query, every joint assignment of the unobserved
discrete variables (age, gender, device, condition, symptoms) is weighted by
the product of its discrete factor masses and the Gaussian densities of the
*observed* measures; unobserved measures are leaves and marginalize out by
omission. Posterior predictions average the per-draw enumeration marginals
across MCMC draws and report central 95% intervals.

``predict_batch`` scores many queries that share one observed-variable
pattern (as in cross-validation scenarios): factor covariates are split into
row-driven (unobserved, enumerated) and query-driven parts, so everything
that depends only on rows and draws - in particular the heavy
rows x draws x measures tensor - is computed once per draw chunk and each
query contributes only small per-draw terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_expit, logsumexp

from .errors import QueryError, StructuralError
from .fit import PosteriorDraws
from .types import Evidence, ModelParams

LOG_2PI = math.log(2.0 * math.pi)

_CHUNK_ELEMENTS = 4_000_000  # bound on rows x draws per weight block


def discrete_variables(n_symptoms: int, n_age: int = 4) -> list[tuple[str, int]]:
    out = [("age_group", n_age), ("gender", 2), ("device", 2), ("condition", 2)]
    out += [(f"s{i}", 2) for i in range(n_symptoms)]
    return out


@dataclass(frozen=True)
class EnumerationTable:
    """Normalized joint table over the unobserved discrete variables."""

    variables: tuple[str, ...]
    assignments: np.ndarray  # (R, len(variables)) int
    probabilities: np.ndarray  # (R,), sums to 1
    log_weights: np.ndarray  # (R,) unnormalized

    def marginal(self, name: str, domain: int = 2) -> np.ndarray:
        if name not in self.variables:
            raise QueryError(f"{name} was not enumerated")
        col = self.assignments[:, self.variables.index(name)]
        out = np.zeros(domain)
        np.add.at(out, col, self.probabilities)
        return out


@dataclass(frozen=True)
class TargetSummary:
    """Across-draw mean and 2.5/97.5 percentiles of a target's marginal.

    Binary targets carry scalars (probability of value 1); age_group carries
    length-4 category vectors.
    """

    mean: float | np.ndarray
    lower: float | np.ndarray
    upper: float | np.ndarray
    per_draw: np.ndarray | None = None


@dataclass(frozen=True)
class PredictionResult:
    targets: dict[str, TargetSummary]
    evidence: Evidence


def _validate_evidence(evidence: Evidence, n_symptoms: int, n_measures: int, n_age: int):
    if evidence.age_group is not None and evidence.age_group >= n_age:
        raise StructuralError(f"age_group {evidence.age_group} outside 0..{n_age - 1}")
    for s in evidence.symptoms:
        if s >= n_symptoms:
            raise StructuralError(f"symptom index {s} outside 0..{n_symptoms - 1}")
    for m in evidence.measures:
        if m >= n_measures:
            raise StructuralError(f"measure index {m} outside 0..{n_measures - 1}")


class _Pattern:
    """Observed-variable pattern plus the enumeration rows it induces."""

    def __init__(self, evidence: Evidence, n_symptoms: int, n_age: int):
        self.n_symptoms = n_symptoms
        self.n_age = n_age
        self.observed_names = frozenset(evidence.observed_discrete())
        self.measure_indices = tuple(sorted(evidence.measures))
        all_vars = discrete_variables(n_symptoms, n_age)
        self.free = [(n, size) for n, size in all_vars if n not in self.observed_names]
        if not self.free:
            raise QueryError("all discrete variables observed: nothing to enumerate")
        sizes = [size for _, size in self.free]
        self.grid = np.indices(sizes).reshape(len(sizes), -1).T  # (R, U)
        self.rows = self.grid.shape[0]
        self.free_names = tuple(n for n, _ in self.free)
        self._free_pos = {n: i for i, n in enumerate(self.free_names)}

    def matches(self, evidence: Evidence) -> bool:
        return (
            frozenset(evidence.observed_discrete()) == self.observed_names
            and tuple(sorted(evidence.measures)) == self.measure_indices
        )

    def row_column(self, name: str) -> np.ndarray | None:
        """(R,) value array for a row-driven variable, None if observed."""
        if name in self._free_pos:
            return self.grid[:, self._free_pos[name]]
        return None

    def indicator(self, name: str, domain: int) -> np.ndarray:
        ind = np.zeros((domain, self.rows))
        ind[self.row_column(name), np.arange(self.rows)] = 1.0
        return ind


def _factor_covariates(n_symptoms: int):
    """Design covariate names of each factor family, in weight order."""
    cond = ("__one__", "age_group", "gender")
    symp_base = ("__one__", "age_group", "gender", "condition")
    meas = ("__one__", "age_group", "gender", "device", "condition") + tuple(
        f"s{i}" for i in range(n_symptoms)
    )
    return cond, symp_base, meas


def _split_design(pattern: _Pattern, names):
    """Indices of row-driven vs query-observed covariates, plus the row
    value matrix (constants handled on the observed side)."""
    row_cols, row_idx, obs_names, obs_idx = [], [], [], []
    for i, name in enumerate(names):
        col = None if name == "__one__" else pattern.row_column(name)
        if col is None:
            obs_names.append(name)
            obs_idx.append(i)
        else:
            row_cols.append(col.astype(float))
            row_idx.append(i)
    row_matrix = np.column_stack(row_cols) if row_cols else np.zeros((pattern.rows, 0))
    return row_matrix, np.array(row_idx, int), obs_names, np.array(obs_idx, int)


def _obs_values(evidence: Evidence, names) -> np.ndarray:
    obs = evidence.observed_discrete()
    return np.array([1.0 if n == "__one__" else float(obs[n]) for n in names])


class _ChunkPrep:
    """Everything that depends only on (pattern, draw chunk), shared by all
    queries in a batch."""

    def __init__(self, arrays, dag, pattern: _Pattern, idx):
        n_symptoms = dag.n_symptoms
        self.pattern = pattern
        rows = pattern.rows

        self.age_probs = arrays["age_probs"][idx]
        self.t = self.age_probs.shape[0]
        self.log_age = np.log(self.age_probs)
        self.log_gender = (np.log(arrays["gender_prob"][idx]),
                           np.log1p(-arrays["gender_prob"][idx]))
        self.log_device = (np.log(arrays["device_prob"][idx]),
                           np.log1p(-arrays["device_prob"][idx]))

        # Root factors that are fully row-driven are identical across queries.
        self.shared = np.zeros((rows, self.t))
        col = pattern.row_column("age_group")
        if col is not None:
            self.shared += self.log_age[:, col].T
        for name, (logp, log1mp) in (("gender", self.log_gender),
                                     ("device", self.log_device)):
            col = pattern.row_column(name)
            if col is not None:
                v = col[:, None].astype(float)
                self.shared += v * logp[None, :] + (1.0 - v) * log1mp[None, :]

        # Logistic factors: precompute the row-driven linear part per factor.
        cond_cov, symp_base, _ = _factor_covariates(n_symptoms)
        self.factors = []
        specs = [("condition", cond_cov, arrays["cond_w"][idx])]
        for s in range(n_symptoms):
            names = symp_base + tuple(f"s{j}" for j in dag.parents(s))
            specs.append((f"s{s}", names, arrays["symp_w"][s][idx]))
        for child, names, w in specs:
            row_m, row_i, obs_names, obs_i = _split_design(pattern, names)
            f_row = row_m @ w[:, row_i].T if row_i.size else None  # (R, T)
            child_col = pattern.row_column(child)
            sign_col = (2.0 * child_col - 1.0)[:, None] if child_col is not None else None
            self.factors.append((child, obs_names, w[:, obs_i], f_row, sign_col))

        self.measures = (
            _MeasureTerms(arrays, n_symptoms, pattern, idx)
            if pattern.measure_indices
            else None
        )

    def log_weights(self, evidence: Evidence, values: np.ndarray | None) -> np.ndarray:
        """(R, T) unnormalized log-weights for one query."""
        pattern = self.pattern
        obs = evidence.observed_discrete()
        lw = self.shared.copy()

        if pattern.row_column("age_group") is None:
            lw += self.log_age[:, obs["age_group"]][None, :]
        for name, (logp, log1mp) in (("gender", self.log_gender),
                                     ("device", self.log_device)):
            if pattern.row_column(name) is None:
                lw += (logp if obs[name] else log1mp)[None, :]

        for child, obs_names, w_obs, f_row, sign_col in self.factors:
            f = (w_obs @ _obs_values(evidence, obs_names))[None, :]
            if f_row is not None:
                f = f + f_row
            sign = sign_col if sign_col is not None else 2.0 * obs[child] - 1.0
            lw += log_expit(sign * f)

        if self.measures is not None:
            lw += self.measures.log_weights(evidence, values)
        return lw


class _MeasureTerms:
    """Quadratic Gaussian term, split so the rows x draws x measures tensor
    is built once per chunk and reused for every query."""

    def __init__(self, arrays, n_symptoms, pattern: _Pattern, idx):
        meas_idx = list(pattern.measure_indices)
        _, _, meas_cov = _factor_covariates(n_symptoms)
        w_full = arrays["meas_w"][idx][:, meas_idx, :]  # (T, Mo, D)
        sigma = arrays["sigma"][idx][:, meas_idx]  # (T, Mo)
        self.inv_var = sigma**-2.0
        self.log_norm = -np.sum(np.log(sigma), axis=1) - 0.5 * LOG_2PI * len(meas_idx)
        row_m, row_i, self.obs_names, obs_i = _split_design(pattern, meas_cov)
        self.w_obs_t = w_full[:, :, obs_i].transpose(0, 2, 1)  # (T, k_obs, Mo)
        cs = np.tensordot(row_m, w_full[:, :, row_i], axes=([1], [2]))  # (R, T, Mo)
        self.cs = cs
        self.cs_quad = np.einsum("rtm,rtm,tm->rt", cs, cs, self.inv_var)

    def log_weights(self, evidence: Evidence, values: np.ndarray) -> np.ndarray:
        obs_vec = _obs_values(evidence, self.obs_names)
        u = values[None, :] - obs_vec @ self.w_obs_t  # (T, Mo)
        term_u = np.einsum("tm,tm->t", u * u, self.inv_var)  # (T,)
        cross = np.einsum("tm,rtm->rt", u * self.inv_var, self.cs)  # (R, T)
        return (self.log_norm - 0.5 * term_u)[None, :] + cross - 0.5 * self.cs_quad


def _params_arrays(p: ModelParams) -> dict:
    return {
        "age_probs": p.age_probs[None, :],
        "gender_prob": np.array([p.gender_prob]),
        "device_prob": np.array([p.device_prob]),
        "cond_w": p.cond_w[None, :],
        "symp_w": [w[None, :] for w in p.symp_w],
        "meas_w": p.meas_w[None, :, :],
        "sigma": p.meas_sigma[None, :],
    }


def enumerate_posterior(p: ModelParams, evidence: Evidence) -> EnumerationTable:
    """Exact normalized table over unobserved discrete variables for fixed
    parameters."""
    _validate_evidence(evidence, p.n_symptoms, p.n_measures, p.n_age_groups)
    pattern = _Pattern(evidence, p.n_symptoms, p.n_age_groups)
    prep = _ChunkPrep(_params_arrays(p), p.dag, pattern, slice(None))
    values = np.array([evidence.measures[m] for m in pattern.measure_indices])
    lw = prep.log_weights(evidence, values)[:, 0]
    probs = np.exp(lw - logsumexp(lw))
    probs /= probs.sum()
    return EnumerationTable(
        variables=pattern.free_names,
        assignments=pattern.grid,
        probabilities=probs,
        log_weights=lw,
    )


def _resolve_targets(draws, evidence, targets):
    lay = draws.layout
    observed = evidence.observed_discrete()
    if targets is None:
        targets = tuple(
            name
            for name in ["condition"] + [f"s{i}" for i in range(lay.n_symptoms)]
            if name not in observed
        )
    if not targets:
        raise QueryError("no targets requested")
    domains = dict(discrete_variables(lay.n_symptoms, lay.n_age))
    for t in targets:
        if t not in domains:
            raise QueryError(f"unknown target variable {t!r}")
        if t in observed:
            raise QueryError(f"target {t!r} is already observed in the evidence")
    return tuple(targets), domains


def _summaries(per_draw, domains, keep_per_draw):
    out = {}
    for t, marg in per_draw.items():
        lo, hi = np.percentile(marg, [2.5, 97.5], axis=0)
        if domains[t] == 2:
            out[t] = TargetSummary(
                mean=float(marg[:, 1].mean()),
                lower=float(lo[1]),
                upper=float(hi[1]),
                per_draw=marg[:, 1] if keep_per_draw else None,
            )
        else:
            out[t] = TargetSummary(
                mean=marg.mean(axis=0),
                lower=lo,
                upper=hi,
                per_draw=marg if keep_per_draw else None,
            )
    return out


def predict(
    draws: PosteriorDraws,
    evidence: Evidence,
    targets: tuple[str, ...] | None = None,
    keep_per_draw: bool = False,
) -> PredictionResult:
    """Posterior-mean marginals with central 95% intervals across draws.

    ``targets`` defaults to condition plus every unobserved symptom. Binary
    targets are summarized by p(value = 1); ``age_group`` by its category
    distribution.
    """
    return predict_batch(draws, [evidence], targets, keep_per_draw)[0]


def predict_batch(
    draws: PosteriorDraws,
    evidences: list[Evidence],
    targets: tuple[str, ...] | None = None,
    keep_per_draw: bool = False,
) -> list[PredictionResult]:
    """Score many queries sharing one observed-variable pattern.

    All evidences must observe the same variables (values may differ); the
    enumeration rows and all row-driven tensors are shared across queries.
    """
    if not evidences:
        return []
    lay = draws.layout
    for ev in evidences:
        _validate_evidence(ev, lay.n_symptoms, lay.n_measures, lay.n_age)
    first = evidences[0]
    pattern = _Pattern(first, lay.n_symptoms, lay.n_age)
    for ev in evidences[1:]:
        if not pattern.matches(ev):
            raise QueryError("evidences in a batch must share the observed-variable pattern")
    targets, domains = _resolve_targets(draws, first, targets)

    arrays = draws.constrained
    total = draws.n_draws
    rows = pattern.rows
    indicators = {t: pattern.indicator(t, domains[t]) for t in targets}
    n_queries = len(evidences)
    per_draw = {t: [np.empty((total, domains[t])) for _ in range(n_queries)] for t in targets}
    value_rows = np.array(
        [[ev.measures[m] for m in pattern.measure_indices] for ev in evidences]
    )

    chunk = max(1, _CHUNK_ELEMENTS // max(rows, 1))
    for start in range(0, total, chunk):
        idx = slice(start, min(start + chunk, total))
        prep = _ChunkPrep(arrays, lay.dag, pattern, idx)
        for q, ev in enumerate(evidences):
            lw = prep.log_weights(ev, value_rows[q])
            lw -= logsumexp(lw, axis=0, keepdims=True)
            probs = np.exp(lw)
            probs /= probs.sum(axis=0, keepdims=True)
            for t in targets:
                per_draw[t][q][idx] = (indicators[t] @ probs).T

    results = []
    for q, ev in enumerate(evidences):
        summaries = _summaries({t: per_draw[t][q] for t in targets}, domains, keep_per_draw)
        results.append(PredictionResult(targets=summaries, evidence=ev))
    return results
