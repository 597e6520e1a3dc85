"""Log-density of the joint network and its prior, in constrained space.

The joint factorizes as

    p(M, S, C, A, G, D) = prod_m p(M_m | A,G,D,C,S)
                        * prod_s p(S_s | A,G,C,P_s)
                        * p(C | A,G) * p(A) * p(G) * p(D)

with Bernoulli-logistic factors for C and S, Gaussian factors for M, and
linear predictors over the scalar variable codes (age enters as 0..3).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import expit, gammaln, log_expit

from .errors import InvalidParameterError, StructuralError
from .types import ModelParams, Observation

LOG_2PI = math.log(2.0 * math.pi)


def logistic(x: float) -> float:
    """1 / (1 + exp(-x)), saturating without overflow or NaN."""
    return float(expit(x))


def log_bernoulli_logit(value: int, f: float) -> float:
    """log Ber(value | logistic(f)); uses log-sigmoid for stability."""
    return float(log_expit(f if value == 1 else -f))


def log_factor_condition(p: ModelParams, a: int, g: int, c: int) -> float:
    """log p(C=c | A=a, G=g)."""
    f = p.cond_w[0] + p.cond_w[1] * a + p.cond_w[2] * g
    return log_bernoulli_logit(c, f)


def log_factor_symptom(
    p: ModelParams, s: int, a: int, g: int, c: int, parents, value: int
) -> float:
    """log p(S_s=value | A=a, G=g, C=c, parents).

    ``parents`` is the binary sub-vector of parent symptoms, ordered by
    ascending parent index, length dag.k(s).
    """
    w = p.symp_w[s]
    parents = np.asarray(parents, dtype=float)
    if parents.shape != (p.dag.k(s),):
        raise StructuralError(
            f"symptom {s} expects {p.dag.k(s)} parent values, got {parents.shape}"
        )
    f = w[0] + w[1] * a + w[2] * g + w[3] * c + float(w[4:] @ parents)
    return log_bernoulli_logit(value, f)


def log_factor_measure(
    p: ModelParams, m: int, a: int, g: int, d: int, c: int, s, value: float
) -> float:
    """log N(value | f_m(a,g,d,c,s), sigma_m^2)."""
    sigma = float(p.meas_sigma[m])
    if sigma <= 0:
        raise InvalidParameterError(f"meas_sigma[{m}] must be > 0, got {sigma}")
    s = np.asarray(s, dtype=float)
    if s.shape != (p.n_symptoms,):
        raise StructuralError(f"expected {p.n_symptoms} symptom values, got {s.shape}")
    w = p.meas_w[m]
    f = w[0] + w[1] * a + w[2] * g + w[3] * d + w[4] * c + float(w[5:] @ s)
    z = (float(value) - f) / sigma
    return -math.log(sigma) - 0.5 * LOG_2PI - 0.5 * z * z


def log_joint(p: ModelParams, obs: Observation) -> float:
    """Sum of all factor log-densities for one fully observed case."""
    if len(obs.symptoms) != p.n_symptoms:
        raise StructuralError(
            f"observation has {len(obs.symptoms)} symptoms, model has {p.n_symptoms}"
        )
    if len(obs.measures) != p.n_measures:
        raise StructuralError(
            f"observation has {len(obs.measures)} measures, model has {p.n_measures}"
        )
    a, g, d, c = obs.age_group, obs.gender, obs.device, obs.condition
    if not 0 <= a < p.n_age_groups:
        raise StructuralError(f"age_group {a} outside model's {p.n_age_groups} groups")
    s = np.asarray(obs.symptoms, dtype=float)

    total = math.log(float(p.age_probs[a]))
    total += math.log(p.gender_prob if g == 1 else 1.0 - p.gender_prob)
    total += math.log(p.device_prob if d == 1 else 1.0 - p.device_prob)
    total += log_factor_condition(p, a, g, c)
    for idx in range(p.n_symptoms):
        parents = s[list(p.dag.parents(idx))]
        total += log_factor_symptom(p, idx, a, g, c, parents, obs.symptoms[idx])
    for m in range(p.n_measures):
        total += log_factor_measure(p, m, a, g, d, c, s, obs.measures[m])
    return total


def log_prior(p: ModelParams) -> float:
    """Prior log-density in constrained space.

    Dirichlet(alpha=1) on age_probs, Beta(1,1) on gender/device probs,
    standard Normal on every weight, LogNormal(0,1) on every sigma.
    Out-of-support parameters yield -inf (never NaN).
    """
    ap = p.age_probs
    if np.any(ap <= 0) or abs(float(ap.sum()) - 1.0) > 1e-9:
        return -math.inf
    if not (0.0 < p.gender_prob < 1.0 and 0.0 < p.device_prob < 1.0):
        return -math.inf
    if np.any(p.meas_sigma <= 0) or not np.all(np.isfinite(p.meas_sigma)):
        return -math.inf

    total = float(gammaln(len(ap)))  # flat Dirichlet: log Gamma(K)
    # Beta(1,1) contributes 0.
    for w in (p.cond_w, *p.symp_w, p.meas_w.ravel()):
        w = np.asarray(w, dtype=float)
        if not np.all(np.isfinite(w)):
            return -math.inf
        total += float(-0.5 * w.size * LOG_2PI - 0.5 * (w @ w))
    log_sigma = np.log(p.meas_sigma)
    total += float(
        np.sum(-log_sigma - 0.5 * LOG_2PI - 0.5 * log_sigma**2)
    )
    return total
