"""DirectLiNGAM estimation of the inter-symptom DAG.

The causal order is found by repeatedly selecting the most exogenous
variable under the pairwise likelihood-ratio measure built from the
maximum-entropy approximation of differential entropy (log-cosh and
Gaussian-kernel contrast terms), residualizing the remaining variables on
it, and recursing. Edges are then pruned by thresholding standardized OLS
coefficients of each variable on its predecessors in the order.

Discovery runs on the raw 0-3 PHQ-8 item scores (pre-binarization), centered
and scaled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dag import SymptomDag
from .errors import DataError, StructuralError

# Published constants of the maximum-entropy differential-entropy fit.
_K1 = 79.047
_K2 = 7.4129
_GAMMA = 0.37457


@dataclass(frozen=True)
class LingamConfig:
    prune_threshold: float = 0.05  # on standardized coefficients
    seed: int = 0

    def __post_init__(self):
        if self.prune_threshold < 0:
            raise ValueError("prune_threshold must be >= 0")


def _entropy(u: np.ndarray) -> float:
    """Differential entropy of a standardized sample, max-entropy form."""
    return (
        (1.0 + np.log(2.0 * np.pi)) / 2.0
        - _K1 * (np.mean(np.log(np.cosh(u))) - _GAMMA) ** 2
        - _K2 * np.mean(u * np.exp(-(u**2) / 2.0)) ** 2
    )


def _residual(xi: np.ndarray, xj: np.ndarray) -> np.ndarray:
    """Residual of regressing xi on xj (both 1-d)."""
    return xi - (np.cov(xi, xj, bias=True)[0, 1] / np.var(xj)) * xj


def _standardize(x: np.ndarray) -> np.ndarray:
    return (x - x.mean()) / x.std()


def _pairwise_lr(xi_std, xj_std, ri_j, rj_i) -> float:
    """Likelihood-ratio evidence for xi -> xj over xj -> xi."""
    return (_entropy(xj_std) + _entropy(ri_j / ri_j.std())) - (
        _entropy(xi_std) + _entropy(rj_i / rj_i.std())
    )


def causal_order(X: np.ndarray) -> list[int]:
    """Exogeneity-first ordering of the columns of X.

    At each step the candidate minimizing the summed squared negative
    likelihood-ratio evidence is chosen, all remaining columns are replaced
    by their residuals on it, and the search recurses on the rest.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise StructuralError("X must be a 2-d data matrix")
    n, d = X.shape
    if d == 1:
        return [0]
    if n <= d:
        raise DataError(f"need more samples than variables, got n={n}, d={d}")
    if np.any(X.std(axis=0) == 0):
        raise DataError("constant column in data matrix")

    work = X.copy()
    remaining = list(range(d))
    order: list[int] = []
    while len(remaining) > 1:
        scores = []
        std_cols = {i: _standardize(work[:, i]) for i in remaining}
        for i in remaining:
            total = 0.0
            for j in remaining:
                if i == j:
                    continue
                ri_j = _residual(std_cols[i], std_cols[j])
                rj_i = _residual(std_cols[j], std_cols[i])
                total += min(0.0, _pairwise_lr(std_cols[i], std_cols[j], ri_j, rj_i)) ** 2
            scores.append(total)
        chosen = remaining[int(np.argmin(scores))]
        for j in remaining:
            if j != chosen:
                work[:, j] = _residual(work[:, j], work[:, chosen])
        order.append(chosen)
        remaining.remove(chosen)
    order.append(remaining[0])
    return order


def prune_edges(X: np.ndarray, order, cfg: LingamConfig) -> SymptomDag:
    """Keep edge j->s iff |standardized OLS coefficient| >= threshold.

    Each variable is regressed on all its predecessors in the order, over
    standardized columns. A singular design falls back to ridge (1e-8).
    """
    X = np.asarray(X, dtype=float)
    order = [int(i) for i in order]
    d = X.shape[1]
    if sorted(order) != list(range(d)):
        raise StructuralError("order must be a permutation of the columns")
    Xs = (X - X.mean(axis=0)) / X.std(axis=0)
    adjacency = np.zeros((d, d), dtype=np.int8)
    for pos in range(1, d):
        target = order[pos]
        preds = order[:pos]
        design = Xs[:, preds]
        gram = design.T @ design
        rhs = design.T @ Xs[:, target]
        try:
            beta = np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            beta = np.linalg.solve(gram + 1e-8 * np.eye(len(preds)), rhs)
        for j, coef in zip(preds, beta):
            if abs(coef) >= cfg.prune_threshold:
                adjacency[j, target] = 1
    return SymptomDag(adjacency=adjacency, order=tuple(order))


def discover_dag(items: np.ndarray, cfg: LingamConfig | None = None) -> SymptomDag:
    """Run order search plus pruning on a raw item-score matrix."""
    cfg = cfg or LingamConfig()
    items = np.asarray(items, dtype=float)
    if items.shape[0] < 50:
        raise DataError(
            f"need >= 50 complete records for DAG discovery, got {items.shape[0]}"
        )
    if np.any(items.std(axis=0) == 0):
        raise DataError("constant item column in discovery data")
    scaled = (items - items.mean(axis=0)) / items.std(axis=0)
    order = causal_order(scaled)
    return prune_edges(items, order, cfg)


def discover_symptom_dag(records, cfg: LingamConfig | None = None) -> SymptomDag:
    """Discover the symptom DAG from participant records with raw PHQ-8 items."""
    items = np.array(
        [r.phq8_items for r in records if r.phq8_items is not None], dtype=float
    )
    if items.size == 0:
        raise DataError("no records with complete PHQ-8 items")
    return discover_dag(items, cfg)
