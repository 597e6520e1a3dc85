"""ROC-AUC in its Mann-Whitney form with tie handling."""

from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from .errors import MetricError


def roc_auc(scores, labels) -> float:
    """Probability that a random positive outranks a random negative, with
    ties counting one half.

    Computed from tied ranks, which equals the mean over positive-negative
    pairs of 1 / 0.5 / 0 exactly.
    """
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels).astype(int)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise MetricError("scores and labels must be 1-d and aligned")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricError("AUC undefined: both classes must be present")
    ranks = rankdata(scores, method="average")
    pos_rank_sum = float(ranks[labels == 1].sum())
    return (pos_rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)
