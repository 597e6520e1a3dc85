"""MCMC convergence diagnostics: split R-hat and bulk effective sample size.

Both operate on rank-normalized draws: pooled average ranks are mapped
through the normal quantile function (Blom offset 3/8), and each chain is
split in half so within-chain drift registers as between-chain variance.

The R-hat here uses the ratio sqrt((W + B/n) / W). Dropping the usual
(n-1)/n shrinkage on W makes the statistic exactly 1 when all split chains
coincide and slightly conservative (larger) otherwise; the difference is
O(1/n).
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri
from scipy.stats import rankdata

from .errors import StructuralError


def _check_shape(chains: np.ndarray) -> np.ndarray:
    arr = np.asarray(chains, dtype=float)
    if arr.ndim != 2:
        raise StructuralError("expected draws with shape (chains, draws)")
    if arr.shape[0] < 2 or arr.shape[1] < 4:
        raise StructuralError("need >= 2 chains with >= 4 draws each")
    return arr


def split_chains(chains: np.ndarray) -> np.ndarray:
    arr = np.asarray(chains, dtype=float)
    half = arr.shape[1] // 2
    return np.vstack([arr[:, :half], arr[:, arr.shape[1] - half:]])


def rank_normalize(values: np.ndarray) -> np.ndarray:
    """Average ranks over the pooled array, mapped to normal quantiles."""
    flat = rankdata(values, method="average").reshape(values.shape)
    return ndtri((flat - 0.375) / (values.size + 0.25))


def rhat(chains: np.ndarray) -> float:
    """Split rank-normalized potential scale reduction factor."""
    z = rank_normalize(split_chains(_check_shape(chains)))
    n = z.shape[1]
    within = float(np.mean(np.var(z, axis=1, ddof=1)))
    between = n * float(np.var(np.mean(z, axis=1), ddof=1))
    if within == 0.0:
        return 1.0 if between == 0.0 else np.inf
    return float(np.sqrt((within + between / n) / within))


def ess_bulk(chains: np.ndarray) -> float:
    """Bulk effective sample size via Geyer's initial monotone sequence."""
    z = rank_normalize(split_chains(_check_shape(chains)))
    m, n = z.shape
    if np.allclose(z, z[0, 0]):
        return float(m * n)

    acov = np.empty((m, n))
    for j in range(m):
        acov[j] = _autocovariance(z[j])
    chain_mean = z.mean(axis=1)
    mean_var = float(np.mean(acov[:, 0])) * n / (n - 1.0)
    var_plus = mean_var * (n - 1.0) / n
    if m > 1:
        var_plus += float(np.var(chain_mean, ddof=1))

    rho = np.zeros(n)
    rho[0] = 1.0
    rho_even = 1.0
    rho_odd = 1.0 - (mean_var - float(np.mean(acov[:, 1]))) / var_plus
    rho[1] = rho_odd
    t = 1
    while t < n - 3 and (rho_even + rho_odd) > 0.0:
        rho_even = 1.0 - (mean_var - float(np.mean(acov[:, t + 1]))) / var_plus
        rho_odd = 1.0 - (mean_var - float(np.mean(acov[:, t + 2]))) / var_plus
        if (rho_even + rho_odd) >= 0:
            rho[t + 1] = rho_even
            rho[t + 2] = rho_odd
        t += 2
    max_t = t - 2
    if rho_even > 0:
        rho[max_t + 1] = rho_even

    # Enforce monotone decreasing pair sums.
    t = 1
    while t <= max_t - 2:
        if rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]:
            rho[t + 1] = (rho[t - 1] + rho[t]) / 2.0
            rho[t + 2] = rho[t + 1]
        t += 2

    total = m * n
    tau = -1.0 + 2.0 * float(np.sum(rho[: max_t + 1])) + float(rho[max_t + 1])
    tau = max(tau, 1.0 / np.log10(total))
    return float(total / tau)


def _autocovariance(x: np.ndarray) -> np.ndarray:
    n = x.shape[0]
    centered = x - x.mean()
    size = 2 ** int(np.ceil(np.log2(2 * n)))
    f = np.fft.rfft(centered, size)
    acov = np.fft.irfft(f * np.conj(f), size)[:n].real
    return acov / n


def summarize(draws: np.ndarray, param_names=None) -> dict:
    """Per-parameter R-hat and bulk ESS for draws shaped (chains, n, dim)."""
    arr = np.asarray(draws, dtype=float)
    if arr.ndim != 3:
        raise StructuralError("expected draws with shape (chains, draws, dim)")
    names = param_names or [f"param[{i}]" for i in range(arr.shape[2])]
    out_rhat = {}
    out_ess = {}
    for i, name in enumerate(names):
        out_rhat[name] = rhat(arr[:, :, i])
        out_ess[name] = ess_bulk(arr[:, :, i])
    return {"rhat": out_rhat, "ess_bulk": out_ess}
