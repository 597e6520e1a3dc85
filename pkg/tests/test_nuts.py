import math

import numpy as np
import pytest

from mddbayes import diagnostics as diag
from mddbayes.errors import FitError
from mddbayes.nuts import (
    McmcConfig,
    find_reasonable_epsilon,
    leapfrog,
    nuts_sample,
    warmup_window_spans,
)


def std_normal_target(dim):
    def fn(q):
        return -0.5 * float(q @ q), -q

    return fn


def mvn_target(cov):
    prec = np.linalg.inv(cov)

    def fn(q):
        g = -prec @ q
        return 0.5 * float(q @ g), g

    return fn


def test_warmup_window_spans_standard():
    spans = warmup_window_spans(1000)
    assert spans[0][0] == 75  # initial step-size-only buffer
    assert spans[-1][1] == 950  # 50 terminal step-size draws
    widths = [b - a for a, b in spans]
    assert widths[0] == 25
    for w0, w1 in zip(widths[:-2], widths[1:-1]):
        assert w1 == 2 * w0  # expanding windows
    assert warmup_window_spans(10) == []


def test_leapfrog_reversibility():
    rng = np.random.Generator(np.random.PCG64(0))
    fn = mvn_target(np.array([[1.0, 0.5], [0.5, 2.0]]))
    inv_mass = np.array([1.0, 0.7])
    q = rng.standard_normal(2)
    p = rng.standard_normal(2)
    _, grad = fn(q)
    qf, pf, gf, _ = q, p, grad, None
    for _ in range(25):
        qf, pf, gf, _ = leapfrog(fn, qf, pf, gf, 0.1, inv_mass)
    # integrate backward by flipping momentum
    qb, pb, gb = qf, -pf, gf
    for _ in range(25):
        qb, pb, gb, _ = leapfrog(fn, qb, pb, gb, 0.1, inv_mass)
    assert np.allclose(qb, q, atol=1e-10)
    assert np.allclose(-pb, p, atol=1e-10)


def test_find_reasonable_epsilon_finite():
    rng = np.random.Generator(np.random.PCG64(0))
    eps = find_reasonable_epsilon(std_normal_target(5), np.zeros(5), np.ones(5), rng)
    assert 1e-6 < eps < 1e2


def test_max_tree_depth_zero_is_single_leapfrog():
    cfg = McmcConfig(chains=2, warmup_draws=50, kept_draws=40, max_tree_depth=0, seed=1)
    res = nuts_sample(std_normal_target(3), np.zeros(3), cfg)
    assert np.all(res.n_leapfrog == 1)
    assert np.all(res.tree_depth <= 1)


def test_std_normal_10d_calibration():
    """Analytic target: mean within 3 MCSE, R-hat < 1.01, zero divergences."""
    dim = 10
    cfg = McmcConfig(chains=4, warmup_draws=500, kept_draws=500, seed=42)
    res = nuts_sample(std_normal_target(dim), np.full(dim, 1.5), cfg)
    assert int(res.divergences.sum()) == 0
    for i in range(dim):
        chains = res.draws[:, :, i]
        r = diag.rhat(chains)
        assert r < 1.01, f"coordinate {i}: rhat {r}"
        ess = diag.ess_bulk(chains)
        mcse = 1.0 / math.sqrt(ess)  # true sd is 1
        assert abs(chains.mean()) < 3 * mcse, f"coordinate {i}"


def test_correlated_gaussian_covariance_recovery():
    cov = np.array([[1.0, 0.9], [0.9, 1.0]])
    cfg = McmcConfig(chains=4, warmup_draws=600, kept_draws=750, seed=7)
    res = nuts_sample(mvn_target(cov), np.zeros(2), cfg)
    flat = res.draws.reshape(-1, 2)
    emp = np.cov(flat.T, ddof=1)
    assert np.all(np.abs(emp - cov) <= 0.1 * np.abs(cov) + 1e-9), emp


def test_determinism_same_seed():
    cfg = McmcConfig(chains=2, warmup_draws=100, kept_draws=50, seed=9)
    r1 = nuts_sample(std_normal_target(4), np.zeros(4), cfg)
    r2 = nuts_sample(std_normal_target(4), np.zeros(4), cfg)
    assert np.array_equal(r1.draws, r2.draws)
    assert np.array_equal(r1.step_sizes, r2.step_sizes)


def test_different_seed_differs():
    cfg1 = McmcConfig(chains=2, warmup_draws=100, kept_draws=50, seed=9)
    cfg2 = McmcConfig(chains=2, warmup_draws=100, kept_draws=50, seed=10)
    r1 = nuts_sample(std_normal_target(4), np.zeros(4), cfg1)
    r2 = nuts_sample(std_normal_target(4), np.zeros(4), cfg2)
    assert not np.array_equal(r1.draws, r2.draws)


def test_nonfinite_init_raises():
    def fn(q):
        return -math.inf, q * 0

    with pytest.raises(FitError, match="not finite"):
        nuts_sample(fn, np.zeros(2), McmcConfig(chains=1, warmup_draws=10, kept_draws=5))


def test_mass_matrix_adapts_to_scales():
    # Coordinates with very different scales: adapted mass ~ variances.
    scales = np.array([0.1, 1.0, 10.0])

    def fn(q):
        z = q / scales
        return -0.5 * float(z @ z), -q / scales**2

    cfg = McmcConfig(chains=2, warmup_draws=400, kept_draws=200, seed=3)
    res = nuts_sample(fn, np.zeros(3), cfg)
    ratio = res.inv_mass_diag[:, 2] / res.inv_mass_diag[:, 0]
    assert np.all(ratio > 1e2)  # true variance ratio is 1e4
