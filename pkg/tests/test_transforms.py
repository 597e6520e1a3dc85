import numpy as np
import pytest

from mddbayes.transforms import CONFOUND_DIM, ParamLayout, softmax_pivot

from conftest import random_dag, random_params


def test_layout_dimensions(rng):
    dag = random_dag(rng)
    lay = ParamLayout(dag, n_measures=16)
    expected = 3 + 2 + 3 + sum(4 + dag.k(s) for s in range(8)) + 16 * 13 + 16
    assert lay.dim == expected
    assert lay.weights_dim == expected - CONFOUND_DIM
    assert len(lay.param_names) == expected
    assert len(set(lay.param_names)) == expected  # unique names


def test_unconstrain_constrain_roundtrip(rng):
    for _ in range(10):
        p = random_params(rng)
        lay = ParamLayout(p.dag, n_measures=16)
        z = lay.unconstrain(p)
        q = lay.constrain(z)
        # sigma (log), (0,1) scalars (logit), simplex (pivot softmax): 1e-12
        assert np.allclose(q.meas_sigma, p.meas_sigma, atol=1e-12, rtol=0)
        assert abs(q.gender_prob - p.gender_prob) < 1e-12
        assert abs(q.device_prob - p.device_prob) < 1e-12
        assert np.allclose(q.age_probs, p.age_probs, atol=1e-12, rtol=0)
        # weights pass through exactly
        assert np.array_equal(q.cond_w, p.cond_w)
        assert all(np.array_equal(a, b) for a, b in zip(q.symp_w, p.symp_w))
        assert np.array_equal(q.meas_w, p.meas_w)


def test_constrain_unconstrain_roundtrip_from_z(rng):
    dag = random_dag(rng)
    lay = ParamLayout(dag, n_measures=16)
    z = rng.standard_normal(lay.dim)
    z2 = lay.unconstrain(lay.constrain(z))
    assert np.allclose(z, z2, atol=1e-12)


def test_softmax_pivot_properties(rng):
    for _ in range(20):
        z = rng.standard_normal(3) * 3
        p = softmax_pivot(z)
        assert p.shape == (4,)
        assert np.all(p > 0)
        assert p.sum() == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(softmax_pivot(np.zeros(3)), 0.25)


def test_constrained_params_always_valid(rng):
    dag = random_dag(rng)
    lay = ParamLayout(dag, n_measures=16)
    for _ in range(10):
        z = rng.uniform(-3, 3, size=lay.dim)
        lay.constrain(z).validate()
