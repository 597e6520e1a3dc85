import numpy as np
import pytest
from scipy.stats import norm

from mddbayes.enumeration import enumerate_posterior, predict, predict_batch
from mddbayes.errors import QueryError, StructuralError
from mddbayes.fit import PosteriorDraws
from mddbayes.transforms import ParamLayout
from mddbayes.types import Evidence

from conftest import (
    brute_force_joint,
    random_params,
    small_params,
    zero_params,
)


def test_all_zero_weights_condition_is_half():
    p = zero_params()
    ev = Evidence(age_group=1, gender=0, device=1)
    table = enumerate_posterior(p, ev)
    assert table.marginal("condition")[1] == pytest.approx(0.5, abs=1e-15)


def test_no_evidence_age_marginal_is_age_probs(rng):
    p = random_params(rng, n_measures=4)
    table = enumerate_posterior(p, Evidence())
    marg = table.marginal("age_group", domain=4)
    assert np.allclose(marg, p.age_probs, atol=1e-12)


def test_probabilities_sum_to_one(rng):
    for _ in range(20):
        p = small_params(rng)
        ev = Evidence(
            gender=int(rng.integers(2)),
            measures={0: float(rng.standard_normal())},
        )
        table = enumerate_posterior(p, ev)
        assert table.probabilities.sum() == pytest.approx(1.0, abs=1e-12)


def test_matches_brute_force_oracle(rng):
    """Full joint vs independent oracle over 100 random (params, evidence)
    cases."""
    for trial in range(100):
        p = small_params(rng)
        ev_kwargs = {}
        if rng.random() < 0.7:
            ev_kwargs["age_group"] = int(rng.integers(4))
        if rng.random() < 0.7:
            ev_kwargs["gender"] = int(rng.integers(2))
        if rng.random() < 0.5:
            ev_kwargs["device"] = int(rng.integers(2))
        if rng.random() < 0.3:
            ev_kwargs["condition"] = int(rng.integers(2))
        symptoms = {}
        if rng.random() < 0.4:
            symptoms[int(rng.integers(3))] = int(rng.integers(2))
        measures = {}
        for m in range(4):
            if rng.random() < 0.5:
                measures[m] = float(rng.standard_normal() * 2)
        ev = Evidence(symptoms=symptoms, measures=measures, **ev_kwargs)

        oracle, names = brute_force_joint(p, ev)
        table = enumerate_posterior(p, ev)
        # compare every enumerated assignment's probability
        for row, prob in zip(table.assignments, table.probabilities):
            key = []
            obs = ev.observed_discrete()
            for name in names:
                if name in obs:
                    key.append(obs[name])
                else:
                    key.append(int(row[table.variables.index(name)]))
            assert abs(oracle[tuple(key)] - prob) < 1e-10


def test_marginalization_consistency(rng):
    p = small_params(rng)
    ev = Evidence(age_group=2, gender=1, device=0, measures={1: 0.3})
    table = enumerate_posterior(p, ev)
    joint_c = table.marginal("condition")
    # sum the joint over symptom assignments manually
    c_col = table.variables.index("condition")
    total1 = table.probabilities[table.assignments[:, c_col] == 1].sum()
    assert joint_c[1] == pytest.approx(total1, abs=1e-12)


def test_evidence_monotonicity_row_factorization(rng):
    """Adding an observed measure multiplies each row's unnormalized weight
    by that row's Gaussian density."""
    p = small_params(rng)
    base = Evidence(gender=1)
    value = 0.7
    extended = Evidence(gender=1, measures={2: value})
    t0 = enumerate_posterior(p, base)
    t1 = enumerate_posterior(p, extended)
    assert t0.variables == t1.variables
    for row, lw0, lw1 in zip(t0.assignments, t0.log_weights, t1.log_weights):
        cols = dict(zip(t0.variables, row))
        a, g, d, c = cols["age_group"], 1, cols["device"], cols["condition"]
        s = [cols[f"s{i}"] for i in range(3)]
        fm = float(p.meas_w[2] @ np.asarray([1, a, g, d, c, *s], dtype=float))
        expected = lw0 + norm.logpdf(value, loc=fm, scale=p.meas_sigma[2])
        assert lw1 == pytest.approx(expected, rel=1e-10)


def test_all_observed_raises(rng):
    p = small_params(rng)
    ev = Evidence(
        age_group=0, gender=0, device=0, condition=0, symptoms={0: 0, 1: 0, 2: 1}
    )
    with pytest.raises(QueryError, match="nothing to enumerate"):
        enumerate_posterior(p, ev)


def test_out_of_range_measure_index(rng):
    p = small_params(rng)
    with pytest.raises(StructuralError):
        enumerate_posterior(p, Evidence(measures={99: 0.0}))


def _draws_from_params(params_list):
    lay = ParamLayout(params_list[0].dag, n_measures=params_list[0].n_measures)
    matrix = np.stack([lay.unconstrain(p) for p in params_list])[None, :, :]
    return PosteriorDraws(
        layout=lay, matrix=matrix, divergences=np.zeros(1, dtype=int)
    )


def test_predict_single_draw_equals_enumeration(rng):
    p = small_params(rng)
    draws = _draws_from_params([p])
    ev = Evidence(age_group=1, gender=0, measures={0: -0.4})
    res = predict(draws, ev, targets=("condition", "s2"))
    table = enumerate_posterior(p, ev)
    assert res.targets["condition"].mean == pytest.approx(
        table.marginal("condition")[1], abs=1e-12
    )
    assert res.targets["condition"].lower == pytest.approx(res.targets["condition"].mean)
    assert res.targets["condition"].upper == pytest.approx(res.targets["condition"].mean)
    assert res.targets["s2"].mean == pytest.approx(table.marginal("s2")[1], abs=1e-12)


def test_predict_mean_is_average_of_per_draw_enumerations(rng):
    params_list = [small_params(rng) for _ in range(5)]
    draws = _draws_from_params(params_list)
    ev = Evidence(gender=1, measures={1: 0.2, 3: -1.0})
    res = predict(draws, ev, targets=("condition",), keep_per_draw=True)
    per_draw = np.array(
        [enumerate_posterior(p, ev).marginal("condition")[1] for p in params_list]
    )
    assert np.allclose(res.targets["condition"].per_draw, per_draw, atol=1e-12)
    assert res.targets["condition"].mean == pytest.approx(per_draw.mean(), abs=1e-12)
    lo, hi = np.percentile(per_draw, [2.5, 97.5])
    assert res.targets["condition"].lower == pytest.approx(lo, abs=1e-12)
    assert res.targets["condition"].upper == pytest.approx(hi, abs=1e-12)


def test_predict_target_overlap_raises(rng):
    p = small_params(rng)
    draws = _draws_from_params([p])
    with pytest.raises(QueryError, match="observed"):
        predict(draws, Evidence(condition=1), targets=("condition",))


def test_predict_unknown_target(rng):
    p = small_params(rng)
    draws = _draws_from_params([p])
    with pytest.raises(QueryError, match="unknown"):
        predict(draws, Evidence(), targets=("nonsense",))


def test_predict_default_targets(rng):
    p = small_params(rng)
    draws = _draws_from_params([p])
    res = predict(draws, Evidence(symptoms={0: 1}))
    assert set(res.targets) == {"condition", "s1", "s2"}


def test_predict_age_target_categorical(rng):
    p = small_params(rng)
    draws = _draws_from_params([p, p])
    res = predict(draws, Evidence(condition=1), targets=("age_group",))
    summary = res.targets["age_group"]
    assert np.asarray(summary.mean).shape == (4,)
    assert np.asarray(summary.mean).sum() == pytest.approx(1.0, abs=1e-10)


def test_predict_batch_equals_singles(rng):
    params_list = [small_params(rng) for _ in range(4)]
    draws = _draws_from_params(params_list)
    evidences = [
        Evidence(
            age_group=int(rng.integers(4)),
            gender=int(rng.integers(2)),
            measures={0: float(rng.standard_normal()), 2: float(rng.standard_normal())},
        )
        for _ in range(6)
    ]
    batch = predict_batch(draws, evidences, targets=("condition", "s1"))
    for ev, res in zip(evidences, batch):
        solo = predict(draws, ev, targets=("condition", "s1"))
        for t in ("condition", "s1"):
            assert res.targets[t].mean == pytest.approx(solo.targets[t].mean, abs=1e-13)
            assert res.targets[t].lower == pytest.approx(solo.targets[t].lower, abs=1e-13)


def test_predict_batch_pattern_mismatch(rng):
    p = small_params(rng)
    draws = _draws_from_params([p])
    with pytest.raises(QueryError, match="pattern"):
        predict_batch(draws, [Evidence(gender=1), Evidence(device=1)])
