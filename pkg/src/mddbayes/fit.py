"""Model fitting: NUTS over the regression weights and scales, exact
conjugate draws for the confound-prior parameters.

With complete training data the confound factors (age categorical, gender
and device Bernoullis) share no parameters with the regression factors, so
their posteriors are exactly Dirichlet(1 + counts) and Beta(1 + k, 1 + n - k)
and can be sampled independently of the NUTS run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import expit

from . import diagnostics as diag
from .dag import SymptomDag
from .errors import StructuralError
from .nuts import McmcConfig, NutsResult, nuts_sample
from .posterior import LogPosterior, TrainingData
from .transforms import CONFOUND_DIM, ParamLayout
from .types import ModelParams

INIT_RANGE = 2.0  # chains start uniform in [-2, 2] per unconstrained coordinate


@dataclass
class PosteriorDraws:
    """Kept MCMC draws over the full unconstrained vector, grouped by chain."""

    layout: ParamLayout
    matrix: np.ndarray  # (chains, kept, dim)
    divergences: np.ndarray  # (chains,)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.matrix.ndim != 3 or self.matrix.shape[2] != self.layout.dim:
            raise StructuralError(
                f"draw matrix must be (chains, kept, {self.layout.dim})"
            )

    @property
    def dag(self) -> SymptomDag:
        return self.layout.dag

    @property
    def n_chains(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def kept_per_chain(self) -> int:
        return int(self.matrix.shape[1])

    @property
    def n_draws(self) -> int:
        return self.n_chains * self.kept_per_chain

    @cached_property
    def flat(self) -> np.ndarray:
        """(n_draws, dim), chain-major order."""
        out = self.matrix.reshape(self.n_draws, self.layout.dim)
        out.flags.writeable = False
        return out

    @property
    def chain_ids(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_chains), self.kept_per_chain)

    def params_at(self, i: int) -> ModelParams:
        return self.layout.constrain(self.flat[i])

    def iter_params(self):
        for i in range(self.n_draws):
            yield self.params_at(i)

    def thinned(self, max_draws: int | None) -> "PosteriorDraws":
        """Evenly thin kept draws per chain down to about max_draws total."""
        if max_draws is None or max_draws >= self.n_draws:
            return self
        per_chain = max(1, max_draws // self.n_chains)
        idx = np.linspace(0, self.kept_per_chain - 1, per_chain).round().astype(int)
        return PosteriorDraws(
            layout=self.layout,
            matrix=self.matrix[:, idx, :],
            divergences=self.divergences,
            diagnostics=self.diagnostics,
        )

    @cached_property
    def constrained(self) -> dict:
        """Vectorized constrained views over all draws (read-only arrays)."""
        lay = self.layout
        z = self.flat
        n_age = lay.n_age
        exp_age = np.exp(
            np.concatenate([np.zeros((z.shape[0], 1)), z[:, : n_age - 1]], axis=1)
        )
        arrays = {
            "age_probs": exp_age / exp_age.sum(axis=1, keepdims=True),
            "gender_prob": expit(z[:, n_age - 1]),
            "device_prob": expit(z[:, n_age]),
            "cond_w": z[:, lay.cond_slice],
            "symp_w": [z[:, lay.symp_slice(s)] for s in range(lay.n_symptoms)],
            "meas_w": z[:, lay.meas_slice].reshape(
                z.shape[0], lay.n_measures, 5 + lay.n_symptoms
            ),
            "sigma": np.exp(z[:, lay.sigma_slice]),
        }
        return arrays


def complete_training_data(observations) -> TrainingData:
    return TrainingData.from_observations(observations)


def fit(data: TrainingData, dag: SymptomDag, cfg: McmcConfig) -> PosteriorDraws:
    """Fit the network on complete cases; returns chain-grouped draws with
    split R-hat / bulk ESS per parameter and divergence counts attached."""
    if data.n == 0:
        raise StructuralError("empty dataset")
    posterior = LogPosterior(data, dag)
    lay = posterior.layout

    init_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, 0])))
    init = init_rng.uniform(-INIT_RANGE, INIT_RANGE, size=(cfg.chains, lay.weights_dim))

    nuts_cfg = McmcConfig(
        chains=cfg.chains,
        warmup_draws=cfg.warmup_draws,
        kept_draws=cfg.kept_draws,
        target_accept=cfg.target_accept,
        max_tree_depth=cfg.max_tree_depth,
        seed=int(np.random.SeedSequence([cfg.seed, 1]).generate_state(1)[0]),
    )
    result: NutsResult = nuts_sample(posterior.weights_logpdf_and_grad, init, nuts_cfg)

    conj_rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, 2])))
    total = cfg.chains * cfg.kept_draws
    n = data.n
    age_alpha = 1.0 + posterior.age_counts
    age_draws = conj_rng.dirichlet(age_alpha, size=total)
    gender_draws = conj_rng.beta(
        1.0 + posterior.gender_count, 1.0 + n - posterior.gender_count, size=total
    )
    device_draws = conj_rng.beta(
        1.0 + posterior.device_count, 1.0 + n - posterior.device_count, size=total
    )

    matrix = np.empty((cfg.chains, cfg.kept_draws, lay.dim))
    # Unconstrain the conjugate draws into the confound block.
    z_age = np.log(age_draws[:, 1:]) - np.log(age_draws[:, :1])
    z_conf = np.column_stack(
        [
            z_age,
            np.log(gender_draws) - np.log1p(-gender_draws),
            np.log(device_draws) - np.log1p(-device_draws),
        ]
    )
    matrix[:, :, :CONFOUND_DIM] = z_conf.reshape(cfg.chains, cfg.kept_draws, CONFOUND_DIM)
    matrix[:, :, CONFOUND_DIM:] = result.draws

    if cfg.chains >= 2 and cfg.kept_draws >= 4:
        summary = diag.summarize(matrix, lay.param_names)
        summary["max_rhat"] = max(summary["rhat"].values())
        summary["min_ess_bulk"] = min(summary["ess_bulk"].values())
    else:
        summary = {"rhat": {}, "ess_bulk": {}}
    summary["divergences"] = result.divergences.tolist()
    summary["step_sizes"] = result.step_sizes.tolist()
    summary["mean_accept"] = result.accept_stat.mean(axis=1).tolist()

    return PosteriorDraws(
        layout=lay,
        matrix=matrix,
        divergences=result.divergences,
        diagnostics=summary,
    )
