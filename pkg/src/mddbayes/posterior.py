"""Posterior log-density and analytic gradient over the unconstrained space.

All factors are logistic or Gaussian regressions, so gradients are closed
form. Two views are exposed: the full space (confound-prior coordinates
included, used for gradient checks and generic sampling) and the
weights-only subspace (used by the fitter, which draws the confound priors
conjugately). With fully observed data the two blocks are a posteriori
independent, so the split is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln, log_expit

from .dag import SymptomDag
from .errors import StructuralError
from .transforms import CONFOUND_DIM, ParamLayout, softmax_pivot
from .types import Observation

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class TrainingData:
    """Complete-case arrays for fitting."""

    a: np.ndarray  # (n,) int age codes
    g: np.ndarray  # (n,) int
    d: np.ndarray  # (n,) int
    c: np.ndarray  # (n,) int
    s: np.ndarray  # (n, S) int
    m: np.ndarray  # (n, M) float

    def __post_init__(self):
        n = self.a.shape[0]
        for name in ("g", "d", "c"):
            if getattr(self, name).shape != (n,):
                raise StructuralError(f"{name} must have shape ({n},)")
        if self.s.ndim != 2 or self.s.shape[0] != n:
            raise StructuralError("s must be (n, S)")
        if self.m.ndim != 2 or self.m.shape[0] != n:
            raise StructuralError("m must be (n, M)")
        if not np.all(np.isfinite(self.m)):
            raise StructuralError("measures must be fully observed (finite)")

    @property
    def n(self) -> int:
        return int(self.a.shape[0])

    @classmethod
    def from_observations(cls, observations) -> "TrainingData":
        obs = list(observations)
        if not obs:
            raise StructuralError("empty dataset")
        return cls(
            a=np.array([o.age_group for o in obs]),
            g=np.array([o.gender for o in obs]),
            d=np.array([o.device for o in obs]),
            c=np.array([o.condition for o in obs]),
            s=np.array([o.symptoms for o in obs], dtype=int),
            m=np.array([o.measures for o in obs], dtype=float),
        )


class LogPosterior:
    """Unnormalized posterior with gradient, given complete data.

    ``logpdf_and_grad`` works on the full vector; ``weights_logpdf_and_grad``
    on the weight/scale subvector (everything after the confound block).
    """

    def __init__(self, data: TrainingData, dag: SymptomDag, n_age: int = 4):
        self.data = data
        self.dag = dag
        self.layout = ParamLayout(dag, n_measures=data.m.shape[1], n_age=n_age)
        if data.s.shape[1] != dag.n_symptoms:
            raise StructuralError(
                f"data has {data.s.shape[1]} symptoms, dag has {dag.n_symptoms}"
            )
        if np.any(data.a >= n_age) or np.any(data.a < 0):
            raise StructuralError("age codes outside model range")

        n = data.n
        af = data.a.astype(float)
        gf = data.g.astype(float)
        df = data.d.astype(float)
        cf = data.c.astype(float)
        sf = data.s.astype(float)
        ones = np.ones(n)
        self._xc = np.column_stack([ones, af, gf])
        xs_base = np.column_stack([ones, af, gf, cf])
        self._xs = [
            np.ascontiguousarray(np.column_stack([xs_base, sf[:, dag.parents(s)]]))
            for s in range(dag.n_symptoms)
        ]
        self._xm = np.ascontiguousarray(np.column_stack([ones, af, gf, df, cf, sf]))
        self._yc = cf
        self._ys = sf
        self._ym = np.ascontiguousarray(data.m)

        self.age_counts = np.bincount(data.a, minlength=n_age).astype(float)
        self.gender_count = float(data.g.sum())
        self.device_count = float(data.d.sum())

        # All logistic factors (condition + symptoms) batched into one padded
        # GEMM: per-factor designs are zero-padded to a common width so a
        # single (F, n, K) tensor drives every evaluation.
        designs = [self._xc] + self._xs
        ys = [self._yc] + [self._ys[:, s] for s in range(dag.n_symptoms)]
        width = max(x.shape[1] for x in designs)
        F = len(designs)
        self._logit_x = np.zeros((F, n, width))
        self._logit_xt = np.zeros((F, width, n))
        self._logit_y = np.stack(ys)  # (F, n)
        f_idx, k_idx, z_idx = [], [], []
        off = CONFOUND_DIM
        slices = [self.layout.cond_slice] + [
            self.layout.symp_slice(s) for s in range(dag.n_symptoms)
        ]
        for f, (x, sl) in enumerate(zip(designs, slices)):
            d = x.shape[1]
            self._logit_x[f, :, :d] = x
            self._logit_xt[f, :d, :] = x.T
            f_idx += [f] * d
            k_idx += list(range(d))
            z_idx += list(range(sl.start - off, sl.stop - off))
        self._logit_f = np.array(f_idx)
        self._logit_k = np.array(k_idx)
        self._logit_z = np.array(z_idx)

    # -- confound block (priors + categorical likelihoods + Jacobians) --

    def _confound_logpdf_grad(self, zc: np.ndarray):
        n_age = self.layout.n_age
        n = float(self.data.n)
        grad = np.empty(CONFOUND_DIM)

        probs = softmax_pivot(zc[: n_age - 1])
        counts = self.age_counts
        lp = float(counts @ np.log(probs)) + float(gammaln(n_age))
        lp += float(np.sum(np.log(probs)))  # softmax Jacobian
        grad[: n_age - 1] = (counts[1:] - n * probs[1:]) + (1.0 - n_age * probs[1:])

        for i, (x, k) in enumerate(
            ((zc[n_age - 1], self.gender_count), (zc[n_age], self.device_count))
        ):
            p = float(expit(x))
            # Bernoulli likelihood + Beta(1,1) prior + logit Jacobian
            lp += k * log_expit(x) + (n - k) * log_expit(-x)
            lp += log_expit(x) + log_expit(-x)
            grad[n_age - 1 + i] = (k + 1.0) - (n + 2.0) * p
        return lp, grad

    # -- weight/scale block --

    def weights_logpdf_and_grad(self, zw: np.ndarray):
        zw = np.asarray(zw, dtype=float)
        lay = self.layout
        if zw.shape != (lay.weights_dim,):
            raise ValueError(f"expected weight vector of length {lay.weights_dim}")
        # Extreme log-scale coordinates overflow exp during warmup
        # exploration; the sampler treats the resulting -inf as a divergence.
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            lp, grad = self._weights_logpdf_and_grad(zw)
        if not math.isfinite(lp):
            return -math.inf, grad
        return lp, grad

    def _weights_logpdf_and_grad(self, zw: np.ndarray):
        lay = self.layout
        off = CONFOUND_DIM
        grad = np.empty_like(zw)

        # condition + symptom factors in one batched GEMM
        w_pad = np.zeros((self._logit_x.shape[0], self._logit_x.shape[2]))
        w_pad[self._logit_f, self._logit_k] = zw[self._logit_z]
        f = np.matmul(self._logit_x, w_pad[:, :, None])[:, :, 0]  # (F, n)
        lp = float(np.sum(log_expit(np.where(self._logit_y == 1.0, f, -f))))
        resid = self._logit_y - expit(f)
        g_pad = np.matmul(self._logit_xt, resid[:, :, None])[:, :, 0]  # (F, K)
        grad[self._logit_z] = g_pad[self._logit_f, self._logit_k] - zw[self._logit_z]
        w_flat = zw[self._logit_z]
        lp += -0.5 * w_flat.size * LOG_2PI - 0.5 * float(w_flat @ w_flat)

        msl = slice(lay.meas_slice.start - off, lay.meas_slice.stop - off)
        esl = slice(lay.sigma_slice.start - off, lay.sigma_slice.stop - off)
        w_all = zw[msl].reshape(lay.n_measures, 5 + lay.n_symptoms)
        eta = zw[esl]
        inv_var = np.exp(-2.0 * eta)
        resid = self._ym - self._xm @ w_all.T  # (n, M)
        sq = np.einsum("ij,ij->j", resid, resid)
        n = float(self.data.n)
        lp += float(
            -n * eta.sum()
            - 0.5 * n * lay.n_measures * LOG_2PI
            - 0.5 * float(inv_var @ sq)
        )
        gw = (self._xm.T @ (resid * inv_var)).T - w_all  # likelihood + N(0,1) prior
        lp += -0.5 * w_all.size * LOG_2PI - 0.5 * float(np.sum(w_all * w_all))
        grad[msl] = gw.ravel()
        # eta: likelihood -n + sq * inv_var, prior N(0,1) (LogNormal + Jacobian)
        grad[esl] = -n + sq * inv_var - eta
        lp += float(-0.5 * lay.n_measures * LOG_2PI - 0.5 * (eta @ eta))
        return lp, grad

    def weights_logpdf(self, zw: np.ndarray) -> float:
        return self.weights_logpdf_and_grad(zw)[0]

    # -- full space --

    def logpdf_and_grad(self, z: np.ndarray):
        z = np.asarray(z, dtype=float)
        if z.shape != (self.layout.dim,):
            raise ValueError(f"expected vector of length {self.layout.dim}")
        lp_c, g_c = self._confound_logpdf_grad(z[:CONFOUND_DIM])
        lp_w, g_w = self.weights_logpdf_and_grad(z[CONFOUND_DIM:])
        return lp_c + lp_w, np.concatenate([g_c, g_w])

    def logpdf(self, z: np.ndarray) -> float:
        return self.logpdf_and_grad(z)[0]


def grad_log_posterior(posterior: LogPosterior, z: np.ndarray) -> np.ndarray:
    """Analytic gradient of the unconstrained log posterior at z."""
    return posterior.logpdf_and_grad(z)[1]


def observations_from_arrays(a, g, d, c, s, m) -> list[Observation]:
    return [
        Observation(
            age_group=int(a[i]),
            gender=int(g[i]),
            device=int(d[i]),
            condition=int(c[i]),
            symptoms=tuple(int(v) for v in s[i]),
            measures=tuple(float(v) for v in m[i]),
        )
        for i in range(len(a))
    ]
