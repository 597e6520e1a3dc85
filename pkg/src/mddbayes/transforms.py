"""Packing between ModelParams and the unconstrained sampling space.

Transforms: softmax with the first coordinate pinned to 0 for the age
simplex, logit for the (0,1) probabilities, log for the measure scales;
weights are already unconstrained. The confound block (age + gender +
device, 5 coordinates) comes first so the fitter can split it off and
sample it conjugately.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import expit, logit

from .dag import SymptomDag
from .types import ModelParams

CONFOUND_DIM = 5  # 3 age softmax coords + 2 logits


class ParamLayout:
    """Index map for the flat unconstrained vector of one model size."""

    def __init__(self, dag: SymptomDag, n_measures: int, n_age: int = 4):
        self.dag = dag
        self.n_age = int(n_age)
        self.n_symptoms = dag.n_symptoms
        self.n_measures = int(n_measures)

        names: list[str] = []
        names += [f"age_logit[{i}]" for i in range(1, self.n_age)]
        names += ["gender_logit", "device_logit"]
        names += ["cond_w[0]", "cond_w[age]", "cond_w[gender]"]
        self._symp_slices = []
        base = ("0", "age", "gender", "cond")
        pos = len(names)
        for s in range(self.n_symptoms):
            labels = [f"symp_w[{s}][{b}]" for b in base]
            labels += [f"symp_w[{s}][parent{j}]" for j in dag.parents(s)]
            self._symp_slices.append(slice(pos, pos + len(labels)))
            names += labels
            pos += len(labels)
        mbase = ("0", "age", "gender", "device", "cond")
        self._meas_slice = slice(pos, pos + self.n_measures * (5 + self.n_symptoms))
        for m in range(self.n_measures):
            names += [f"meas_w[{m}][{b}]" for b in mbase]
            names += [f"meas_w[{m}][s{j}]" for j in range(self.n_symptoms)]
        pos = self._meas_slice.stop
        self._sigma_slice = slice(pos, pos + self.n_measures)
        names += [f"log_sigma[{m}]" for m in range(self.n_measures)]
        self.param_names = tuple(names)
        self.dim = len(names)
        self.cond_slice = slice(CONFOUND_DIM, CONFOUND_DIM + 3)

    @property
    def weights_dim(self) -> int:
        return self.dim - CONFOUND_DIM

    def symp_slice(self, s: int) -> slice:
        return self._symp_slices[s]

    @property
    def meas_slice(self) -> slice:
        return self._meas_slice

    @property
    def sigma_slice(self) -> slice:
        return self._sigma_slice

    def unconstrain(self, p: ModelParams) -> np.ndarray:
        z = np.empty(self.dim)
        z[: self.n_age - 1] = np.log(p.age_probs[1:]) - math.log(p.age_probs[0])
        z[self.n_age - 1] = logit(p.gender_prob)
        z[self.n_age] = logit(p.device_prob)
        z[self.cond_slice] = p.cond_w
        for s in range(self.n_symptoms):
            z[self._symp_slices[s]] = p.symp_w[s]
        z[self._meas_slice] = p.meas_w.ravel()
        z[self._sigma_slice] = np.log(p.meas_sigma)
        return z

    def constrain(self, z: np.ndarray) -> ModelParams:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.dim,):
            raise ValueError(f"expected vector of length {self.dim}, got {z.shape}")
        return ModelParams(
            age_probs=softmax_pivot(z[: self.n_age - 1]),
            gender_prob=float(expit(z[self.n_age - 1])),
            device_prob=float(expit(z[self.n_age])),
            cond_w=z[self.cond_slice],
            symp_w=tuple(z[sl] for sl in self._symp_slices),
            meas_w=z[self._meas_slice].reshape(self.n_measures, 5 + self.n_symptoms),
            meas_sigma=np.exp(z[self._sigma_slice]),
            dag=self.dag,
        )


def softmax_pivot(z: np.ndarray) -> np.ndarray:
    """Map R^{K-1} to the interior of the K-simplex with category 0 pinned.

    p = softmax([0, z]); the Jacobian determinant of this map is the product
    of all K simplex coordinates.
    """
    x = np.concatenate(([0.0], np.asarray(z, dtype=float)))
    x -= x.max()
    e = np.exp(x)
    return e / e.sum()


def softmax_pivot_logdet(probs: np.ndarray) -> float:
    return float(np.sum(np.log(probs)))
