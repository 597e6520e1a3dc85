"""Stratified cross-validation of the full pipeline plus subgroup slicing.

Per fold: binarizer, symptom DAG, and feature transforms are fitted on the
training split only; the network is fitted on the resulting complete cases;
each scenario then scores the test split by posterior-mean marginals.
Headline rows aggregate per-fold AUCs as mean and SD; subgroup rows slice
the pooled test predictions of one scenario.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .enumeration import predict_batch
from .errors import DataError, MetricError
from .fit import PosteriorDraws, fit
from .folds import stratified_kfold
from .lingam import LingamConfig, discover_dag
from .metrics import roc_auc
from .nuts import McmcConfig
from .pipeline import apply_pipeline, binarize, fit_binarizer, fit_pipeline
from .posterior import TrainingData
from .scenarios import ScenarioSpec, full_scenario_grid
from .types import Evidence, N_SYMPTOMS

AGE_SLICE_BOUNDARY = 2  # age codes 0,1 are < 36; codes 2,3 are >= 36


@dataclass
class EvalReport:
    seed: int
    n_folds: int
    n_records: int
    n_excluded_incomplete: int
    scenario_names: list[str]
    condition: dict  # scenario -> {"per_fold": [...], "mean": .., "sd": ..}
    symptoms: dict  # scenario -> {"per_symptom_mean": {...}, "per_fold": [...], ...}
    subgroups: dict  # slice -> {"condition_auc": .., "symptom_auc": .., "n": ..}
    subgroup_scenario: str
    notices: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "seed": self.seed,
            "n_folds": self.n_folds,
            "n_records": self.n_records,
            "n_excluded_incomplete": self.n_excluded_incomplete,
            "scenarios": self.scenario_names,
            "condition_auc": self.condition,
            "symptom_auc": self.symptoms,
            "subgroups": self.subgroups,
            "subgroup_scenario": self.subgroup_scenario,
            "notices": self.notices,
        }

    def text_table(self) -> str:
        """Plain-text summary mirroring the headline/slice AUC layout."""
        lines = []
        width = max(len(s) for s in self.scenario_names) + 2
        lines.append("Scenario AUCs (mean +- SD over folds)")
        lines.append(
            f"{'scenario':<{width}}{'condition':>12}{'sd':>8}{'symptoms':>12}{'sd':>8}"
        )
        for name in self.scenario_names:
            c = self.condition[name]
            s = self.symptoms[name]
            lines.append(
                f"{name:<{width}}"
                f"{_fmt(c['mean']):>12}{_fmt(c['sd']):>8}"
                f"{_fmt(s['mean']):>12}{_fmt(s['sd']):>8}"
            )
        lines.append("")
        lines.append(f"Subgroup AUCs (pooled test predictions, {self.subgroup_scenario})")
        lines.append(f"{'population':<{width}}{'condition':>12}{'symptoms':>12}{'n':>8}")
        for name, row in self.subgroups.items():
            lines.append(
                f"{name:<{width}}"
                f"{_fmt(row['condition_auc']):>12}"
                f"{_fmt(row['symptom_auc']):>12}"
                f"{row['n']:>8}"
            )
        return "\n".join(lines)


def _fmt(v) -> str:
    return "undef" if v is None else f"{v:.3f}"


def _scenario_evidence(
    scenario: ScenarioSpec, age, gender, device, measures, symptoms
) -> Evidence:
    return Evidence(
        age_group=int(age),
        gender=int(gender),
        device=int(device),
        symptoms={s: int(symptoms[s]) for s in scenario.symptoms},
        measures={m: float(measures[m]) for m in scenario.measure_indices},
    )


def _safe_auc(scores, labels):
    try:
        return roc_auc(scores, labels)
    except MetricError:
        return None


def run_cv(
    dataset: Dataset,
    scenarios: list[ScenarioSpec] | None = None,
    mcmc: McmcConfig | None = None,
    lingam: LingamConfig | None = None,
    mu: float = 1.0,
    seed: int = 0,
    k: int = 5,
    predict_draws: int | None = 400,
    subgroup_scenario: str = "all_activities",
) -> EvalReport:
    """Stratified k-fold evaluation; deterministic given seed.

    ``predict_draws`` evenly thins kept draws before enumeration to bound
    prediction cost; None uses every kept draw.
    """
    scenarios = scenarios if scenarios is not None else full_scenario_grid()
    mcmc = mcmc or McmcConfig()
    lingam = lingam or LingamConfig()

    complete = dataset.complete_mask()
    excluded = int((~complete).sum())
    data = dataset.subset(np.flatnonzero(complete))
    if data.n < k:
        raise DataError("not enough complete records for cross-validation")
    condition = data.condition().astype(int)
    items = data.phq8.astype(int)
    groups = data.feature_groups()
    matrices = data.group_matrices(groups)

    folds = stratified_kfold(data.gender, data.age_group, condition, k=k, seed=seed)
    names = [sc.name for sc in scenarios]
    if subgroup_scenario not in names:
        subgroup_scenario = names[-1]

    cond_auc = {name: {"per_fold": []} for name in names}
    symp_auc = {name: {"per_fold": [], "per_symptom": []} for name in names}
    pooled: dict[str, dict] = {
        name: {"scores": [], "labels": [], "sym_scores": [], "sym_labels": [], "idx": []}
        for name in names
    }
    notices: list[str] = []

    for fold_id, test_idx in enumerate(folds):
        train_mask = np.ones(data.n, dtype=bool)
        train_mask[test_idx] = False
        train_idx = np.flatnonzero(train_mask)

        binarizer = fit_binarizer(items[train_idx], condition[train_idx])
        s_train = binarize(items[train_idx], binarizer)
        s_test = binarize(items[test_idx], binarizer)
        dag = discover_dag(items[train_idx], lingam)
        pstate = fit_pipeline(
            {k_: v[train_idx] for k_, v in matrices.items()},
            groups,
            condition[train_idx],
            items[train_idx],
            mu=mu,
        )
        m_train = apply_pipeline({k_: v[train_idx] for k_, v in matrices.items()}, pstate)
        m_test = apply_pipeline({k_: v[test_idx] for k_, v in matrices.items()}, pstate)

        fold_seed = int(np.random.SeedSequence([seed, 1000 + fold_id]).generate_state(1)[0])
        draws = fit(
            TrainingData(
                a=data.age_group[train_idx],
                g=data.gender[train_idx],
                d=data.device[train_idx],
                c=condition[train_idx],
                s=s_train,
                m=m_train,
            ),
            dag,
            McmcConfig(
                chains=mcmc.chains,
                warmup_draws=mcmc.warmup_draws,
                kept_draws=mcmc.kept_draws,
                target_accept=mcmc.target_accept,
                max_tree_depth=mcmc.max_tree_depth,
                seed=fold_seed,
            ),
        ).thinned(predict_draws)

        for sc in scenarios:
            evidences = [
                _scenario_evidence(
                    sc,
                    data.age_group[i],
                    data.gender[i],
                    data.device[i],
                    m_test[row],
                    s_test[row],
                )
                for row, i in enumerate(test_idx)
            ]
            results = predict_batch(draws, evidences, targets=sc.targets)
            scores = np.empty(len(test_idx))
            sym_scores = np.full((len(test_idx), N_SYMPTOMS), np.nan)
            for row, result in enumerate(results):
                scores[row] = result.targets["condition"].mean
                for s in range(N_SYMPTOMS):
                    if f"s{s}" in result.targets:
                        sym_scores[row, s] = result.targets[f"s{s}"].mean

            labels = condition[test_idx]
            auc = _safe_auc(scores, labels)
            if auc is None:
                notices.append(f"fold {fold_id} scenario {sc.name}: condition AUC undefined")
            cond_auc[sc.name]["per_fold"].append(auc)

            per_sym = []
            for s in range(N_SYMPTOMS):
                if s in sc.symptoms:
                    per_sym.append(None)
                    continue
                a = _safe_auc(sym_scores[:, s], s_test[:, s])
                if a is None:
                    notices.append(
                        f"fold {fold_id} scenario {sc.name}: symptom {s} AUC undefined"
                    )
                per_sym.append(a)
            defined = [a for a in per_sym if a is not None]
            symp_auc[sc.name]["per_symptom"].append(per_sym)
            symp_auc[sc.name]["per_fold"].append(
                float(np.mean(defined)) if defined else None
            )

            pooled[sc.name]["scores"].append(scores)
            pooled[sc.name]["labels"].append(labels)
            pooled[sc.name]["sym_scores"].append(sym_scores)
            pooled[sc.name]["sym_labels"].append(s_test)
            pooled[sc.name]["idx"].append(test_idx)

    for name in names:
        for table in (cond_auc, symp_auc):
            vals = [v for v in table[name]["per_fold"] if v is not None]
            table[name]["mean"] = float(np.mean(vals)) if vals else None
            table[name]["sd"] = float(np.std(vals, ddof=1)) if len(vals) > 1 else None

    sub = pooled[subgroup_scenario]
    pooled_idx = np.concatenate(sub["idx"])
    subgroups = subgroup_report(
        scores=np.concatenate(sub["scores"]),
        labels=np.concatenate(sub["labels"]),
        sym_scores=np.vstack(sub["sym_scores"]),
        sym_labels=np.vstack(sub["sym_labels"]),
        gender=data.gender[pooled_idx],
        age_group=data.age_group[pooled_idx],
        country=[data.country[i] for i in pooled_idx] if data.country else None,
    )

    return EvalReport(
        seed=seed,
        n_folds=k,
        n_records=data.n,
        n_excluded_incomplete=excluded,
        scenario_names=names,
        condition=cond_auc,
        symptoms=symp_auc,
        subgroups=subgroups,
        subgroup_scenario=subgroup_scenario,
        notices=notices,
    )


def subgroup_report(
    scores, labels, sym_scores, sym_labels, gender, age_group, country=None
) -> dict:
    """Per-slice AUCs over pooled predictions; single-class slices are
    undefined (None) rather than errors."""
    slices: dict[str, np.ndarray] = {"overall": np.ones(len(labels), dtype=bool)}
    gender = np.asarray(gender)
    age_group = np.asarray(age_group)
    slices["male"] = gender == 0
    slices["female"] = gender == 1
    slices["age<36"] = age_group < AGE_SLICE_BOUNDARY
    slices["age>=36"] = age_group >= AGE_SLICE_BOUNDARY
    if country is not None:
        for value in sorted({c for c in country if c}):
            slices[f"country={value}"] = np.array([c == value for c in country])

    out = {}
    for name, mask in slices.items():
        if mask.sum() == 0:
            continue
        cond = _safe_auc(scores[mask], labels[mask])
        per_sym = []
        for s in range(sym_labels.shape[1]):
            col = sym_scores[mask, s]
            ok = ~np.isnan(col)
            if ok.sum() == 0:
                continue
            a = _safe_auc(col[ok], sym_labels[mask][ok, s])
            if a is not None:
                per_sym.append(a)
        out[name] = {
            "condition_auc": cond,
            "symptom_auc": float(np.mean(per_sym)) if per_sym else None,
            "n": int(mask.sum()),
        }
    return out
