"""Command-line interface: simulate, discover-dag, fit, predict, evaluate,
serve. Every command accepts --seed and is deterministic given it.

Exit codes: 0 ok, 1 usage error, 2 data/schema error, 3 numerical failure.
Options may also be set via MDDBAYES_-prefixed environment variables.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__
from .artifact import build_artifact, jsonable, load_artifact
from .dag import SymptomDag
from .dataset import read_csv, write_csv
from .errors import DataError, FitError, MddBayesError
from .evaluate import run_cv
from .fit import fit
from .lingam import LingamConfig, discover_dag
from .nuts import McmcConfig
from .pipeline import apply_pipeline, binarize, fit_binarizer, fit_pipeline
from .posterior import TrainingData
from .scenarios import full_scenario_grid, trend_scenarios
from .synthetic import default_ground_truth, sample_dataset
from .types import params_to_dict
from .wire import evidence_from_dict, prediction_to_dict


def _dump_json(obj, path: str | None) -> None:
    text = json.dumps(obj, sort_keys=True, indent=2)
    if path:
        Path(path).write_text(text + "\n")
    else:
        click.echo(text)


@click.group(context_settings={"auto_envvar_prefix": "MDDBAYES"})
@click.version_option(__version__)
def cli():
    """Multimodal Bayesian network for depression and symptom prediction.

    Every option can also be set through MDDBAYES_<COMMAND>_<OPTION>
    environment variables (e.g. MDDBAYES_FIT_CHAINS=2).
    """


@cli.command()
@click.option("--n", default=500, show_default=True, help="Number of participants.")
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--params-out", type=click.Path(dir_okay=False), default=None,
              help="Also write the generating parameters as JSON.")
def simulate(n, seed, out, params_out):
    """Sample a synthetic dataset from the generative model."""
    gt = default_ground_truth(seed=seed, n=n)
    dataset, _ = sample_dataset(gt)
    write_csv(dataset, out)
    if params_out:
        _dump_json({"schema_version": 1, "seed": seed, "n": n,
                    "params": params_to_dict(gt.params)}, params_out)
    click.echo(f"wrote {dataset.n} records to {out}")


@cli.command("discover-dag")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--prune-threshold", default=0.05, show_default=True)
@click.option("--seed", default=0, show_default=True)
def discover_dag_cmd(data, out, prune_threshold, seed):
    """Estimate the inter-symptom DAG from raw PHQ-8 items."""
    dataset = read_csv(data)
    complete = ~np.isnan(dataset.phq8).any(axis=1)
    items = dataset.phq8[complete].astype(int)
    dag = discover_dag(items, LingamConfig(prune_threshold=prune_threshold, seed=seed))
    _dump_json({"schema_version": 1, **dag.to_dict()}, out)
    click.echo(f"discovered DAG with {dag.n_edges} edges from {int(complete.sum())} records")


@cli.command("fit")
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--artifact", required=True, type=click.Path(dir_okay=False))
@click.option("--dag", "dag_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="DAG JSON; discovered from the data when omitted.")
@click.option("--chains", default=4, show_default=True)
@click.option("--warmup", default=1000, show_default=True)
@click.option("--draws", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--mu", default=1.0, show_default=True, help="Supervised-PCA strength.")
@click.option("--prune-threshold", default=0.05, show_default=True)
def fit_cmd(data, artifact, dag_path, chains, warmup, draws, seed, mu, prune_threshold):
    """Fit the network on complete cases and write a model artifact."""
    dataset = read_csv(data)
    complete = dataset.complete_mask()
    if not complete.all():
        bad = np.flatnonzero(~complete)[:5].tolist()
        raise DataError(
            f"{int((~complete).sum())} records are incomplete (e.g. rows {bad}); "
            "training requires complete cases"
        )
    condition = dataset.condition().astype(int)
    items = dataset.phq8.astype(int)

    if dag_path:
        dag = SymptomDag.from_dict(json.loads(Path(dag_path).read_text()))
    else:
        dag = discover_dag(items, LingamConfig(prune_threshold=prune_threshold, seed=seed))

    groups = dataset.feature_groups()
    matrices = dataset.group_matrices(groups)
    pstate = fit_pipeline(matrices, groups, condition, items, mu=mu)
    measures = apply_pipeline(matrices, pstate)
    symptoms = binarize(items, pstate.binarizer)

    cfg = McmcConfig(chains=chains, warmup_draws=warmup, kept_draws=draws, seed=seed)
    posterior = fit(
        TrainingData(
            a=dataset.age_group, g=dataset.gender, d=dataset.device,
            c=condition, s=symptoms, m=measures,
        ),
        dag,
        cfg,
    )
    art = build_artifact(
        posterior,
        pstate,
        fit_config={
            "chains": chains, "warmup_draws": warmup, "kept_draws": draws,
            "seed": seed, "mu": mu, "prune_threshold": prune_threshold,
            "target_accept": cfg.target_accept, "max_tree_depth": cfg.max_tree_depth,
        },
    )
    art.save(artifact)
    max_rhat = posterior.diagnostics.get("max_rhat")
    rhat_note = f"max R-hat {max_rhat:.4f}" if max_rhat is not None else "single chain"
    click.echo(f"fitted {dataset.n} records; {rhat_note}; wrote {artifact}")


@cli.command()
@click.option("--artifact", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--evidence", default="{}", help="Evidence JSON object (or @file).")
@click.option("--targets", default=None,
              help="Comma-separated targets; defaults to condition + unobserved symptoms.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.option("--seed", default=0, show_default=True, help="Accepted for interface parity; prediction is deterministic.")
def predict(artifact, evidence, targets, out, seed):
    """Posterior marginals with 95% intervals for a partial-evidence query."""
    from .enumeration import predict as predict_op

    art = load_artifact(artifact)
    if evidence.startswith("@"):
        evidence = Path(evidence[1:]).read_text()
    try:
        payload = json.loads(evidence)
    except json.JSONDecodeError as e:
        raise DataError(f"evidence is not valid JSON: {e}")
    ev = evidence_from_dict(payload)
    target_tuple = tuple(t.strip() for t in targets.split(",")) if targets else None
    result = predict_op(art.draws, ev, targets=target_tuple)
    _dump_json(prediction_to_dict(result), out)


@cli.command()
@click.option("--data", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the JSON report here (text table always printed).")
@click.option("--chains", default=4, show_default=True)
@click.option("--warmup", default=1000, show_default=True)
@click.option("--draws", default=1000, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--folds", default=5, show_default=True)
@click.option("--mu", default=1.0, show_default=True)
@click.option("--prune-threshold", default=0.05, show_default=True)
@click.option("--predict-draws", default=400, show_default=True,
              help="Thin kept draws to this many for scoring.")
@click.option("--scenario-set", type=click.Choice(["full", "trend"]), default="full",
              show_default=True)
def evaluate(data, out, chains, warmup, draws, seed, folds, mu, prune_threshold,
             predict_draws, scenario_set):
    """Stratified cross-validation with the evidence-subset scenario grid."""
    dataset = read_csv(data)
    scenarios = full_scenario_grid() if scenario_set == "full" else trend_scenarios()
    report = run_cv(
        dataset,
        scenarios=scenarios,
        mcmc=McmcConfig(chains=chains, warmup_draws=warmup, kept_draws=draws, seed=seed),
        lingam=LingamConfig(prune_threshold=prune_threshold, seed=seed),
        mu=mu,
        seed=seed,
        k=folds,
        predict_draws=predict_draws,
    )
    click.echo(report.text_table())
    if out:
        _dump_json(jsonable(report.to_dict()), out)


@cli.command()
@click.option("--artifact", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--workers", default=4, show_default=True,
              help="Maximum concurrent enumeration jobs.")
@click.option("--static-dir", type=click.Path(file_okay=False), default=None,
              help="Directory of UI assets to serve at /.")
@click.option("--seed", default=0, show_default=True,
              help="Accepted for interface parity; serving is deterministic.")
def serve(artifact, port, host, workers, static_dir, seed):
    """Serve the what-if prediction API over a fitted artifact."""
    import uvicorn

    from .service import create_app

    app = create_app(artifact, max_workers=workers, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.UsageError as e:
        e.show()
        return 1
    except click.ClickException as e:
        e.show()
        return 1
    except FitError as e:
        click.echo(f"error: {e}", err=True)
        return 3
    except FloatingPointError as e:
        click.echo(f"numerical error: {e}", err=True)
        return 3
    except MddBayesError as e:
        click.echo(f"error: {e}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
