import time
from typing import Any, Dict, Optional, Sequence

from src.algorithms.booster import BoostParams, decision_function, get_booster
from src.interfaces.run_context import RunContext, run_command
from src.models.reports import EvalReport
from src.utils.data_utils import load_dataset
from src.utils.io_utils import ModelBundle, save_model
from src.utils.metric_utils import evaluate, fit_diagnosis
from src.utils.plot_utils import plot_confusion, plot_roc, plot_training_curve
from src.utils.preprocess_utils import encode_records, export_matrix_csv, shuffle_split


def results_table(train: EvalReport, validation: EvalReport) -> str:
    """Headline metrics of both splits side by side."""
    rows = [
        ("Accuracy", train.report.accuracy, validation.report.accuracy),
        ("Recall (weighted)", train.report.weighted.recall, validation.report.weighted.recall),
        (
            "Precision (weighted)",
            train.report.weighted.precision,
            validation.report.weighted.precision,
        ),
        ("F1-Score (weighted)", train.report.weighted.f1, validation.report.weighted.f1),
        ("AUROC", train.roc.auc, validation.roc.auc),
    ]
    lines = [f"{'metric':<22}{'train':>10}{'validation':>12}"]
    lines += [f"{name:<22}{a:>10.4f}{b:>12.4f}" for name, a, b in rows]
    return "\n".join(lines)


def _train(
    ctx: RunContext,
    data: Sequence[str],
    overrides: Dict[str, Any],
    config_path: Optional[str],
    schema_path: Optional[str],
    export_matrix: bool,
) -> Dict[str, object]:
    cfg = ctx.configure(overrides, config_path)
    schema, label = ctx.schema(schema_path)
    paths = ctx.data_paths(data)

    records = load_dataset(paths, schema, label)
    ctx.log(f"Loaded {len(records)} rows from {len(paths)} file(s)")
    encoded = encode_records(records, cfg.drop)
    matrix = encoded.expanded
    ctx.log(
        f"Dropped {', '.join(encoded.dropped) or 'nothing'}; "
        f"{matrix.n_columns} columns after one-hot expansion"
    )
    ctx.write_json("encoding.json", encoded.encoding.to_dict())
    if export_matrix:
        path = ctx.path("features.csv")
        export_matrix_csv(matrix, encoded.labels, path)
        ctx.output(path)

    train, validation, split = shuffle_split(
        matrix, encoded.labels, cfg.ratio, cfg.seed, cfg.coverage_retries
    )
    ctx.manifest.seeds["split"] = split.seed
    ctx.write_json("split.json", split.to_dict())
    ctx.log(
        f"Split {len(train)} train / {len(validation)} validation rows "
        f"(seed {split.seed}, attempt {split.attempts})"
    )

    params = BoostParams(
        n_estimators=cfg.n_estimators,
        max_depth=cfg.max_depth,
        learning_rate=cfg.learning_rate,
        min_samples_split=cfg.min_samples_split,
    )
    booster = get_booster(cfg.mode, params)
    ctx.log(
        f"Fitting {booster.name}: {params.n_estimators} estimators, depth {params.max_depth}, "
        f"lr {params.learning_rate:g}"
    )
    start = time.perf_counter()
    ensemble = booster.fit(train)
    fit_seconds = time.perf_counter() - start
    ctx.log(f"Fitted {len(ensemble.stages)} stage(s) in {fit_seconds:.2f} seconds")
    if len(ensemble.stages) < params.n_estimators:
        ctx.log(f"Boosting stopped early after {len(ensemble.stages)} stage(s)")

    save_model(
        ctx.path("model.json"),
        ModelBundle(
            ensemble=ensemble,
            encoding=encoded.encoding,
            columns=matrix.columns,
            attributes=records.attributes,
            dropped=encoded.dropped,
            label=records.label,
        ),
    )
    ctx.output(ctx.path("model.json"))

    train_eval = evaluate(
        "train", train.labels.values, decision_function(ensemble, train.matrix.values)
    )
    val_eval = evaluate(
        "validation",
        validation.labels.values,
        decision_function(ensemble, validation.matrix.values),
    )
    ctx.write_json("eval_train.json", train_eval.to_dict())
    ctx.write_json("eval_validation.json", val_eval.to_dict())
    for flag in val_eval.report.degenerate:
        ctx.log(f"Warning: {flag} has a zero denominator and was reported as 0")

    ctx.output(plot_confusion(val_eval.confusion, ctx.path("confusion_matrix.svg")))
    ctx.output(
        plot_roc([train_eval.roc, val_eval.roc], ["train", "validation"], ctx.path("roc_curve.svg"))
    )
    ctx.output(plot_training_curve(ensemble, ctx.path("training_curve.svg")))

    ctx.log(results_table(train_eval, val_eval))
    diagnosis, gap = fit_diagnosis(train_eval.report.accuracy, val_eval.report.accuracy)
    ctx.log(f"Fit diagnosis: {diagnosis} (train - validation accuracy = {gap:+.4f})")

    return {
        "Mode": ensemble.mode,
        "Stages": len(ensemble.stages),
        "Training Accuracy": f"{train_eval.report.accuracy:.4f}",
        "Validation Accuracy": f"{val_eval.report.accuracy:.4f}",
        "Validation AUROC": f"{val_eval.roc.auc:.4f}",
        "Fit Diagnosis": diagnosis,
        "Fit Time": f"{fit_seconds:.2f} seconds",
    }


def cmd_train(
    data: Sequence[str],
    out: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    config_path: Optional[str] = None,
    schema_path: Optional[str] = None,
    export_matrix: bool = False,
) -> int:
    """
    Full pipeline: drop features, encode, shuffle-split, fit the chosen boosting
    mode, then write the model and train/validation evaluation reports.

    Returns:
        Exit code (0 success, 1 split coverage unreachable, 2 usage or input error)
    """
    return run_command(
        "train",
        out,
        lambda ctx: _train(
            ctx, data, overrides or {}, config_path, schema_path, export_matrix
        ),
    )
