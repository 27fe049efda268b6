from typing import Any, Dict, List, Optional, Sequence

import numpy as np

import src.config as config
from src.algorithms.booster import decision_function
from src.interfaces.run_context import RunContext, run_command
from src.models.census import RecordSet
from src.utils.data_utils import load_dataset
from src.utils.errors import ModelFormatError
from src.utils.io_utils import load_model
from src.utils.preprocess_utils import (
    apply_label_encoding,
    drop_features,
    find_unseen,
    impute_missing,
    one_hot_expand,
)


def _predict(
    ctx: RunContext,
    model_path: str,
    data: Sequence[str],
    overrides: Dict[str, Any],
    config_path: Optional[str],
    strict: bool,
) -> object:
    ctx.configure(overrides, config_path)
    ctx.add_inputs([model_path])
    bundle = load_model(model_path)
    ctx.log(
        f"Loaded {bundle.ensemble.mode} model with {len(bundle.ensemble.stages)} stage(s) "
        f"from {model_path}"
    )
    paths = ctx.data_paths(data)

    records = load_dataset(paths, bundle.attributes, bundle.label, require_label=False)
    records = drop_features(impute_missing(records), bundle.dropped)
    unseen = find_unseen(records, bundle.encoding)
    good = np.array([i for i in range(len(records)) if i not in unseen], dtype=np.int64)

    scores = np.empty(0)
    if len(good):
        scorable = RecordSet(
            frame=records.frame.iloc[good].reset_index(drop=True),
            attributes=records.attributes,
            label=records.label,
        )
        matrix = one_hot_expand(apply_label_encoding(scorable, bundle.encoding), bundle.encoding)
        if matrix.columns != bundle.columns:
            raise ModelFormatError("model columns do not match the encoded input")
        scores = np.atleast_1d(decision_function(bundle.ensemble, matrix.values))
    score_of = dict(zip(good.tolist(), scores.tolist()))

    actual = records.frame[records.label.name].tolist() if records.has_labels else None
    rows: List[dict] = []
    correct = 0
    for i in range(len(records)):
        row: Dict[str, Any] = {"row": i}
        if i in unseen:
            attribute, value = unseen[i]
            row["error"] = f"unseen category '{value}' for attribute '{attribute}'"
        else:
            score = score_of[i]
            row["score"] = score
            row["label"] = bundle.label.positive if score > 0 else bundle.label.negative
        if actual is not None:
            row["actual"] = actual[i]
            correct += int(row.get("label") == actual[i])
        rows.append(row)

    for i, (attribute, value) in sorted(unseen.items()):
        ctx.log(f"Row {i}: unseen category '{value}' for attribute '{attribute}'")

    ctx.write_json(
        "predictions.json",
        {
            "schema_version": config.SCHEMA_VERSION,
            "model": model_path,
            "predictions": rows,
            "errors": len(unseen),
        },
    )

    summary: Dict[str, object] = {
        "Rows": len(records),
        "Predicted": len(good),
        "Errors": len(unseen),
    }
    if actual is not None and len(good):
        summary["Accuracy On Labeled Rows"] = f"{correct / len(good):.4f}"
    if strict and unseen:
        ctx.log(f"Strict mode: {len(unseen)} row(s) could not be scored")
        return 1, summary
    return summary


def cmd_predict(
    model_path: str,
    data: Sequence[str],
    out: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    config_path: Optional[str] = None,
    strict: bool = False,
) -> int:
    """
    Score raw census rows with a saved model. Rows with a category the model never
    saw get an error record instead of a prediction; with `strict` they make the
    run exit 1.
    """
    return run_command(
        "predict",
        out,
        lambda ctx: _predict(ctx, model_path, data, overrides or {}, config_path, strict),
    )
