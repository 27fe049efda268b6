from typing import Any, Dict, Optional, Sequence

import src.config as config
from src.interfaces.run_context import RunContext, run_command
from src.utils.data_utils import load_dataset, profile
from src.utils.errors import InputError
from src.utils.plot_utils import plot_box, plot_correlation
from src.utils.preprocess_utils import (
    apply_label_encoding,
    encode_labels,
    fit_label_encoding,
    impute_missing,
)
from src.utils.stats_utils import pearson_matrix, summarize_columns


def _profile(
    ctx: RunContext,
    data: Sequence[str],
    overrides: Dict[str, Any],
    config_path: Optional[str],
    schema_path: Optional[str],
) -> Dict[str, object]:
    ctx.configure(overrides, config_path)
    schema, label = ctx.schema(schema_path)
    paths = ctx.data_paths(data)

    records = load_dataset(paths, schema, label, require_label=False)
    ctx.log(f"Loaded {len(records)} rows from {len(paths)} file(s)")
    if len(records) < 2:
        raise InputError("profiling needs at least 2 rows")

    report = profile(records)
    ctx.write_json("schema_report.json", report.to_dict())
    for name, missing in report.missing_counts.items():
        if missing:
            ctx.log(f"  {name}: {missing} missing value(s)")

    records = impute_missing(records)
    encoding = fit_label_encoding(records)
    matrix = apply_label_encoding(records, encoding)

    # Box plots for every continuous attribute
    summaries = summarize_columns(matrix)
    ctx.write_json(
        "summaries.json",
        {
            "schema_version": config.SCHEMA_VERSION,
            "attributes": {name: s.to_dict() for name, s in summaries.items()},
        },
    )
    for name, summary in summaries.items():
        ctx.log(
            f"  {name}: median {summary.median:g}, IQR [{summary.q1:g}, {summary.q3:g}], "
            f"{summary.outlier_count} outlier(s)"
        )
        ctx.output(plot_box(name, summary, ctx.path(f"boxplot_{name}.svg")))

    labels = encode_labels(records) if records.has_labels else None
    corr = pearson_matrix(matrix, labels)
    ctx.write_json(
        "correlation.json",
        dict(corr.to_dict(), computed_on="label-encoded attributes before feature elimination"),
    )
    ctx.output(plot_correlation(corr, ctx.path("correlation_heatmap.svg")))
    if labels is not None:
        ctx.log("Feature-to-label correlation:")
        for name, r in sorted(corr.label_column().items(), key=lambda kv: -abs(kv[1])):
            ctx.log(f"  {name:>16}  {r:+.4f}")

    return {
        "Rows": report.row_count,
        "Continuous Attributes": len(summaries),
        "Label Counts": report.label_counts or "unlabeled",
    }


def cmd_profile(
    data: Sequence[str],
    out: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    config_path: Optional[str] = None,
    schema_path: Optional[str] = None,
) -> int:
    """
    Descriptive statistics of the raw data: schema report, five-number summaries
    with one box plot per continuous attribute, and the Pearson correlation matrix
    of the label-encoded attributes and the label.

    Returns:
        Exit code (0 success, 2 unreadable or empty input)
    """
    return run_command(
        "profile",
        out,
        lambda ctx: _profile(ctx, data, overrides or {}, config_path, schema_path),
    )
