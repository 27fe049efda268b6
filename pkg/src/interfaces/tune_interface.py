from typing import Any, Dict, Optional, Sequence

import src.config as config
from src.algorithms.grid_search import format_table, grid_search
from src.interfaces.run_context import RunContext, run_command
from src.models.reports import ParamGrid
from src.utils.data_utils import load_dataset
from src.utils.plot_utils import plot_grid_search
from src.utils.preprocess_utils import encode_records, shuffle_split


def _tune(
    ctx: RunContext,
    data: Sequence[str],
    overrides: Dict[str, Any],
    config_path: Optional[str],
    schema_path: Optional[str],
    grid_path: Optional[str],
) -> Dict[str, object]:
    if grid_path:
        n_estimators, max_depth, learning_rate = config.grid_from_file(grid_path)
        overrides = dict(
            overrides,
            grid_n_estimators=n_estimators,
            grid_max_depth=max_depth,
            grid_learning_rate=learning_rate,
        )
        ctx.add_inputs([grid_path])
    cfg = ctx.configure(overrides, config_path)
    schema, label = ctx.schema(schema_path)
    paths = ctx.data_paths(data)

    records = load_dataset(paths, schema, label)
    encoded = encode_records(records, cfg.drop)
    train, _, split = shuffle_split(
        encoded.expanded, encoded.labels, cfg.ratio, cfg.seed, cfg.coverage_retries
    )
    ctx.manifest.seeds["split"] = split.seed
    ctx.log(
        f"Tuning on {len(train)} training rows ({encoded.expanded.n_columns} columns), "
        f"{cfg.k}-fold CV"
    )

    grid = ParamGrid(
        n_estimators=tuple(cfg.grid_n_estimators),
        max_depth=tuple(cfg.grid_max_depth),
        learning_rate=tuple(cfg.grid_learning_rate),
    )
    report = grid_search(train, grid, k=cfg.k, seed=cfg.seed, n_jobs=cfg.n_jobs)
    ctx.log(format_table(report))

    ctx.write_json("tune_report.json", report.to_dict())
    ctx.output(plot_grid_search(report, ctx.path("grid_search.svg")))

    failed = sum(cell.failed for cell in report.cells)
    summary: Dict[str, object] = {"Cells": len(report.cells), "Failed Cells": failed}
    if report.best is None:
        summary["Best Cell"] = "none"
        return summary
    best = report.best
    summary["Best Cell"] = (
        f"{best.n_estimators} estimators, depth {best.max_depth}, lr {best.learning_rate:g}"
    )
    summary["Best Mean Accuracy"] = f"{best.mean_score:.4f}"
    return summary


def cmd_tune(
    data: Sequence[str],
    out: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    config_path: Optional[str] = None,
    schema_path: Optional[str] = None,
    grid_path: Optional[str] = None,
) -> int:
    """Grid search with k-fold CV on the training split; table printed best first."""
    return run_command(
        "tune",
        out,
        lambda ctx: _tune(ctx, data, overrides or {}, config_path, schema_path, grid_path),
    )
