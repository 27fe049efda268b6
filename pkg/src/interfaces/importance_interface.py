from collections import Counter
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

import src.config as config
from src.algorithms.extra_trees import (
    ExtraTreesParams,
    feature_importances,
    fit_extra_trees,
)
from src.interfaces.run_context import RunContext, run_command
from src.models.census import RecordSet
from src.models.tree import ImportanceVector
from src.utils.data_utils import load_dataset
from src.utils.plot_utils import plot_importances
from src.utils.preprocess_utils import encode_records


def importance_table(
    records: RecordSet, importances: ImportanceVector, eliminate: int
) -> List[dict]:
    """Rows of (id, name, kind, score, rank), ascending by score."""
    spec_of = {a.name: a for a in records.attributes}
    rows = []
    for rank, (name, score) in enumerate(importances.ranked(), start=1):
        spec = spec_of[name]
        rows.append(
            {
                "rank": rank,
                "id": spec.id,
                "name": name,
                "kind": spec.kind,
                "score": score,
                "eliminate": rank <= eliminate,
            }
        )
    return rows


def _importance(
    ctx: RunContext,
    data: Sequence[str],
    overrides: Dict[str, Any],
    config_path: Optional[str],
    schema_path: Optional[str],
) -> Dict[str, object]:
    cfg = ctx.configure(overrides, config_path)
    schema, label = ctx.schema(schema_path)
    paths = ctx.data_paths(data)

    records = load_dataset(paths, schema, label)
    ctx.log(f"Loaded {len(records)} rows from {len(paths)} file(s)")
    # Scored before any feature is dropped
    encoded = encode_records(records, drop=())
    n_columns = encoded.label_encoded.n_columns
    eliminate = min(cfg.eliminate, n_columns)
    params = ExtraTreesParams(
        n_trees=cfg.n_trees,
        k_features=cfg.k_features,
        min_samples_split=config.EXTRA_TREES_MIN_SAMPLES_SPLIT,
    )

    runs = []
    lowest = Counter()
    seeds = [cfg.seed + i for i in range(cfg.repeats)]
    for seed in seeds:
        model = fit_extra_trees(
            encoded.label_encoded, encoded.labels.binary, params, seed=seed, n_jobs=cfg.n_jobs
        )
        importances = feature_importances(model)
        lowest.update(importances.lowest(eliminate))
        runs.append(importances)
        ctx.log(
            f"Seed {seed}: {model.n_trees} trees, k={model.k_features}, "
            f"lowest {eliminate}: {', '.join(importances.lowest(eliminate)) or '-'}"
        )
    ctx.manifest.seeds["extra_trees"] = seeds[0]

    importances = runs[0]
    table = importance_table(records, importances, eliminate)
    ctx.log(f"{'rank':>4}  {'id':>4}  {'name':>16}  {'kind':>11}  {'score':>8}")
    for row in table:
        mark = "  <- eliminate" if row["eliminate"] else ""
        ctx.log(
            f"{row['rank']:>4}  {row['id']:>4}  {row['name']:>16}  {row['kind']:>11}  "
            f"{row['score']:>8.4f}{mark}"
        )

    spec_of = {a.name: a for a in records.attributes}
    suggestion = [spec_of[name].id for name in importances.lowest(eliminate)]
    result = {
        "schema_version": config.SCHEMA_VERSION,
        "seed": cfg.seed,
        "n_trees": cfg.n_trees,
        "k_features": cfg.k_features or config.default_k_features(n_columns),
        "importances": table,
        "score_sum": float(np.sum(importances.scores)),
        "eliminate": suggestion,
    }
    if cfg.repeats > 1:
        result["repeats"] = {
            "seeds": seeds,
            "lowest_counts": {name: lowest.get(name, 0) for name in importances.feature_names},
            "scores": [
                {name: float(s) for name, s in zip(run.feature_names, run.scores)}
                for run in runs
            ],
        }
        for name, count in lowest.most_common():
            ctx.log(f"  {name}: among the lowest {eliminate} in {count}/{cfg.repeats} runs")

    ctx.write_json("importances.json", result)
    ctx.output(plot_importances(importances, ctx.path("importances.svg"), eliminate))

    return {
        "Trees": cfg.n_trees,
        "Runs": cfg.repeats,
        "Suggested Elimination": ", ".join(suggestion) or "none",
    }


def cmd_importance(
    data: Sequence[str],
    out: Optional[str] = None,
    overrides: Optional[Dict[str, Any]] = None,
    config_path: Optional[str] = None,
    schema_path: Optional[str] = None,
) -> int:
    """
    Extra-Trees importance of every attribute, listed ascending with the lowest
    `eliminate` attributes suggested for removal.
    """
    return run_command(
        "importance",
        out,
        lambda ctx: _importance(ctx, data, overrides or {}, config_path, schema_path),
    )
