import time
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

import src.config as config
from src.algorithms.booster import BoostParams, staged_decision_function
from src.algorithms.logit_gbm import fit_logit_gbm
from src.models.matrix import Dataset
from src.models.reports import CellResult, ParamGrid, TuneReport
from src.utils.errors import ConfigurationError, TrainingError
from src.utils.random_utils import fisher_yates, make_rng

Fold = Tuple[np.ndarray, np.ndarray]


def default_grid() -> ParamGrid:
    return ParamGrid(
        n_estimators=tuple(config.GRID_N_ESTIMATORS),
        max_depth=tuple(config.GRID_MAX_DEPTH),
        learning_rate=tuple(config.GRID_LEARNING_RATE),
    )


def check_grid(grid: ParamGrid) -> None:
    if not grid.n_estimators or not grid.max_depth or not grid.learning_rate:
        raise ConfigurationError("parameter grid is empty")
    if min(grid.n_estimators) < 1 or min(grid.max_depth) < 1:
        raise ConfigurationError("grid estimator counts and depths must be positive")
    if min(grid.learning_rate) <= 0 or max(grid.learning_rate) > 1:
        raise ConfigurationError("grid learning rates must be in (0, 1]")


def kfold_indices(n: int, k: int, seed: int) -> List[Fold]:
    """
    Seeded k-fold partition of 0..n-1.

    The Fisher-Yates permutation is cut into k consecutive parts whose sizes
    differ by at most one (the first n % k parts are one longer). Fold i validates
    on part i and trains on the rest; both index arrays are sorted.
    """
    if k < 2:
        raise ConfigurationError(f"k must be at least 2, got {k}")
    if k > n:
        raise ConfigurationError(f"k={k} folds need at least {k} rows, got {n}")

    perm = fisher_yates(n, make_rng(seed))
    base, extra = divmod(n, k)
    sizes = [base + 1 if i < extra else base for i in range(k)]
    bounds = np.cumsum([0] + sizes)

    folds = []
    for i in range(k):
        val = np.sort(perm[bounds[i] : bounds[i + 1]])
        train = np.sort(np.concatenate([perm[: bounds[i]], perm[bounds[i + 1] :]]))
        folds.append((train, val))
    return folds


def _score_column(
    train: Dataset,
    fold: Fold,
    n_estimators: Sequence[int],
    max_depth: int,
    learning_rate: float,
) -> Tuple[Dict[int, float], Dict[int, float], Optional[str]]:
    """
    Fit one fold with the largest stage count and read the validation accuracy of
    every smaller count from the staged scores.

    Returns the accuracy and the measured fit time of the first n stages for
    every n, or the failure message.
    """
    fit_rows, val_rows = fold
    params = BoostParams(
        n_estimators=max(n_estimators),
        max_depth=max_depth,
        learning_rate=learning_rate,
    )
    start = time.perf_counter()
    try:
        ensemble = fit_logit_gbm(train.take(fit_rows), params)
    except TrainingError as e:
        elapsed = time.perf_counter() - start
        return {}, {n: elapsed for n in n_estimators}, str(e)

    val = train.take(val_rows)
    truth = val.labels.values == 1
    wanted = set(n_estimators)
    scores = {}
    for stage, score in enumerate(staged_decision_function(ensemble, val.matrix), start=1):
        if stage in wanted:
            scores[stage] = float(np.mean((score > 0) == truth))
    seconds = {n: ensemble.stage_seconds[n - 1] for n in wanted}
    return scores, seconds, None


def _ranking_key(cell: CellResult):
    # Highest mean first; ties go to fewer estimators, then shallower trees.
    negated_mean = 0.0 if cell.failed else -cell.mean_score
    return (cell.failed, negated_mean, cell.n_estimators, cell.max_depth, cell.learning_rate)


def grid_search(
    train: Dataset,
    grid: ParamGrid,
    k: int = config.CV_FOLDS,
    seed: int = config.SEED,
    n_jobs: int = config.N_JOBS,
) -> TuneReport:
    """
    k-fold cross-validated accuracy of logit boosting over a parameter grid.

    All cells share one fold partition drawn from `seed`, so every cell is
    compared on the same rows; n_jobs never changes the partition. Cells with
    the same depth and learning rate are scored from a single fit per fold, since
    a fit with more stages extends the fit with fewer stages unchanged. A cell's
    fit_seconds is the measured time to fit its first n_estimators stages, summed
    over folds.

    Args:
        train: Training rows to cross-validate on
        grid: n_estimators x max_depth x learning_rate values
        k: Number of folds
        seed: Seed of the fold partition
        n_jobs: joblib workers

    Returns:
        TuneReport with cells sorted by mean accuracy (failed cells last)
    """
    check_grid(grid)
    folds = kfold_indices(len(train), k, seed)
    columns = sorted({(depth, rate) for _, depth, rate in grid.cells()})
    n_values = sorted(set(grid.n_estimators))

    jobs = [(depth, rate, i) for depth, rate in columns for i in range(len(folds))]
    outcomes = Parallel(n_jobs=n_jobs)(
        delayed(_score_column)(train, folds[i], n_values, depth, rate)
        for depth, rate, i in jobs
    )
    by_job = dict(zip(jobs, outcomes))

    cells = []
    for n_estimators, depth, rate in grid.cells():
        cell = CellResult(n_estimators=n_estimators, max_depth=depth, learning_rate=rate)
        for i in range(len(folds)):
            scores, seconds, failure = by_job[(depth, rate, i)]
            cell.fit_seconds += seconds[n_estimators]
            if failure is not None:
                cell.failed = True
                cell.failure = f"fold {i}: {failure}"
                continue
            cell.fold_scores.append(scores[n_estimators])
        if cell.failed:
            cell.fold_scores = []
        cells.append(cell)

    cells.sort(key=_ranking_key)
    best = cells[0] if cells and not cells[0].failed else None
    return TuneReport(cells=cells, best=best, seed=seed, folds=k, grid=grid)


def format_table(report: TuneReport) -> str:
    """Human-readable summary, highest mean score first."""
    lines = [
        f"Grid search: {len(report.cells)} cells, {report.folds}-fold CV, seed {report.seed}",
        f"{'rank':>4}  {'estimators':>10}  {'depth':>5}  {'lr':>6}  {'mean':>8}  {'std':>8}  {'fit s':>8}",
    ]
    for rank, cell in enumerate(report.cells, start=1):
        if cell.failed:
            lines.append(
                f"{rank:>4}  {cell.n_estimators:>10}  {cell.max_depth:>5}  "
                f"{cell.learning_rate:>6.3g}  {'failed':>8}  {'':>8}  {cell.fit_seconds:>8.1f}"
            )
            continue
        lines.append(
            f"{rank:>4}  {cell.n_estimators:>10}  {cell.max_depth:>5}  "
            f"{cell.learning_rate:>6.3g}  {cell.mean_score:>8.4f}  "
            f"{np.std(cell.fold_scores):>8.4f}  {cell.fit_seconds:>8.1f}"
        )
    if report.best is not None:
        lines.append(
            f"best: {report.best.n_estimators} estimators, depth {report.best.max_depth}, "
            f"lr {report.best.learning_rate:g} (mean accuracy {report.best.mean_score:.4f})"
        )
    return "\n".join(lines)
