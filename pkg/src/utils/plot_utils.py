import os
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

import src.config as config  # noqa: E402
from src.models.ensemble import BoostedEnsemble  # noqa: E402
from src.models.reports import (  # noqa: E402
    ConfusionMatrix,
    CorrelationMatrix,
    FiveNumberSummary,
    RocCurve,
    TuneReport,
)
from src.models.tree import ImportanceVector  # noqa: E402

# Fixed salt and no date stamp keep re-rendered SVGs byte-identical.
SVG_RC = {"svg.hashsalt": config.SVG_HASH_SALT, "svg.fonttype": "path"}


def _save(fig, path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path


def plot_box(name: str, summary: FiveNumberSummary, path: str) -> str:
    """Box-and-whisker plot drawn entirely from a precomputed summary."""
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=config.FIGURE_SIZE)
        ax.bxp(
            [
                {
                    "label": name,
                    "med": summary.median,
                    "q1": summary.q1,
                    "q3": summary.q3,
                    "whislo": summary.whisker_low,
                    "whishi": summary.whisker_high,
                    "fliers": np.asarray(summary.outlier_values, dtype=np.float64),
                }
            ],
        )
        ax.set_title(f"{name} (n={summary.count}, outliers={summary.outlier_count})")
        ax.set_ylabel(name)
        fig.tight_layout()
        return _save(fig, path)


def plot_correlation(corr: CorrelationMatrix, path: str) -> str:
    with plt.rc_context(SVG_RC):
        size = max(config.FIGURE_SIZE[0], 0.55 * len(corr.names))
        fig, ax = plt.subplots(figsize=(size, size))
        image = ax.imshow(corr.values, cmap="coolwarm", vmin=-1.0, vmax=1.0)
        ticks = np.arange(len(corr.names))
        ax.set_xticks(ticks)
        ax.set_xticklabels(corr.names, rotation=90)
        ax.set_yticks(ticks)
        ax.set_yticklabels(corr.names)
        for i in range(len(corr.names)):
            for j in range(len(corr.names)):
                ax.text(j, i, f"{corr.values[i, j]:.2f}", ha="center", va="center", fontsize=6)
        fig.colorbar(image, ax=ax, fraction=0.046, pad=0.04)
        ax.set_title("Pearson correlation")
        fig.tight_layout()
        return _save(fig, path)


def plot_importances(importances: ImportanceVector, path: str, eliminate: int = 0) -> str:
    """Horizontal bars, lowest score at the bottom; suggested eliminations in red."""
    ranked = importances.ranked()
    names = [name for name, _ in ranked]
    scores = [score for _, score in ranked]
    colors = ["tab:red" if i < eliminate else "tab:blue" for i in range(len(ranked))]

    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(config.FIGURE_SIZE[0], max(3.0, 0.35 * len(names))))
        ax.barh(np.arange(len(names)), scores, color=colors)
        ax.set_yticks(np.arange(len(names)))
        ax.set_yticklabels(names)
        ax.set_xlabel("Extra Trees importance")
        ax.set_title("Feature importances")
        fig.tight_layout()
        return _save(fig, path)


def plot_grid_search(report: TuneReport, path: str) -> str:
    """Mean CV accuracy against n_estimators, one line per (depth, learning rate)."""
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=config.FIGURE_SIZE)
        lines = sorted({(c.max_depth, c.learning_rate) for c in report.cells})
        for depth, rate in lines:
            cells = sorted(
                (c for c in report.cells
                 if (c.max_depth, c.learning_rate) == (depth, rate) and not c.failed),
                key=lambda c: c.n_estimators,
            )
            if not cells:
                continue
            ax.plot(
                [c.n_estimators for c in cells],
                [c.mean_score for c in cells],
                marker="o",
                label=f"depth {depth}, lr {rate:g}",
            )
        if report.best is not None:
            ax.scatter(
                [report.best.n_estimators],
                [report.best.mean_score],
                s=120,
                facecolors="none",
                edgecolors="black",
                label="best",
            )
        ax.set_xlabel("n_estimators")
        ax.set_ylabel(f"mean accuracy ({report.folds}-fold CV)")
        ax.set_title("Grid search")
        ax.legend(fontsize=7)
        fig.tight_layout()
        return _save(fig, path)


def plot_confusion(cm: ConfusionMatrix, path: str, split: str = "validation") -> str:
    """Row-normalized confusion matrix annotated with counts."""
    classes = [config.POSITIVE_LABEL, config.NEGATIVE_LABEL]
    counts = cm.as_array()
    rates = cm.normalized()
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(4.5, 4.0))
        ax.imshow(rates, cmap="Blues", vmin=0.0, vmax=1.0)
        ax.set_xticks([0, 1])
        ax.set_xticklabels(classes)
        ax.set_yticks([0, 1])
        ax.set_yticklabels(classes)
        ax.set_xlabel("predicted")
        ax.set_ylabel("actual")
        for i in range(2):
            for j in range(2):
                ax.text(
                    j, i, f"{rates[i, j]:.3f}\n({counts[i, j]})",
                    ha="center", va="center",
                    color="white" if rates[i, j] > 0.5 else "black",
                )
        ax.set_title(f"Confusion matrix ({split})")
        fig.tight_layout()
        return _save(fig, path)


def plot_roc(curves: Sequence[RocCurve], labels: Sequence[str], path: str) -> str:
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        for curve, label in zip(curves, labels):
            ax.plot(curve.fpr, curve.tpr, label=f"{label} (AUC={curve.auc:.4f})")
        ax.plot([0, 1], [0, 1], linestyle="--", color="grey", linewidth=0.8)
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, 1.0)
        ax.set_xlabel("false positive rate")
        ax.set_ylabel("true positive rate")
        ax.set_title("ROC")
        ax.legend(loc="lower right")
        fig.tight_layout()
        return _save(fig, path)


def plot_training_curve(e: BoostedEnsemble, path: str) -> str:
    """Per-stage training loss (left axis) and training error (right axis)."""
    stages = np.arange(1, len(e.train_loss) + 1)
    loss_label = "log-loss" if e.mode == "logit" else "exponential-loss bound"
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=config.FIGURE_SIZE)
        ax.plot(stages, e.train_loss, color="tab:blue")
        ax.set_xlabel("stage")
        ax.set_ylabel(f"training {loss_label}", color="tab:blue")
        if e.train_error:
            twin = ax.twinx()
            twin.plot(stages[: len(e.train_error)], e.train_error, color="tab:orange")
            twin.set_ylabel("training error", color="tab:orange")
        ax.set_title(f"Training curve ({e.mode})")
        fig.tight_layout()
        return _save(fig, path)
