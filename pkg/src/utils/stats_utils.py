from typing import Dict, Optional, Sequence

import numpy as np

import src.config as config
from src.models.matrix import FeatureMatrix, LabelVector
from src.models.reports import CorrelationMatrix, FiveNumberSummary


def five_number_summary(
    column: Sequence[float], whisker_factor: float = config.WHISKER_FACTOR
) -> FiveNumberSummary:
    """
    Box-and-whisker numbers for one continuous column.

    Quartiles interpolate linearly between order statistics at index (n-1)*p.
    Whiskers reach the furthest data point within whisker_factor * IQR of the
    quartiles; points beyond them are outliers.
    """
    values = np.asarray(column, dtype=np.float64)
    if values.size == 0:
        raise ValueError("cannot summarize an empty column")
    if not np.all(np.isfinite(values)):
        raise ValueError("column contains non-finite values")

    q1, median, q3 = np.percentile(values, [25, 50, 75], method="linear")
    iqr = q3 - q1
    low_fence = q1 - whisker_factor * iqr
    high_fence = q3 + whisker_factor * iqr

    inside = values[(values >= low_fence) & (values <= high_fence)]
    whisker_low = float(inside.min())
    whisker_high = float(inside.max())
    beyond = (values < whisker_low) | (values > whisker_high)

    return FiveNumberSummary(
        min=float(values.min()),
        q1=float(q1),
        median=float(median),
        q3=float(q3),
        max=float(values.max()),
        whisker_low=whisker_low,
        whisker_high=whisker_high,
        outlier_count=int(np.count_nonzero(beyond)),
        count=int(values.size),
        outlier_values=tuple(float(v) for v in np.unique(values[beyond])),
    )


def pearson(a: Sequence[float], b: Sequence[float]) -> float:
    """Population Pearson r; 0 when either side is constant."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("columns differ in length")
    if x.size < 2:
        raise ValueError("need at least 2 rows for a correlation")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = np.sqrt(np.mean(dx * dx))
    sy = np.sqrt(np.mean(dy * dy))
    if sx == 0 or sy == 0:
        return 0.0
    r = np.mean(dx * dy) / (sx * sy)
    return float(np.clip(r, -1.0, 1.0))


def pearson_matrix(
    m: FeatureMatrix, labels: Optional[LabelVector] = None
) -> CorrelationMatrix:
    """
    Pearson correlations between all columns of `m` and, when given, the label.

    The diagonal is exactly 1 and constant columns correlate 0 with everything else.
    """
    data = m.values
    names = list(m.column_names)
    if labels is not None:
        if len(labels) != m.n_rows:
            raise ValueError("labels do not align with the matrix")
        data = np.column_stack([data, labels.binary])
        names.append(config.LABEL_NAME)
    if data.shape[0] < 2:
        raise ValueError("need at least 2 rows for a correlation")

    centered = data - data.mean(axis=0)
    std = np.sqrt(np.mean(centered * centered, axis=0))
    scale = np.where(std > 0, std, 1.0)
    z = centered / scale
    r = (z.T @ z) / data.shape[0]
    constant = std == 0
    r[constant, :] = 0.0
    r[:, constant] = 0.0
    r = np.clip((r + r.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return CorrelationMatrix(names=tuple(names), values=r)


def summarize_columns(m: FeatureMatrix) -> Dict[str, FiveNumberSummary]:
    """Five-number summaries of every raw (continuous) column."""
    return {
        col.source: five_number_summary(m.values[:, j])
        for j, col in enumerate(m.columns)
        if col.encoding == "raw"
    }
