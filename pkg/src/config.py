import json
import math
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

from src.utils.errors import ConfigurationError

# Artifact format
SCHEMA_VERSION = 1
PACKAGE_VERSION = "0.1.0"

# Adult census schema: (id, name, kind)
ADULT_ATTRIBUTES = (
    ("F1", "age", "continuous"),
    ("F2", "workclass", "categorical"),
    ("F3", "fnlwgt", "continuous"),
    ("F4", "education", "categorical"),
    ("F5", "education-num", "continuous"),
    ("F6", "marital-status", "categorical"),
    ("F7", "occupation", "categorical"),
    ("F8", "relationship", "categorical"),
    ("F9", "race", "categorical"),
    ("F10", "sex", "categorical"),
    ("F11", "capital-gain", "continuous"),
    ("F12", "capital-loss", "continuous"),
    ("F13", "hours-per-week", "continuous"),
    ("F14", "native-country", "categorical"),
)
LABEL_NAME = "income"
NEGATIVE_LABEL = "<=50K"
POSITIVE_LABEL = ">50K"
MISSING_MARKER = "?"
COMMENT_PREFIX = "|"

# Preprocessing
DROPPED_FEATURES = ("F9", "F14")
SPLIT_RATIO = 0.8
SEED = 42
COVERAGE_RETRIES = 100
SEED_ENV_VAR = "CENSUSBOOST_SEED"

# Boosting (the deployed model)
MODE = "logit"
MODES = ("logit", "algorithm1")
N_ESTIMATORS = 250
MAX_DEPTH = 4
LEARNING_RATE = 0.1
MIN_SAMPLES_SPLIT = 2
SIGMOID_CLIP = 30.0  # |F| beyond this takes the asymptotic sigmoid branch
EPS_FLOOR = 1e-10  # stand-in error for a perfect algorithm1 stage

# Extra Trees
EXTRA_TREES_N_TREES = 100
EXTRA_TREES_MIN_SAMPLES_SPLIT = 2
ELIMINATE_LOWEST = 2

# Grid search
CV_FOLDS = 3
GRID_N_ESTIMATORS = (100, 150, 200, 250, 300)
GRID_MAX_DEPTH = (2, 3, 4, 5)
GRID_LEARNING_RATE = (0.1,)

# Box plots
WHISKER_FACTOR = 1.5

# Fit diagnosis
GOOD_FIT_SLACK = 0.005
OVERFIT_GAP = 0.05

# Parallelism
N_JOBS = 1

# Plots
SVG_HASH_SALT = "censusboost"
FIGURE_SIZE = (6.0, 4.5)


def default_k_features(n_columns: int) -> int:
    """Extra-Trees features per split: ceil(sqrt(p))."""
    return max(1, math.ceil(math.sqrt(n_columns)))


@dataclass
class RunConfig:
    """Resolved settings for one CLI invocation."""

    seed: int = SEED
    mode: str = MODE
    n_estimators: int = N_ESTIMATORS
    max_depth: int = MAX_DEPTH
    learning_rate: float = LEARNING_RATE
    min_samples_split: int = MIN_SAMPLES_SPLIT
    ratio: float = SPLIT_RATIO
    coverage_retries: int = COVERAGE_RETRIES
    drop: List[str] = field(default_factory=lambda: list(DROPPED_FEATURES))
    k: int = CV_FOLDS
    grid_n_estimators: List[int] = field(
        default_factory=lambda: list(GRID_N_ESTIMATORS)
    )
    grid_max_depth: List[int] = field(default_factory=lambda: list(GRID_MAX_DEPTH))
    grid_learning_rate: List[float] = field(
        default_factory=lambda: list(GRID_LEARNING_RATE)
    )
    n_trees: int = EXTRA_TREES_N_TREES
    k_features: Optional[int] = None
    eliminate: int = ELIMINATE_LOWEST
    repeats: int = 1
    n_jobs: int = N_JOBS

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def validate(self) -> "RunConfig":
        """Range-check every setting; raises ConfigurationError."""
        if self.mode not in MODES:
            raise ConfigurationError(
                f"mode must be one of {', '.join(MODES)}, got '{self.mode}'"
            )
        if not 0.0 < self.ratio < 1.0:
            raise ConfigurationError(f"ratio must be in (0, 1), got {self.ratio}")
        if self.k < 2:
            raise ConfigurationError(f"k must be at least 2, got {self.k}")
        if self.n_estimators < 1:
            raise ConfigurationError("n_estimators must be at least 1")
        if self.max_depth < 1:
            raise ConfigurationError("max_depth must be at least 1")
        if not 0.0 <= self.learning_rate <= 1.0:
            raise ConfigurationError(
                f"learning rate must be in [0, 1], got {self.learning_rate}"
            )
        if self.min_samples_split < 2:
            raise ConfigurationError("min_samples_split must be at least 2")
        if self.n_trees < 1:
            raise ConfigurationError("n_trees must be at least 1")
        if self.k_features is not None and self.k_features < 1:
            raise ConfigurationError("k_features must be at least 1")
        if self.eliminate < 0:
            raise ConfigurationError("eliminate must be non-negative")
        if self.repeats < 1:
            raise ConfigurationError("repeats must be at least 1")
        if self.coverage_retries < 1:
            raise ConfigurationError("coverage_retries must be at least 1")
        if self.n_jobs == 0:
            raise ConfigurationError("n_jobs must be non-zero")
        return self


def read_config_file(path: str) -> Dict[str, Any]:
    """Read a JSON config file whose keys are RunConfig field names."""
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigurationError(f"cannot read config file '{path}': {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"config file '{path}' is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigurationError(f"config file '{path}' must hold a JSON object")

    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigurationError(
            f"unknown keys in config file '{path}': {', '.join(unknown)}"
        )
    return data


def seed_from_env() -> Optional[int]:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigurationError(f"{SEED_ENV_VAR} must be an integer, got '{raw}'") from e


def build_run_config(
    overrides: Dict[str, Any], config_path: Optional[str] = None
) -> RunConfig:
    """
    Resolve settings with precedence: flags > config file > CENSUSBOOST_SEED > defaults.

    Args:
        overrides: Flag values; None means "not given on the command line"
        config_path: Optional JSON config file

    Returns:
        A validated RunConfig
    """
    values: Dict[str, Any] = {}

    env_seed = seed_from_env()
    if env_seed is not None:
        values["seed"] = env_seed

    if config_path:
        values.update(read_config_file(config_path))

    values.update({key: val for key, val in overrides.items() if val is not None})

    try:
        config = RunConfig(**_check_types(values))
    except TypeError as e:
        raise ConfigurationError(f"invalid configuration: {e}") from e
    return config.validate()


# Field kinds for values read from JSON; list fields name their element kind
_FIELD_KINDS: Dict[str, Any] = {
    "seed": int,
    "mode": str,
    "n_estimators": int,
    "max_depth": int,
    "learning_rate": float,
    "min_samples_split": int,
    "ratio": float,
    "coverage_retries": int,
    "drop": [str],
    "k": int,
    "grid_n_estimators": [int],
    "grid_max_depth": [int],
    "grid_learning_rate": [float],
    "n_trees": int,
    "k_features": int,
    "eliminate": int,
    "repeats": int,
    "n_jobs": int,
}


def _coerce(name: str, value: Any, kind: type) -> Any:
    # bool is an int subclass; JSON true/false is never a valid setting
    if isinstance(value, bool):
        raise ConfigurationError(f"'{name}' must be {kind.__name__}, got {value!r}")
    if kind is float and isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, kind):
        return value
    raise ConfigurationError(
        f"'{name}' must be {kind.__name__}, got {type(value).__name__} {value!r}"
    )


def _check_types(values: Dict[str, Any]) -> Dict[str, Any]:
    """Check each setting against its field kind; ints widen to floats."""
    checked: Dict[str, Any] = {}
    for name, value in values.items():
        kind = _FIELD_KINDS.get(name)
        if kind is None or (name == "k_features" and value is None):
            checked[name] = value
        elif isinstance(kind, list):
            if not isinstance(value, (list, tuple)):
                raise ConfigurationError(f"'{name}' must be a list, got {value!r}")
            checked[name] = [_coerce(name, v, kind[0]) for v in value]
        else:
            checked[name] = _coerce(name, value, kind)
    return checked


def grid_from_file(path: str) -> Tuple[List[int], List[int], List[float]]:
    """Read a grid file {"n_estimators": [...], "max_depth": [...], "learning_rate": [...]}."""
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigurationError(f"cannot read grid file '{path}': {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"grid file '{path}' is not valid JSON: {e}") from e

    if not isinstance(data, dict):
        raise ConfigurationError(f"grid file '{path}' must hold a JSON object")
    try:
        n_estimators = [int(v) for v in data["n_estimators"]]
        max_depth = [int(v) for v in data["max_depth"]]
        learning_rate = [float(v) for v in data.get("learning_rate", GRID_LEARNING_RATE)]
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigurationError(f"malformed grid file '{path}': {e}") from e
    return n_estimators, max_depth, learning_rate
