import hashlib
import json
import os
from dataclasses import dataclass
from typing import Any, Sequence, Tuple

import src.config as config
from src.models.census import AttributeSpec, LabelSpec
from src.models.ensemble import ALGORITHM1, LOGIT, BoostedEnsemble, BoostStage
from src.models.matrix import ColumnSpec, EncodingMap
from src.models.tree import DecisionTree
from src.utils.errors import ModelFormatError

MODEL_KIND = "censusboost.boosted_ensemble"


def write_json(path: str, data: Any) -> str:
    """Write JSON with sorted keys so identical data gives identical bytes."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    return path


def read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def file_digest(path: str) -> str:
    """sha256 of the raw file bytes."""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return "sha256:" + digest.hexdigest()


@dataclass(frozen=True)
class ModelBundle:
    """A fitted ensemble plus everything needed to score raw census rows."""

    ensemble: BoostedEnsemble
    encoding: EncodingMap
    columns: Tuple[ColumnSpec, ...]
    attributes: Tuple[AttributeSpec, ...]
    dropped: Tuple[str, ...]
    label: LabelSpec


def ensemble_to_dict(e: BoostedEnsemble) -> dict:
    return {
        "mode": e.mode,
        "initial_score": e.initial_score,
        "learning_rate": e.learning_rate,
        "n_estimators": e.n_estimators,
        "max_depth": e.max_depth,
        "n_features": e.n_features,
        "train_loss": list(e.train_loss),
        "train_error": list(e.train_error),
        "stages": [
            {
                "alpha": stage.alpha,
                "eps": stage.eps,
                "normalizer": stage.normalizer,
                "tree": stage.tree.to_dict(),
            }
            for stage in e.stages
        ],
    }


def ensemble_from_dict(data: dict) -> BoostedEnsemble:
    if data["mode"] not in (LOGIT, ALGORITHM1):
        raise ValueError(f"unknown mode '{data['mode']}'")
    stages = tuple(
        BoostStage(
            tree=DecisionTree.from_dict(stage["tree"]),
            alpha=float(stage["alpha"]),
            eps=stage["eps"],
            normalizer=stage["normalizer"],
        )
        for stage in data["stages"]
    )
    n_features = int(data["n_features"])
    for stage in stages:
        if stage.tree.n_features != n_features:
            raise ValueError("stage tree arity differs from the ensemble's")
    return BoostedEnsemble(
        mode=data["mode"],
        stages=stages,
        initial_score=float(data["initial_score"]),
        n_estimators=int(data["n_estimators"]),
        max_depth=int(data["max_depth"]),
        learning_rate=float(data["learning_rate"]),
        n_features=n_features,
        train_loss=tuple(data.get("train_loss", ())),
        train_error=tuple(data.get("train_error", ())),
    )


def bundle_to_dict(bundle: ModelBundle) -> dict:
    data = ensemble_to_dict(bundle.ensemble)
    data.update(
        {
            "schema_version": config.SCHEMA_VERSION,
            "kind": MODEL_KIND,
            "encoding": bundle.encoding.to_dict()["categories"],
            "columns": [
                {"source": c.source, "encoding": c.encoding, "category": c.category}
                for c in bundle.columns
            ],
            "attributes": [
                {"id": a.id, "name": a.name, "kind": a.kind} for a in bundle.attributes
            ],
            "dropped_features": list(bundle.dropped),
            "label": {
                "name": bundle.label.name,
                "negative": bundle.label.negative,
                "positive": bundle.label.positive,
            },
        }
    )
    return data


def save_model(path: str, bundle: ModelBundle) -> str:
    return write_json(path, bundle_to_dict(bundle))


def load_model(path: str) -> ModelBundle:
    """Read a model file; any structural problem raises ModelFormatError."""
    try:
        data = read_json(path)
    except OSError as e:
        raise ModelFormatError(f"cannot read model file '{path}': {e}") from e
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ModelFormatError(f"model file '{path}' is not valid JSON: {e}") from e

    if not isinstance(data, dict) or data.get("kind") != MODEL_KIND:
        raise ModelFormatError(f"'{path}' is not a censusboost model file")
    if data.get("schema_version") != config.SCHEMA_VERSION:
        raise ModelFormatError(
            f"model schema_version {data.get('schema_version')} is not supported "
            f"(expected {config.SCHEMA_VERSION})"
        )

    try:
        ensemble = ensemble_from_dict(data)
        columns = tuple(
            ColumnSpec(source=c["source"], encoding=c["encoding"], category=c["category"])
            for c in data["columns"]
        )
        if len(columns) != ensemble.n_features:
            raise ValueError("column list does not match the ensemble arity")
        return ModelBundle(
            ensemble=ensemble,
            encoding=EncodingMap.from_dict({"categories": data["encoding"]}),
            columns=columns,
            attributes=tuple(
                AttributeSpec(id=a["id"], name=a["name"], kind=a["kind"])
                for a in data["attributes"]
            ),
            dropped=tuple(data["dropped_features"]),
            label=LabelSpec(**data["label"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ModelFormatError(f"corrupted model file '{path}': {e}") from e


def digests(paths: Sequence[str]) -> dict:
    return {path: file_digest(path) for path in paths}
