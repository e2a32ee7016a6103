"""Model specs, the fit/score entry points, and importance reports."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..features.matrix import FeatureMatrix
from .models import (
    ConstantModel,
    DecisionTreeModel,
    GradientBoostingModel,
    KnnModel,
    RandomForestModel,
)

KINDS = ("majority", "decision_tree", "random_forest", "gbm", "knn")


class SchemaMismatchError(ValueError):
    """Scoring matrix columns disagree with the columns the model was fit on."""


class UnsupportedModelError(ValueError):
    """Operation not defined for this model kind (e.g. kNN importances)."""


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    trees: int = 100  # random forest
    criterion: str = "gini"
    estimators: int = 100  # gbm
    learning_rate: float = 0.1
    max_depth: Optional[int] = None  # None = kind default
    min_leaf: Optional[int] = None
    neighbors: int = 12
    feature_subsample: str = "sqrt"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.criterion not in ("gini", "entropy"):
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if not (0.0 < self.learning_rate <= 1.0):
            raise ValueError("learning_rate must be in (0, 1]")
        for name in ("trees", "estimators", "neighbors"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    def model_id(self) -> str:
        if self.kind == "majority":
            return "majority"
        if self.kind == "decision_tree":
            return f"dt_{self.criterion}"
        if self.kind == "random_forest":
            return f"rf{self.trees}_{self.criterion}"
        if self.kind == "gbm":
            return f"gbm{self.estimators}"
        return f"knn{self.neighbors}"


@dataclass(frozen=True)
class ImportanceReport:
    """(column, importance >= 0) pairs, normalized to sum 1 when any is nonzero."""

    entries: tuple[tuple[str, float], ...]

    def top(self, n: int) -> list[str]:
        ranked = sorted(self.entries, key=lambda e: (-e[1], e[0]))
        return [name for name, _ in ranked[:n]]

    def as_dict(self) -> dict[str, float]:
        return dict(self.entries)

    @property
    def total(self) -> float:
        return sum(v for _, v in self.entries)


@dataclass
class TrainedModel:
    spec: ModelSpec
    column_names: tuple[str, ...]
    column_kinds: tuple[str, ...]
    schema_fingerprint: str
    learner: object
    n_training_rows: int = 0
    degenerate: bool = False  # single-class training labels

    def _check_schema(self, X: FeatureMatrix) -> None:
        if X.schema_fingerprint == self.schema_fingerprint:
            return
        for i, (have, want) in enumerate(zip(X.column_names, self.column_names)):
            if have != want:
                raise SchemaMismatchError(
                    f"column {i}: model expects {want!r}, matrix has {have!r}"
                )
        raise SchemaMismatchError(
            f"column count mismatch: model expects {len(self.column_names)}, "
            f"matrix has {len(X.column_names)}"
        )

    def predict_proba(self, X: FeatureMatrix) -> np.ndarray:
        self._check_schema(X)
        scores = self.learner.predict_proba(X.values)
        return np.clip(scores, 0.0, 1.0)

    def importances(self) -> ImportanceReport:
        if not getattr(self.learner, "supports_importances", False):
            raise UnsupportedModelError(
                f"importances are undefined for {self.spec.kind} models"
            )
        raw = np.asarray(self.learner.importances_, dtype=np.float64)
        total = raw.sum()
        if total > 0:
            raw = raw / total
        return ImportanceReport(tuple(zip(self.column_names, raw.tolist())))


def _resolve(spec: ModelSpec):
    if spec.kind == "majority":
        return ConstantModel()
    if spec.kind == "decision_tree":
        return DecisionTreeModel(
            criterion=spec.criterion,
            max_depth=spec.max_depth,
            min_leaf=spec.min_leaf if spec.min_leaf is not None else 5,
        )
    if spec.kind == "random_forest":
        return RandomForestModel(
            n_trees=spec.trees, criterion=spec.criterion, max_depth=spec.max_depth,
            min_leaf=spec.min_leaf if spec.min_leaf is not None else 5,
            feature_subsample=spec.feature_subsample, seed=spec.seed,
        )
    if spec.kind == "gbm":
        return GradientBoostingModel(
            n_estimators=spec.estimators, learning_rate=spec.learning_rate,
            max_depth=spec.max_depth if spec.max_depth is not None else 3,
            min_leaf=spec.min_leaf if spec.min_leaf is not None else 10,
        )
    return KnnModel(k=spec.neighbors)


def fit(spec: ModelSpec, X: FeatureMatrix, y: np.ndarray) -> TrainedModel:
    """Fit `spec` on a preprocessed matrix and binary labels."""
    y = np.asarray(y)
    if X.n_rows == 0:
        raise ValueError("cannot fit on an empty matrix")
    if len(y) != X.n_rows:
        raise ValueError(f"labels ({len(y)}) and rows ({X.n_rows}) disagree")
    if X.has_missing():
        raise ValueError("matrix still has missing values; run preprocess first")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be binary 0/1")

    degenerate = bool(y.min() == y.max())
    if degenerate and spec.kind != "majority":
        warnings.warn(
            f"single-class training labels; {spec.kind} fell back to a constant model",
            RuntimeWarning,
            stacklevel=2,
        )
    learner = ConstantModel() if degenerate else _resolve(spec)
    learner.fit(X.values, y.astype(np.int64))
    return TrainedModel(
        spec=spec,
        column_names=tuple(X.column_names),
        column_kinds=tuple(c.kind for c in X.columns),
        schema_fingerprint=X.schema_fingerprint,
        learner=learner,
        n_training_rows=X.n_rows,
        degenerate=degenerate,
    )


def predict_proba(model: TrainedModel, X: FeatureMatrix) -> np.ndarray:
    return model.predict_proba(X)


def importances(model: TrainedModel) -> ImportanceReport:
    return model.importances()
