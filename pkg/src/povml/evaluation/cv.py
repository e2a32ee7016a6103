"""Household-grouped cross-validation over one (task, region, model, feature set)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from ..corpus.types import Corpus, LabelValue, PovertyIndicator
from ..features.assemble import assemble, families_for, is_imputation_task
from ..features.averages import FoldRestrictedAverages, compute_all_fold_averages
from ..features.builders import (
    build_socioeconomic_features,
    build_spatial_features,
    build_survey_features,
    build_transactional_features,
)
from ..features.matrix import FeatureMatrix, hstack
from ..features.preprocess import Preprocessor
from ..learners.spec import ModelSpec, TrainedModel, fit
from .curves import DEFAULT_GRID_STEP, PrCurve, pr_curve
from .folds import FoldAssignment

Task = Union[str, PovertyIndicator]
UNDERREPORTING = "underreporting"


def task_name(task: Task) -> str:
    return task if isinstance(task, str) else task.value


def task_from_name(name: str) -> Task:
    if name == UNDERREPORTING:
        return UNDERREPORTING
    return PovertyIndicator(name)


def task_rows_and_labels(corpus: Corpus, task: Task, region: Optional[str] = None) -> tuple[list[str], np.ndarray]:
    """Eligible households (sorted) and their binary labels for one task.

    Underreporting restricts to households with a home-verification record;
    imputation tasks drop households whose indicator label is missing.
    """
    ids = []
    labels = []
    for hh_id in corpus.household_ids:
        if region is not None and corpus.households[hh_id].region_id != region:
            continue
        if hh_id not in corpus.surveys:
            continue
        if task == UNDERREPORTING:
            record = corpus.verifications.get(hh_id)
            if record is None:
                continue
            ids.append(hh_id)
            labels.append(int(record.any_discrepancy))
        else:
            value = corpus.surveys[hh_id].label(task)
            if value is LabelValue.MISSING:
                continue
            ids.append(hh_id)
            labels.append(int(value is LabelValue.LACKING))
    return ids, np.asarray(labels, dtype=np.int64)


@dataclass
class ArchiveRow:
    household_id: str
    fold: int
    score: float
    label: int


@dataclass
class CvResult:
    task: Task
    region: Optional[str]
    spec: ModelSpec
    feature_set: str
    curves: dict[int, PrCurve] = field(default_factory=dict)
    degenerate: dict[int, str] = field(default_factory=dict)
    archive: list[ArchiveRow] = field(default_factory=list)

    @property
    def pooled_curve(self) -> Optional[PrCurve]:
        if not self.archive:
            return None
        labels = [r.label for r in self.archive]
        if not any(labels):
            return None
        return pr_curve([r.score for r in self.archive], labels)


def _raw_family_matrices(corpus: Corpus, ids: list[str], task: Task) -> list[FeatureMatrix]:
    """Fold-independent raw matrices (survey only where the task may use it)."""
    mats = []
    if not is_imputation_task(task):
        mats.append(build_survey_features(corpus, ids))
    mats.append(build_transactional_features(corpus, ids))
    mats.append(build_socioeconomic_features(corpus, ids))
    return mats


def _fold_matrix(
    corpus: Corpus,
    ids: list[str],
    raw: list[FeatureMatrix],
    averages: FoldRestrictedAverages,
    train_ids: list[str],
    task: Task,
    feature_set: str,
) -> tuple[FeatureMatrix, Preprocessor]:
    spatial = build_spatial_features(corpus, ids, averages)
    combined = hstack(raw + [spatial])
    pre = Preprocessor().fit(combined, train_ids)
    return assemble([pre.transform(combined)], feature_set, task), pre


def run_cv(
    task: Task,
    region: Optional[str],
    spec: ModelSpec,
    feature_set: str,
    folds: FoldAssignment,
    corpus: Corpus,
    grid_step: float = DEFAULT_GRID_STEP,
) -> CvResult:
    """Fit on training folds, score the held-out fold, one curve per fold.

    All training-derived statistics (spatial label averages, imputation
    medians and modes) are fit on training rows only.
    """
    families_for(feature_set, task)  # validates the selector/task combination
    result = CvResult(task=task, region=region, spec=spec, feature_set=feature_set)
    ids, labels = task_rows_and_labels(corpus, task, region)
    if not ids:
        result.degenerate[-1] = "no eligible households for task"
        return result
    label_of = dict(zip(ids, labels.tolist()))
    raw = _raw_family_matrices(corpus, ids, task)

    for fold in range(folds.k):
        train_ids = [h for h in ids if folds.fold_of(h) != fold]
        test_ids = [h for h in ids if folds.fold_of(h) == fold]
        if not train_ids or not test_ids:
            result.degenerate[fold] = "empty training or held-out set"
            continue
        train_labels = np.array([label_of[h] for h in train_ids])
        test_labels = np.array([label_of[h] for h in test_ids])
        if train_labels.min() == train_labels.max():
            result.degenerate[fold] = "single-class training labels"
            continue
        if test_labels.max() == 0:
            result.degenerate[fold] = "no positive held-out labels"
            continue
        averages = compute_all_fold_averages(corpus, train_ids, skip_unlabeled=True)
        matrix, _pre = _fold_matrix(corpus, ids, raw, averages, train_ids, task, feature_set)
        position = {h: i for i, h in enumerate(ids)}
        train_m = matrix.select_rows(np.array([position[h] for h in train_ids]))
        test_m = matrix.select_rows(np.array([position[h] for h in test_ids]))
        model = fit(spec, train_m, train_labels)
        scores = model.predict_proba(test_m)
        result.curves[fold] = pr_curve(scores, test_labels, grid_step)
        result.archive.extend(
            ArchiveRow(h, fold, float(s), int(l))
            for h, s, l in zip(test_ids, scores, test_labels)
        )
    return result


@dataclass
class TaskPipeline:
    """A fully fitted scoring pipeline: averages + preprocessing + model.

    Built on one task's training rows; can score any household set of the
    same corpus through the identical feature path.
    """

    task: Task
    feature_set: str
    region: Optional[str]
    spec: ModelSpec
    averages: FoldRestrictedAverages
    preprocessor: Preprocessor
    model: TrainedModel
    training_ids: tuple[str, ...]

    def score(self, corpus: Corpus, household_ids: list[str]) -> np.ndarray:
        raw = _raw_family_matrices(corpus, household_ids, self.task)
        spatial = build_spatial_features(corpus, household_ids, self.averages)
        combined = hstack(raw + [spatial])
        matrix = assemble([self.preprocessor.transform(combined)], self.feature_set, self.task)
        return self.model.predict_proba(matrix)


def pipeline_to_dict(pipeline: TaskPipeline) -> dict:
    import dataclasses

    from ..learners.io import model_to_dict

    return {
        "task": task_name(pipeline.task),
        "feature_set": pipeline.feature_set,
        "region": pipeline.region,
        "spec": dataclasses.asdict(pipeline.spec),
        "averages": pipeline.averages.to_dict(),
        "preprocessor": pipeline.preprocessor.to_dict(),
        "model": model_to_dict(pipeline.model),
        "n_training_rows": len(pipeline.training_ids),
    }


def pipeline_from_dict(data: dict) -> TaskPipeline:
    from ..learners.io import model_from_dict

    return TaskPipeline(
        task=task_from_name(data["task"]),
        feature_set=data["feature_set"],
        region=data["region"],
        spec=ModelSpec(**data["spec"]),
        averages=FoldRestrictedAverages.from_dict(data["averages"]),
        preprocessor=Preprocessor.from_dict(data["preprocessor"]),
        model=model_from_dict(data["model"]),
        training_ids=(),  # ids are not persisted; scoring does not need them
    )


def fit_task_pipeline(
    corpus: Corpus,
    task: Task,
    spec: ModelSpec,
    feature_set: str,
    region: Optional[str] = None,
) -> TaskPipeline:
    """Fit one final model on every eligible row of the task."""
    ids, labels = task_rows_and_labels(corpus, task, region)
    if not ids:
        raise ValueError(f"no eligible households for task {task_name(task)}")
    averages = compute_all_fold_averages(corpus, ids, skip_unlabeled=True)
    raw = _raw_family_matrices(corpus, ids, task)
    spatial = build_spatial_features(corpus, ids, averages)
    combined = hstack(raw + [spatial])
    pre = Preprocessor().fit(combined, ids)
    matrix = assemble([pre.transform(combined)], feature_set, task)
    model = fit(spec, matrix, labels)
    return TaskPipeline(
        task=task, feature_set=feature_set, region=region, spec=spec,
        averages=averages, preprocessor=pre, model=model, training_ids=tuple(ids),
    )
