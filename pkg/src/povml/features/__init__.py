"""Household feature engineering: family builders, imputation, assembly."""

from .assemble import FEATURE_SETS, assemble, families_for, is_imputation_task
from .averages import FoldRestrictedAverages, compute_all_fold_averages, compute_fold_averages
from .builders import (
    build_socioeconomic_features,
    build_spatial_features,
    build_survey_features,
    build_transactional_features,
)
from .matrix import AlignmentError, Column, FeatureMatrix, dump_matrix, hstack
from .preprocess import Preprocessor, preprocess

__all__ = [
    "AlignmentError",
    "Column",
    "FEATURE_SETS",
    "FeatureMatrix",
    "FoldRestrictedAverages",
    "Preprocessor",
    "assemble",
    "build_socioeconomic_features",
    "build_spatial_features",
    "build_survey_features",
    "build_transactional_features",
    "compute_all_fold_averages",
    "compute_fold_averages",
    "dump_matrix",
    "families_for",
    "hstack",
    "is_imputation_task",
    "preprocess",
]
