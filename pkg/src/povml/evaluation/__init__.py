"""Grouped cross-validation, PR curves, evaluation grid, and analytics."""

from .analytics import (
    BenefitShareHistogram,
    ProgramIndicatorRow,
    ProgramIndicatorTable,
    QuestionDirectionRow,
    benefit_share_histogram,
    discrepancy_direction_report,
    program_indicator_table,
)
from .curves import (
    DEFAULT_GRID_STEP,
    BaselineReferences,
    PrCurve,
    PrPoint,
    baseline_references,
    pr_curve,
)
from .cv import (
    UNDERREPORTING,
    ArchiveRow,
    CvResult,
    TaskPipeline,
    fit_task_pipeline,
    run_cv,
    task_from_name,
    task_name,
    task_rows_and_labels,
)
from .folds import FoldAssignment, make_grouped_folds
from .grid import EvalGrid, GridKey

__all__ = [
    "ArchiveRow",
    "BaselineReferences",
    "BenefitShareHistogram",
    "CvResult",
    "DEFAULT_GRID_STEP",
    "EvalGrid",
    "FoldAssignment",
    "GridKey",
    "PrCurve",
    "PrPoint",
    "ProgramIndicatorRow",
    "ProgramIndicatorTable",
    "QuestionDirectionRow",
    "TaskPipeline",
    "UNDERREPORTING",
    "baseline_references",
    "benefit_share_histogram",
    "discrepancy_direction_report",
    "fit_task_pipeline",
    "make_grouped_folds",
    "pr_curve",
    "program_indicator_table",
    "run_cv",
    "task_from_name",
    "task_name",
    "task_rows_and_labels",
]
