"""Missing-value imputation and dummy encoding.

Statistics (medians, modal classes, level vocabularies) are fit on an
explicit set of training rows and then applied to any rows, so held-out
data can never influence them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .matrix import Column, FeatureMatrix


@dataclass
class PreprocessReport:
    all_missing_columns: list[str] = field(default_factory=list)
    unseen_level_cells: int = 0


class Preprocessor:
    """Fit imputation statistics on training rows, expand categoricals on transform."""

    def __init__(self) -> None:
        self.fitted = False
        self.medians_: dict[str, float] = {}
        self.modes_: dict[str, int] = {}  # categorical modal level index
        self.levels_: dict[str, tuple[str, ...]] = {}  # observed levels, sorted
        self.report = PreprocessReport()
        self._columns: tuple[Column, ...] = ()

    def fit(self, matrix: FeatureMatrix, training_rows: Sequence[str] | None = None) -> "Preprocessor":
        if training_rows is None:
            row_idx = np.arange(matrix.n_rows)
        else:
            wanted = set(training_rows)
            row_idx = np.array([i for i, r in enumerate(matrix.row_ids) if r in wanted], dtype=int)
        mask = matrix.missing_mask
        self._columns = matrix.columns
        for j, col in enumerate(matrix.columns):
            cells = matrix.values[row_idx, j]
            observed = cells if mask is None else cells[~mask[row_idx, j]]
            if col.kind == "categorical":
                if observed.size == 0:
                    self.report.all_missing_columns.append(col.name)
                    self.modes_[col.name] = -1
                    self.levels_[col.name] = ()
                    continue
                codes, counts = np.unique(observed.astype(int), return_counts=True)
                best = counts.max()
                # tie-break: lexicographically smallest level among the modal ones
                tied = [int(c) for c, n in zip(codes, counts) if n == best]
                self.modes_[col.name] = min(tied, key=lambda c: col.levels[c])
                observed_levels = sorted(col.levels[int(c)] for c in codes)
                self.levels_[col.name] = tuple(observed_levels)
            elif col.kind == "numeric":
                if observed.size == 0:
                    self.report.all_missing_columns.append(col.name)
                    self.medians_[col.name] = 0.0
                else:
                    self.medians_[col.name] = float(np.median(observed))
        self.fitted = True
        return self

    def transform(self, matrix: FeatureMatrix) -> FeatureMatrix:
        if not self.fitted:
            raise RuntimeError("fit before transform")
        if matrix.columns != self._columns:
            raise ValueError("matrix columns differ from the fitted schema")
        mask = matrix.missing_mask
        out_columns: list[Column] = []
        out_values: list[np.ndarray] = []
        for j, col in enumerate(matrix.columns):
            cells = matrix.values[:, j].copy()
            cell_missing = np.zeros(matrix.n_rows, dtype=bool) if mask is None else mask[:, j].copy()
            if col.kind == "categorical":
                levels = self.levels_[col.name]
                if not levels:
                    continue  # no observed training values; reported at fit time
                cells[cell_missing] = self.modes_[col.name]
                for level in levels:
                    code = col.levels.index(level)
                    out_columns.append(Column(f"{col.name}={level}", col.family, "indicator"))
                    out_values.append((cells == code).astype(np.float64))
                known = {col.levels.index(level) for level in levels}
                self.report.unseen_level_cells += int(
                    np.sum(~np.isin(cells.astype(int), list(known)))
                )
            else:
                if col.kind == "numeric":
                    cells[cell_missing] = self.medians_[col.name]
                else:  # indicator columns are complete by construction
                    cells[cell_missing] = 0.0
                out_columns.append(col)
                out_values.append(cells)
        values = np.column_stack(out_values) if out_columns else np.zeros((matrix.n_rows, 0))
        return FeatureMatrix(
            row_ids=matrix.row_ids,
            columns=tuple(out_columns),
            values=values,
            missing_mask=None,
            skipped_rows=matrix.skipped_rows,
        )


    def to_dict(self) -> dict:
        return {
            "medians": dict(self.medians_),
            "modes": dict(self.modes_),
            "levels": {k: list(v) for k, v in self.levels_.items()},
            "columns": [
                {"name": c.name, "family": c.family, "kind": c.kind, "levels": list(c.levels)}
                for c in self._columns
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Preprocessor":
        pre = cls()
        pre.medians_ = dict(data["medians"])
        pre.modes_ = {k: int(v) for k, v in data["modes"].items()}
        pre.levels_ = {k: tuple(v) for k, v in data["levels"].items()}
        pre._columns = tuple(
            Column(c["name"], c["family"], c["kind"], tuple(c["levels"]))
            for c in data["columns"]
        )
        pre.fitted = True
        return pre


def preprocess(matrix: FeatureMatrix, training_rows: Sequence[str] | None = None) -> FeatureMatrix:
    """Impute and dummy-encode; statistics come from `training_rows` (default: all rows)."""
    return Preprocessor().fit(matrix, training_rows).transform(matrix)
