"""The evaluation grid: one PR curve (or degenerate marker) per job/fold."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional

from .curves import PrCurve
from .cv import ArchiveRow, CvResult, task_name

EXPORT_COLUMNS = ("region", "task", "model", "feature_set", "fold",
                  "threshold", "proportion_flagged", "precision", "recall")


@dataclass(frozen=True)
class GridKey:
    region: str
    task: str
    model: str
    feature_set: str
    fold: int


@dataclass
class EvalGrid:
    curves: dict[GridKey, PrCurve] = field(default_factory=dict)
    degenerate: dict[GridKey, str] = field(default_factory=dict)
    archive: dict[GridKey, list[ArchiveRow]] = field(default_factory=dict)

    def add_result(self, result: CvResult) -> None:
        region = result.region if result.region is not None else "all"
        base = dict(region=region, task=task_name(result.task),
                    model=result.spec.model_id(), feature_set=result.feature_set)
        for fold, curve in result.curves.items():
            key = GridKey(fold=fold, **base)
            if key in self.curves or key in self.degenerate:
                raise ValueError(f"duplicate grid entry {key}")
            self.curves[key] = curve
        for fold, reason in result.degenerate.items():
            key = GridKey(fold=fold, **base)
            if key in self.curves or key in self.degenerate:
                raise ValueError(f"duplicate grid entry {key}")
            self.degenerate[key] = reason
        by_fold: dict[int, list[ArchiveRow]] = {}
        for row in result.archive:
            by_fold.setdefault(row.fold, []).append(row)
        for fold, rows in by_fold.items():
            self.archive[GridKey(fold=fold, **base)] = rows

    def curve_rows(self) -> Iterator[list]:
        """One export row per curve point; undefined precision written as NA."""
        for key in sorted(self.curves, key=lambda k: (k.region, k.task, k.model, k.feature_set, k.fold)):
            for pt in self.curves[key].points:
                yield [key.region, key.task, key.model, key.feature_set, key.fold,
                       repr(pt.threshold), repr(pt.proportion_flagged),
                       "NA" if pt.precision is None else repr(pt.precision),
                       repr(pt.recall)]

    def write_curves_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(EXPORT_COLUMNS)
            writer.writerows(self.curve_rows())
        return path

    def write_degenerate_csv(self, path: str | Path) -> Optional[Path]:
        if not self.degenerate:
            return None
        path = Path(path)
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["region", "task", "model", "feature_set", "fold", "reason"])
            for key in sorted(self.degenerate, key=lambda k: (k.region, k.task, k.model, k.feature_set, k.fold)):
                writer.writerow([key.region, key.task, key.model, key.feature_set,
                                 key.fold, self.degenerate[key]])
        return path

    def write_archive_csv(self, path: str | Path) -> Path:
        path = Path(path)
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["region", "task", "model", "feature_set", "fold",
                             "household_id", "score", "label"])
            for key in sorted(self.archive, key=lambda k: (k.region, k.task, k.model, k.feature_set, k.fold)):
                for row in self.archive[key]:
                    writer.writerow([key.region, key.task, key.model, key.feature_set,
                                     key.fold, row.household_id, repr(row.score), row.label])
        return path
