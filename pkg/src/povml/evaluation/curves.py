"""Precision-recall curves over a fixed threshold grid, plus naive baselines."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

DEFAULT_GRID_STEP = 0.01


@dataclass(frozen=True)
class PrPoint:
    threshold: float
    proportion_flagged: float
    precision: Optional[float]  # None when nothing is flagged
    recall: float


@dataclass(frozen=True)
class PrCurve:
    points: tuple[PrPoint, ...]
    prevalence: float

    def precision_at_flagged(self, proportion: float) -> Optional[float]:
        """Precision at the grid point whose flagged share is nearest `proportion`."""
        defined = [p for p in self.points if p.precision is not None]
        if not defined:
            return None
        best = min(defined, key=lambda p: (abs(p.proportion_flagged - proportion), p.threshold))
        return best.precision

    def precision_area(self, max_flagged: float = 0.5) -> float:
        """Trapezoid area under precision over flagged share in (0, max_flagged]."""
        pts = sorted(
            ((p.proportion_flagged, p.precision) for p in self.points
             if p.precision is not None and p.proportion_flagged <= max_flagged),
            key=lambda t: t[0],
        )
        area = 0.0
        for (q0, p0), (q1, p1) in zip(pts, pts[1:]):
            area += (q1 - q0) * (p0 + p1) / 2.0
        return area


def _threshold_grid(grid_step: float) -> list[float]:
    if not (0.0 < grid_step <= 1.0):
        raise ValueError(f"grid_step must be in (0, 1], got {grid_step}")
    count = int(math.floor(1.0 / grid_step + 1e-9))
    grid = [i * grid_step for i in range(count + 1)]
    if grid[-1] < 1.0 - 1e-12:
        grid.append(1.0)
    return grid


def pr_curve(scores: Sequence[float], labels: Sequence[int], grid_step: float = DEFAULT_GRID_STEP) -> PrCurve:
    """Flag score >= t for each t on the grid {0, step, ..., 1}.

    Precision is undefined (None) where nothing is flagged. Raises when no
    positive labels exist, since recall has no denominator.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.size == 0 or scores.shape != labels.shape:
        raise ValueError("scores and labels must be equal-length and nonempty")
    n = scores.size
    positives = int(np.count_nonzero(labels))
    if positives == 0:
        raise ValueError("pr_curve undefined without positive labels")

    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = np.asarray(labels)[order].astype(np.int64)
    # suffix_pos[i] = positives among scores[i:]
    suffix_pos = np.concatenate([np.cumsum(sorted_labels[::-1])[::-1], [0]])

    points = []
    for t in _threshold_grid(grid_step):
        cut = int(np.searchsorted(sorted_scores, t, side="left"))
        flagged = n - cut
        tp = int(suffix_pos[cut])
        points.append(PrPoint(
            threshold=t,
            proportion_flagged=flagged / n,
            precision=(tp / flagged) if flagged else None,
            recall=tp / positives,
        ))
    return PrCurve(points=tuple(points), prevalence=positives / n)


@dataclass(frozen=True)
class BaselineReferences:
    """Naive references: flat precision at prevalence, diagonal recall."""

    prevalence: float

    def precision_at(self, proportion_flagged: float) -> float:
        return self.prevalence

    def recall_at(self, proportion_flagged: float) -> float:
        return proportion_flagged

    def grid(self, step: float = DEFAULT_GRID_STEP) -> list[tuple[float, float, float]]:
        return [(q, self.precision_at(q), self.recall_at(q)) for q in _threshold_grid(step)]


def baseline_references(prevalence: float) -> BaselineReferences:
    if not (0.0 < prevalence <= 1.0):
        raise ValueError(f"prevalence must be in (0, 1], got {prevalence}")
    return BaselineReferences(prevalence=prevalence)
