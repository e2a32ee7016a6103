"""Household-grouped cross-validation folds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class FoldAssignment:
    """k folds over households; every record of a household shares its fold."""

    k: int
    assignment: dict[str, int]

    def fold_of(self, household_id: str) -> int:
        return self.assignment[household_id]

    def households_in(self, fold: int) -> list[str]:
        return sorted(h for h, f in self.assignment.items() if f == fold)

    def fold_sizes(self) -> list[int]:
        sizes = [0] * self.k
        for f in self.assignment.values():
            sizes[f] += 1
        return sizes


def make_grouped_folds(household_ids: Sequence[str], k: int, seed: int) -> FoldAssignment:
    """Seeded uniform shuffle, then round-robin assignment; sizes differ by <= 1."""
    ids = sorted(set(household_ids))
    if k < 2:
        raise ValueError(f"need at least 2 folds, got {k}")
    if k > len(ids):
        raise ValueError(f"{k} folds but only {len(ids)} households")
    rng = np.random.default_rng(seed)
    shuffled = [ids[i] for i in rng.permutation(len(ids))]
    return FoldAssignment(k=k, assignment={h: i % k for i, h in enumerate(shuffled)})
