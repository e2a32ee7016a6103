"""Dense feature matrix with per-column family/kind tags and a missing mask."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FAMILIES = ("survey", "transactional", "spatial", "socioeconomic")
# Canonical family order used when assembling multi-family matrices.
FAMILY_ORDER = {family: i for i, family in enumerate(FAMILIES)}


class AlignmentError(ValueError):
    """Row ids or order disagree between matrices being combined."""


@dataclass(frozen=True)
class Column:
    name: str
    family: str
    kind: str  # "numeric" | "categorical" | "indicator"
    levels: tuple[str, ...] = ()  # categorical level vocabulary; cells hold level indices

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.kind not in ("numeric", "categorical", "indicator"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.kind == "categorical" and not self.levels:
            raise ValueError(f"{self.name}: categorical column needs levels")


@dataclass
class FeatureMatrix:
    row_ids: tuple[str, ...]
    columns: tuple[Column, ...]
    values: np.ndarray
    missing_mask: np.ndarray | None = None  # None once preprocessing has run
    skipped_rows: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.row_ids), len(self.columns)):
            raise ValueError(
                f"values shape {self.values.shape} != ({len(self.row_ids)}, {len(self.columns)})"
            )
        if self.missing_mask is not None:
            self.missing_mask = np.asarray(self.missing_mask, dtype=bool)
            if self.missing_mask.shape != self.values.shape:
                raise ValueError("missing mask shape mismatch")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate column names: {dupes}")

    @property
    def n_rows(self) -> int:
        return len(self.row_ids)

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def schema_fingerprint(self) -> str:
        payload = "|".join(f"{c.name}:{c.kind}" for c in self.columns)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

    def has_missing(self) -> bool:
        return self.missing_mask is not None and bool(self.missing_mask.any())

    def select_families(self, families: tuple[str, ...]) -> "FeatureMatrix":
        keep = [i for i, c in enumerate(self.columns) if c.family in families]
        return FeatureMatrix(
            row_ids=self.row_ids,
            columns=tuple(self.columns[i] for i in keep),
            values=self.values[:, keep].copy(),
            missing_mask=None if self.missing_mask is None else self.missing_mask[:, keep].copy(),
            skipped_rows=self.skipped_rows,
        )

    def select_rows(self, indices: np.ndarray) -> "FeatureMatrix":
        indices = np.asarray(indices)
        return FeatureMatrix(
            row_ids=tuple(self.row_ids[int(i)] for i in indices),
            columns=self.columns,
            values=self.values[indices].copy(),
            missing_mask=None if self.missing_mask is None else self.missing_mask[indices].copy(),
        )

    def equals(self, other: "FeatureMatrix") -> bool:
        if self.row_ids != other.row_ids or self.columns != other.columns:
            return False
        if not np.array_equal(self.values, other.values, equal_nan=True):
            return False
        a = self.missing_mask if self.missing_mask is not None else np.zeros_like(self.values, dtype=bool)
        b = other.missing_mask if other.missing_mask is not None else np.zeros_like(other.values, dtype=bool)
        return np.array_equal(a, b)


def hstack(matrices: list[FeatureMatrix]) -> FeatureMatrix:
    """Column-wise concatenation; all inputs must share row ids and order."""
    if not matrices:
        raise ValueError("no matrices to combine")
    base = matrices[0].row_ids
    for m in matrices[1:]:
        if m.row_ids != base:
            raise AlignmentError("row ids differ between matrices")
    columns = tuple(c for m in matrices for c in m.columns)
    values = np.hstack([m.values for m in matrices]) if columns else np.zeros((len(base), 0))
    masks = [
        m.missing_mask if m.missing_mask is not None else np.zeros_like(m.values, dtype=bool)
        for m in matrices
    ]
    mask = np.hstack(masks) if columns else None
    if mask is not None and not mask.any():
        mask = None
    return FeatureMatrix(row_ids=base, columns=columns, values=values, missing_mask=mask)


def dump_matrix(matrix: FeatureMatrix, path: str | Path) -> None:
    """Delimited dump: `name:family:kind` header, one numeric row per household."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        header = ["row_id"] + [f"{c.name}:{c.family}:{c.kind}" for c in matrix.columns]
        fh.write(",".join(header) + "\n")
        for i, row_id in enumerate(matrix.row_ids):
            cells = [row_id]
            for j in range(len(matrix.columns)):
                if matrix.missing_mask is not None and matrix.missing_mask[i, j]:
                    cells.append("")
                else:
                    cells.append(repr(float(matrix.values[i, j])))
            fh.write(",".join(cells) + "\n")
