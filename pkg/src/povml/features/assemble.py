"""Feature-set selection and column-wise assembly."""

from __future__ import annotations

from typing import Union

from ..corpus.types import PovertyIndicator
from .matrix import FAMILY_ORDER, AlignmentError, FeatureMatrix, hstack

FEATURE_SETS = ("geographic", "socioeconomic", "transactional", "survey", "combined")

Task = Union[str, PovertyIndicator]  # "underreporting" or an imputation indicator

_SELECTOR_FAMILIES = {
    "geographic": ("spatial",),
    "socioeconomic": ("socioeconomic",),
    "transactional": ("transactional",),
    "survey": ("survey",),
}


def is_imputation_task(task: Task) -> bool:
    return isinstance(task, PovertyIndicator)


def families_for(selector: str, task: Task) -> tuple[str, ...]:
    """Families a feature set may draw on; imputation never sees survey answers."""
    if selector not in FEATURE_SETS:
        raise ValueError(f"unknown feature set {selector!r}; expected one of {FEATURE_SETS}")
    if is_imputation_task(task) and selector == "survey":
        raise ValueError("survey features cannot be used for imputation tasks")
    if selector == "combined":
        if is_imputation_task(task):
            return ("transactional", "spatial", "socioeconomic")
        return ("survey", "transactional", "spatial", "socioeconomic")
    return _SELECTOR_FAMILIES[selector]


def assemble(matrices: list[FeatureMatrix], selector: str, task: Task = "underreporting") -> FeatureMatrix:
    """Concatenate the selected families in canonical family order.

    All matrices must share row ids and order; raises AlignmentError otherwise.
    """
    allowed = families_for(selector, task)
    picked: list[tuple[int, FeatureMatrix]] = []
    for m in matrices:
        sub = m.select_families(allowed)
        if sub.columns:
            families = {c.family for c in sub.columns}
            key = min(FAMILY_ORDER[f] for f in families)
            picked.append((key, sub))
    if not picked:
        base = matrices[0].row_ids if matrices else ()
        raise ValueError(f"no columns available for feature set {selector!r} (rows: {len(base)})")
    picked.sort(key=lambda pair: pair[0])
    try:
        return hstack([m for _, m in picked])
    except AlignmentError:
        raise AlignmentError(
            f"matrices passed to assemble({selector!r}) have mismatched rows"
        ) from None
