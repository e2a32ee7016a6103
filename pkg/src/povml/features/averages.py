"""Leakage-safe spatial label averages, restricted to training rows."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

from ..corpus.types import Corpus, LabelValue, PovertyIndicator


@dataclass(frozen=True)
class FoldRestrictedAverages:
    """Per-indicator block/locality label means with a block -> locality -> global
    fallback chain; computed exclusively from the identified training rows."""

    indicators: tuple[PovertyIndicator, ...]
    block_means: dict[PovertyIndicator, dict[str, float]]
    locality_means: dict[PovertyIndicator, dict[str, float]]
    global_means: dict[PovertyIndicator, float]
    training_fingerprint: str

    def lookup(self, corpus: Corpus, household_id: str, indicator: PovertyIndicator) -> float:
        hh = corpus.households[household_id]
        if hh.block_id is not None:
            mean = self.block_means[indicator].get(hh.block_id)
            if mean is not None:
                return mean
        if hh.locality_id is not None:
            mean = self.locality_means[indicator].get(hh.locality_id)
            if mean is not None:
                return mean
        return self.global_means[indicator]

    def to_dict(self) -> dict:
        return {
            "indicators": [ind.value for ind in self.indicators],
            "block_means": {ind.value: dict(m) for ind, m in self.block_means.items()},
            "locality_means": {ind.value: dict(m) for ind, m in self.locality_means.items()},
            "global_means": {ind.value: v for ind, v in self.global_means.items()},
            "training_fingerprint": self.training_fingerprint,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FoldRestrictedAverages":
        return cls(
            indicators=tuple(PovertyIndicator(v) for v in data["indicators"]),
            block_means={PovertyIndicator(k): dict(v) for k, v in data["block_means"].items()},
            locality_means={PovertyIndicator(k): dict(v) for k, v in data["locality_means"].items()},
            global_means={PovertyIndicator(k): v for k, v in data["global_means"].items()},
            training_fingerprint=data["training_fingerprint"],
        )


def _fingerprint(training_rows: Iterable[str]) -> str:
    joined = "|".join(sorted(training_rows))
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()[:16]


def compute_fold_averages(
    corpus: Corpus,
    indicator: PovertyIndicator,
    training_rows: Sequence[str],
) -> FoldRestrictedAverages:
    """Averages of one indicator over blocks and localities of the training rows."""
    return compute_all_fold_averages(corpus, training_rows, indicators=(indicator,))


def compute_all_fold_averages(
    corpus: Corpus,
    training_rows: Sequence[str],
    indicators: tuple[PovertyIndicator, ...] = PovertyIndicator.ordered(),
    skip_unlabeled: bool = False,
) -> FoldRestrictedAverages:
    if not training_rows:
        raise ValueError("training rows must be nonempty")
    block_means: dict[PovertyIndicator, dict[str, float]] = {}
    locality_means: dict[PovertyIndicator, dict[str, float]] = {}
    global_means: dict[PovertyIndicator, float] = {}
    kept: list[PovertyIndicator] = []
    for indicator in indicators:
        by_block: dict[str, list[int]] = {}
        by_locality: dict[str, list[int]] = {}
        labels: list[int] = []
        for hh_id in training_rows:
            survey = corpus.surveys.get(hh_id)
            if survey is None:
                continue
            value = survey.label(indicator)
            if value is LabelValue.MISSING:
                continue
            y = int(value is LabelValue.LACKING)
            labels.append(y)
            hh = corpus.households[hh_id]
            if hh.block_id is not None:
                by_block.setdefault(hh.block_id, []).append(y)
            if hh.locality_id is not None:
                by_locality.setdefault(hh.locality_id, []).append(y)
        if not labels:
            if skip_unlabeled:
                continue
            raise ValueError(f"no training labels available for {indicator.value}")
        kept.append(indicator)
        block_means[indicator] = {b: sum(v) / len(v) for b, v in by_block.items()}
        locality_means[indicator] = {l: sum(v) / len(v) for l, v in by_locality.items()}
        global_means[indicator] = sum(labels) / len(labels)
    return FoldRestrictedAverages(
        indicators=tuple(kept),
        block_means=block_means,
        locality_means=locality_means,
        global_means=global_means,
        training_fingerprint=_fingerprint(training_rows),
    )
