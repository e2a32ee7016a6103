"""The analyst-tunable three-factor ranking.

score = w_prob * p + w_discrepancy * d + w_proximity * prox, where
  * d is the positive part of the income discrepancy, min-max normalized
    over the ranked set (the lower anchor is 0 because negative
    discrepancies do not motivate follow-up),
  * prox = max(0, 1 - |distance| / tau), a triangular kernel peaking on
    the eligibility line,
  * records beyond tau are faded and sort after all non-faded records
    regardless of score; ties break by household id.

The formula is versioned so clients can pin their expectations.
"""

from __future__ import annotations

from dataclasses import dataclass

from .records import TriageRecord, with_fading

FORMULA_VERSION = "1"


@dataclass(frozen=True)
class TriageWeights:
    w_prob: float
    w_discrepancy: float
    w_proximity: float
    tau: float

    def __post_init__(self) -> None:
        for name in ("w_prob", "w_discrepancy", "w_proximity"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.w_prob == self.w_discrepancy == self.w_proximity == 0:
            raise ValueError("at least one weight must be positive")
        if self.tau <= 0:
            raise ValueError("tau must be > 0")


@dataclass(frozen=True)
class RankedRecord:
    record: TriageRecord  # faded flag re-evaluated against the request tau
    score: float
    normalized_discrepancy: float
    proximity: float

    def to_dict(self) -> dict:
        return {
            **self.record.to_dict(),
            "score": self.score,
            "normalized_discrepancy": self.normalized_discrepancy,
            "proximity": self.proximity,
        }


def rank(records: list[TriageRecord], weights: TriageWeights) -> list[RankedRecord]:
    """Descending stable sort by score; non-faded before faded, ids break ties."""
    if not records:
        return []
    positive = [max(0.0, r.income_discrepancy) for r in records]
    top = max(positive)
    ranked = []
    for record, pos_d in zip(records, positive):
        d_norm = pos_d / top if top > 0 else 0.0
        prox = max(0.0, 1.0 - abs(record.distance_from_line) / weights.tau)
        score = (weights.w_prob * record.p_underreport
                 + weights.w_discrepancy * d_norm
                 + weights.w_proximity * prox)
        ranked.append(RankedRecord(
            record=with_fading(record, weights.tau),
            score=score,
            normalized_discrepancy=d_norm,
            proximity=prox,
        ))
    ranked.sort(key=lambda r: (r.record.faded, -r.score, r.record.household_id))
    return ranked
