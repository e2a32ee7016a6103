"""Per-household triage records: probability, income discrepancy, line distance."""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..corpus.types import Corpus
from ..evaluation.cv import UNDERREPORTING, TaskPipeline

DEFAULT_TAU_FRACTION = 0.25  # default fading threshold as a share of the eligibility line


@dataclass(frozen=True)
class TriageRecord:
    household_id: str
    p_underreport: float
    income_discrepancy: float  # estimated - self-reported, currency/month
    distance_from_line: float  # estimated - eligibility line (signed)
    eligible: bool  # strictly below the eligibility line
    faded: bool  # |distance_from_line| > tau (strict; on-the-threshold is not faded)

    def to_dict(self) -> dict:
        return {
            "household_id": self.household_id,
            "p_underreport": self.p_underreport,
            "income_discrepancy": self.income_discrepancy,
            "distance_from_line": self.distance_from_line,
            "eligible": self.eligible,
            "faded": self.faded,
        }


def with_fading(record: TriageRecord, tau: float) -> TriageRecord:
    return replace(record, faded=abs(record.distance_from_line) > tau)


def score_corpus(pipeline: TaskPipeline, corpus: Corpus) -> list[TriageRecord]:
    """One record per household with a survey, sorted by household id.

    Fading uses the default threshold (a fixed fraction of each household's
    own eligibility line); ranking recomputes it from the requested tau.
    """
    if pipeline.task != UNDERREPORTING:
        raise ValueError("triage scoring requires an underreporting-task pipeline")
    ids = sorted(corpus.surveys)
    if not ids:
        return []
    scores = pipeline.score(corpus, ids)
    records = []
    for hh_id, p in zip(ids, scores):
        survey = corpus.surveys[hh_id]
        lbm = corpus.welfare_lines(hh_id).lbm
        distance = survey.estimated_income - lbm
        records.append(TriageRecord(
            household_id=hh_id,
            p_underreport=float(p),
            income_discrepancy=survey.estimated_income - survey.self_reported_income,
            distance_from_line=distance,
            eligible=distance < 0,
            faded=abs(distance) > DEFAULT_TAU_FRACTION * lbm,
        ))
    return records
