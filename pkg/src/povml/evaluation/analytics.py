"""Descriptive analytics behind the discussion figures: program-conditional
indicator proportions, benefit-share histograms, discrepancy directions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ..corpus.schema import VERIFIABLE_QUESTION_IDS
from ..corpus.types import Corpus, LabelValue, PovertyIndicator, VerificationStatus

Z_95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class ProgramIndicatorRow:
    program_id: str
    n_enrolled: int
    n_labeled: int
    proportion_lacking: float
    ci_low: float
    ci_high: float


@dataclass
class ProgramIndicatorTable:
    indicator: PovertyIndicator
    overall_prevalence: Optional[float]
    rows: list[ProgramIndicatorRow] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def program_indicator_table(corpus: Corpus, indicator: PovertyIndicator) -> ProgramIndicatorTable:
    """Per program: share of enrolled households lacking the indicator, with a
    normal-approximation 95% CI; programs without enrollees are noted, not listed."""
    labels: dict[str, int] = {}
    for hh_id, survey in corpus.surveys.items():
        value = survey.label(indicator)
        if value is not LabelValue.MISSING:
            labels[hh_id] = int(value is LabelValue.LACKING)
    overall = sum(labels.values()) / len(labels) if labels else None
    table = ProgramIndicatorTable(indicator=indicator, overall_prevalence=overall)

    enrolled: dict[str, set[str]] = {}
    for t in corpus.transactions:
        enrolled.setdefault(t.program_id, set()).add(t.household_id)
    for program in sorted(set(corpus.program_ids) | set(enrolled)):
        households = enrolled.get(program, set())
        if not households:
            table.notes.append(f"{program}: no enrolled households, omitted")
            continue
        labeled = [labels[h] for h in households if h in labels]
        if not labeled:
            table.notes.append(f"{program}: no labeled enrollees, omitted")
            continue
        n = len(labeled)
        p = sum(labeled) / n
        half = Z_95 * math.sqrt(p * (1 - p) / n)
        table.rows.append(ProgramIndicatorRow(
            program_id=program, n_enrolled=len(households), n_labeled=n,
            proportion_lacking=p, ci_low=max(0.0, p - half), ci_high=min(1.0, p + half),
        ))
    return table


@dataclass
class BenefitShareHistogram:
    indicator: PovertyIndicator
    program_id: str
    bin_edges: list[float]  # n_bins + 1 edges over (0, 1]
    counts_lacking: list[int]
    counts_not_lacking: list[int]
    n_excluded_zero_share: int = 0
    n_excluded_zero_total: int = 0


def benefit_share_histogram(
    corpus: Corpus,
    indicator: PovertyIndicator,
    program_id: str,
    n_bins: int = 10,
) -> BenefitShareHistogram:
    """Distribution of the program's share of each household's total benefits,
    split by label. Households with zero share (or zero benefits) are omitted;
    share 1.0 lands in the rightmost bin."""
    totals: dict[str, float] = {}
    from_program: dict[str, float] = {}
    for t in corpus.transactions:
        totals[t.household_id] = totals.get(t.household_id, 0.0) + t.amount
        if t.program_id == program_id:
            from_program[t.household_id] = from_program.get(t.household_id, 0.0) + t.amount
    hist = BenefitShareHistogram(
        indicator=indicator, program_id=program_id,
        bin_edges=[i / n_bins for i in range(n_bins + 1)],
        counts_lacking=[0] * n_bins, counts_not_lacking=[0] * n_bins,
    )
    for hh_id, survey in corpus.surveys.items():
        label = survey.label(indicator)
        if label is LabelValue.MISSING:
            continue
        total = totals.get(hh_id, 0.0)
        if total <= 0.0:
            hist.n_excluded_zero_total += 1
            continue
        share = from_program.get(hh_id, 0.0) / total
        if share <= 0.0:
            hist.n_excluded_zero_share += 1
            continue
        bin_idx = min(n_bins - 1, math.ceil(share * n_bins) - 1)
        if label is LabelValue.LACKING:
            hist.counts_lacking[bin_idx] += 1
        else:
            hist.counts_not_lacking[bin_idx] += 1
    return hist


@dataclass(frozen=True)
class QuestionDirectionRow:
    question_id: str
    n_checked: int
    n_match: int
    n_discrepancies: int
    n_under: int
    n_over: int

    @property
    def proportion_without_discrepancy(self) -> float:
        return self.n_match / self.n_checked if self.n_checked else 1.0


def discrepancy_direction_report(corpus: Corpus) -> list[QuestionDirectionRow]:
    """Per verifiable question: discrepancy counts split by direction."""
    counts = {q: {"checked": 0, "match": 0, "under": 0, "over": 0}
              for q in VERIFIABLE_QUESTION_IDS}
    for record in corpus.verifications.values():
        for qid, status in record.entries.items():
            c = counts[qid]
            c["checked"] += 1
            if status is VerificationStatus.MATCH:
                c["match"] += 1
            elif status is VerificationStatus.UNDER_REPORTED:
                c["under"] += 1
            else:
                c["over"] += 1
    return [
        QuestionDirectionRow(
            question_id=qid,
            n_checked=c["checked"],
            n_match=c["match"],
            n_discrepancies=c["under"] + c["over"],
            n_under=c["under"],
            n_over=c["over"],
        )
        for qid, c in counts.items()
    ]
