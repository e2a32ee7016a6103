"""Corpus integrity and planted-signal checks backing `corpus validate`."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .types import Corpus, LabelValue, PovertyIndicator, VerificationStatus


@dataclass
class ValidationReport:
    issues: list[str] = field(default_factory=list)
    stats: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.issues

    def lines(self) -> list[str]:
        out = [f"{k} = {v:.4f}" for k, v in sorted(self.stats.items())]
        out += [f"ISSUE: {msg}" for msg in self.issues]
        out.append("corpus OK" if self.ok else f"corpus FAILED ({len(self.issues)} issues)")
        return out


def referential_issues(corpus: Corpus) -> list[str]:
    issues = []
    for name, ids in (
        ("survey", corpus.surveys),
        ("verification", corpus.verifications),
        ("ground_truth", corpus.ground_truth),
    ):
        for hh_id in ids:
            if hh_id not in corpus.households:
                issues.append(f"{name} references unknown household {hh_id}")
    for t in corpus.transactions:
        if t.household_id not in corpus.households:
            issues.append(f"transaction references unknown household {t.household_id}")
    for b in corpus.blocks.values():
        if b.locality_id not in corpus.localities:
            issues.append(f"block {b.block_id} references unknown locality {b.locality_id}")
    for hh in corpus.households.values():
        if hh.locality_id is not None and hh.locality_id not in corpus.localities:
            issues.append(f"household {hh.household_id} references unknown locality {hh.locality_id}")
        if hh.block_id is not None and hh.block_id not in corpus.blocks:
            issues.append(f"household {hh.household_id} references unknown block {hh.block_id}")
    return issues


def discrepancy_stats(corpus: Corpus) -> dict[str, float]:
    records = list(corpus.verifications.values())
    stats: dict[str, float] = {"n_verifications": float(len(records))}
    if not records:
        return stats
    n_any = sum(1 for r in records if r.any_discrepancy)
    stats["any_discrepancy_rate"] = n_any / len(records)
    if n_any:
        stats["leq3_share"] = sum(
            1 for r in records if 0 < r.n_discrepancies <= 3
        ) / n_any
    return stats


def dignity_direction_stats(corpus: Corpus) -> dict[str, float]:
    out: dict[str, float] = {}
    for question, _bias in corpus.config.overreport_bias:
        n_under = n_disc = 0
        for rec in corpus.verifications.values():
            status = rec.entries.get(question)
            if status is None or status is VerificationStatus.MATCH:
                continue
            n_disc += 1
            n_under += status is VerificationStatus.UNDER_REPORTED
        if n_disc:
            out[f"under_share_{question}"] = n_under / n_disc
    return out


def mutual_information(xs: list, ys: list) -> float:
    """Brute-force plug-in mutual information (nats) from the contingency table."""
    if len(xs) != len(ys):
        raise ValueError("xs and ys must align")
    n = len(xs)
    if n == 0:
        return 0.0
    joint: dict[tuple, int] = {}
    mx: dict = {}
    my: dict = {}
    for x, y in zip(xs, ys):
        joint[(x, y)] = joint.get((x, y), 0) + 1
        mx[x] = mx.get(x, 0) + 1
        my[y] = my.get(y, 0) + 1
    mi = 0.0
    for (x, y), c in joint.items():
        p_xy = c / n
        mi += p_xy * math.log(p_xy * n * n / (mx[x] * my[y]))
    return max(mi, 0.0)


_MI_FLOOR = 0.01  # nats; far above the (r-1)(c-1)/2n chance level at n >= 1000


def planted_signal_stats(corpus: Corpus) -> dict[str, float]:
    """MI between the planted drivers and their indicator labels."""
    stats: dict[str, float] = {}
    dev_quartile: list[int] = []
    bs_labels: list[int] = []
    devs = [corpus.ground_truth[h].development_level for h in corpus.household_ids
            if h in corpus.ground_truth]
    if not devs:
        return stats
    qs = np.quantile(devs, [0.25, 0.5, 0.75])
    enrolled = {(t.household_id, t.program_id) for t in corpus.transactions}
    enroll_key: list[tuple] = []
    ed_labels: list[int] = []
    for hh_id in corpus.household_ids:
        survey = corpus.surveys.get(hh_id)
        gt = corpus.ground_truth.get(hh_id)
        if survey is None or gt is None:
            continue
        bs = survey.label(PovertyIndicator.BASIC_SERVICES)
        if bs is not LabelValue.MISSING:
            dev_quartile.append(int(np.searchsorted(qs, gt.development_level)))
            bs_labels.append(bs is LabelValue.LACKING)
        ed = survey.label(PovertyIndicator.EDUCATION)
        if ed is not LabelValue.MISSING:
            enroll_key.append(tuple((hh_id, f"P{j:02d}") in enrolled for j in (1, 2, 6)))
            ed_labels.append(ed is LabelValue.LACKING)
    if bs_labels:
        stats["mi_development_basic_services"] = mutual_information(dev_quartile, bs_labels)
    if ed_labels:
        stats["mi_enrollment_education"] = mutual_information(enroll_key, ed_labels)
    return stats


def validate_corpus(corpus: Corpus, check_signals: bool = True) -> ValidationReport:
    report = ValidationReport()
    report.issues.extend(referential_issues(corpus))

    report.stats.update(discrepancy_stats(corpus))
    target = corpus.config.target_any_discrepancy_rate
    rate = report.stats.get("any_discrepancy_rate")
    if rate is not None and len(corpus.verifications) >= 500 and abs(rate - target) > 0.02:
        report.issues.append(f"any-discrepancy rate {rate:.3f} off target {target:.2f}")
    leq3 = report.stats.get("leq3_share")
    if leq3 is not None and len(corpus.verifications) >= 500 and abs(leq3 - corpus.config.target_leq3_share) > 0.02:
        report.issues.append(f"<=3-discrepancy share {leq3:.3f} off target {corpus.config.target_leq3_share:.2f}")

    direction = dignity_direction_stats(corpus)
    report.stats.update(direction)
    for question, bias in corpus.config.overreport_bias:
        share = direction.get(f"under_share_{question}")
        if bias >= 0.97 and share is not None and share > 0.03:
            report.issues.append(f"{question}: under-reported share {share:.3f} exceeds 0.03")

    if check_signals and len(corpus.households) >= 1000:
        signals = planted_signal_stats(corpus)
        report.stats.update(signals)
        for key, value in signals.items():
            if value < _MI_FLOOR:
                report.issues.append(f"planted signal too weak: {key} = {value:.4f}")
    return report
