"""Folds, PR curves (with brute-force oracle), CV behavior, analytics."""

import copy
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from povml.corpus import (
    CorpusConfig,
    LabelValue,
    PovertyIndicator,
    Survey,
    generate_corpus,
)
from povml.evaluation import (
    UNDERREPORTING,
    baseline_references,
    benefit_share_histogram,
    discrepancy_direction_report,
    make_grouped_folds,
    pr_curve,
    program_indicator_table,
    run_cv,
)
from povml.features import Preprocessor, compute_all_fold_averages
from povml.features.builders import (
    build_socioeconomic_features,
    build_survey_features,
    build_transactional_features,
)
from povml.features.matrix import hstack
from povml.learners import ModelSpec, fit, model_to_dict

from conftest import LACK, OK_, all_labels, make_survey


# --- grouped folds -----------------------------------------------------------

class TestGroupedFolds:
    def test_ten_households_five_folds(self):
        ids = [f"H{i}" for i in range(10)]
        folds = make_grouped_folds(ids, k=5, seed=0)
        assert folds.fold_sizes() == [2, 2, 2, 2, 2]
        assert set(folds.assignment) == set(ids)

    def test_same_seed_identical(self):
        ids = [f"H{i}" for i in range(23)]
        a = make_grouped_folds(ids, 4, seed=9)
        b = make_grouped_folds(ids, 4, seed=9)
        assert a == b

    def test_eleven_households_two_folds(self):
        folds = make_grouped_folds([f"H{i}" for i in range(11)], 2, seed=1)
        assert sorted(folds.fold_sizes(), reverse=True) == [6, 5]

    def test_too_many_folds_rejected(self):
        with pytest.raises(ValueError):
            make_grouped_folds(["a", "b"], 3, seed=0)
        with pytest.raises(ValueError):
            make_grouped_folds(["a", "b"], 1, seed=0)

    @settings(max_examples=60, deadline=None)
    @given(n=st.integers(2, 120), k=st.integers(2, 10), seed=st.integers(0, 2**31))
    def test_exclusivity_coverage_balance(self, n, k, seed):
        if k > n:
            return
        ids = [f"H{i:04d}" for i in range(n)]
        folds = make_grouped_folds(ids, k, seed)
        assert set(folds.assignment) == set(ids)  # coverage + exclusivity by dict
        sizes = folds.fold_sizes()
        assert max(sizes) - min(sizes) <= 1
        assert sum(sizes) == n


# --- PR curves ---------------------------------------------------------------

def oracle_pr_points(scores, labels, step):
    """Sort-free recount at every grid threshold."""
    count = int(math.floor(1.0 / step + 1e-9))
    grid = [i * step for i in range(count + 1)]
    if grid[-1] < 1.0 - 1e-12:
        grid.append(1.0)
    n = len(scores)
    positives = sum(labels)
    out = []
    for t in grid:
        tp = fp = 0
        for s, l in zip(scores, labels):
            if s >= t:
                if l:
                    tp += 1
                else:
                    fp += 1
        flagged = tp + fp
        out.append((t, flagged / n, (tp / flagged) if flagged else None, tp / positives))
    return out


class TestPrCurve:
    def test_hand_example(self):
        curve = pr_curve([0.9, 0.8, 0.4, 0.2], [1, 1, 0, 1], grid_step=0.5)
        at_half = next(p for p in curve.points if p.threshold == 0.5)
        assert at_half.precision == 1.0
        assert at_half.recall == pytest.approx(2 / 3)

    def test_flag_everyone_limit(self):
        curve = pr_curve([0.3, 0.6, 0.1], [0, 1, 1], grid_step=0.1)
        at_zero = curve.points[0]
        assert at_zero.threshold == 0.0
        assert at_zero.recall == 1.0
        assert at_zero.proportion_flagged == 1.0
        assert at_zero.precision == pytest.approx(curve.prevalence)

    def test_top_of_grid_nothing_flagged(self):
        curve = pr_curve([0.4, 0.7], [1, 0], grid_step=0.25)
        top = curve.points[-1]
        assert top.threshold == 1.0
        assert top.proportion_flagged == 0.0
        assert top.precision is None
        assert top.recall == 0.0

    def test_no_positives_rejected(self):
        with pytest.raises(ValueError):
            pr_curve([0.1, 0.9], [0, 0])

    def test_monotonicity(self):
        rng = np.random.default_rng(3)
        scores = rng.uniform(size=150)
        labels = rng.integers(0, 2, size=150)
        labels[0] = 1
        curve = pr_curve(scores, labels)
        recalls = [p.recall for p in curve.points]
        flagged = [p.proportion_flagged for p in curve.points]
        assert all(b <= a for a, b in zip(recalls, recalls[1:]))
        assert all(b <= a for a, b in zip(flagged, flagged[1:]))

    def test_matches_bruteforce_oracle_exactly(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            n = int(rng.integers(1, 200))
            scores = np.round(rng.uniform(size=n), 3).tolist()
            labels = rng.integers(0, 2, size=n).tolist()
            if sum(labels) == 0:
                labels[0] = 1
            curve = pr_curve(scores, labels, grid_step=0.05)
            expected = oracle_pr_points(scores, labels, 0.05)
            got = [(p.threshold, p.proportion_flagged, p.precision, p.recall)
                   for p in curve.points]
            assert got == expected


class TestBaselineReferences:
    def test_flat_precision(self):
        ref = baseline_references(0.92)
        assert ref.precision_at(0.1) == 0.92
        assert ref.precision_at(0.9) == 0.92

    def test_diagonal_recall(self):
        assert baseline_references(0.4).recall_at(0.5) == 0.5

    def test_prevalence_one_allowed(self):
        assert baseline_references(1.0).precision_at(0.3) == 1.0

    def test_invalid_prevalence(self):
        with pytest.raises(ValueError):
            baseline_references(0.0)


# --- cross-validation --------------------------------------------------------

@pytest.fixture(scope="module")
def cv_corpus():
    return generate_corpus(CorpusConfig(
        n_households=900, n_regions=2, n_localities=12, n_blocks_per_locality=4,
        verification_fraction=0.5, seed=77,
    ))


class TestRunCv:
    def test_majority_matches_horizontal_reference(self, cv_corpus):
        folds = make_grouped_folds(cv_corpus.household_ids, 3, seed=1)
        result = run_cv(PovertyIndicator.FOOD, None, ModelSpec("majority"),
                        "transactional", folds, cv_corpus)
        assert result.curves
        for curve in result.curves.values():
            ref = baseline_references(curve.prevalence)
            for p in curve.points:
                if p.precision is not None:
                    assert p.precision == pytest.approx(ref.precision_at(p.proportion_flagged))

    def test_underreporting_restricted_to_verified(self, cv_corpus):
        folds = make_grouped_folds(cv_corpus.household_ids, 3, seed=2)
        result = run_cv(UNDERREPORTING, None, ModelSpec("majority"),
                        "survey", folds, cv_corpus)
        archived = {r.household_id for r in result.archive}
        assert archived == set(cv_corpus.verifications)
        assert len(result.archive) == len(cv_corpus.verifications)

    def test_single_class_marked_degenerate(self, cv_corpus):
        corpus = copy.deepcopy(cv_corpus)
        for hh_id, survey in corpus.surveys.items():
            labels = dict(survey.indicator_labels)
            labels[PovertyIndicator.FOOD] = LabelValue.LACKING
            corpus.surveys[hh_id] = Survey(
                household_id=hh_id, answers=survey.answers,
                self_reported_income=survey.self_reported_income,
                estimated_income=survey.estimated_income, indicator_labels=labels)
        folds = make_grouped_folds(corpus.household_ids, 3, seed=3)
        result = run_cv(PovertyIndicator.FOOD, None, ModelSpec("majority"),
                        "transactional", folds, corpus)
        assert not result.curves
        assert all("single-class" in r for r in result.degenerate.values())

    def test_survey_features_rejected_for_imputation(self, cv_corpus):
        folds = make_grouped_folds(cv_corpus.household_ids, 3, seed=4)
        with pytest.raises(ValueError, match="imputation"):
            run_cv(PovertyIndicator.FOOD, None, ModelSpec("majority"),
                   "survey", folds, cv_corpus)

    def test_region_restriction(self, cv_corpus):
        region = cv_corpus.region_ids[0]
        folds = make_grouped_folds(cv_corpus.household_ids, 3, seed=5)
        result = run_cv(PovertyIndicator.FOOD, region, ModelSpec("majority"),
                        "transactional", folds, cv_corpus)
        for row in result.archive:
            assert cv_corpus.households[row.household_id].region_id == region


class TestAntiLeakage:
    def test_flipped_heldout_labels_leave_artifacts_bit_identical(self, cv_corpus):
        folds = make_grouped_folds(cv_corpus.household_ids, 3, seed=6)
        heldout = {h for h in cv_corpus.household_ids if folds.fold_of(h) == 0}
        train_ids = [h for h in cv_corpus.household_ids if h not in heldout]

        def artifacts(corpus):
            averages = compute_all_fold_averages(corpus, train_ids)
            raw = hstack([
                build_survey_features(corpus, corpus.household_ids),
                build_transactional_features(corpus, corpus.household_ids),
                build_socioeconomic_features(corpus, corpus.household_ids),
            ])
            pre = Preprocessor().fit(raw, train_ids)
            ids, labels = [], []
            for h in train_ids:
                value = corpus.surveys[h].label(PovertyIndicator.EDUCATION)
                if value is not LabelValue.MISSING:
                    ids.append(h)
                    labels.append(int(value is LabelValue.LACKING))
            position = {h: i for i, h in enumerate(corpus.household_ids)}
            train_m = pre.transform(raw).select_rows(np.array([position[h] for h in ids]))
            model = fit(ModelSpec("gbm", estimators=5), train_m, np.array(labels))
            return averages, pre, model

        flipped = copy.deepcopy(cv_corpus)
        for hh_id in heldout:
            survey = flipped.surveys[hh_id]
            labels = {
                ind: (LACK if v is OK_ else OK_ if v is LACK else v)
                for ind, v in survey.indicator_labels.items()
            }
            flipped.surveys[hh_id] = Survey(
                household_id=hh_id, answers=survey.answers,
                self_reported_income=survey.self_reported_income,
                estimated_income=survey.estimated_income, indicator_labels=labels)

        avg_a, pre_a, model_a = artifacts(cv_corpus)
        avg_b, pre_b, model_b = artifacts(flipped)
        assert avg_a == avg_b
        assert pre_a.medians_ == pre_b.medians_
        assert pre_a.modes_ == pre_b.modes_
        assert pre_a.levels_ == pre_b.levels_
        assert json.dumps(model_to_dict(model_a)) == json.dumps(model_to_dict(model_b))


# --- analytics ---------------------------------------------------------------

class TestProgramIndicatorTable:
    def test_pure_lacking_program(self, ledger_corpus):
        corpus = ledger_corpus
        corpus.surveys["H1"] = make_survey("H1", labels=all_labels(LACK))
        corpus.surveys["H2"] = make_survey("H2", labels=all_labels(LACK))
        table = program_indicator_table(corpus, PovertyIndicator.FOOD)
        p01 = next(r for r in table.rows if r.program_id == "P01")
        assert p01.proportion_lacking == 1.0
        assert p01.ci_high == 1.0

    def test_zero_enrollee_program_noted(self, ledger_corpus):
        table = program_indicator_table(ledger_corpus, PovertyIndicator.FOOD)
        assert all(r.program_id != "P99" for r in table.rows)

    def test_pension_like_program_above_prevalence(self):
        corpus = generate_corpus(CorpusConfig(n_households=4000, seed=19))
        table = program_indicator_table(corpus, PovertyIndicator.EDUCATION)
        pension = next(r for r in table.rows if r.program_id == "P01")
        scholarship = next(r for r in table.rows if r.program_id == "P02")
        assert pension.proportion_lacking > table.overall_prevalence
        assert scholarship.proportion_lacking < table.overall_prevalence

    def test_ci_shrinks_with_enrollment(self):
        corpus = generate_corpus(CorpusConfig(n_households=4000, seed=19))
        table = program_indicator_table(corpus, PovertyIndicator.EDUCATION)
        for row in table.rows:
            width = row.ci_high - row.ci_low
            assert width <= 2 * Z95_halfwidth(row.proportion_lacking, row.n_labeled) + 1e-12


def Z95_halfwidth(p, n):
    return 1.959963984540054 * math.sqrt(p * (1 - p) / n)


class TestBenefitShares:
    def test_all_from_one_program_rightmost_bin(self, ledger_corpus):
        hist = benefit_share_histogram(ledger_corpus, PovertyIndicator.FOOD, "P01")
        # H1 gets everything from P01 -> share 1.0 -> last bin
        assert hist.counts_lacking[-1] + hist.counts_not_lacking[-1] >= 1

    def test_zero_share_households_excluded(self, ledger_corpus):
        hist = benefit_share_histogram(ledger_corpus, PovertyIndicator.FOOD, "P02")
        total_binned = sum(hist.counts_lacking) + sum(hist.counts_not_lacking)
        assert total_binned == 1  # only H2 has any P02 benefits
        assert hist.n_excluded_zero_share == 1  # H1 has benefits, none from P02
        assert hist.n_excluded_zero_total == 1  # H3 has no benefits at all

    def test_equal_split_is_half(self, ledger_corpus):
        import datetime as dt
        from povml.corpus import Transaction
        corpus = ledger_corpus
        corpus.transactions = [
            Transaction("H1", "P01", "P01-B1", 300.0, dt.date(2015, 11, 1)),
            Transaction("H1", "P02", "P02-B1", 300.0, dt.date(2015, 11, 2)),
        ]
        hist = benefit_share_histogram(corpus, PovertyIndicator.FOOD, "P01", n_bins=10)
        # share 0.5 -> bin index ceil(0.5*10)-1 = 4, i.e. the (0.4, 0.5] bin
        assert hist.counts_lacking[4] + hist.counts_not_lacking[4] == 1


class TestDirectionReport:
    def test_totals_match_recount(self):
        corpus = generate_corpus(CorpusConfig(n_households=2500, seed=29))
        report = discrepancy_direction_report(corpus)
        from povml.corpus import VerificationStatus
        for row in report:
            n_under = n_over = n_match = 0
            for rec in corpus.verifications.values():
                status = rec.entries.get(row.question_id)
                if status is VerificationStatus.UNDER_REPORTED:
                    n_under += 1
                elif status is VerificationStatus.OVER_REPORTED:
                    n_over += 1
                elif status is VerificationStatus.MATCH:
                    n_match += 1
            assert (row.n_under, row.n_over, row.n_match) == (n_under, n_over, n_match)

    def test_stove_under_share_small(self):
        corpus = generate_corpus(CorpusConfig(n_households=8000, seed=31))
        report = {r.question_id: r for r in discrepancy_direction_report(corpus)}
        stove = report["owns_stove"]
        assert stove.n_discrepancies > 0
        assert stove.n_under / stove.n_discrepancies <= 0.03

    def test_all_matches_zero_discrepancies(self, ledger_corpus):
        from povml.corpus import VerificationRecord, VerificationStatus
        ledger_corpus.verifications["H1"] = VerificationRecord(
            "H1", {"owns_stove": VerificationStatus.MATCH}, surveyor_flag=False)
        report = discrepancy_direction_report(ledger_corpus)
        assert all(r.n_discrepancies == 0 for r in report)
