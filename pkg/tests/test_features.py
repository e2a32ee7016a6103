"""Feature builders, preprocessing, and assembly."""

import numpy as np
import pytest

from povml.corpus import PovertyIndicator
from povml.features import (
    AlignmentError,
    Preprocessor,
    assemble,
    build_socioeconomic_features,
    build_spatial_features,
    build_survey_features,
    build_transactional_features,
    compute_all_fold_averages,
    compute_fold_averages,
    hstack,
    preprocess,
)
from povml.features.matrix import Column, FeatureMatrix

from conftest import LACK, OK_, build_corpus, make_household, make_survey


def column(matrix, name):
    j = matrix.column_names.index(name)
    return matrix.values[:, j], None if matrix.missing_mask is None else matrix.missing_mask[:, j]


class TestSurveyFeatures:
    def test_numeric_answer_passes_through(self, spatial_corpus):
        corpus = spatial_corpus
        corpus.surveys["H1"] = make_survey("H1", answers={"respondent_age": 34.0},
                                           labels=corpus.surveys["H1"].indicator_labels)
        m = build_survey_features(corpus, ["H1"])
        vals, mask = column(m, "respondent_age")
        assert vals[0] == 34.0 and not mask[0]

    def test_all_missing_question_retained_masked(self, spatial_corpus):
        m = build_survey_features(spatial_corpus, spatial_corpus.household_ids)
        vals, mask = column(m, "meals_per_day")
        assert mask.all()

    def test_rows_in_input_order_and_skip_report(self, spatial_corpus):
        del spatial_corpus.surveys["H3"]
        m = build_survey_features(spatial_corpus, ["H5", "H1", "H3", "H2"])
        assert m.row_ids == ("H5", "H1", "H2")
        assert m.skipped_rows == ("H3",)

    def test_boolean_and_categorical_kinds(self, spatial_corpus):
        corpus = spatial_corpus
        corpus.surveys["H1"] = make_survey(
            "H1", answers={"owns_stove": True, "floor_material": "dirt"},
            labels=corpus.surveys["H1"].indicator_labels)
        m = build_survey_features(corpus, ["H1"])
        stove, _ = column(m, "owns_stove")
        assert stove[0] == 1.0
        floor_col = m.columns[m.column_names.index("floor_material")]
        assert floor_col.kind == "categorical"
        floor, _ = column(m, "floor_material")
        assert floor_col.levels[int(floor[0])] == "dirt"


class TestTransactionalFeatures:
    def test_counts_total_rate(self, ledger_corpus):
        m = build_transactional_features(ledger_corpus, ["H1", "H2", "H3"])
        n, _ = column(m, "P01_n_payments")
        total, _ = column(m, "P01_total_amount")
        rate, _ = column(m, "P01_payment_rate")
        assert n[0] == 3 and total[0] == 1500.0 and rate[0] == pytest.approx(1.0)

    def test_no_transactions_all_zero(self, ledger_corpus):
        m = build_transactional_features(ledger_corpus, ["H3"])
        assert np.all(m.values[0] == 0.0)

    def test_two_programs_against_ledger_scan(self, ledger_corpus):
        """Oracle: recompute per-program totals by scanning the raw ledger."""
        m = build_transactional_features(ledger_corpus, ["H1", "H2", "H3"])
        for hh_i, hh in enumerate(["H1", "H2", "H3"]):
            for program in ledger_corpus.program_ids:
                expected_total = sum(
                    t.amount for t in ledger_corpus.transactions
                    if t.household_id == hh and t.program_id == program
                )
                expected_n = sum(
                    1 for t in ledger_corpus.transactions
                    if t.household_id == hh and t.program_id == program
                )
                total, _ = column(m, f"{program}_total_amount")
                n, _ = column(m, f"{program}_n_payments")
                enrolled, _ = column(m, f"{program}_enrolled")
                assert total[hh_i] == pytest.approx(expected_total)
                assert n[hh_i] == expected_n
                assert enrolled[hh_i] == (1.0 if expected_n else 0.0)

    def test_window_excludes_outside_payments(self, ledger_corpus):
        import datetime as dt
        from povml.corpus import Transaction
        ledger_corpus.transactions.append(
            Transaction("H3", "P01", "P01-B1", 999.0, dt.date(2016, 3, 1)))
        m = build_transactional_features(ledger_corpus, ["H3"])
        total, _ = column(m, "P01_total_amount")
        assert total[0] == 0.0


class TestFoldAverages:
    def test_block_mean(self, spatial_corpus):
        avg = compute_fold_averages(spatial_corpus, PovertyIndicator.FOOD, ["H1", "H2", "H3"])
        # H1, H2 lacking in L001-B1; H3 not lacking in L001-B2
        assert avg.block_means[PovertyIndicator.FOOD]["L001-B1"] == 1.0
        assert avg.block_means[PovertyIndicator.FOOD]["L001-B2"] == 0.0
        assert avg.global_means[PovertyIndicator.FOOD] == pytest.approx(2 / 3)

    def test_fallback_chain(self, spatial_corpus):
        avg = compute_fold_averages(spatial_corpus, PovertyIndicator.FOOD, ["H1", "H2", "H3"])
        # H5 sits in L002-B1: no training rows there, no locality rows -> global
        assert avg.lookup(spatial_corpus, "H5", PovertyIndicator.FOOD) == pytest.approx(2 / 3)
        # H4 has locality L001 only -> locality mean over H1, H2, H3
        assert avg.lookup(spatial_corpus, "H4", PovertyIndicator.FOOD) == pytest.approx(2 / 3)

    def test_empty_training_error(self, spatial_corpus):
        with pytest.raises(ValueError):
            compute_fold_averages(spatial_corpus, PovertyIndicator.FOOD, [])

    def test_heldout_flip_leaves_averages_identical(self, spatial_corpus):
        training = ["H1", "H2", "H3"]
        before = compute_all_fold_averages(spatial_corpus, training)
        flipped = spatial_corpus.surveys["H5"]
        spatial_corpus.surveys["H5"] = make_survey(
            "H5", labels={ind: OK_ for ind in PovertyIndicator.ordered()})
        after = compute_all_fold_averages(spatial_corpus, training)
        assert before == after
        spatial_corpus.surveys["H5"] = flipped


class TestSpatialFeatures:
    def test_coordinates_verbatim_and_column_count(self, spatial_corpus):
        avg = compute_all_fold_averages(spatial_corpus, ["H1", "H2", "H3"])
        m = build_spatial_features(spatial_corpus, ["H1", "H4"], avg)
        assert sum(c.name.startswith("avg_") for c in m.columns) == 6
        assert len(m.columns) == 8
        lat, lat_mask = column(m, "manzana_latitude")
        lon, _ = column(m, "manzana_longitude")
        assert (lat[0], lon[0]) == (19.43, -99.13)
        assert not lat_mask[0]
        assert lat_mask[1]  # H4 has no block coords

    def test_locality_only_household_uses_fallback(self, spatial_corpus):
        avg = compute_fold_averages(spatial_corpus, PovertyIndicator.FOOD, ["H1", "H2", "H3"])
        m = build_spatial_features(spatial_corpus, ["H4"], avg)
        vals, _ = column(m, "avg_food")
        assert vals[0] == pytest.approx(2 / 3)


class TestSocioeconomicFeatures:
    def test_block_join(self, spatial_corpus):
        m = build_socioeconomic_features(spatial_corpus, ["H1"])
        vals, mask = column(m, "electricity_rate")
        assert vals[0] == 0.84 and not mask[0]

    def test_locality_fallback_is_block_mean(self, spatial_corpus):
        m = build_socioeconomic_features(spatial_corpus, ["H4"])
        vals, mask = column(m, "electricity_rate")
        assert not mask[0]
        assert vals[0] == pytest.approx((0.84 + 0.62) / 2)


class TestPreprocess:
    def _matrix(self, values, mask, kind="numeric", levels=()):
        cols = tuple(
            Column(f"c{j}", "survey", kind, levels) for j in range(values.shape[1])
        )
        rows = tuple(f"H{i}" for i in range(values.shape[0]))
        return FeatureMatrix(rows, cols, values, mask)

    def test_median_imputation(self):
        values = np.array([[1.0], [0.0], [3.0]])
        mask = np.array([[False], [True], [False]])
        out = preprocess(self._matrix(values, mask))
        assert out.values[:, 0].tolist() == [1.0, 2.0, 3.0]
        assert out.missing_mask is None

    def test_categorical_mode_and_dummies(self):
        levels = ("a", "b")
        values = np.array([[0.0], [0.0], [1.0], [0.0]])
        mask = np.array([[False], [False], [False], [True]])
        out = preprocess(self._matrix(values, mask, kind="categorical", levels=levels))
        assert out.column_names == ["c0=a", "c0=b"]
        assert out.values[:, 0].tolist() == [1.0, 1.0, 0.0, 1.0]
        assert out.values[:, 1].tolist() == [0.0, 0.0, 1.0, 0.0]

    def test_modal_tie_breaks_lexicographically(self):
        levels = ("b", "a")  # declaration order differs from lexicographic
        values = np.array([[0.0], [0.0], [1.0], [1.0], [0.0]])
        mask = np.array([[False], [False], [False], [False], [True]])
        out = preprocess(self._matrix(values, mask, kind="categorical", levels=levels))
        # tie between "b" (code 0) and "a" (code 1): impute "a"
        a_vals, _ = column(out, "c0=a")
        assert a_vals[4] == 1.0

    def test_idempotence(self, spatial_corpus):
        raw = build_survey_features(spatial_corpus, spatial_corpus.household_ids)
        once = preprocess(raw)
        twice = preprocess(once)
        assert once.equals(twice)

    def test_dummy_completeness(self, spatial_corpus):
        corpus = spatial_corpus
        for hh, floor in zip(corpus.household_ids, ("dirt", "tile", "cement", "dirt", "tile")):
            corpus.surveys[hh] = make_survey(hh, answers={"floor_material": floor},
                                             labels=corpus.surveys[hh].indicator_labels)
        out = preprocess(build_survey_features(corpus, corpus.household_ids))
        dummy_cols = [j for j, c in enumerate(out.columns) if c.name.startswith("floor_material=")]
        assert np.all(out.values[:, dummy_cols].sum(axis=1) == 1.0)

    def test_training_row_statistics_only(self):
        values = np.array([[1.0], [100.0], [3.0], [500.0]])
        mask = np.array([[False], [True], [False], [False]])
        out = preprocess(self._matrix(values, mask), training_rows=["H0", "H2"])
        assert out.values[1, 0] == 2.0  # median of {1, 3}, not of all rows

    def test_all_missing_column_zero_filled_and_reported(self):
        values = np.zeros((3, 1))
        mask = np.ones((3, 1), dtype=bool)
        pre = Preprocessor().fit(self._matrix(values, mask))
        out = pre.transform(self._matrix(values, mask))
        assert np.all(out.values == 0.0)
        assert pre.report.all_missing_columns == ["c0"]


class TestAssemble:
    def _matrices(self, corpus):
        rows = corpus.household_ids
        avg = compute_all_fold_averages(corpus, rows)
        return [
            preprocess(build_survey_features(corpus, rows)),
            preprocess(build_transactional_features(corpus, rows)),
            preprocess(build_spatial_features(corpus, rows, avg)),
            preprocess(build_socioeconomic_features(corpus, rows)),
        ]

    def test_single_family_selector(self, ledger_corpus):
        mats = self._matrices(ledger_corpus)
        out = assemble(mats, "transactional")
        assert {c.family for c in out.columns} == {"transactional"}

    def test_combined_for_imputation_excludes_survey(self, ledger_corpus):
        mats = self._matrices(ledger_corpus)
        out = assemble(mats, "combined", task=PovertyIndicator.EDUCATION)
        assert "survey" not in {c.family for c in out.columns}
        assert {"transactional", "spatial", "socioeconomic"} <= {c.family for c in out.columns}

    def test_combined_for_underreporting_includes_survey(self, ledger_corpus):
        mats = self._matrices(ledger_corpus)
        out = assemble(mats, "combined", task="underreporting")
        assert "survey" in {c.family for c in out.columns}

    def test_row_mismatch_raises(self, ledger_corpus):
        mats = self._matrices(ledger_corpus)
        shuffled = mats[1].select_rows(np.array([1, 0, 2]))
        with pytest.raises(AlignmentError):
            assemble([mats[0], shuffled], "combined")

    def test_family_order_and_determinism(self, ledger_corpus):
        a = assemble(self._matrices(ledger_corpus), "combined")
        b = assemble(self._matrices(ledger_corpus), "combined")
        assert a.equals(b)
        families = [c.family for c in a.columns]
        order = {"survey": 0, "transactional": 1, "spatial": 2, "socioeconomic": 3}
        assert families == sorted(families, key=order.__getitem__)


def test_hstack_requires_alignment(spatial_corpus):
    rows = spatial_corpus.household_ids
    m = build_socioeconomic_features(spatial_corpus, rows)
    other = build_socioeconomic_features(spatial_corpus, rows[::-1])
    with pytest.raises(AlignmentError):
        hstack([m, other])
