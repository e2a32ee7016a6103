"""The four household-level feature families."""

from __future__ import annotations

import datetime as dt
from typing import Sequence

import numpy as np

from ..corpus import schema
from ..corpus.generate import TRANSACTION_WINDOW
from ..corpus.types import Corpus, PovertyIndicator
from .averages import FoldRestrictedAverages
from .matrix import Column, FeatureMatrix

_DAYS_PER_MONTH = 30.4375


def build_survey_features(corpus: Corpus, household_set: Sequence[str]) -> FeatureMatrix:
    """One column per survey question, in input row order.

    Numeric and boolean answers become numeric columns; categorical answers are
    passed through as level codes for the preprocessing step to dummy-encode.
    Households without a survey are skipped and reported on the matrix.
    """
    rows = [hh for hh in household_set if hh in corpus.surveys]
    skipped = tuple(hh for hh in household_set if hh not in corpus.surveys)
    questions = sorted(schema.QUESTIONS, key=lambda q: q.question_id)
    columns = tuple(
        Column(
            name=q.question_id,
            family="survey",
            kind="categorical" if q.kind == "categorical" else "numeric",
            levels=q.levels if q.kind == "categorical" else (),
        )
        for q in questions
    )
    values = np.zeros((len(rows), len(questions)))
    mask = np.zeros_like(values, dtype=bool)
    for i, hh_id in enumerate(rows):
        answers = corpus.surveys[hh_id].answers
        for j, q in enumerate(questions):
            raw = answers.get(q.question_id)
            if raw is None:
                mask[i, j] = True
            elif q.kind == "categorical":
                values[i, j] = q.levels.index(raw)
            else:
                values[i, j] = float(raw)
    return FeatureMatrix(tuple(rows), columns, values, mask, skipped_rows=skipped)


def _window_months(window: tuple[dt.date, dt.date]) -> int:
    start, end = window
    if end < start:
        raise ValueError(f"invalid window {window}")
    return (end.year - start.year) * 12 + end.month - start.month + 1


def build_transactional_features(
    corpus: Corpus,
    household_set: Sequence[str],
    window: tuple[dt.date, dt.date] = TRANSACTION_WINDOW,
) -> FeatureMatrix:
    """Per-program enrollment/count/total/rate/recency summaries plus overall totals.

    Households with no payments in the window get all-zero features.
    """
    months = _window_months(window)
    programs = corpus.program_ids
    row_index = {hh: i for i, hh in enumerate(household_set)}
    per_program = ("enrolled", "n_payments", "total_amount", "payment_rate", "months_since_first")
    names = [f"{p}_{suffix}" for p in programs for suffix in per_program]
    names += ["overall_n_payments", "overall_total_amount", "overall_payment_rate",
              "overall_months_since_first", "n_enrolled_programs"]
    columns = tuple(
        Column(name=n, family="transactional", kind="indicator" if n.endswith("_enrolled") else "numeric")
        for n in sorted(names)
    )
    col_index = {c.name: j for j, c in enumerate(columns)}
    values = np.zeros((len(household_set), len(columns)))

    first_date: dict[tuple[str, str], dt.date] = {}
    first_any: dict[str, dt.date] = {}
    for t in corpus.transactions:
        i = row_index.get(t.household_id)
        if i is None or not (window[0] <= t.date <= window[1]):
            continue
        key = (t.household_id, t.program_id)
        values[i, col_index[f"{t.program_id}_enrolled"]] = 1.0
        values[i, col_index[f"{t.program_id}_n_payments"]] += 1.0
        values[i, col_index[f"{t.program_id}_total_amount"]] += t.amount
        values[i, col_index["overall_n_payments"]] += 1.0
        values[i, col_index["overall_total_amount"]] += t.amount
        if key not in first_date or t.date < first_date[key]:
            first_date[key] = t.date
        if t.household_id not in first_any or t.date < first_any[t.household_id]:
            first_any[t.household_id] = t.date

    for p in programs:
        values[:, col_index[f"{p}_payment_rate"]] = values[:, col_index[f"{p}_n_payments"]] / months
    values[:, col_index["overall_payment_rate"]] = values[:, col_index["overall_n_payments"]] / months
    for (hh_id, p), date in first_date.items():
        i = row_index[hh_id]
        values[i, col_index[f"{p}_months_since_first"]] = (window[1] - date).days / _DAYS_PER_MONTH
    for hh_id, date in first_any.items():
        i = row_index[hh_id]
        values[i, col_index["overall_months_since_first"]] = (window[1] - date).days / _DAYS_PER_MONTH
    enrolled_cols = [col_index[f"{p}_enrolled"] for p in programs]
    if enrolled_cols:
        values[:, col_index["n_enrolled_programs"]] = values[:, enrolled_cols].sum(axis=1)
    return FeatureMatrix(tuple(household_set), columns, values, None)


def build_spatial_features(
    corpus: Corpus,
    household_set: Sequence[str],
    averages: FoldRestrictedAverages,
) -> FeatureMatrix:
    """Block coordinates plus one fold-averaged label column per indicator."""
    indicators = [ind for ind in PovertyIndicator.ordered() if ind in averages.indicators]
    names = sorted([f"avg_{ind.value}" for ind in indicators]
                   + ["manzana_latitude", "manzana_longitude"])
    columns = tuple(Column(n, "spatial", "numeric") for n in names)
    col_index = {c.name: j for j, c in enumerate(columns)}
    values = np.zeros((len(household_set), len(columns)))
    mask = np.zeros_like(values, dtype=bool)
    lat_j, lon_j = col_index["manzana_latitude"], col_index["manzana_longitude"]
    for i, hh_id in enumerate(household_set):
        hh = corpus.households[hh_id]
        for ind in indicators:
            values[i, col_index[f"avg_{ind.value}"]] = averages.lookup(corpus, hh_id, ind)
        if hh.block_coords is None:
            mask[i, lat_j] = mask[i, lon_j] = True
        else:
            values[i, lat_j], values[i, lon_j] = hh.block_coords
    return FeatureMatrix(tuple(household_set), columns, values, mask)


def build_socioeconomic_features(corpus: Corpus, household_set: Sequence[str]) -> FeatureMatrix:
    """Census-block aggregates joined by block id, with locality-mean fallback."""
    agg_names = sorted({name for b in corpus.blocks.values() for name in b.aggregates})
    columns = tuple(Column(name, "socioeconomic", "numeric") for name in agg_names)
    locality_means: dict[str, dict[str, float]] = {}
    by_locality: dict[str, list] = {}
    for b in corpus.blocks.values():
        by_locality.setdefault(b.locality_id, []).append(b)
    for lid, blocks in by_locality.items():
        locality_means[lid] = {
            name: float(np.mean([b.aggregates[name] for b in blocks if name in b.aggregates] or [np.nan]))
            for name in agg_names
        }
    values = np.zeros((len(household_set), len(columns)))
    mask = np.zeros_like(values, dtype=bool)
    for i, hh_id in enumerate(household_set):
        hh = corpus.households[hh_id]
        source = None
        if hh.block_id is not None and hh.block_id in corpus.blocks:
            source = corpus.blocks[hh.block_id].aggregates
        elif hh.locality_id is not None and hh.locality_id in locality_means:
            source = locality_means[hh.locality_id]
        for j, name in enumerate(agg_names):
            value = None if source is None else source.get(name)
            if value is None or (isinstance(value, float) and np.isnan(value)):
                mask[i, j] = True
            else:
                values[i, j] = value
    return FeatureMatrix(tuple(household_set), columns, values, mask)
