"""Shared fixtures: hand-built miniature corpora with known values."""

import datetime as dt

import pytest

from povml.corpus import (
    CensusBlock,
    Corpus,
    CorpusConfig,
    Household,
    LabelValue,
    Locality,
    LocationClass,
    PovertyIndicator,
    Survey,
    Transaction,
    VerificationRecord,
    VerificationStatus,
)

LACK = LabelValue.LACKING
OK_ = LabelValue.NOT_LACKING
MISS = LabelValue.MISSING


def all_labels(value: LabelValue) -> dict:
    return {ind: value for ind in PovertyIndicator.ordered()}


def make_household(hh_id, region="R01", locality="L001", block="L001-B1",
                   coords=(19.43, -99.13), location=LocationClass.URBAN, n_members=4):
    return Household(
        household_id=hh_id, region_id=region, locality_id=locality, block_id=block,
        block_coords=coords if block else None, location_class=location, n_members=n_members,
    )


def make_survey(hh_id, answers=None, self_income=1000.0, est_income=1200.0, labels=None):
    return Survey(
        household_id=hh_id,
        answers=answers or {},
        self_reported_income=self_income,
        estimated_income=est_income,
        indicator_labels=labels if labels is not None else all_labels(OK_),
    )


def build_corpus(households, surveys=(), verifications=(), transactions=(),
                 blocks=(), localities=(), config=None) -> Corpus:
    return Corpus(
        config=config or CorpusConfig(n_households=len(households), n_regions=1,
                                      n_localities=max(1, len(localities)), seed=0),
        households={h.household_id: h for h in households},
        surveys={s.household_id: s for s in surveys},
        verifications={v.household_id: v for v in verifications},
        transactions=list(transactions),
        blocks={b.block_id: b for b in blocks},
        localities={l.locality_id: l for l in localities},
    )


@pytest.fixture
def spatial_corpus():
    """Two localities; L001 has two blocks, L002 one; H4 has locality only."""
    localities = [
        Locality("L001", "R01", (19.4, -99.1), LocationClass.URBAN),
        Locality("L002", "R01", (20.1, -98.5), LocationClass.RURAL),
    ]
    blocks = [
        CensusBlock("L001-B1", "L001", (19.43, -99.13), {"electricity_rate": 0.84}),
        CensusBlock("L001-B2", "L001", (19.44, -99.15), {"electricity_rate": 0.62}),
        CensusBlock("L002-B1", "L002", (20.11, -98.52), {"electricity_rate": 0.31}),
    ]
    households = [
        make_household("H1", block="L001-B1", coords=(19.43, -99.13)),
        make_household("H2", block="L001-B1", coords=(19.43, -99.13)),
        make_household("H3", block="L001-B2", coords=(19.44, -99.15)),
        make_household("H4", locality="L001", block=None, coords=None),
        make_household("H5", locality="L002", block="L002-B1", coords=(20.11, -98.52),
                       location=LocationClass.RURAL),
    ]
    labels = {
        "H1": all_labels(LACK),
        "H2": all_labels(LACK),
        "H3": all_labels(OK_),
        "H4": all_labels(OK_),
        "H5": all_labels(LACK),
    }
    surveys = [make_survey(h.household_id, labels=labels[h.household_id]) for h in households]
    return build_corpus(households, surveys, blocks=blocks, localities=localities)


@pytest.fixture
def ledger_corpus():
    """Three households with a small payment ledger inside 2015-Q4."""
    households = [make_household(f"H{i}") for i in (1, 2, 3)]
    surveys = [make_survey(h.household_id) for h in households]
    q4 = dt.date(2015, 10, 15)
    transactions = [
        Transaction("H1", "P01", "P01-B1", 500.0, q4),
        Transaction("H1", "P01", "P01-B1", 500.0, dt.date(2015, 11, 15)),
        Transaction("H1", "P01", "P01-B2", 500.0, dt.date(2015, 12, 15)),
        Transaction("H2", "P01", "P01-B1", 120.0, dt.date(2015, 10, 2)),
        Transaction("H2", "P02", "P02-B1", 340.0, dt.date(2015, 12, 30)),
    ]
    localities = [Locality("L001", "R01", (19.4, -99.1), LocationClass.URBAN)]
    blocks = [CensusBlock("L001-B1", "L001", (19.43, -99.13), {"electricity_rate": 0.8})]
    return build_corpus(households, surveys, transactions=transactions,
                        blocks=blocks, localities=localities)
