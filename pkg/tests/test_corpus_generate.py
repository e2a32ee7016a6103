"""Generator determinism, calibration, and planted-signal tests."""

import hashlib
from pathlib import Path

import pytest

from povml.corpus import (
    ConfigError,
    CorpusConfig,
    LabelValue,
    PovertyIndicator,
    VerificationStatus,
    generate_corpus,
    mutual_information,
    save_corpus,
    validate_corpus,
)
from povml.corpus.generate import TRANSACTION_WINDOW


def _dir_hashes(path: Path) -> dict[str, str]:
    return {p.name: hashlib.sha256(p.read_bytes()).hexdigest() for p in sorted(path.iterdir())}


def test_same_seed_byte_identical(tmp_path):
    cfg = CorpusConfig(n_households=500, seed=11)
    save_corpus(generate_corpus(cfg), tmp_path / "a")
    save_corpus(generate_corpus(cfg), tmp_path / "b")
    assert _dir_hashes(tmp_path / "a") == _dir_hashes(tmp_path / "b")


def test_different_seed_differs(tmp_path):
    a = generate_corpus(CorpusConfig(n_households=300, seed=1))
    b = generate_corpus(CorpusConfig(n_households=300, seed=2))
    assert a != b


def test_empty_corpus():
    corpus = generate_corpus(CorpusConfig(n_households=0, seed=3))
    assert corpus.households == {}
    assert corpus.surveys == {}
    assert corpus.transactions == []


def test_invalid_config_rejected():
    with pytest.raises(ConfigError):
        CorpusConfig(locality_known_fraction=1.5)
    with pytest.raises(ConfigError):
        CorpusConfig(target_any_discrepancy_rate=-0.1)
    with pytest.raises(ConfigError):
        CorpusConfig(urban_lines=(300.0, 200.0))


def test_calibration_at_10k():
    corpus = generate_corpus(CorpusConfig(n_households=10_000, seed=42))
    records = list(corpus.verifications.values())
    rate = sum(r.any_discrepancy for r in records) / len(records)
    assert 0.68 <= rate <= 0.72
    discrepant = [r for r in records if r.any_discrepancy]
    leq3 = sum(1 for r in discrepant if r.n_discrepancies <= 3) / len(discrepant)
    assert 0.89 <= leq3 <= 0.93


def test_verification_subset_size():
    corpus = generate_corpus(CorpusConfig(n_households=5_000, seed=5))
    assert len(corpus.verifications) == round(0.06 * 5_000)
    assert set(corpus.verifications) <= set(corpus.households)


def test_dignity_direction_asymmetry():
    corpus = generate_corpus(CorpusConfig(n_households=10_000, seed=9))
    for question in ("owns_stove", "owns_air_conditioner"):
        statuses = [
            rec.entries[question]
            for rec in corpus.verifications.values()
            if rec.entries.get(question) not in (None, VerificationStatus.MATCH)
        ]
        under = sum(s is VerificationStatus.UNDER_REPORTED for s in statuses)
        assert statuses, question
        assert under / len(statuses) <= 0.03


def test_referential_integrity_and_invariants():
    corpus = generate_corpus(CorpusConfig(n_households=1_500, seed=21))
    report = validate_corpus(corpus, check_signals=False)
    assert not [i for i in report.issues if "references" in i]
    for hh in corpus.households.values():
        if hh.block_id is not None:
            assert hh.locality_id is not None
            assert hh.block_coords is not None
    for t in corpus.transactions:
        assert TRANSACTION_WINDOW[0] <= t.date <= TRANSACTION_WINDOW[1]
        assert t.amount >= 0


def test_planted_signals_positive():
    corpus = generate_corpus(CorpusConfig(n_households=10_000, seed=13))
    gt = corpus.ground_truth
    dev_bucket, bs, ed, enrolled_pension = [], [], [], []
    pension_ids = {t.household_id for t in corpus.transactions if t.program_id == "P01"}
    for hh_id in corpus.household_ids:
        s = corpus.surveys[hh_id]
        if s.label(PovertyIndicator.BASIC_SERVICES) is not LabelValue.MISSING:
            dev_bucket.append(gt[hh_id].development_level > 0)
            bs.append(s.label(PovertyIndicator.BASIC_SERVICES) is LabelValue.LACKING)
        if s.label(PovertyIndicator.EDUCATION) is not LabelValue.MISSING:
            enrolled_pension.append(hh_id in pension_ids)
            ed.append(s.label(PovertyIndicator.EDUCATION) is LabelValue.LACKING)
    assert mutual_information(dev_bucket, bs) > 0.01
    assert mutual_information(enrolled_pension, ed) > 0.01


def test_social_security_prevalence():
    corpus = generate_corpus(CorpusConfig(n_households=8_000, seed=17))
    labels = [
        s.label(PovertyIndicator.SOCIAL_SECURITY)
        for s in corpus.surveys.values()
        if s.label(PovertyIndicator.SOCIAL_SECURITY) is not LabelValue.MISSING
    ]
    prevalence = sum(l is LabelValue.LACKING for l in labels) / len(labels)
    assert abs(prevalence - 0.92) < 0.02


def test_locality_known_fraction():
    corpus = generate_corpus(CorpusConfig(n_households=4_000, seed=23))
    known = sum(1 for h in corpus.households.values() if h.locality_id is not None)
    assert known == round(0.41 * 4_000)
