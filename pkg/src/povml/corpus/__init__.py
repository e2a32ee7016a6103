"""Household corpus: data model, synthetic generator, flat-file persistence."""

from .filters import apply_locality_filter, drop_missing_labels
from .generate import TRANSACTION_WINDOW, generate_corpus, planted_probabilities
from .io import CorpusParseError, load_corpus, save_corpus
from .types import (
    CensusBlock,
    ConfigError,
    Corpus,
    CorpusConfig,
    GroundTruth,
    Household,
    LabelValue,
    Locality,
    LocationClass,
    PovertyIndicator,
    Survey,
    Transaction,
    VerificationRecord,
    VerificationStatus,
    WelfareLines,
)
from .validate import ValidationReport, mutual_information, validate_corpus

__all__ = [
    "CensusBlock",
    "ConfigError",
    "Corpus",
    "CorpusConfig",
    "CorpusParseError",
    "GroundTruth",
    "Household",
    "LabelValue",
    "Locality",
    "LocationClass",
    "PovertyIndicator",
    "Survey",
    "Transaction",
    "TRANSACTION_WINDOW",
    "ValidationReport",
    "VerificationRecord",
    "VerificationStatus",
    "WelfareLines",
    "apply_locality_filter",
    "drop_missing_labels",
    "generate_corpus",
    "load_corpus",
    "mutual_information",
    "planted_probabilities",
    "save_corpus",
    "validate_corpus",
]
