"""Core record types for the household corpus.

A corpus bundles the observable entities (households, application surveys,
home-verification records, benefit transactions, census blocks, localities)
with a hidden ground-truth sidecar that only the generator and the test
suite are allowed to look at.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

AnswerValue = Union[float, int, bool, str]


class PovertyIndicator(Enum):
    """The six deprivation dimensions, in stable column order."""

    EDUCATION = "education"
    HEALTH_SERVICES = "health_services"
    SOCIAL_SECURITY = "social_security"
    DWELLING_QUALITY = "dwelling_quality"
    BASIC_SERVICES = "basic_services"
    FOOD = "food"

    @classmethod
    def ordered(cls) -> tuple["PovertyIndicator", ...]:
        return tuple(cls)


class LabelValue(Enum):
    LACKING = "lacking"
    NOT_LACKING = "not_lacking"
    MISSING = "missing"


class VerificationStatus(Enum):
    MATCH = "match"
    UNDER_REPORTED = "under_reported"
    OVER_REPORTED = "over_reported"


class LocationClass(Enum):
    URBAN = "urban"
    RURAL = "rural"


@dataclass(frozen=True)
class WelfareLines:
    """Income thresholds for one location class; `lbm` is the eligibility line."""

    location_class: LocationClass
    lbm: float
    lb: float

    def __post_init__(self) -> None:
        if not (0 < self.lbm < self.lb):
            raise ValueError(f"need 0 < lbm < lb, got lbm={self.lbm}, lb={self.lb}")


@dataclass(frozen=True)
class Household:
    household_id: str
    region_id: str
    locality_id: Optional[str]
    block_id: Optional[str]
    block_coords: Optional[tuple[float, float]]  # (latitude, longitude)
    location_class: LocationClass
    n_members: int

    def __post_init__(self) -> None:
        if self.block_id is not None and self.locality_id is None:
            raise ValueError(f"{self.household_id}: block_id set without locality_id")
        if (self.block_coords is None) != (self.block_id is None):
            raise ValueError(f"{self.household_id}: block_coords must accompany block_id")
        if self.n_members <= 0:
            raise ValueError(f"{self.household_id}: n_members must be positive")


@dataclass(frozen=True)
class Survey:
    """One application survey. Absent question ids mean the answer is missing."""

    household_id: str
    answers: dict[str, AnswerValue]
    self_reported_income: float
    estimated_income: float
    indicator_labels: dict[PovertyIndicator, LabelValue]

    def __post_init__(self) -> None:
        if self.self_reported_income < 0 or self.estimated_income < 0:
            raise ValueError(f"{self.household_id}: incomes must be non-negative")

    def label(self, indicator: PovertyIndicator) -> LabelValue:
        return self.indicator_labels.get(indicator, LabelValue.MISSING)


@dataclass(frozen=True)
class VerificationRecord:
    household_id: str
    entries: dict[str, VerificationStatus]  # question_id -> status
    surveyor_flag: bool

    @property
    def any_discrepancy(self) -> bool:
        return any(s is not VerificationStatus.MATCH for s in self.entries.values())

    @property
    def n_discrepancies(self) -> int:
        return sum(1 for s in self.entries.values() if s is not VerificationStatus.MATCH)


@dataclass(frozen=True)
class Transaction:
    household_id: str
    program_id: str
    benefit_id: str
    amount: float
    date: dt.date

    def __post_init__(self) -> None:
        if self.amount < 0:
            raise ValueError(f"{self.household_id}: amount must be >= 0")


@dataclass(frozen=True)
class CensusBlock:
    block_id: str
    locality_id: str
    coords: tuple[float, float]
    aggregates: dict[str, float]  # aggregate name -> proportion in [0, 1]

    def __post_init__(self) -> None:
        for name, value in self.aggregates.items():
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{self.block_id}: aggregate {name}={value} outside [0, 1]")


@dataclass(frozen=True)
class Locality:
    locality_id: str
    region_id: str
    coords: tuple[float, float]
    location_class: LocationClass


@dataclass(frozen=True)
class GroundTruth:
    """Hidden generator state; serialized to a sidecar file, never fed to learners."""

    household_id: str
    true_indicators: dict[PovertyIndicator, bool]
    underreport_propensity: float
    development_level: float


@dataclass(frozen=True)
class CorpusConfig:
    n_households: int = 10_000
    n_regions: int = 34
    n_localities: int = 60
    n_blocks_per_locality: int = 8
    n_programs: int = 8
    locality_known_fraction: float = 0.41
    block_known_fraction: float = 0.85
    verification_fraction: float = 0.06
    target_any_discrepancy_rate: float = 0.70
    target_leq3_share: float = 0.91
    social_security_lack_prevalence: float = 0.92
    label_missing_rate: float = 0.02
    answer_missing_rate: float = 0.03
    # direction bias per dignity question: probability a discrepancy is over-reported
    overreport_bias: tuple[tuple[str, float], ...] = (
        ("owns_stove", 0.98),
        ("owns_air_conditioner", 0.989),
    )
    default_overreport_bias: float = 0.55
    geographic_signal: float = 1.0
    programmatic_signal: float = 1.0
    income_understate_scale: float = 0.5
    urban_lines: tuple[float, float] = (1_650.0, 3_250.0)  # (lbm, lb)
    rural_lines: tuple[float, float] = (1_150.0, 2_150.0)
    seed: int = 0

    def __post_init__(self) -> None:
        fractions = {
            "locality_known_fraction": self.locality_known_fraction,
            "block_known_fraction": self.block_known_fraction,
            "verification_fraction": self.verification_fraction,
            "target_any_discrepancy_rate": self.target_any_discrepancy_rate,
            "target_leq3_share": self.target_leq3_share,
            "social_security_lack_prevalence": self.social_security_lack_prevalence,
            "label_missing_rate": self.label_missing_rate,
            "answer_missing_rate": self.answer_missing_rate,
            "default_overreport_bias": self.default_overreport_bias,
        }
        for name, value in fractions.items():
            if not (0.0 <= value <= 1.0):
                raise ConfigError(f"{name}={value} outside [0, 1]")
        for question, bias in self.overreport_bias:
            if not (0.0 <= bias <= 1.0):
                raise ConfigError(f"overreport_bias[{question}]={bias} outside [0, 1]")
        for name in ("n_households", "n_regions", "n_localities", "n_blocks_per_locality", "n_programs"):
            if getattr(self, name) < 0 or (name != "n_households" and getattr(self, name) == 0):
                raise ConfigError(f"{name} must be positive")
        for name, (lbm, lb) in (("urban_lines", self.urban_lines), ("rural_lines", self.rural_lines)):
            if not (0 < lbm < lb):
                raise ConfigError(f"{name}: need 0 < lbm < lb, got {(lbm, lb)}")

    def bias_for(self, question_id: str) -> float:
        for q, b in self.overreport_bias:
            if q == question_id:
                return b
        return self.default_overreport_bias

    def welfare_lines(self, location_class: LocationClass) -> WelfareLines:
        lbm, lb = self.urban_lines if location_class is LocationClass.URBAN else self.rural_lines
        return WelfareLines(location_class, lbm, lb)


class ConfigError(ValueError):
    """Raised when a corpus or experiment configuration is invalid."""


@dataclass
class Corpus:
    """An immutable-by-convention bundle of all generated or loaded entities.

    Orderings are canonical (sorted by id) so that serialization is
    byte-reproducible and equality is structural.
    """

    config: CorpusConfig
    households: dict[str, Household] = field(default_factory=dict)
    surveys: dict[str, Survey] = field(default_factory=dict)
    verifications: dict[str, VerificationRecord] = field(default_factory=dict)
    transactions: list[Transaction] = field(default_factory=list)
    blocks: dict[str, CensusBlock] = field(default_factory=dict)
    localities: dict[str, Locality] = field(default_factory=dict)
    ground_truth: dict[str, GroundTruth] = field(default_factory=dict)

    @property
    def household_ids(self) -> list[str]:
        return sorted(self.households)

    @property
    def region_ids(self) -> list[str]:
        return sorted({h.region_id for h in self.households.values()})

    @property
    def program_ids(self) -> list[str]:
        return sorted({t.program_id for t in self.transactions})

    def transactions_by_household(self) -> dict[str, list[Transaction]]:
        byhh: dict[str, list[Transaction]] = {}
        for t in self.transactions:
            byhh.setdefault(t.household_id, []).append(t)
        return byhh

    def welfare_lines(self, household_id: str) -> WelfareLines:
        return self.config.welfare_lines(self.households[household_id].location_class)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return (
            self.config == other.config
            and self.households == other.households
            and self.surveys == other.surveys
            and self.verifications == other.verifications
            and sorted(self.transactions, key=_txn_key) == sorted(other.transactions, key=_txn_key)
            and self.blocks == other.blocks
            and self.localities == other.localities
            and self.ground_truth == other.ground_truth
        )


def _txn_key(t: Transaction) -> tuple:
    return (t.household_id, t.program_id, t.benefit_id, t.date.isoformat(), t.amount)
