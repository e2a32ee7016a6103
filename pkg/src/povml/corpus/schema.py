"""Fixed survey schema and program catalog used by the generator and parsers.

The question list covers the answer types the feature builders need (numeric,
boolean, categorical) and includes the housing questions a home-verification
visit can check. Dignity-prone assets (stove, air conditioner) carry the
highest discrepancy weights.
"""

from __future__ import annotations

from dataclasses import dataclass

from .types import PovertyIndicator


@dataclass(frozen=True)
class Question:
    question_id: str
    kind: str  # "numeric" | "boolean" | "categorical"
    levels: tuple[str, ...] = ()
    verifiable: bool = False

    def __post_init__(self) -> None:
        if self.kind == "categorical" and not self.levels:
            raise ValueError(f"{self.question_id}: categorical question needs levels")


STATE_LEVELS = tuple(f"state_{i:02d}" for i in range(1, 33))

QUESTIONS: tuple[Question, ...] = (
    Question("respondent_age", "numeric"),
    Question("n_children", "numeric"),
    Question("meals_per_day", "numeric"),
    Question("food_spending_monthly", "numeric"),
    Question("vegetable_consumption_weekly", "numeric"),
    Question("milk_consumption_weekly", "numeric"),
    Question("fruit_consumption_weekly", "numeric"),
    Question("rooms_reported", "numeric", verifiable=True),
    Question("n_bedrooms", "numeric"),
    Question("owns_stove", "boolean", verifiable=True),
    Question("owns_air_conditioner", "boolean", verifiable=True),
    Question("owns_refrigerator", "boolean", verifiable=True),
    Question("owns_washing_machine", "boolean", verifiable=True),
    Question("owns_television", "boolean", verifiable=True),
    Question("owns_vehicle", "boolean"),
    Question("has_electricity", "boolean", verifiable=True),
    Question("has_piped_water", "boolean", verifiable=True),
    Question("has_drainage", "boolean", verifiable=True),
    Question("internet_access", "boolean"),
    Question("floor_material", "categorical", ("dirt", "cement", "tile"), verifiable=True),
    Question("wall_material", "categorical", ("sheet", "adobe", "brick")),
    Question("roof_material", "categorical", ("sheet", "concrete")),
    Question("water_source", "categorical", ("well", "truck", "piped")),
    Question("education_level_head", "categorical", ("none", "primary", "secondary", "upper")),
    Question("state_of_birth", "categorical", STATE_LEVELS),
)

QUESTION_IDS: tuple[str, ...] = tuple(q.question_id for q in QUESTIONS)
QUESTIONS_BY_ID: dict[str, Question] = {q.question_id: q for q in QUESTIONS}
VERIFIABLE_QUESTION_IDS: tuple[str, ...] = tuple(q.question_id for q in QUESTIONS if q.verifiable)

# Relative chance each verifiable question is the site of a planted discrepancy.
DISCREPANCY_WEIGHTS: dict[str, float] = {
    "owns_stove": 0.26,
    "owns_air_conditioner": 0.20,
    "owns_refrigerator": 0.10,
    "owns_television": 0.08,
    "owns_washing_machine": 0.08,
    "rooms_reported": 0.08,
    "floor_material": 0.06,
    "has_electricity": 0.05,
    "has_piped_water": 0.05,
    "has_drainage": 0.04,
}

# Categorical levels are declared worst-to-best where ordinal, so planted
# misreport directions can move along the level axis.


@dataclass(frozen=True)
class ProgramArchetype:
    """A benefit program with its per-indicator log-odds contributions."""

    name: str
    enroll_base: float  # logit of the enrollment probability at need = 0
    need_slope: float  # how strongly household latent need drives enrollment
    indicator_effects: tuple[tuple[PovertyIndicator, float], ...]
    benefit_count: int
    base_amount: float
    payment_p: float  # per-opportunity payment probability inside the window


PROGRAM_ARCHETYPES: tuple[ProgramArchetype, ...] = (
    ProgramArchetype(
        "senior_pension", -1.25, 0.5,
        ((PovertyIndicator.EDUCATION, 2.2), (PovertyIndicator.HEALTH_SERVICES, -0.6)),
        benefit_count=2, base_amount=1_100.0, payment_p=0.55,
    ),
    ProgramArchetype(
        "school_scholarship", -1.1, 0.4,
        ((PovertyIndicator.EDUCATION, -1.8),),
        benefit_count=2, base_amount=650.0, payment_p=0.5,
    ),
    ProgramArchetype(
        "milk_distribution", -0.9, 0.3,
        ((PovertyIndicator.EDUCATION, -1.0), (PovertyIndicator.FOOD, -0.7)),
        benefit_count=1, base_amount=180.0, payment_p=0.7,
    ),
    ProgramArchetype(
        "food_support", -1.0, 0.6,
        ((PovertyIndicator.FOOD, 2.0), (PovertyIndicator.EDUCATION, -0.7)),
        benefit_count=2, base_amount=560.0, payment_p=0.6,
    ),
    ProgramArchetype(
        "health_outreach", -1.15, 0.5,
        ((PovertyIndicator.HEALTH_SERVICES, 2.1),),
        benefit_count=1, base_amount=420.0, payment_p=0.45,
    ),
    ProgramArchetype(
        "adult_literacy", -1.5, 0.4,
        ((PovertyIndicator.EDUCATION, 1.9),),
        benefit_count=1, base_amount=300.0, payment_p=0.4,
    ),
    ProgramArchetype(
        "home_energy", -1.4, 0.2,
        ((PovertyIndicator.EDUCATION, -0.9), (PovertyIndicator.HEALTH_SERVICES, -0.5)),
        benefit_count=1, base_amount=480.0, payment_p=0.5,
    ),
    ProgramArchetype(
        "cash_transfer", -0.7, 0.7,
        ((PovertyIndicator.FOOD, 0.9), (PovertyIndicator.HEALTH_SERVICES, 0.6)),
        benefit_count=3, base_amount=900.0, payment_p=0.65,
    ),
)


def program_id(index: int) -> str:
    return f"P{index + 1:02d}"


def program_archetype(index: int) -> ProgramArchetype:
    """Archetype for the index-th program; cycles neutrally past the catalog."""
    if index < len(PROGRAM_ARCHETYPES):
        return PROGRAM_ARCHETYPES[index]
    return ProgramArchetype(
        f"general_support_{index}", -1.6, 0.3, (),
        benefit_count=1, base_amount=350.0, payment_p=0.5,
    )
