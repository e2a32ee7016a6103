"""Deterministic synthetic corpus generator with planted, verifiable signals.

Signal layout:
  * basic-services and dwelling-quality deprivations follow a latent
    block-level development surface (geographic signal),
  * education, health-services, and food deprivations follow program
    enrollment (transactional signal),
  * social-security deprivation is feature-free noise at its configured
    prevalence,
  * dignity assets (stove, air conditioner) are overwhelmingly over-reported
    when a discrepancy is planted.

Discrepancy counts are planted by exact-count selection (who gets one is a
weighted draw, how many get one is fixed by rounding) so the calibration
targets hold tightly for every seed, not just in expectation.
"""

from __future__ import annotations

import datetime as dt
import math

import numpy as np

from . import schema
from .types import (
    CensusBlock,
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
)

TRANSACTION_WINDOW = (dt.date(2015, 10, 1), dt.date(2015, 12, 31))

# Base log-odds per indicator before any planted signal term.
_BASE_LOGIT = {
    PovertyIndicator.EDUCATION: -1.55,
    PovertyIndicator.HEALTH_SERVICES: -1.6,
    PovertyIndicator.DWELLING_QUALITY: -1.0,
    PovertyIndicator.BASIC_SERVICES: -0.85,
    PovertyIndicator.FOOD: -1.5,
}
# Development slope for the geographically driven indicators (negated: more
# development means fewer deprivations).
_GEO_SLOPE = {
    PovertyIndicator.BASIC_SERVICES: 1.9,
    PovertyIndicator.DWELLING_QUALITY: 1.6,
}
_PROPENSITY_SELECTION_SLOPE = 2.5
# Distribution of planted discrepancy counts inside the <=3 and >3 groups.
_SMALL_COUNT_PROBS = (0.626, 0.263, 0.111)  # K = 1, 2, 3
_BIG_COUNT_DECAY = 0.55  # K = 4..len(verifiable), geometric decay

_BLOCK_AGGREGATES = (
    ("electricity_rate", 1.5, 1.3),
    ("piped_water_rate", 1.0, 1.2),
    ("drainage_rate", 0.8, 1.3),
    ("school_attendance_rate", 1.2, 0.9),
    ("literacy_rate", 1.6, 0.8),
    ("dirt_floor_rate", -1.0, -1.3),
)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _weighted_subset(rng: np.random.Generator, weights: np.ndarray, k: int) -> np.ndarray:
    """Indices of a size-k weighted sample without replacement (Gumbel top-k)."""
    if k <= 0:
        return np.empty(0, dtype=np.int64)
    keys = np.log(weights) + rng.gumbel(size=weights.shape[0])
    return np.argpartition(-keys, k - 1)[:k]


def generate_corpus(config: CorpusConfig) -> Corpus:
    """Generate a corpus; identical config (including seed) gives identical output."""
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(9)]
    (rng_geo, rng_assign, rng_latent, rng_enroll, rng_label,
     rng_answer, rng_misreport, rng_txn, rng_mask) = rngs

    geo = _make_geography(config, rng_geo)
    n = config.n_households

    # --- household placement and observability masks ------------------------
    loc_weights = np.exp(0.3 * geo["loc_dev"])
    loc_weights /= loc_weights.sum()
    hh_loc = rng_assign.choice(len(geo["loc_ids"]), size=n, p=loc_weights)
    hh_block_within = rng_assign.integers(0, config.n_blocks_per_locality, size=n)
    hh_block = hh_loc * config.n_blocks_per_locality + hh_block_within
    dev = geo["block_dev"][hh_block]

    order = rng_mask.permutation(n)
    n_loc_known = _round_half_up(config.locality_known_fraction * n)
    locality_known = np.zeros(n, dtype=bool)
    locality_known[order[:n_loc_known]] = True
    known_idx = np.flatnonzero(locality_known)
    block_known = np.zeros(n, dtype=bool)
    if known_idx.size:
        n_blk = _round_half_up(config.block_known_fraction * known_idx.size)
        block_known[known_idx[rng_mask.permutation(known_idx.size)[:n_blk]]] = True

    # --- latents, enrollment, indicators ------------------------------------
    propensity = rng_latent.uniform(0.0, 1.0, size=n)
    need = rng_latent.normal(0.0, 1.0, size=n)

    programs = [schema.program_archetype(i) for i in range(config.n_programs)]
    enrolled = np.zeros((n, config.n_programs), dtype=bool)
    for j, prog in enumerate(programs):
        p = _sigmoid(prog.enroll_base + prog.need_slope * need)
        enrolled[:, j] = rng_enroll.uniform(size=n) < p

    true_ind = _plant_indicators(config, programs, enrolled, dev, rng_label)
    label_missing = rng_label.uniform(size=(n, len(PovertyIndicator.ordered()))) < config.label_missing_rate

    # --- incomes ------------------------------------------------------------
    n_lack = sum(true_ind[ind].astype(int) for ind in PovertyIndicator.ordered())
    lbm = np.where(
        geo["loc_urban"][hh_loc],
        config.urban_lines[0],
        config.rural_lines[0],
    )
    estimated_income = lbm * (1.45 - 0.13 * n_lack) * np.exp(rng_latent.normal(0.0, 0.22, size=n))
    estimated_income = np.maximum(estimated_income, 0.15 * lbm)
    honesty = 1.0 - config.income_understate_scale * propensity + rng_latent.normal(0.0, 0.05, size=n)
    self_reported_income = np.maximum(estimated_income * honesty, 0.0)

    # --- survey answers and planted misreports ------------------------------
    answers = _draw_answers(config, dev, propensity, geo, hh_loc, rng_answer, n)
    verified = np.zeros(n, dtype=bool)
    n_verified = _round_half_up(config.verification_fraction * n)
    verified[rng_mask.permutation(n)[:n_verified]] = True

    misreports: dict[int, dict[str, VerificationStatus]] = {}
    for subset in (np.flatnonzero(verified), np.flatnonzero(~verified)):
        misreports.update(_plant_misreports(config, subset, propensity, rng_misreport))
    _apply_misreports(answers, misreports)

    answer_dropped = rng_answer.uniform(size=(n, len(schema.QUESTIONS))) < config.answer_missing_rate

    # --- transactions --------------------------------------------------------
    transactions = _draw_transactions(config, programs, enrolled, rng_txn)

    # --- materialize ----------------------------------------------------------
    return _materialize(
        config=config,
        geo=geo,
        hh_loc=hh_loc,
        hh_block=hh_block,
        locality_known=locality_known,
        block_known=block_known,
        dev=dev,
        propensity=propensity,
        true_ind=true_ind,
        label_missing=label_missing,
        estimated_income=estimated_income,
        self_reported_income=self_reported_income,
        answers=answers,
        answer_dropped=answer_dropped,
        misreports=misreports,
        verified=verified,
        transactions=transactions,
        rng_mask=rng_mask,
    )


def _make_geography(config: CorpusConfig, rng: np.random.Generator) -> dict:
    n_reg, n_loc = config.n_regions, config.n_localities
    grid = math.ceil(math.sqrt(n_reg))
    centers = np.array(
        [(16.0 + 3.2 * (i // grid), -114.0 + 3.4 * (i % grid)) for i in range(n_reg)]
    )
    region_ids = [f"R{i + 1:02d}" for i in range(n_reg)]

    loc_region = np.arange(n_loc) % n_reg
    loc_coords = centers[loc_region] + rng.uniform(-0.7, 0.7, size=(n_loc, 2))

    # Smooth per-region development surface: a few Gaussian bumps plus noise.
    bump_centers = centers[:, None, :] + rng.uniform(-0.9, 0.9, size=(n_reg, 3, 2))
    bump_weights = rng.normal(0.0, 1.0, size=(n_reg, 3))
    d2 = ((loc_coords[:, None, :] - bump_centers[loc_region]) ** 2).sum(axis=2)
    loc_dev = (bump_weights[loc_region] * np.exp(-d2 / (2 * 0.5**2))).sum(axis=1)
    loc_dev = loc_dev + rng.normal(0.0, 0.4, size=n_loc)
    spread = loc_dev.std()
    loc_dev = (loc_dev - loc_dev.mean()) / (spread if spread > 0 else 1.0)
    loc_urban = rng.uniform(size=n_loc) < _sigmoid(0.4 + 1.0 * loc_dev)

    n_blocks = n_loc * config.n_blocks_per_locality
    block_loc = np.repeat(np.arange(n_loc), config.n_blocks_per_locality)
    block_coords = loc_coords[block_loc] + rng.uniform(-0.04, 0.04, size=(n_blocks, 2))
    block_dev = loc_dev[block_loc] + rng.normal(0.0, 0.3, size=n_blocks)
    block_aggs = {
        name: np.clip(_sigmoid(base + slope * block_dev + rng.normal(0.0, 0.25, size=n_blocks)), 0.0, 1.0)
        for name, base, slope in _BLOCK_AGGREGATES
    }

    loc_ids = [f"L{i + 1:03d}" for i in range(n_loc)]
    block_ids = [
        f"{loc_ids[block_loc[b]]}-B{b % config.n_blocks_per_locality + 1}" for b in range(n_blocks)
    ]
    return {
        "region_ids": region_ids,
        "loc_ids": loc_ids,
        "loc_region": loc_region,
        "loc_coords": loc_coords,
        "loc_dev": loc_dev,
        "loc_urban": loc_urban,
        "block_ids": block_ids,
        "block_loc": block_loc,
        "block_coords": block_coords,
        "block_dev": block_dev,
        "block_aggs": block_aggs,
    }


def _plant_indicators(config, programs, enrolled, dev, rng) -> dict[PovertyIndicator, np.ndarray]:
    n = dev.shape[0]
    effects: dict[PovertyIndicator, np.ndarray] = {}
    for ind in PovertyIndicator.ordered():
        if ind is PovertyIndicator.SOCIAL_SECURITY:
            effects[ind] = (rng.uniform(size=n) < config.social_security_lack_prevalence)
            continue
        logit = np.full(n, _BASE_LOGIT[ind])
        if ind in _GEO_SLOPE:
            logit -= config.geographic_signal * _GEO_SLOPE[ind] * dev
        for j, prog in enumerate(programs):
            for target, coeff in prog.indicator_effects:
                if target is ind:
                    logit += config.programmatic_signal * coeff * enrolled[:, j]
        effects[ind] = rng.uniform(size=n) < _sigmoid(logit)
    return effects


def planted_probabilities(corpus: Corpus, indicator: PovertyIndicator) -> dict[str, float]:
    """True per-household deprivation probability under the generative model.

    Reconstructed from the ground-truth sidecar plus the transaction ledger;
    used by tests as a Bayes-rate oracle, not by any learner.
    """
    config = corpus.config
    programs = [schema.program_archetype(i) for i in range(config.n_programs)]
    enrolled_ids = {
        (t.household_id, t.program_id) for t in corpus.transactions
    }
    out: dict[str, float] = {}
    for hh_id in corpus.household_ids:
        if indicator is PovertyIndicator.SOCIAL_SECURITY:
            out[hh_id] = config.social_security_lack_prevalence
            continue
        logit = _BASE_LOGIT[indicator]
        if indicator in _GEO_SLOPE:
            logit -= config.geographic_signal * _GEO_SLOPE[indicator] * corpus.ground_truth[hh_id].development_level
        for j, prog in enumerate(programs):
            if (hh_id, schema.program_id(j)) in enrolled_ids:
                for target, coeff in prog.indicator_effects:
                    if target is indicator:
                        logit += config.programmatic_signal * coeff
        out[hh_id] = float(_sigmoid(np.array(logit)))
    return out


def _draw_answers(config, dev, propensity, geo, hh_loc, rng, n) -> dict[str, np.ndarray]:
    """Raw answer (and hidden truth) arrays per question, before misreports."""
    u = propensity
    answers: dict[str, np.ndarray] = {}

    asset_logits = {
        "owns_stove": 0.9 + 0.8 * dev,
        "owns_air_conditioner": -1.1 + 0.9 * dev,
        "owns_refrigerator": 0.5 + 0.8 * dev,
        "owns_washing_machine": -0.2 + 0.8 * dev,
        "owns_television": 1.3 + 0.6 * dev,
        "owns_vehicle": -0.8 + 0.7 * dev,
        "has_electricity": 1.8 + 1.2 * dev,
        "has_piped_water": 1.0 + 1.1 * dev,
        "has_drainage": 0.8 + 1.2 * dev,
        "internet_access": -1.3 + 1.0 * dev,
    }
    for qid, logit in asset_logits.items():
        truth = rng.uniform(size=n) < _sigmoid(logit)
        answers["truth:" + qid] = truth
        answers[qid] = truth.copy()

    rooms_true = 1 + rng.poisson(np.maximum(1.5 + 0.9 * dev, 0.3), size=n)
    answers["truth:rooms_reported"] = rooms_true
    answers["rooms_reported"] = rooms_true.copy()
    answers["n_bedrooms"] = np.maximum(1, rooms_true - 1 - rng.integers(0, 2, size=n))

    floor_score = dev + rng.normal(0.0, 0.8, size=n)
    floor_true = np.digitize(floor_score, [-0.6, 0.7])  # 0 dirt, 1 cement, 2 tile
    answers["truth:floor_material"] = floor_true
    answers["floor_material"] = floor_true.copy()
    wall_score = dev + rng.normal(0.0, 0.9, size=n)
    answers["wall_material"] = np.digitize(wall_score, [-0.8, 0.4])  # sheet, adobe, brick
    answers["roof_material"] = (dev + rng.normal(0.0, 0.9, size=n) > -0.2).astype(np.int64)  # sheet, concrete
    water_score = dev + rng.normal(0.0, 0.8, size=n)
    answers["water_source"] = np.digitize(water_score, [-0.7, 0.3])  # well, truck, piped
    edu_score = dev + rng.normal(0.0, 1.0, size=n)
    answers["education_level_head"] = np.digitize(edu_score, [-1.0, 0.1, 1.2])

    state_weights = np.full(32, 1.0)
    state_weights[14] = 6.0  # one dominant populous state
    state_weights /= state_weights.sum()
    answers["state_of_birth"] = rng.choice(32, size=n, p=state_weights)

    answers["respondent_age"] = np.clip(np.round(rng.normal(46.0, 14.0, size=n)), 18, 95)
    answers["n_children"] = rng.poisson(np.maximum(1.8 - 0.4 * dev, 0.1), size=n)
    answers["meals_per_day"] = np.clip(
        np.round(2.9 + 0.4 * dev - 1.1 * u + rng.normal(0.0, 0.4, size=n)), 1, 5
    )
    base_food = np.where(geo["loc_urban"][hh_loc], 1_900.0, 1_300.0)
    answers["food_spending_monthly"] = np.round(
        base_food * np.exp(0.3 * dev + rng.normal(0.0, 0.2, size=n)) * (1.0 - 0.45 * u), 2
    )
    answers["vegetable_consumption_weekly"] = np.clip(
        np.round(rng.poisson(np.maximum(5.0 + 1.5 * dev, 0.5), size=n) * (1.0 - 0.3 * u)), 0, 21
    )
    answers["milk_consumption_weekly"] = np.clip(
        np.round(rng.poisson(np.maximum(4.0 + 1.2 * dev, 0.4), size=n) * (1.0 - 0.3 * u)), 0, 21
    )
    answers["fruit_consumption_weekly"] = np.clip(
        np.round(rng.poisson(np.maximum(4.5 + 1.3 * dev, 0.4), size=n) * (1.0 - 0.3 * u)), 0, 21
    )
    return answers


def _plant_misreports(
    config: CorpusConfig,
    subset: np.ndarray,
    propensity: np.ndarray,
    rng: np.random.Generator,
) -> dict[int, dict[str, VerificationStatus]]:
    """Plant per-household misreports inside one subset with exact-count calibration."""
    size = subset.size
    if size == 0:
        return {}
    n_any = _round_half_up(config.target_any_discrepancy_rate * size)
    weights = np.exp(_PROPENSITY_SELECTION_SLOPE * propensity[subset])
    chosen = subset[_weighted_subset(rng, weights, n_any)]
    chosen = chosen[rng.permutation(chosen.size)]

    max_k = len(schema.VERIFIABLE_QUESTION_IDS)
    n_small = _round_half_up(config.target_leq3_share * n_any)
    counts = np.empty(n_any, dtype=np.int64)
    counts[:n_small] = rng.choice([1, 2, 3], size=n_small, p=_SMALL_COUNT_PROBS)
    if n_any > n_small:
        big_support = np.arange(4, max_k + 1)
        big_probs = _BIG_COUNT_DECAY ** (big_support - 4)
        big_probs /= big_probs.sum()
        counts[n_small:] = rng.choice(big_support, size=n_any - n_small, p=big_probs)

    qids = list(schema.VERIFIABLE_QUESTION_IDS)
    qweights = np.array([schema.DISCREPANCY_WEIGHTS[q] for q in qids])
    # Gumbel top-k keys give a weighted sample without replacement per household.
    keys = np.log(qweights)[None, :] + rng.gumbel(size=(n_any, max_k))
    ranked = np.argsort(-keys, axis=1)

    per_question: dict[str, list[int]] = {q: [] for q in qids}
    chosen_questions: list[list[str]] = []
    for row in range(n_any):
        picked = [qids[j] for j in ranked[row, : counts[row]]]
        chosen_questions.append(picked)
        for q in picked:
            per_question[q].append(row)

    # Exact direction planting: floor((1 - bias) * count) instances are
    # under-reported, so the under share never exceeds (1 - bias).
    direction: dict[tuple[int, str], VerificationStatus] = {}
    for q, rows in per_question.items():
        c = len(rows)
        if c == 0:
            continue
        n_under = int(math.floor((1.0 - config.bias_for(q)) * c))
        under_rows = set(np.array(rows)[rng.permutation(c)[:n_under]].tolist())
        for r in rows:
            direction[(r, q)] = (
                VerificationStatus.UNDER_REPORTED if r in under_rows else VerificationStatus.OVER_REPORTED
            )

    return {
        int(chosen[row]): {q: direction[(row, q)] for q in chosen_questions[row]}
        for row in range(n_any)
    }


def _apply_misreports(answers: dict[str, np.ndarray], misreports: dict[int, dict[str, VerificationStatus]]) -> None:
    """Force (answer, truth) pairs consistent with each planted direction."""
    for i, qmap in misreports.items():
        for qid, status in qmap.items():
            over = status is VerificationStatus.OVER_REPORTED
            if qid == "rooms_reported":
                if over:
                    answers[qid][i] = answers["truth:" + qid][i] + 1
                else:
                    answers["truth:" + qid][i] = max(answers["truth:" + qid][i], 2)
                    answers[qid][i] = answers["truth:" + qid][i] - 1
            elif qid == "floor_material":
                if over:
                    answers["truth:" + qid][i] = min(answers["truth:" + qid][i], 1)
                    answers[qid][i] = answers["truth:" + qid][i] + 1
                else:
                    answers["truth:" + qid][i] = max(answers["truth:" + qid][i], 1)
                    answers[qid][i] = answers["truth:" + qid][i] - 1
            else:  # boolean asset: over-report claims ownership that is not there
                answers["truth:" + qid][i] = not over
                answers[qid][i] = over


def _draw_transactions(config, programs, enrolled, rng) -> list[Transaction]:
    start, end = TRANSACTION_WINDOW
    n_days = (end - start).days + 1
    out: list[Transaction] = []
    for j, prog in enumerate(programs):
        hh_idx = np.flatnonzero(enrolled[:, j])
        if hh_idx.size == 0:
            continue
        n_pay = 1 + rng.binomial(5, prog.payment_p, size=hh_idx.size)
        total = int(n_pay.sum())
        day_offsets = rng.integers(0, n_days, size=total)
        benefit_idx = rng.integers(0, prog.benefit_count, size=total)
        amounts = np.round(prog.base_amount * np.exp(rng.normal(0.0, 0.3, size=total)), 2)
        pid = schema.program_id(j)
        pos = 0
        for hh, k in zip(hh_idx, n_pay):
            for _ in range(k):
                out.append(
                    Transaction(
                        household_id=_household_id(int(hh)),
                        program_id=pid,
                        benefit_id=f"{pid}-B{benefit_idx[pos] + 1}",
                        amount=float(amounts[pos]),
                        date=start + dt.timedelta(days=int(day_offsets[pos])),
                    )
                )
                pos += 1
    out.sort(key=lambda t: (t.household_id, t.program_id, t.date.isoformat(), t.benefit_id, t.amount))
    return out


def _household_id(index: int) -> str:
    return f"H{index + 1:06d}"


def _materialize(
    *, config, geo, hh_loc, hh_block, locality_known, block_known, dev, propensity,
    true_ind, label_missing, estimated_income, self_reported_income, answers,
    answer_dropped, misreports, verified, transactions, rng_mask,
) -> Corpus:
    n = config.n_households
    localities = {
        lid: Locality(
            locality_id=lid,
            region_id=geo["region_ids"][geo["loc_region"][i]],
            coords=(float(geo["loc_coords"][i, 0]), float(geo["loc_coords"][i, 1])),
            location_class=LocationClass.URBAN if geo["loc_urban"][i] else LocationClass.RURAL,
        )
        for i, lid in enumerate(geo["loc_ids"])
    }
    blocks = {
        bid: CensusBlock(
            block_id=bid,
            locality_id=geo["loc_ids"][geo["block_loc"][b]],
            coords=(float(geo["block_coords"][b, 0]), float(geo["block_coords"][b, 1])),
            aggregates={name: float(vals[b]) for name, vals in sorted(geo["block_aggs"].items())},
        )
        for b, bid in enumerate(geo["block_ids"])
    }

    n_members = np.clip(2 + rng_mask.poisson(np.maximum(1.6 - 0.3 * dev, 0.2), size=n), 1, 14) if n else np.empty(0)

    households: dict[str, Household] = {}
    surveys: dict[str, Survey] = {}
    verif: dict[str, VerificationRecord] = {}
    gts: dict[str, GroundTruth] = {}
    indicators = PovertyIndicator.ordered()
    surveyor_noise = rng_mask.uniform(size=n) < 0.1 if n else np.empty(0)

    for i in range(n):
        hh_id = _household_id(i)
        loc_i = int(hh_loc[i])
        lid = geo["loc_ids"][loc_i] if locality_known[i] else None
        bid = geo["block_ids"][hh_block[i]] if block_known[i] else None
        coords = None
        if bid is not None:
            coords = (float(geo["block_coords"][hh_block[i], 0]), float(geo["block_coords"][hh_block[i], 1]))
        households[hh_id] = Household(
            household_id=hh_id,
            region_id=geo["region_ids"][geo["loc_region"][loc_i]],
            locality_id=lid,
            block_id=bid,
            block_coords=coords,
            location_class=localities[geo["loc_ids"][loc_i]].location_class,
            n_members=int(n_members[i]),
        )

        planted = misreports.get(i, {})
        answer_map = _answer_map(i, answers, answer_dropped, planted)
        labels = {
            ind: LabelValue.MISSING if label_missing[i, k]
            else (LabelValue.LACKING if true_ind[ind][i] else LabelValue.NOT_LACKING)
            for k, ind in enumerate(indicators)
        }
        surveys[hh_id] = Survey(
            household_id=hh_id,
            answers=answer_map,
            self_reported_income=float(np.round(self_reported_income[i], 2)),
            estimated_income=float(np.round(estimated_income[i], 2)),
            indicator_labels=labels,
        )

        if verified[i]:
            entries = {
                q: planted.get(q, VerificationStatus.MATCH)
                for q in schema.VERIFIABLE_QUESTION_IDS
                if q in answer_map or q in planted
            }
            any_disc = any(s is not VerificationStatus.MATCH for s in entries.values())
            verif[hh_id] = VerificationRecord(
                household_id=hh_id,
                entries=entries,
                surveyor_flag=bool(any_disc ^ bool(surveyor_noise[i])),
            )

        gts[hh_id] = GroundTruth(
            household_id=hh_id,
            true_indicators={ind: bool(true_ind[ind][i]) for ind in indicators},
            underreport_propensity=float(propensity[i]),
            development_level=float(dev[i]),
        )

    return Corpus(
        config=config,
        households=households,
        surveys=surveys,
        verifications=verif,
        transactions=transactions,
        blocks=blocks,
        localities=localities,
        ground_truth=gts,
    )


def _answer_map(i, answers, answer_dropped, planted) -> dict:
    """Materialize one household's answers; misreported questions always answered."""
    out: dict = {}
    for k, q in enumerate(schema.QUESTIONS):
        qid = q.question_id
        if answer_dropped[i, k] and qid not in planted:
            continue
        raw = answers[qid][i]
        if q.kind == "boolean":
            out[qid] = bool(raw)
        elif q.kind == "categorical":
            out[qid] = q.levels[int(raw)]
        else:
            out[qid] = float(raw)
    return out
