"""Row filters applied before modeling."""

from __future__ import annotations

from .types import Corpus, LabelValue, PovertyIndicator


def _restrict(corpus: Corpus, keep: set[str]) -> Corpus:
    """New corpus containing exactly `keep` households and their dependent records."""
    return Corpus(
        config=corpus.config,
        households={h: corpus.households[h] for h in corpus.households if h in keep},
        surveys={h: s for h, s in corpus.surveys.items() if h in keep},
        verifications={h: v for h, v in corpus.verifications.items() if h in keep},
        transactions=[t for t in corpus.transactions if t.household_id in keep],
        blocks=dict(corpus.blocks),
        localities=dict(corpus.localities),
        ground_truth={h: g for h, g in corpus.ground_truth.items() if h in keep},
    )


def apply_locality_filter(corpus: Corpus) -> Corpus:
    """Drop households with no locality-level information, plus their records."""
    keep = {h for h, hh in corpus.households.items() if hh.locality_id is not None}
    return _restrict(corpus, keep)


def drop_missing_labels(corpus: Corpus, indicator: PovertyIndicator) -> Corpus:
    """Drop households whose label for `indicator` is missing (per-task filter)."""
    keep = {
        h for h, s in corpus.surveys.items()
        if s.label(indicator) is not LabelValue.MISSING
    }
    # Households without a survey have no label either.
    return _restrict(corpus, keep)
