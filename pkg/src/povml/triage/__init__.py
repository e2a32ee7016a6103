"""Analyst triage: household records, tunable ranking, JSON API."""

from .api import create_app
from .artifacts import RunArtifacts, load_run_artifacts
from .ranking import FORMULA_VERSION, RankedRecord, TriageWeights, rank
from .records import TriageRecord, score_corpus, with_fading

__all__ = [
    "FORMULA_VERSION",
    "RankedRecord",
    "RunArtifacts",
    "TriageRecord",
    "TriageWeights",
    "create_app",
    "load_run_artifacts",
    "rank",
    "score_corpus",
    "with_fading",
]
