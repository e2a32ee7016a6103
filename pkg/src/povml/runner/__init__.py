"""Config-driven experiment runner, manifest, reports, and CLI."""

from .config import OUTPUT_ROOT_ENV, ExperimentConfig, resolve_output
from .manifest import JobEntry, RunManifest, run_id_for
from .run import Job, RunSummary, enumerate_jobs, run

__all__ = [
    "ExperimentConfig",
    "Job",
    "JobEntry",
    "OUTPUT_ROOT_ENV",
    "RunManifest",
    "RunSummary",
    "enumerate_jobs",
    "resolve_output",
    "run",
    "run_id_for",
]
