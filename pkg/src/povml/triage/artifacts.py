"""Load a finished run directory into the artifacts the triage service needs."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..corpus.io import load_corpus
from ..corpus.types import Corpus
from ..evaluation.cv import UNDERREPORTING, pipeline_from_dict
from ..learners.spec import ImportanceReport
from ..runner.manifest import RunManifest
from .records import TriageRecord, score_corpus


@dataclass
class RunArtifacts:
    run_id: str
    run_dir: Path
    corpus: Corpus
    records: list[TriageRecord]
    manifest: RunManifest
    triage_job_id: str
    grid_rows: list[dict] = field(default_factory=list)

    def importances_for(self, job_id: str) -> ImportanceReport:
        entry = self.manifest.jobs.get(job_id)
        if entry is None:
            raise KeyError(f"unknown job {job_id!r}")
        pipeline_path = entry.artifacts.get("pipeline")
        if not pipeline_path:
            raise KeyError(f"job {job_id!r} has no fitted pipeline artifact")
        pipeline = pipeline_from_dict(json.loads(Path(pipeline_path).read_text(encoding="utf-8")))
        return pipeline.model.importances()


def _grid_rows(path: Path) -> list[dict]:
    if not path.exists():
        return []
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = []
        for rec in reader:
            rows.append({
                "region": rec["region"],
                "task": rec["task"],
                "model": rec["model"],
                "feature_set": rec["feature_set"],
                "fold": int(rec["fold"]),
                "threshold": float(rec["threshold"]),
                "proportion_flagged": float(rec["proportion_flagged"]),
                "precision": None if rec["precision"] == "NA" else float(rec["precision"]),
                "recall": float(rec["recall"]),
            })
    return rows


def _pick_triage_job(manifest: RunManifest, requested: Optional[str]) -> str:
    if requested is not None:
        entry = manifest.jobs.get(requested)
        if entry is None or "pipeline" not in entry.artifacts:
            raise ValueError(f"job {requested!r} is missing or has no pipeline")
        return requested
    candidates = [
        job_id for job_id, entry in sorted(manifest.jobs.items())
        if entry.status == "done"
        and f"__{UNDERREPORTING}__" in f"_{job_id}_"
        and "pipeline" in entry.artifacts
    ]
    if not candidates:
        raise ValueError("run has no completed underreporting job to serve")
    combined = [j for j in candidates if j.endswith("__combined")]
    return (combined or candidates)[0]


def load_run_artifacts(run_dir: str | Path, job_id: Optional[str] = None) -> RunArtifacts:
    run_dir = Path(run_dir)
    manifest = RunManifest.read(run_dir / "manifest.json")
    corpus_dir = run_dir / "corpus"
    if not (corpus_dir / "corpus_meta.json").exists():
        load_from = manifest.config_echo.get("corpus", {}).get("load")
        if not load_from:
            raise ValueError(f"run {run_dir} has no corpus directory")
        corpus_dir = Path(load_from)
    corpus = load_corpus(corpus_dir)

    chosen = _pick_triage_job(manifest, job_id)
    pipeline_path = Path(manifest.jobs[chosen].artifacts["pipeline"])
    pipeline = pipeline_from_dict(json.loads(pipeline_path.read_text(encoding="utf-8")))
    records = score_corpus(pipeline, corpus)
    return RunArtifacts(
        run_id=manifest.run_id,
        run_dir=run_dir,
        corpus=corpus,
        records=records,
        manifest=manifest,
        triage_job_id=chosen,
        grid_rows=_grid_rows(run_dir / "grid_curves.csv"),
    )
