"""Experiment runner: enumerate jobs, execute with a worker pool, persist artifacts.

Each job is one (region, task, model, feature set) combination, a pure
function of the corpus slice and the config. The manifest is the only
shared state; it is updated by the parent process after each completion.
"""

from __future__ import annotations

import hashlib
import time
import traceback
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from ..corpus.io import load_corpus, save_corpus
from ..corpus.generate import generate_corpus
from ..corpus.types import ConfigError, Corpus
from ..evaluation.cv import (
    Task,
    fit_task_pipeline,
    pipeline_to_dict,
    run_cv,
    task_from_name,
    task_name,
    task_rows_and_labels,
)
from ..evaluation.folds import FoldAssignment, make_grouped_folds
from ..evaluation.grid import EvalGrid
from ..learners.spec import ModelSpec
from .config import ExperimentConfig
from .manifest import JobEntry, RunManifest, run_id_for


@dataclass(frozen=True)
class Job:
    region: str
    task: Task
    spec: ModelSpec
    feature_set: str

    @property
    def job_id(self) -> str:
        return f"{self.region}__{task_name(self.task)}__{self.spec.model_id()}__{self.feature_set}"


@dataclass
class RunSummary:
    manifest: RunManifest
    manifest_path: Path
    n_executed: int

    @property
    def ok(self) -> bool:
        return self.manifest.n_failed == 0


def enumerate_jobs(config: ExperimentConfig, regions: list[str]) -> list[Job]:
    return [
        Job(region=r, task=t, spec=m, feature_set=f)
        for r in regions
        for t in config.tasks
        for m in config.models
        for f in config.feature_sets
    ]


def _resolve_corpus(config: ExperimentConfig, out_dir: Path) -> tuple[Corpus, Path]:
    if config.corpus_load is not None:
        return load_corpus(config.corpus_load), Path(config.corpus_load)
    corpus_dir = out_dir / "corpus"
    if (corpus_dir / "corpus_meta.json").exists():
        return load_corpus(corpus_dir), corpus_dir
    corpus = generate_corpus(config.corpus_generate)
    save_corpus(corpus, corpus_dir)
    return corpus, corpus_dir


def training_rows_fingerprint(ids: list[str]) -> str:
    return hashlib.sha256("|".join(sorted(ids)).encode("utf-8")).hexdigest()[:16]


# Worker-process state: the corpus is loaded once per process, not per job.
_WORKER_STATE: dict = {}


def _init_worker(corpus_dir: str) -> None:
    _WORKER_STATE["corpus"] = load_corpus(corpus_dir)


def _execute_job(args: tuple) -> tuple[str, str, str, dict, float]:
    """Run one job; returns (job_id, status, reason, artifacts, wall_clock)."""
    (job_id, region, task_str, spec, feature_set, fold_assignment, job_dir, grid_step) = args
    corpus = _WORKER_STATE["corpus"]
    task = task_from_name(task_str)
    started = time.perf_counter()
    job_dir = Path(job_dir)
    job_dir.mkdir(parents=True, exist_ok=True)

    result = run_cv(task, region, spec, feature_set, fold_assignment, corpus, grid_step)
    grid = EvalGrid()
    grid.add_result(result)
    artifacts = {"curves": str(grid.write_curves_csv(job_dir / "curves.csv"))}
    degenerate_path = grid.write_degenerate_csv(job_dir / "degenerate.csv")
    if degenerate_path is not None:
        artifacts["degenerate"] = str(degenerate_path)
    if grid.archive:
        artifacts["archive"] = str(grid.write_archive_csv(job_dir / "archive.csv"))

    status, reason = "done", ""
    if not result.curves:
        status = "degenerate"
        reason = "; ".join(sorted(set(result.degenerate.values()))) or "no folds produced curves"
    else:
        import json

        pipeline = fit_task_pipeline(corpus, task, spec, feature_set, region)
        pipeline_path = job_dir / "pipeline.json"
        pipeline_path.write_text(json.dumps(pipeline_to_dict(pipeline)), encoding="utf-8")
        artifacts["pipeline"] = str(pipeline_path)
        ids, _ = task_rows_and_labels(corpus, task, region)
        (job_dir / "training_rows.sha").write_text(training_rows_fingerprint(ids) + "\n", encoding="utf-8")
        artifacts["training_rows"] = str(job_dir / "training_rows.sha")
    return job_id, status, reason, artifacts, time.perf_counter() - started


def run(config: ExperimentConfig) -> RunSummary:
    """Execute all configured jobs; idempotent over an existing manifest."""
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus, corpus_dir = _resolve_corpus(config, out_dir)

    regions = config.regions if config.regions is not None else corpus.region_ids
    known = set(corpus.region_ids)
    unknown = [r for r in regions if r not in known]
    if unknown:
        raise ConfigError(f"regions not present in corpus: {unknown}")

    manifest_path = out_dir / "manifest.json"
    echo = config.to_dict()
    run_id = run_id_for(echo)
    if manifest_path.exists():
        manifest = RunManifest.read(manifest_path)
        if manifest.run_id != run_id:
            raise ConfigError(
                f"output dir {out_dir} holds a different run ({manifest.run_id}); "
                f"this config hashes to {run_id}"
            )
    else:
        manifest = RunManifest(run_id=run_id, config_echo=echo)

    jobs = enumerate_jobs(config, regions)
    for job in jobs:
        manifest.jobs.setdefault(job.job_id, JobEntry())
    manifest.write(manifest_path)

    folds = make_grouped_folds(corpus.household_ids, config.folds, config.seed) if corpus.households else None
    todo = [
        job for job in jobs
        if manifest.jobs[job.job_id].status in ("pending", "failed")
    ]
    n_executed = 0

    def record(job_id: str, status: str, reason: str, artifacts: dict, wall: float) -> None:
        manifest.jobs[job_id] = JobEntry(status=status, reason=reason,
                                         artifacts=artifacts, wall_clock_s=round(wall, 3))
        manifest.write(manifest_path)

    def job_args(job: Job) -> tuple:
        return (job.job_id, job.region, task_name(job.task), job.spec, job.feature_set,
                folds, str(out_dir / "jobs" / job.job_id), config.grid_step)

    if todo and folds is None:
        for job in todo:
            record(job.job_id, "degenerate", "empty corpus", {}, 0.0)
            n_executed += 1
    elif config.parallelism == 1 or len(todo) <= 1:
        _WORKER_STATE["corpus"] = corpus
        for job in todo:
            try:
                result = _execute_job(job_args(job))
                record(*result)
            except Exception as exc:  # job failures are recorded, never fatal
                record(job.job_id, "failed", f"{type(exc).__name__}: {exc}", {}, 0.0)
                traceback.print_exc()
            n_executed += 1
    else:
        with ProcessPoolExecutor(
            max_workers=config.parallelism,
            initializer=_init_worker,
            initargs=(str(corpus_dir),),
        ) as pool:
            pending = {pool.submit(_execute_job, job_args(job)): job for job in todo}
            while pending:
                finished, _ = wait(pending, return_when=FIRST_COMPLETED)
                for future in finished:
                    job = pending.pop(future)
                    try:
                        record(*future.result())
                    except Exception as exc:
                        record(job.job_id, "failed", f"{type(exc).__name__}: {exc}", {}, 0.0)
                    n_executed += 1

    _write_merged_grid(out_dir, manifest)
    return RunSummary(manifest=manifest, manifest_path=manifest_path, n_executed=n_executed)


def _write_merged_grid(out_dir: Path, manifest: RunManifest) -> None:
    """Single collection point: concatenate per-job curve exports, sorted by job id."""
    merged = out_dir / "grid_curves.csv"
    header_written = False
    with merged.open("w", encoding="utf-8") as out:
        for job_id in sorted(manifest.jobs):
            curves = manifest.jobs[job_id].artifacts.get("curves")
            if not curves or not Path(curves).exists():
                continue
            lines = Path(curves).read_text(encoding="utf-8").splitlines()
            if not lines:
                continue
            if not header_written:
                out.write(lines[0] + "\n")
                header_written = True
            out.write("\n".join(lines[1:]))
            if len(lines) > 1:
                out.write("\n")
        if not header_written:
            out.write("region,task,model,feature_set,fold,threshold,proportion_flagged,precision,recall\n")
