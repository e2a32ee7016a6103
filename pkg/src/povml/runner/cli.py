"""Command-line entry points.

Exit codes: 0 success, 1 job/validation failures, 2 usage errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..corpus.generate import generate_corpus
from ..corpus.io import CorpusParseError, config_from_dict, load_corpus, save_corpus
from ..corpus.types import ConfigError, CorpusConfig, PovertyIndicator
from ..corpus.validate import validate_corpus
from .config import ExperimentConfig, resolve_output
from .manifest import RunManifest
from .run import run as run_experiment


@click.group()
def main() -> None:
    """Synthetic social-assistance corpus, model grid runner, and triage service."""


@main.group()
def corpus() -> None:
    """Generate and validate corpora."""


@corpus.command("generate")
@click.option("--n", type=int, default=None, help="Number of households.")
@click.option("--seed", type=int, default=None, help="Generator seed.")
@click.option("--out", "out_dir", required=True, type=click.Path(), help="Output directory.")
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="JSON file of corpus settings; --n/--seed override it.")
def corpus_generate(n, seed, out_dir, config_path) -> None:
    """Generate a synthetic corpus into a directory."""
    settings = {}
    if config_path:
        settings = json.loads(Path(config_path).read_text(encoding="utf-8"))
    if n is not None:
        settings["n_households"] = n
    if seed is not None:
        settings["seed"] = seed
    try:
        cfg = config_from_dict(settings) if settings else CorpusConfig()
    except (ConfigError, TypeError) as exc:
        raise click.UsageError(f"invalid corpus config: {exc}")
    target = resolve_output(out_dir)
    save_corpus(generate_corpus(cfg), target)
    click.echo(f"corpus written to {target} ({cfg.n_households} households, seed {cfg.seed})")


@corpus.command("validate")
@click.option("--dir", "corpus_dir", required=True, type=click.Path(exists=True))
def corpus_validate(corpus_dir) -> None:
    """Check integrity, calibration, and planted signals of a corpus directory."""
    try:
        loaded = load_corpus(corpus_dir)
    except CorpusParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(1)
    report = validate_corpus(loaded)
    for line in report.lines():
        click.echo(line)
    if not report.ok:
        sys.exit(1)


@main.group()
def experiment() -> None:
    """Run and inspect model-grid experiments."""


@experiment.command("run")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--dry-run", is_flag=True, help="Enumerate jobs without executing.")
def experiment_run(config_path, dry_run) -> None:
    """Execute every (region x task x model x feature set) job in the config."""
    try:
        config = ExperimentConfig.from_file(config_path)
    except ConfigError as exc:
        raise click.UsageError(str(exc))
    if dry_run:
        from ..corpus.generate import generate_corpus as gen
        from .run import enumerate_jobs

        if config.regions is not None:
            regions = config.regions
        elif config.corpus_load is not None:
            regions = load_corpus(config.corpus_load).region_ids
        else:
            regions = [f"R{i + 1:02d}" for i in range(config.corpus_generate.n_regions)]
        jobs = enumerate_jobs(config, regions)
        for job in jobs:
            click.echo(job.job_id)
        click.echo(f"{len(jobs)} jobs")
        return
    try:
        summary = run_experiment(config)
    except (ConfigError, CorpusParseError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    counts = summary.manifest.counts()
    click.echo(f"executed {summary.n_executed} jobs "
               f"(done {counts['done']}, degenerate {counts['degenerate']}, "
               f"failed {counts['failed']})")
    click.echo(f"manifest: {summary.manifest_path}")
    if not summary.ok:
        sys.exit(1)


@experiment.command("status")
@click.option("--out", "out_dir", required=True, type=click.Path(exists=True))
def experiment_status(out_dir) -> None:
    """Print per-job status from a run's manifest."""
    manifest = RunManifest.read(Path(out_dir) / "manifest.json")
    for job_id, entry in sorted(manifest.jobs.items()):
        line = f"{entry.status:10s} {job_id}"
        if entry.reason:
            line += f"  ({entry.reason})"
        if entry.wall_clock_s is not None:
            line += f"  [{entry.wall_clock_s:.1f}s]"
        click.echo(line)
    counts = manifest.counts()
    click.echo(f"total {len(manifest.jobs)}: " + ", ".join(f"{k}={v}" for k, v in counts.items()))


@main.group()
def report() -> None:
    """Render delimited reports and figures from a finished run."""


@report.command("curves")
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--region", default=None)
@click.option("--task", default=None)
@click.option("--model", default=None)
@click.option("--feature-set", default=None)
@click.option("--out", default=None, type=click.Path())
def report_curves_cmd(run_dir, region, task, model, feature_set, out) -> None:
    """Export PR-curve points and render the matching figure."""
    from .reports import report_curves

    try:
        csv_path, png_path = report_curves(run_dir, region, task, model, feature_set, out)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    click.echo(f"wrote {csv_path}")
    click.echo(f"wrote {png_path}")


@report.command("importances")
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--job", "job_id", required=True)
@click.option("--top", type=int, default=20, show_default=True)
@click.option("--out", default=None, type=click.Path())
def report_importances_cmd(run_dir, job_id, top, out) -> None:
    """Export a job's feature importances and render a bar chart."""
    from ..learners.spec import UnsupportedModelError
    from .reports import report_importances

    try:
        csv_path, png_path = report_importances(run_dir, job_id, top, out)
    except KeyError as exc:
        raise click.UsageError(str(exc))
    except UnsupportedModelError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    click.echo(f"wrote {csv_path}")
    click.echo(f"wrote {png_path}")


@report.command("programs")
@click.option("--corpus", "corpus_dir", required=True, type=click.Path(exists=True))
@click.option("--indicator", required=True,
              type=click.Choice([i.value for i in PovertyIndicator.ordered()]))
@click.option("--out", default=None, type=click.Path())
def report_programs_cmd(corpus_dir, indicator, out) -> None:
    """Export program-conditional indicator proportions and render the figure."""
    from .reports import report_programs

    csv_path, png_path = report_programs(corpus_dir, PovertyIndicator(indicator), out)
    click.echo(f"wrote {csv_path}")
    click.echo(f"wrote {png_path}")


@main.command("serve")
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--job", "job_id", default=None, help="Underreporting job to serve.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--ui-dir", default=None, type=click.Path(), help="Static frontend bundle.")
def serve(run_dir, job_id, host, port, ui_dir) -> None:
    """Serve the triage API (and the analyst UI when a bundle is provided)."""
    import uvicorn

    from ..triage.api import create_app
    from ..triage.artifacts import load_run_artifacts

    try:
        artifacts = load_run_artifacts(run_dir, job_id)
    except (ValueError, CorpusParseError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    app = create_app(artifacts, ui_dir=ui_dir)
    click.echo(f"serving run {artifacts.run_id} ({len(artifacts.records)} records) "
               f"on http://{host}:{port}")
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
