"""Experiment runner: enumeration, idempotence, isolation, crash recovery, CLI."""

import json
import shutil
from pathlib import Path

import pytest
from click.testing import CliRunner

from povml.corpus import CorpusConfig, PovertyIndicator
from povml.evaluation.cv import task_rows_and_labels
from povml.runner import ExperimentConfig, RunManifest, enumerate_jobs, run
from povml.runner.cli import main as cli_main
from povml.runner.run import training_rows_fingerprint


def small_config(out_dir, parallelism=1, seed=1) -> ExperimentConfig:
    return ExperimentConfig.from_dict({
        "output_dir": str(out_dir),
        "corpus": {"generate": {"n_households": 400, "n_regions": 3, "n_localities": 9,
                                "n_blocks_per_locality": 3, "verification_fraction": 0.5,
                                "seed": 5}},
        "tasks": ["underreporting", "education"],
        "models": [{"kind": "majority"}, {"kind": "gbm", "estimators": 4}],
        "feature_sets": ["transactional", "combined"],
        "folds": 3,
        "seed": seed,
        "parallelism": parallelism,
    })


@pytest.fixture(scope="module")
def finished_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("runner") / "run"
    config = small_config(out)
    summary = run(config)
    return out, config, summary


class TestEnumeration:
    def test_job_count_is_the_product(self, finished_run):
        _, config, summary = finished_run
        assert len(summary.manifest.jobs) == 3 * 2 * 2 * 2

    def test_replica_scale_enumeration(self, tmp_path):
        config = ExperimentConfig.from_dict({
            "output_dir": str(tmp_path / "big"),
            "corpus": {"generate": {"n_households": 0, "n_regions": 34}},
            "tasks": [i.value for i in PovertyIndicator.ordered()],
            "models": [
                {"kind": "knn", "neighbors": 12}, {"kind": "knn", "neighbors": 25},
                {"kind": "gbm", "estimators": 100}, {"kind": "gbm", "estimators": 150},
                {"kind": "random_forest", "trees": 50}, {"kind": "random_forest", "trees": 100},
            ],
            "feature_sets": ["geographic", "socioeconomic", "transactional", "combined"],
        })
        regions = [f"R{i + 1:02d}" for i in range(34)]
        jobs = enumerate_jobs(config, regions)
        assert len(jobs) == 34 * 6 * 6 * 4
        assert len({j.job_id for j in jobs}) == len(jobs)


class TestIdempotence:
    def test_rerun_executes_nothing(self, finished_run):
        out, config, _ = finished_run
        again = run(small_config(out))
        assert again.n_executed == 0

    def test_reproducible_grid_export(self, finished_run, tmp_path):
        out, _, _ = finished_run
        other = run(small_config(tmp_path / "other"))
        a = (out / "grid_curves.csv").read_text()
        b = (tmp_path / "other" / "grid_curves.csv").read_text()
        assert a == b

    def test_crash_resume_matches_uninterrupted(self, finished_run, tmp_path):
        out, _, summary = finished_run
        crashed = tmp_path / "crashed"
        shutil.copytree(out, crashed)
        manifest = RunManifest.read(crashed / "manifest.json")
        victims = sorted(manifest.jobs)[:3]
        for job_id in victims:
            manifest.jobs[job_id].status = "pending"
            manifest.jobs[job_id].artifacts = {}
            shutil.rmtree(crashed / "jobs" / job_id, ignore_errors=True)
        manifest.write(crashed / "manifest.json")

        resumed = run(small_config(crashed))
        assert resumed.n_executed == len(victims)

        def normalized(m: RunManifest):
            return {
                job_id: (e.status, e.reason, sorted(Path(p).name for p in e.artifacts.values()))
                for job_id, e in m.jobs.items()
            }

        assert normalized(resumed.manifest) == normalized(summary.manifest)


class TestRegionalIsolation:
    def test_training_rows_hash_matches_region_slice(self, finished_run):
        out, _, summary = finished_run
        from povml.corpus import load_corpus

        corpus = load_corpus(out / "corpus")
        checked = 0
        for job_id, entry in summary.manifest.jobs.items():
            sha_path = entry.artifacts.get("training_rows")
            if not sha_path:
                continue
            region, task_str = job_id.split("__")[:2]
            from povml.evaluation.cv import task_from_name

            ids, _ = task_rows_and_labels(corpus, task_from_name(task_str), region)
            assert all(corpus.households[h].region_id == region for h in ids)
            assert Path(sha_path).read_text().strip() == training_rows_fingerprint(ids)
            checked += 1
        assert checked > 0


class TestFailureHandling:
    def test_failed_job_recorded_and_run_continues(self, tmp_path, monkeypatch):
        import povml.runner.run as run_module

        real_run_cv = run_module.run_cv
        calls = {"n": 0}

        def flaky(task, region, spec, feature_set, folds, corpus, grid_step):
            calls["n"] += 1
            if calls["n"] == 1:
                raise RuntimeError("injected failure")
            return real_run_cv(task, region, spec, feature_set, folds, corpus, grid_step)

        monkeypatch.setattr(run_module, "run_cv", flaky)
        summary = run(small_config(tmp_path / "flaky"))
        counts = summary.manifest.counts()
        assert counts["failed"] == 1
        assert counts["done"] == len(summary.manifest.jobs) - 1
        assert not summary.ok

    def test_unknown_region_rejected(self, tmp_path):
        config = small_config(tmp_path / "bad")
        config.regions = ["R99"]
        with pytest.raises(Exception, match="R99"):
            run(config)


class TestParallel:
    def test_parallel_matches_serial(self, finished_run, tmp_path):
        out, _, _ = finished_run
        parallel = run(small_config(tmp_path / "par", parallelism=3))
        assert parallel.ok
        assert (tmp_path / "par" / "grid_curves.csv").read_text() == \
            (out / "grid_curves.csv").read_text()


class TestCli:
    def test_corpus_generate_and_validate(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "corpus"
        result = runner.invoke(cli_main, ["corpus", "generate", "--n", "800",
                                          "--seed", "42", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert (out / "households.csv").exists()
        result = runner.invoke(cli_main, ["corpus", "validate", "--dir", str(out)])
        assert result.exit_code == 0, result.output
        assert "corpus OK" in result.output

    def test_experiment_run_and_status(self, finished_run):
        out, _, _ = finished_run
        runner = CliRunner()
        result = runner.invoke(cli_main, ["experiment", "status", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert "done" in result.output

    def test_experiment_dry_run_counts(self, tmp_path):
        config_path = tmp_path / "exp.json"
        config_path.write_text(json.dumps({
            "output_dir": str(tmp_path / "never"),
            "corpus": {"generate": {"n_households": 0, "n_regions": 2}},
            "tasks": ["education"],
            "models": [{"kind": "majority"}],
            "feature_sets": ["transactional"],
        }))
        runner = CliRunner()
        result = runner.invoke(cli_main, ["experiment", "run", "--config",
                                          str(config_path), "--dry-run"])
        assert result.exit_code == 0, result.output
        assert "2 jobs" in result.output

    def test_report_curves_writes_csv_and_png(self, finished_run, tmp_path):
        out, _, _ = finished_run
        runner = CliRunner()
        stem = tmp_path / "curves_report"
        result = runner.invoke(cli_main, [
            "report", "curves", "--run", str(out), "--region", "R01",
            "--task", "education", "--out", str(stem)])
        assert result.exit_code == 0, result.output
        assert stem.with_suffix(".csv").exists()
        assert stem.with_suffix(".png").exists()

    def test_report_importances_writes_csv_and_png(self, finished_run, tmp_path):
        out, _, summary = finished_run
        job_id = next(j for j, e in sorted(summary.manifest.jobs.items())
                      if "gbm" in j and e.status == "done")
        runner = CliRunner()
        stem = tmp_path / "imp_report"
        result = runner.invoke(cli_main, [
            "report", "importances", "--run", str(out), "--job", job_id,
            "--out", str(stem)])
        assert result.exit_code == 0, result.output
        assert stem.with_suffix(".csv").exists()
        assert stem.with_suffix(".png").exists()

    def test_report_programs_writes_csv_and_png(self, finished_run, tmp_path):
        out, _, _ = finished_run
        runner = CliRunner()
        stem = tmp_path / "prog_report"
        result = runner.invoke(cli_main, [
            "report", "programs", "--corpus", str(out / "corpus"),
            "--indicator", "education", "--out", str(stem)])
        assert result.exit_code == 0, result.output
        assert stem.with_suffix(".csv").exists()
        assert stem.with_suffix(".png").exists()

    def test_usage_error_exit_code_2(self):
        runner = CliRunner()
        result = runner.invoke(cli_main, ["corpus", "generate", "--bogus-flag"])
        assert result.exit_code == 2
        result = runner.invoke(cli_main, ["experiment", "run"])
        assert result.exit_code == 2
