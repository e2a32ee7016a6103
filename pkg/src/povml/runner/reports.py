"""Report emitters: every report writes a delimited file and a rendered figure."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from ..corpus.io import load_corpus
from ..corpus.types import PovertyIndicator
from ..evaluation.analytics import program_indicator_table
from ..evaluation.cv import pipeline_from_dict
from ..evaluation.curves import baseline_references
from ..triage.artifacts import _grid_rows
from .manifest import RunManifest


def _curve_filter(rows, region, task, model, feature_set):
    for row in rows:
        if region is not None and row["region"] != region:
            continue
        if task is not None and row["task"] != task:
            continue
        if model is not None and row["model"] != model:
            continue
        if feature_set is not None and row["feature_set"] != feature_set:
            continue
        yield row


def report_curves(
    run_dir: str | Path,
    region: Optional[str],
    task: Optional[str],
    model: Optional[str] = None,
    feature_set: Optional[str] = None,
    out: Optional[str | Path] = None,
) -> tuple[Path, Path]:
    """Filtered curve points as CSV plus a precision/recall figure (PNG)."""
    run_dir = Path(run_dir)
    rows = list(_curve_filter(_grid_rows(run_dir / "grid_curves.csv"),
                              region, task, model, feature_set))
    if not rows:
        raise ValueError("no curve points match the requested filters")
    stem = Path(out) if out else run_dir / "reports" / _slug("curves", region, task, model, feature_set)
    stem.parent.mkdir(parents=True, exist_ok=True)
    csv_path = stem.with_suffix(".csv")
    with csv_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["region", "task", "model", "feature_set", "fold",
                         "threshold", "proportion_flagged", "precision", "recall"])
        for r in rows:
            writer.writerow([r["region"], r["task"], r["model"], r["feature_set"], r["fold"],
                             repr(r["threshold"]), repr(r["proportion_flagged"]),
                             "NA" if r["precision"] is None else repr(r["precision"]),
                             repr(r["recall"])])

    fig, (ax_p, ax_r) = plt.subplots(1, 2, figsize=(10, 4), sharex=True)
    series: dict[tuple, list] = {}
    for r in rows:
        series.setdefault((r["model"], r["feature_set"], r["fold"]), []).append(r)
    prevalences = []
    for (mdl, fs, fold), pts in sorted(series.items()):
        pts = sorted(pts, key=lambda r: r["proportion_flagged"])
        label = f"{mdl}/{fs}" if fold == 0 else None
        defined = [(p["proportion_flagged"], p["precision"]) for p in pts if p["precision"] is not None]
        if defined:
            ax_p.plot(*zip(*defined), lw=1.0, alpha=0.8, label=label)
            prevalences.append(defined[0][1] if pts[0]["proportion_flagged"] == 1.0 else None)
        ax_r.plot([p["proportion_flagged"] for p in pts], [p["recall"] for p in pts],
                  lw=1.0, alpha=0.8)
    flagged_full = [r["precision"] for r in rows
                    if r["proportion_flagged"] == 1.0 and r["precision"] is not None]
    if flagged_full:
        ref = baseline_references(sum(flagged_full) / len(flagged_full))
        ax_p.axhline(ref.prevalence, color="gray", ls="--", lw=1.0, label="flag-everyone precision")
    ax_r.plot([0, 1], [0, 1], color="gray", ls="--", lw=1.0, label="random-flagging recall")
    ax_p.set_xlabel("proportion flagged")
    ax_p.set_ylabel("precision")
    ax_r.set_xlabel("proportion flagged")
    ax_r.set_ylabel("recall")
    title = " / ".join(x for x in (region, task, model, feature_set) if x)
    fig.suptitle(title)
    ax_p.legend(fontsize=7, loc="best")
    fig.tight_layout()
    png_path = stem.with_suffix(".png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return csv_path, png_path


def report_importances(run_dir: str | Path, job_id: str, top: int = 20,
                       out: Optional[str | Path] = None) -> tuple[Path, Path]:
    """Feature importances of a job's fitted pipeline: CSV plus bar chart."""
    run_dir = Path(run_dir)
    manifest = RunManifest.read(run_dir / "manifest.json")
    entry = manifest.jobs.get(job_id)
    if entry is None:
        raise KeyError(f"unknown job {job_id!r}")
    pipeline_path = entry.artifacts.get("pipeline")
    if not pipeline_path:
        raise KeyError(f"job {job_id!r} has no pipeline artifact")
    pipeline = pipeline_from_dict(json.loads(Path(pipeline_path).read_text(encoding="utf-8")))
    report = pipeline.model.importances()

    stem = Path(out) if out else run_dir / "reports" / f"importances__{job_id}"
    stem.parent.mkdir(parents=True, exist_ok=True)
    csv_path = stem.with_suffix(".csv")
    with csv_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["column", "importance"])
        for name, value in sorted(report.entries, key=lambda e: (-e[1], e[0])):
            writer.writerow([name, repr(value)])

    ranked = sorted(report.entries, key=lambda e: (-e[1], e[0]))[:top]
    fig, ax = plt.subplots(figsize=(7, max(3, 0.3 * len(ranked))))
    names = [n for n, _ in ranked][::-1]
    values = [v for _, v in ranked][::-1]
    ax.barh(names, values, color="#33608c")
    ax.set_xlabel("normalized importance")
    ax.set_title(f"top features: {job_id}")
    fig.tight_layout()
    png_path = stem.with_suffix(".png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return csv_path, png_path


def report_programs(corpus_dir: str | Path, indicator: PovertyIndicator,
                    out: Optional[str | Path] = None) -> tuple[Path, Path]:
    """Program-conditional indicator proportions with 95% CIs: CSV plus figure."""
    corpus = load_corpus(corpus_dir)
    table = program_indicator_table(corpus, indicator)
    stem = Path(out) if out else Path(corpus_dir) / "reports" / f"programs__{indicator.value}"
    stem.parent.mkdir(parents=True, exist_ok=True)
    csv_path = stem.with_suffix(".csv")
    with csv_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["program_id", "n_enrolled", "n_labeled",
                         "proportion_lacking", "ci_low", "ci_high"])
        for row in table.rows:
            writer.writerow([row.program_id, row.n_enrolled, row.n_labeled,
                             repr(row.proportion_lacking), repr(row.ci_low), repr(row.ci_high)])
        for note in table.notes:
            fh.write(f"# {note}\n")

    fig, ax = plt.subplots(figsize=(7, 4))
    xs = range(len(table.rows))
    ax.errorbar(
        xs,
        [r.proportion_lacking for r in table.rows],
        yerr=[[r.proportion_lacking - r.ci_low for r in table.rows],
              [r.ci_high - r.proportion_lacking for r in table.rows]],
        fmt="o", capsize=3, color="#8c3333",
    )
    if table.overall_prevalence is not None:
        ax.axhline(table.overall_prevalence, color="gray", ls="--", lw=1.0,
                   label="overall prevalence")
        ax.legend(fontsize=8)
    ax.set_xticks(list(xs))
    ax.set_xticklabels([r.program_id for r in table.rows], rotation=45, ha="right")
    ax.set_ylabel(f"proportion lacking {indicator.value}")
    fig.tight_layout()
    png_path = stem.with_suffix(".png")
    fig.savefig(png_path, dpi=120)
    plt.close(fig)
    return csv_path, png_path


def _slug(*parts: Optional[str]) -> str:
    return "__".join(p for p in parts if p)
