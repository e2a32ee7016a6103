"""Experiment configuration: JSON in, validated dataclass out, full echo back."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..corpus.io import config_from_dict, config_to_dict
from ..corpus.types import ConfigError, CorpusConfig
from ..evaluation.cv import Task, task_from_name, task_name
from ..features.assemble import FEATURE_SETS
from ..learners.spec import ModelSpec

OUTPUT_ROOT_ENV = "POVML_OUTPUT_ROOT"


def resolve_output(path: str | Path) -> Path:
    """Relative outputs land under $POVML_OUTPUT_ROOT when it is set."""
    path = Path(path)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not path.is_absolute():
        return Path(root) / path
    return path


@dataclass
class ExperimentConfig:
    output_dir: Path
    tasks: list[Task]
    models: list[ModelSpec]
    feature_sets: list[str]
    corpus_generate: Optional[CorpusConfig] = None
    corpus_load: Optional[Path] = None
    regions: Optional[list[str]] = None  # None = every region in the corpus
    folds: int = 5
    seed: int = 0
    parallelism: int = 1
    grid_step: float = 0.01
    notes: str = ""
    _echo: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self) -> None:
        if (self.corpus_generate is None) == (self.corpus_load is None):
            raise ConfigError("corpus must specify exactly one of generate/load")
        if not self.tasks:
            raise ConfigError("at least one task required")
        if not self.models:
            raise ConfigError("at least one model required")
        if not self.feature_sets:
            raise ConfigError("at least one feature set required")
        for fs in self.feature_sets:
            if fs not in FEATURE_SETS:
                raise ConfigError(f"unknown feature set {fs!r}")
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        if not (0 < self.grid_step <= 1):
            raise ConfigError("grid_step must be in (0, 1]")

    def to_dict(self) -> dict:
        return {
            "output_dir": str(self.output_dir),
            "corpus": (
                {"generate": config_to_dict(self.corpus_generate)}
                if self.corpus_generate is not None
                else {"load": str(self.corpus_load)}
            ),
            "tasks": [task_name(t) for t in self.tasks],
            "regions": self.regions,
            "models": [dataclasses.asdict(m) for m in self.models],
            "feature_sets": list(self.feature_sets),
            "folds": self.folds,
            "seed": self.seed,
            "parallelism": self.parallelism,
            "grid_step": self.grid_step,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        corpus = data.get("corpus")
        if not isinstance(corpus, dict):
            raise ConfigError("config needs a 'corpus' object with generate or load")
        generate = load = None
        if "generate" in corpus:
            generate = config_from_dict(corpus["generate"])
        if "load" in corpus:
            load = Path(corpus["load"])
        try:
            tasks = [task_from_name(t) for t in data.get("tasks", [])]
        except ValueError as exc:
            raise ConfigError(f"unknown task: {exc}") from exc
        try:
            models = [ModelSpec(**m) for m in data.get("models", [])]
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid model spec: {exc}") from exc
        config = cls(
            output_dir=resolve_output(data.get("output_dir", "povml_run")),
            tasks=tasks,
            models=models,
            feature_sets=list(data.get("feature_sets", [])),
            corpus_generate=generate,
            corpus_load=load,
            regions=data.get("regions"),
            folds=int(data.get("folds", 5)),
            seed=int(data.get("seed", 0)),
            parallelism=int(data.get("parallelism", 1)),
            grid_step=float(data.get("grid_step", 0.01)),
            notes=str(data.get("notes", "")),
        )
        config._echo = data
        return config

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc.msg} (line {exc.lineno})") from exc
        return cls.from_dict(data)
