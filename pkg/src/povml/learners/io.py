"""Exact-round-trip model serialization (JSON; floats via repr semantics)."""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

from .models import LEARNER_TYPES
from .spec import ModelSpec, TrainedModel

FORMAT_VERSION = 1


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "spec": dataclasses.asdict(model.spec),
        "column_names": list(model.column_names),
        "column_kinds": list(model.column_kinds),
        "schema_fingerprint": model.schema_fingerprint,
        "n_training_rows": model.n_training_rows,
        "degenerate": model.degenerate,
        "learner_tag": model.learner.tag,
        "learner": model.learner.to_dict(),
    }


def model_from_dict(data: dict) -> TrainedModel:
    if data.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported model format {data.get('format_version')}")
    learner_cls = LEARNER_TYPES[data["learner_tag"]]
    return TrainedModel(
        spec=ModelSpec(**data["spec"]),
        column_names=tuple(data["column_names"]),
        column_kinds=tuple(data["column_kinds"]),
        schema_fingerprint=data["schema_fingerprint"],
        learner=learner_cls.from_dict(data["learner"]),
        n_training_rows=data["n_training_rows"],
        degenerate=data["degenerate"],
    )


def save_model(model: TrainedModel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model_to_dict(model)), encoding="utf-8")
    return path


def load_model(path: str | Path) -> TrainedModel:
    return model_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
