"""Run manifest: one entry per job, rewritten atomically after every change."""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

STATUSES = ("pending", "done", "degenerate", "failed")


@dataclass
class JobEntry:
    status: str = "pending"
    reason: str = ""
    artifacts: dict[str, str] = field(default_factory=dict)
    wall_clock_s: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "reason": self.reason,
            "artifacts": dict(sorted(self.artifacts.items())),
            "wall_clock_s": self.wall_clock_s,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "JobEntry":
        return cls(
            status=data.get("status", "pending"),
            reason=data.get("reason", ""),
            artifacts=dict(data.get("artifacts", {})),
            wall_clock_s=data.get("wall_clock_s"),
        )


def run_id_for(config_echo: dict) -> str:
    canonical = json.dumps(config_echo, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


@dataclass
class RunManifest:
    run_id: str
    config_echo: dict
    jobs: dict[str, JobEntry] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "config": self.config_echo,
            "jobs": {job_id: entry.to_dict() for job_id, entry in sorted(self.jobs.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        return cls(
            run_id=data["run_id"],
            config_echo=data.get("config", {}),
            jobs={j: JobEntry.from_dict(e) for j, e in data.get("jobs", {}).items()},
        )

    def write(self, path: str | Path) -> None:
        """Atomic rewrite: temp file in the same directory, then rename."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".manifest-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def read(cls, path: str | Path) -> "RunManifest":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))

    @property
    def n_failed(self) -> int:
        return sum(1 for e in self.jobs.values() if e.status == "failed")

    def counts(self) -> dict[str, int]:
        out = {status: 0 for status in STATUSES}
        for entry in self.jobs.values():
            out[entry.status] = out.get(entry.status, 0) + 1
        return out
