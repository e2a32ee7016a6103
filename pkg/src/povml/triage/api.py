"""Read-only JSON API over a finished run's artifacts.

Endpoints: GET /api/records (paged, filterable), POST /api/rank,
GET /api/curves, GET /api/importances, GET /healthz. Responses are pure
functions of the loaded artifacts and the request.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..learners.spec import UnsupportedModelError
from .artifacts import RunArtifacts
from .ranking import FORMULA_VERSION, TriageWeights, rank


class WeightsBody(BaseModel):
    w_prob: float = Field(ge=0)
    w_discrepancy: float = Field(ge=0)
    w_proximity: float = Field(ge=0)
    tau: float = Field(gt=0)


class RankRequest(BaseModel):
    weights: WeightsBody
    household_ids: Optional[list[str]] = None


def create_app(artifacts: RunArtifacts, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="underreporting triage service", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def validation_to_400(request: Request, exc: RequestValidationError):
        errors = [
            {"field": ".".join(str(piece) for piece in err["loc"] if piece != "body"),
             "message": err["msg"]}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"errors": errors})

    def check_run(run: Optional[str]) -> None:
        if run is not None and run != artifacts.run_id:
            raise HTTPException(status_code=404, detail=f"unknown run id {run!r}")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "run_id": artifacts.run_id,
                "records": len(artifacts.records), "job": artifacts.triage_job_id}

    @app.get("/api/records")
    def records(
        page: int = Query(1, ge=1),
        page_size: int = Query(50, ge=1, le=500),
        faded: Optional[bool] = None,
        eligible: Optional[bool] = None,
        run: Optional[str] = None,
    ):
        check_run(run)
        rows = artifacts.records
        if faded is not None:
            rows = [r for r in rows if r.faded == faded]
        if eligible is not None:
            rows = [r for r in rows if r.eligible == eligible]
        total = len(rows)
        total_pages = max(1, math.ceil(total / page_size))
        start = (page - 1) * page_size
        return {
            "run_id": artifacts.run_id,
            "page": page,
            "page_size": page_size,
            "total": total,
            "total_pages": total_pages,
            "records": [r.to_dict() for r in rows[start:start + page_size]],
        }

    @app.post("/api/rank")
    def rank_records(body: RankRequest, run: Optional[str] = None):
        check_run(run)
        try:
            weights = TriageWeights(
                w_prob=body.weights.w_prob,
                w_discrepancy=body.weights.w_discrepancy,
                w_proximity=body.weights.w_proximity,
                tau=body.weights.tau,
            )
        except ValueError as exc:
            return JSONResponse(status_code=400,
                                content={"errors": [{"field": "weights", "message": str(exc)}]})
        rows = artifacts.records
        if body.household_ids is not None:
            known = {r.household_id: r for r in rows}
            missing = [h for h in body.household_ids if h not in known]
            if missing:
                return JSONResponse(
                    status_code=400,
                    content={"errors": [{"field": "household_ids",
                                         "message": f"unknown household {missing[0]!r}"}]})
            rows = [known[h] for h in body.household_ids]
        ranked = rank(rows, weights)
        return {
            "run_id": artifacts.run_id,
            "formula_version": FORMULA_VERSION,
            "weights": {"w_prob": weights.w_prob, "w_discrepancy": weights.w_discrepancy,
                        "w_proximity": weights.w_proximity, "tau": weights.tau},
            "records": [r.to_dict() for r in ranked],
        }

    @app.get("/api/curves")
    def curves(
        region: Optional[str] = None,
        task: Optional[str] = None,
        model: Optional[str] = None,
        feature_set: Optional[str] = None,
        run: Optional[str] = None,
    ):
        check_run(run)
        rows = artifacts.grid_rows
        for key, wanted in (("region", region), ("task", task),
                            ("model", model), ("feature_set", feature_set)):
            if wanted is not None:
                rows = [r for r in rows if r[key] == wanted]
        return {"run_id": artifacts.run_id, "points": rows}

    @app.get("/api/importances")
    def importances(job: Optional[str] = None, run: Optional[str] = None):
        check_run(run)
        job_id = job if job is not None else artifacts.triage_job_id
        try:
            report = artifacts.importances_for(job_id)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        except UnsupportedModelError as exc:
            return JSONResponse(status_code=400,
                                content={"errors": [{"field": "job", "message": str(exc)}]})
        return {
            "run_id": artifacts.run_id,
            "job": job_id,
            "entries": [{"column": name, "importance": value} for name, value in report.entries],
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
