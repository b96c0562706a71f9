"""FastAPI application exposing runs, analyses, and the dashboard assets."""
from __future__ import annotations

from contextlib import asynccontextmanager
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..errors import (HpolensError, IncompatibleRunsError, InvalidParamsError,
                      SchemaError, UnknownNameError)
from .jobs import JobManager
from .plugins import config_detail_data, overview_data, validate_params
from .registry import RunRegistry, is_live

DEFAULT_PORT = 8050


class JobRequest(BaseModel):
    plugin: str
    run_ids: list[str]
    params: dict[str, Any] = Field(default_factory=dict)


class GroupRequest(BaseModel):
    name: str
    run_ids: list[str]


def _error_response(status: int, code: str, message: str, fieldname: str | None = None) -> JSONResponse:
    body: dict[str, Any] = {"error": {"code": code, "message": message}}
    if fieldname:
        body["error"]["field"] = fieldname
    return JSONResponse(status_code=status, content=body)


def create_app(runs_dir: str | Path, cache_dir: str | Path | None = None,
               workers: int | None = None, poll_interval: float = 2.0,
               static_dir: str | Path | None = None) -> FastAPI:
    registry = RunRegistry(runs_dir)
    registry.scan()
    jobs = JobManager(cache_dir=cache_dir, workers=workers)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        registry.start_polling(poll_interval)
        yield
        registry.stop_polling()
        jobs.shutdown()

    app = FastAPI(title="hpolens", lifespan=lifespan)
    app.state.registry = registry
    app.state.jobs = jobs

    @app.exception_handler(UnknownNameError)
    async def _unknown(request: Request, exc: UnknownNameError):
        return _error_response(404, "not_found", str(exc), exc.kind)

    @app.exception_handler(InvalidParamsError)
    async def _invalid(request: Request, exc: InvalidParamsError):
        return _error_response(400, "invalid_params", str(exc), exc.field)

    @app.exception_handler(SchemaError)
    async def _schema(request: Request, exc: SchemaError):
        return _error_response(400, "schema_error", str(exc))

    @app.exception_handler(IncompatibleRunsError)
    async def _incompatible(request: Request, exc: IncompatibleRunsError):
        return _error_response(400, "incompatible_runs", str(exc))

    @app.exception_handler(HpolensError)
    async def _other(request: Request, exc: HpolensError):
        return _error_response(400, "error", str(exc))

    @app.get("/api/runs")
    def list_runs() -> list[dict[str, Any]]:
        out = []
        for rid, run, live in registry.list_runs():
            out.append({
                "id": rid,
                "name": run.name,
                "objectives": [o.to_dict() for o in run.objectives],
                "budgets": run.budgets,
                "n_trials": len(run.trials),
                "live": live,
            })
        return out

    @app.get("/api/runs/{rid}")
    def run_overview(rid: str) -> dict[str, Any]:
        run = registry.get_run(rid)
        payload = overview_data(run)
        payload["live"] = is_live(run)
        payload["registry_id"] = rid
        return payload

    @app.get("/api/runs/{rid}/configs/{config_id}")
    def config_detail(rid: str, config_id: str) -> dict[str, Any]:
        return config_detail_data(registry.get_run(rid), config_id)

    @app.post("/api/groups")
    def create_group(req: GroupRequest) -> dict[str, str]:
        try:
            group_id = registry.add_group(req.name, req.run_ids)
        except UnknownNameError as e:
            raise InvalidParamsError(str(e), field="run_ids") from None
        return {"group_id": group_id}

    @app.post("/api/jobs")
    def submit_job(req: JobRequest) -> dict[str, str]:
        try:
            selection = registry.resolve(req.run_ids)
        except UnknownNameError as e:
            raise InvalidParamsError(str(e), field="run_ids") from None
        params = validate_params(req.plugin, req.params, [run for _, run in selection])
        job = jobs.submit(req.plugin, params, selection)
        return {"job_id": job.id, "state": job.state}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str) -> dict[str, Any]:
        job = jobs.get(job_id)
        if job is None:
            raise UnknownNameError("job", job_id)
        return job.status_dict()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="dashboard")

    return app
