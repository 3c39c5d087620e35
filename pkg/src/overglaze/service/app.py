"""FastAPI application wrapping the optimization engine."""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..annealing import InfeasibleStart, optimize
from ..documents import histogram_spec_to_dict, solution_document
from ..naming import NameModel
from ..objective import ScoreContext, check_constraints, resolve_region_colors
from ..stimuli import GenerationFailed, Smoothness, StimulusParams, gen_stimulus
from .jobs import JobFailure, JobStore
from .schemas import (
    ApiError,
    OptimizeRequest,
    ScoreRequest,
    StimulusRequest,
    build_config,
    build_palette,
    build_scene,
    build_schedule,
    build_solution,
)

__all__ = ["create_app"]


def create_app(
    name_model: NameModel,
    max_workers: int = 2,
    ttl_seconds: float = 3600.0,
    clock=None,
) -> FastAPI:
    app = FastAPI(title="overglaze", version="0.1.0")
    store = JobStore(
        max_workers=max_workers,
        ttl_seconds=ttl_seconds,
        **({"clock": clock} if clock else {}),
    )
    app.state.store = store
    app.state.name_model = name_model

    @app.exception_handler(ApiError)
    async def _api_error(_: Request, exc: ApiError):
        body = {"error": {"code": exc.code, "message": exc.message}}
        if exc.field:
            body["error"]["field"] = exc.field
        return JSONResponse(status_code=exc.status, content=body)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_: Request, exc: RequestValidationError):
        violations = [
            {
                "field": ".".join(str(p) for p in err["loc"] if p != "body"),
                "message": err["msg"],
            }
            for err in exc.errors()
        ]
        return JSONResponse(
            status_code=400,
            content={
                "error": {
                    "code": "invalid_request",
                    "message": "request body failed validation",
                    "violations": violations,
                }
            },
        )

    @app.get("/v1/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/v1/optimize", status_code=202)
    def submit_optimize(req: OptimizeRequest):
        scene = build_scene(req.scene)
        cfg = build_config(req.config, app.state.name_model)
        schedule = build_schedule(req.schedule)
        palette = build_palette(req.fixed_palette)
        if palette is not None and len(palette) != scene.m:
            raise ApiError(
                "invalid_palette",
                f"fixed palette has {len(palette)} colors, scene has {scene.m} classes",
                field="fixed_palette",
            )

        def work() -> dict:
            try:
                result = optimize(scene, cfg, schedule, fixed_palette=palette)
            except InfeasibleStart as exc:
                raise JobFailure(
                    {
                        "code": "infeasible_start",
                        "message": str(exc),
                        "violations": exc.report.to_dict() if exc.report else None,
                    }
                ) from exc
            return {
                "document": solution_document(result.solution, result.breakdown, cfg, schedule),
                "trace_csv": result.trace.to_csv(),
                "scene_warnings": list(scene.warnings),
            }

        return {"job_id": store.submit(work)}

    @app.get("/v1/jobs/{job_id}")
    def job_status(job_id: str):
        record = store.get(job_id)
        if record is None:
            raise ApiError("unknown_job", f"no job {job_id!r} (unknown or expired)", status=404)
        body = {"id": record.id, "status": record.status}
        if record.status == "done":
            body["result"] = record.result
        elif record.status == "failed":
            body["error"] = record.error
        return body

    @app.post("/v1/score")
    def score(req: ScoreRequest):
        scene = build_scene(req.scene)
        cfg = build_config(req.config, app.state.name_model)
        solution = build_solution(req.solution)
        if solution.m != scene.m:
            raise ApiError(
                "invalid_solution",
                f"solution has {solution.m} classes, scene has {scene.m}",
                field="solution",
            )
        breakdown = ScoreContext(scene, cfg).evaluate(solution)
        constraints = check_constraints(
            scene, resolve_region_colors(scene, solution, cfg.blend_space), cfg
        )
        return {
            "score": breakdown.to_dict(),
            "constraints": constraints.to_dict(),
            "scene_warnings": list(scene.warnings),
        }

    @app.post("/v1/stimuli")
    def stimuli(req: StimulusRequest):
        try:
            params = StimulusParams(
                classes=req.classes,
                smoothness=Smoothness(req.smoothness),
                bins=req.bins,
                seed=req.seed,
            )
        except ValueError as exc:
            raise ApiError("invalid_params", str(exc)) from exc
        try:
            stim = gen_stimulus(params)
        except GenerationFailed as exc:
            raise ApiError("generation_failed", str(exc), status=422) from exc
        return {"histogram": histogram_spec_to_dict(stim.spec, stimulus=stim)}

    return app
