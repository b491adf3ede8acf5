"""FastAPI wiring for the rating service."""

from __future__ import annotations

from http import HTTPStatus
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..elo import Outcome
from ..errors import ConflictError, ServiceUnavailableError
from .core import RatingService
from .schemas import ImageCounts, JudgmentAck, JudgmentRequest, PairResponse, StatsResponse


def create_app(service: RatingService, assets_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="chiprank rating service")

    @app.exception_handler(HTTPException)
    async def http_error(_: Request, exc: HTTPException) -> JSONResponse:
        phrase = HTTPStatus(exc.status_code).phrase.lower().replace(" ", "_")
        return JSONResponse(status_code=exc.status_code, content={"error": phrase, "detail": str(exc.detail)})

    @app.exception_handler(RequestValidationError)
    async def validation_error(_: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"error": "validation_error", "detail": str(exc)})

    @app.get("/api/pair", response_model=PairResponse)
    def get_pair(operator: str = Query(..., min_length=1)) -> PairResponse:
        try:
            pair = service.next_pair(operator)
        except ServiceUnavailableError as exc:
            raise HTTPException(status_code=503, detail=str(exc))
        return PairResponse(
            comparison_id=pair.comparison_id,
            left_url=f"/api/images/{pair.left}",
            right_url=f"/api/images/{pair.right}",
        )

    @app.post("/api/judgment", response_model=JudgmentAck)
    def post_judgment(body: JudgmentRequest) -> JudgmentAck:
        try:
            record = service.record_judgment(body.comparison_id, Outcome(body.outcome))
        except ConflictError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return JudgmentAck(comparison_id=record.comparison_id)

    @app.get("/api/images/{image_id}")
    def get_image(image_id: str) -> Response:
        try:
            png = service.image_png(image_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no image {image_id!r}")
        return Response(content=png, media_type="image/png")

    @app.get("/api/stats", response_model=StatsResponse)
    def get_stats() -> StatsResponse:
        stats = service.progress_stats()
        return StatsResponse(
            total_judgments=stats.total_judgments,
            per_operator=stats.per_operator,
            image_counts=ImageCounts(
                mean=stats.image_count_mean,
                min=stats.image_count_min,
                max=stats.image_count_max,
            ),
            per_image=stats.per_image,
        )

    if assets_dir is not None and Path(assets_dir).is_dir():
        app.mount("/", StaticFiles(directory=assets_dir, html=True), name="rater")

    return app
