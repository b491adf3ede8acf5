"""Request/response bodies for the rating API."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel


class PairResponse(BaseModel):
    comparison_id: str
    left_url: str
    right_url: str


class JudgmentRequest(BaseModel):
    comparison_id: str
    outcome: Literal["LEFT", "RIGHT", "NEUTRAL"]


class JudgmentAck(BaseModel):
    comparison_id: str
    recorded: bool = True


class ImageCounts(BaseModel):
    mean: float
    min: int
    max: int


class StatsResponse(BaseModel):
    total_judgments: int
    per_operator: dict[str, int]
    image_counts: ImageCounts
    per_image: dict[str, int]


class ErrorResponse(BaseModel):
    error: str
    detail: str
