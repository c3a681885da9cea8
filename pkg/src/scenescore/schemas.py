"""Request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field, model_validator


class SceneRecord(BaseModel):
    index: int
    heading: str
    V: float
    A: float
    quadrant: int
    coverage: int
    trajectory: list[list[float]]
    warning: bool


class ScriptAnalysis(BaseModel):
    script_id: str
    scenes: list[SceneRecord]


class GenerateRequest(BaseModel):
    """Everything needed to reproduce a generation.

    Sentiment comes either from explicit coordinates (V/A for point mode,
    va_start/va_end for trajectory mode) or from a stored script scene via
    script_id + scene_index.
    """

    V: float | None = Field(default=None, ge=-1.0, le=1.0)
    A: float | None = Field(default=None, ge=-1.0, le=1.0)
    script_id: str | None = None
    scene_index: int | None = Field(default=None, ge=0)
    mode: Literal["point", "trajectory"] = "point"
    n_bars: int = Field(default=8, ge=1, le=64)
    alpha: float = Field(default=-0.25, ge=-1.0, le=1.0)
    base: Literal["random", "inspiration", "regularized"] = "random"
    inspiration_id: str | None = None
    seed: int = 0
    va_start: tuple[float, float] | None = None
    va_end: tuple[float, float] | None = None

    @model_validator(mode="after")
    def _check_sources(self) -> "GenerateRequest":
        references_scene = self.script_id is not None and self.scene_index is not None
        if (self.script_id is None) != (self.scene_index is None):
            raise ValueError("script_id and scene_index must be given together")
        if self.mode == "point":
            if not references_scene and (self.V is None or self.A is None):
                raise ValueError("point mode needs V and A, or a scene reference")
        else:
            endpoints = self.va_start is not None and self.va_end is not None
            if not references_scene and not endpoints:
                raise ValueError(
                    "trajectory mode needs va_start and va_end, or a scene reference"
                )
        if self.base == "inspiration" and self.inspiration_id is None:
            raise ValueError("base 'inspiration' needs an inspiration_id")
        for name in ("va_start", "va_end"):
            pair = getattr(self, name)
            if pair is not None and not all(-1.0 <= value <= 1.0 for value in pair):
                raise ValueError(f"{name} coordinates must lie in [-1, 1]")
        return self


class GenerateResponse(BaseModel):
    artifact_id: str
    model_hash: str


class PianoRollNote(BaseModel):
    onset: int
    pitch: int
    velocity: int
    duration: int


class PianoRoll(BaseModel):
    ppq: int
    tempo_bpm: float
    bar_ticks: int
    n_bars: int
    notes: list[PianoRollNote]


class InspirationResponse(BaseModel):
    inspiration_id: str


class Health(BaseModel):
    status: str
    model_loaded: bool
    lexicon_loaded: bool
