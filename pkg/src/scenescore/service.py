"""HTTP service exposing script analysis and steered generation.

The app wraps a ProjectStore: scripts and artifacts are persisted as files,
so everything survives a restart.  Error mapping: malformed input is 400
(including body validation, which FastAPI would otherwise report as 422),
unknown ids are 404, and generation without a loaded model is 409.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import latent as latent_ops
from .midi import MidiError, read_midi, write_midi
from .schemas import (
    GenerateRequest,
    GenerateResponse,
    Health,
    InspirationResponse,
    PianoRoll,
    PianoRollNote,
    ScriptAnalysis,
)
from .sentiment import analyze_script_text, load_lexicon
from .store import ProjectStore

log = logging.getLogger(__name__)


def _error(status: int, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": detail})


def create_app(store: ProjectStore) -> FastAPI:
    app = FastAPI(title="scenescore", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.bundle = store.load_model()
    app.state.lexicon = None
    if store.lexicon_path.is_file():
        app.state.lexicon = load_lexicon(store.lexicon_path)

    @app.exception_handler(RequestValidationError)
    async def on_validation_error(request: Request, error: RequestValidationError):
        return _error(400, str(error.errors()))

    @app.get("/health", response_model=Health)
    def health():
        return Health(
            status="ok",
            model_loaded=app.state.bundle is not None,
            lexicon_loaded=app.state.lexicon is not None,
        )

    @app.post("/scripts", response_model=ScriptAnalysis)
    async def post_script(request: Request):
        text = (await request.body()).decode("utf-8", errors="replace")
        if not text.strip():
            return _error(400, "script body is empty")
        if app.state.lexicon is None:
            return _error(409, "lexicon not loaded")
        scenes = analyze_script_text(text, app.state.lexicon)
        script_id = store.save_script(text, scenes)
        return ScriptAnalysis(script_id=script_id, scenes=scenes)

    @app.get("/scripts/{script_id}/scenes", response_model=ScriptAnalysis)
    def get_scenes(script_id: str):
        document = store.load_script(script_id)
        if document is None:
            return _error(404, f"unknown script {script_id}")
        return ScriptAnalysis(script_id=document["id"], scenes=document["scenes"])

    @app.post("/inspirations", response_model=InspirationResponse)
    async def post_inspiration(request: Request):
        data = await request.body()
        try:
            piece = read_midi(data)
        except MidiError as error:
            return _error(400, f"not a readable MIDI file: {error}")
        if not piece.notes:
            return _error(400, "inspiration piece has no notes")
        return InspirationResponse(inspiration_id=store.save_inspiration(data))

    @app.post("/generate", response_model=GenerateResponse)
    def generate(request: GenerateRequest):
        bundle = app.state.bundle
        if bundle is None:
            return _error(409, "model not loaded")

        valence, arousal = request.V, request.A
        va_start, va_end = request.va_start, request.va_end
        if request.script_id is not None:
            document = store.load_script(request.script_id)
            if document is None:
                return _error(404, f"unknown script {request.script_id}")
            scenes = document["scenes"]
            if not 0 <= request.scene_index < len(scenes):
                return _error(400, f"scene_index {request.scene_index} out of range")
            scene = scenes[request.scene_index]
            valence, arousal = scene["V"], scene["A"]
            trajectory = scene["trajectory"]
            if request.mode == "trajectory" and va_start is None and trajectory:
                va_start = tuple(trajectory[0])
                va_end = tuple(trajectory[-1])
            elif request.mode == "trajectory" and va_start is None:
                va_start = va_end = (valence, arousal)

        inspiration = None
        if request.base == "inspiration":
            data = store.inspiration_bytes(request.inspiration_id)
            if data is None:
                return _error(404, f"unknown inspiration {request.inspiration_id}")
            inspiration = latent_ops.encode_inspiration(
                data, bundle.params, bundle.config, bundle.vocab
            )

        try:
            piece = latent_ops.generate_piece(
                bundle,
                valence=valence,
                arousal=arousal,
                va_start=va_start,
                va_end=va_end,
                mode=request.mode,
                n_bars=request.n_bars,
                alpha=request.alpha,
                base=request.base,
                inspiration=inspiration,
                seed=request.seed,
            )
        except latent_ops.ModelNotLoadedError as error:
            return _error(409, str(error))
        except ValueError as error:
            return _error(400, str(error))

        artifact_id = store.save_artifact(
            write_midi(piece),
            {"request": request.model_dump(), "model_hash": bundle.model_hash},
        )
        return GenerateResponse(artifact_id=artifact_id, model_hash=bundle.model_hash)

    @app.get("/artifacts/{artifact_id}.mid")
    def artifact_midi(artifact_id: str):
        data = store.artifact_bytes(artifact_id)
        if data is None:
            return _error(404, f"unknown artifact {artifact_id}")
        return Response(content=data, media_type="audio/midi")

    @app.get("/artifacts/{artifact_id}/pianoroll", response_model=PianoRoll)
    def artifact_pianoroll(artifact_id: str):
        data = store.artifact_bytes(artifact_id)
        if data is None:
            return _error(404, f"unknown artifact {artifact_id}")
        piece = read_midi(data)
        last_bar = (
            max(note.onset for note in piece.notes) // piece.bar_ticks
            if piece.notes
            else 0
        )
        return PianoRoll(
            ppq=piece.ppq,
            tempo_bpm=piece.tempo_bpm,
            bar_ticks=piece.bar_ticks,
            n_bars=last_bar + 1,
            notes=[
                PianoRollNote(
                    onset=note.onset,
                    pitch=note.pitch,
                    velocity=note.velocity,
                    duration=note.duration,
                )
                for note in piece.notes
            ],
        )

    return app
