"""HTTP JSON API for the edge tier.

Search, feedback, interest, and document fetch run against immutable
snapshots; ingest and training swap state atomically. The /match
endpoint exposes the cloud-tier wire contract so the local simulator can
be swapped for a remote backend.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import cloudsim
from .config import AppConfig
from .engine import SearchEngine
from .errors import (
    ConfigError,
    CorpusError,
    EdgeSearchError,
    InterestUnavailableError,
    ResourceError,
    TrainingError,
)
from .evalharness import PASS_THROUGH, SEMANTIC_VARIANT
from .interest import ClickRecord


class SearchRequest(BaseModel):
    user_id: str = "default"
    query: str = Field(min_length=1)
    variant: str = SEMANTIC_VARIANT
    top: int | None = Field(default=None, ge=1)


class ClickItem(BaseModel):
    doc_id: str
    dwell_seconds: float = Field(ge=0)


class FeedbackRequest(BaseModel):
    user_id: str = "default"
    query_id: str = ""
    query: str = ""
    clicked: list[ClickItem] = Field(min_length=1)


class TrainRequest(BaseModel):
    user_id: str = "default"
    epochs: int = Field(default=300, ge=1)
    learning_rate: float = Field(default=0.5, gt=0)
    seed: int = 0


class WireToken(BaseModel):
    value: str
    phrase: list[str] = []


class MatchRequest(BaseModel):
    tokens: list[WireToken] = Field(min_length=1)


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def create_app(engine: SearchEngine) -> FastAPI:
    app = FastAPI(title="edgesearch", version="0.1.0")

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_req: Request, exc: RequestValidationError):
        return _error(422, "validation_error", str(exc.errors()[:3]))

    @app.exception_handler(EdgeSearchError)
    async def domain_handler(_req: Request, exc: EdgeSearchError):
        if isinstance(exc, (ConfigError, ResourceError, CorpusError)):
            return _error(500, "resource_error", str(exc))
        if isinstance(exc, (TrainingError, InterestUnavailableError)):
            return _error(400, "training_error", str(exc))
        return _error(400, "request_error", str(exc))

    @app.get("/healthz")
    def healthz():
        return {
            "status": "ok",
            "mode": engine.mode.value,
            "doc_count": engine.index.doc_count,
        }

    @app.post("/search")
    def search(req: SearchRequest):
        if req.variant not in (SEMANTIC_VARIANT, PASS_THROUGH):
            return _error(422, "validation_error", f"unknown variant {req.variant!r}")
        if not req.query.strip():
            return _error(422, "validation_error", "query must not be blank")
        return engine.search(req.user_id, req.query, variant=req.variant, top=req.top)

    @app.post("/feedback")
    def feedback(req: FeedbackRequest):
        record = ClickRecord(
            query=req.query or req.query_id,
            clicked_doc_ids=[c.doc_id for c in req.clicked],
            dwell_seconds=[c.dwell_seconds for c in req.clicked],
        )
        label = engine.feedback(req.user_id, record)
        return {"user_id": req.user_id, "session_interest": label}

    @app.get("/interest/{user_id}")
    def interest_endpoint(user_id: str):
        profile = engine.interest_profile(user_id)
        history = engine.histories.load_labels(user_id)
        return {
            "user_id": user_id,
            "interest": (
                {"label": profile.theta, "confidence": profile.confidence, "source": profile.source}
                if profile
                else None
            ),
            "history": history.sequence,
        }

    @app.post("/train-interest")
    def train_interest(req: TrainRequest):
        model = engine.train_interest(
            req.user_id, epochs=req.epochs, learning_rate=req.learning_rate, seed=req.seed
        )
        return {"user_id": req.user_id, "labels": model.labels, "hidden_dim": model.hidden_dim}

    @app.post("/ingest")
    def ingest_endpoint():
        count = engine.reingest()
        return {"doc_count": count}

    @app.get("/doc/{doc_id}")
    def doc(doc_id: str):
        try:
            return {
                "doc_id": doc_id,
                "title": engine.doc_title(doc_id),
                "body": engine.doc_body(doc_id),
            }
        except EdgeSearchError as exc:
            return _error(404, "doc_not_found", str(exc))

    @app.post("/match")
    def match_endpoint(req: MatchRequest):
        tokens = [
            cloudsim.SearchToken(value=t.value, phrase=tuple(t.phrase)) for t in req.tokens
        ]
        delta = engine.backend.match(tokens)
        return {
            "n_terms": delta.n_terms,
            "docs": [
                {"doc_id": d.doc_id, "token_count": d.token_count, "freqs": d.freqs}
                for d in delta.docs
            ],
        }

    if engine.cfg.ui_dir and Path(engine.cfg.ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=engine.cfg.ui_dir, html=True), name="ui")

    return app


def serve(cfg: AppConfig) -> None:
    import uvicorn

    engine = SearchEngine(cfg)
    uvicorn.run(create_app(engine), host=cfg.host, port=cfg.port, log_level="info")
