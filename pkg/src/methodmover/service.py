"""HTTP JSON API for the review dashboard.

All project mutation goes through POST /apply, which holds a global
lock: plans are validated against file hashes taken at recommendation
time, so a plan can be applied at most once (a second attempt fails with
409), and the in-memory index is rebuilt from the mutated files after
every successful apply.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .embeddings import Embedder, LocalEmbedder
from .errors import (
    MalformedResponse,
    MethodMoverError,
    MissingRun,
    ProviderUnavailable,
    ReparseFailed,
    StaleIndex,
    UnknownClass,
)
from .evaluation import stratify
from .llm import ChatProvider, SimilarityOracleProvider
from .model import build_index
from .pipeline import PipelineConfig, RunStore, run_recommend
from . import executor


class RecommendRequest(BaseModel):
    class_name: str = Field(alias="class")


class ApplyRequest(BaseModel):
    run_id: str
    recommendation_index: int = Field(ge=0)


class VerdictRequest(BaseModel):
    run_id: str
    recommendation_index: int = Field(ge=0)
    rating: int | None = Field(default=None, ge=1, le=6)
    applied: bool | None = None


def create_app(
    roots: list[str],
    run_dir: str | Path,
    config: PipelineConfig | None = None,
    embedder: Embedder | None = None,
    chat: ChatProvider | None = None,
    frontend_dist: str | Path | None = None,
) -> FastAPI:
    config = config or PipelineConfig()
    embedder = embedder if embedder is not None else LocalEmbedder()
    chat = chat if chat is not None else SimilarityOracleProvider()
    store = RunStore(run_dir)

    app = FastAPI(title="methodmover", docs_url=None, redoc_url=None)
    state = {"index": build_index(roots)}
    apply_lock = threading.Lock()

    @app.get("/classes")
    def list_classes(page: int = 1, page_size: int = 50):
        if page < 1 or page_size < 1:
            raise HTTPException(422, "page and page_size must be positive")
        classes = state["index"].sorted_classes()
        start = (page - 1) * page_size
        rows = [
            {
                "qualified_name": c.qualified_name,
                "kind": c.kind,
                "method_count": sum(1 for m in c.methods if not m.is_constructor),
                "stratum": stratify(c),
            }
            for c in classes[start : start + page_size]
        ]
        return {
            "classes": rows,
            "total": len(classes),
            "page": page,
            "page_size": page_size,
        }

    @app.post("/recommend")
    def recommend_endpoint(req: RecommendRequest):
        try:
            result = run_recommend(
                config, state["index"], req.class_name, embedder, chat
            )
        except UnknownClass as exc:
            raise HTTPException(404, f"unknown class: {exc}") from exc
        except (ProviderUnavailable, MalformedResponse) as exc:
            raise HTTPException(502, str(exc)) from exc
        run_id = store.save(result, config)
        return {
            "run_id": run_id,
            "host": result.host,
            "recommendations": [r.to_doc() for r in result.recommendations],
            "hallucination_counts": result.report.counts,
            "warnings": result.warnings,
        }

    @app.post("/apply")
    def apply_endpoint(req: ApplyRequest):
        with apply_lock:
            try:
                plan = store.load_plan(req.run_id, req.recommendation_index)
            except MissingRun as exc:
                raise HTTPException(404, str(exc)) from exc
            try:
                result = executor.apply(state["index"], plan)
            except StaleIndex as exc:
                raise HTTPException(409, str(exc)) from exc
            except ReparseFailed as exc:
                raise HTTPException(500, str(exc)) from exc
            state["index"] = result.index
            store.set_verdict(req.run_id, req.recommendation_index, applied=True)
        return result.to_doc()

    @app.post("/verdict")
    def verdict_endpoint(req: VerdictRequest):
        if req.rating is None and req.applied is None:
            raise HTTPException(422, "verdict carries no rating and no applied flag")
        try:
            verdict = store.set_verdict(
                req.run_id,
                req.recommendation_index,
                rating=req.rating,
                applied=req.applied,
            )
        except MissingRun as exc:
            raise HTTPException(404, str(exc)) from exc
        except ValueError as exc:
            raise HTTPException(409, str(exc)) from exc
        return {"run_id": req.run_id, "recommendation_index": req.recommendation_index, **verdict}

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        try:
            return store.load(run_id)
        except MissingRun as exc:
            raise HTTPException(404, str(exc)) from exc

    @app.get("/health")
    def health():
        return {"ok": True, "classes": len(state["index"].classes)}

    @app.exception_handler(MethodMoverError)
    def _domain_error(request, exc):
        from fastapi.responses import JSONResponse

        return JSONResponse(status_code=500, content={"detail": str(exc)})

    if frontend_dist is not None and Path(frontend_dist).is_dir():
        app.mount(
            "/", StaticFiles(directory=str(frontend_dist), html=True), name="ui"
        )
    return app
