"""HTTP service exposing the three recommendation types, the catalogs,
and the project-draft workflow consumed by the web UI.

The app is built around an immutable bundle of loaded models; request
handlers never mutate a model, so everything here is safe under
concurrent requests.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import engine
from .engine import RecommendationList, SimilarityModel, batch_estimates
from .errors import (
    DraftNotFoundError,
    InsufficientOverlapError,
    ModelStateError,
    ResyduoError,
    UnknownKeysError,
    VocabularyError,
)
from .projections import normalize_tag
from .store import ProjectStore


@dataclass
class ModelBundle:
    """The three optional trained models plus display names for components."""

    T: SimilarityModel | None = None
    P: SimilarityModel | None = None
    L: SimilarityModel | None = None
    component_names: dict | None = None

    def get(self, kind):
        return getattr(self, kind)


class _ModelNotLoaded(ResyduoError):
    def __init__(self, kind):
        super().__init__(f"model {kind!r} is not loaded")
        self.kind = kind


def _require(bundle, kind) -> SimilarityModel:
    model = bundle.get(kind)
    if model is None:
        raise _ModelNotLoaded(kind)
    return model


def _mean_row_scores(model: SimilarityModel, row_labels) -> np.ndarray:
    """Average the full prediction vector of several existing rows."""
    m = model.training_matrix
    cols = list(range(m.n_cols))
    vectors = []
    for label in row_labels:
        r = m.row_index[label]
        vectors.append(batch_estimates(model, [(r, c) for c in cols]))
    return np.mean(vectors, axis=0)


def _rank(col_labels, scores, n, exclude=frozenset()):
    order = sorted(
        (i for i, c in enumerate(col_labels) if c not in exclude),
        key=lambda i: (-scores[i], col_labels[i]),
    )
    return RecommendationList(
        tuple((col_labels[i], float(scores[i])) for i in order[:n]), n
    )


def recommend_type1(model: SimilarityModel, tags, n) -> RecommendationList:
    """Components from tags: mean of the per-tag prediction vectors."""
    known = []
    seen = set()
    for tag in tags:
        norm = normalize_tag(tag)
        if norm in model.training_matrix.row_index and norm not in seen:
            known.append(norm)
            seen.add(norm)
    if not known:
        raise UnknownKeysError(tags, kind="tags")
    scores = _mean_row_scores(model, known)
    return _rank(model.training_matrix.col_labels, scores, n)


def recommend_type2(model: SimilarityModel, components, n) -> RecommendationList:
    """Components for a project in progress, via fold-in; inputs excluded."""
    vocab = model.training_matrix.col_index
    known = sorted({c for c in components if c in vocab})
    if not known:
        raise InsufficientOverlapError(
            "none of the given components are in the model vocabulary"
        )
    profile = {c: 1.0 for c in known}
    return engine.top_n(model, profile, n, exclude=set(known))


def recommend_type3(model: SimilarityModel, components, n) -> RecommendationList:
    """Libraries for selected components: mean of the per-component rows."""
    rows = model.training_matrix.row_index
    known = sorted({c for c in components if c in rows})
    if not known:
        raise UnknownKeysError(components, kind="components")
    scores = _mean_row_scores(model, known)
    return _rank(model.training_matrix.col_labels, scores, n)


class _TagRequest(BaseModel):
    tags: list[str] = Field(min_length=1)
    n: int = 5


class _ComponentRequest(BaseModel):
    components: list[str] = Field(min_length=1)
    n: int = 5


class _DraftCreate(BaseModel):
    name: str
    selected_components: list[str] = []
    sketch: str = ""


class _DraftUpdate(BaseModel):
    name: str | None = None
    selected_components: list[str] | None = None
    sketch: str | None = None


_STATUS = {
    _ModelNotLoaded: (503, "model_not_loaded"),
    DraftNotFoundError: (404, "not_found"),
    UnknownKeysError: (400, "unknown_keys"),
    InsufficientOverlapError: (400, "insufficient_overlap"),
    VocabularyError: (400, "unknown_components"),
    ModelStateError: (409, "model_state"),
}


def _error_response(status, code, message):
    return JSONResponse(
        status_code=status, content={"error": {"code": code, "message": message}}
    )


def create_app(bundle: ModelBundle, store: ProjectStore, static_dir=None) -> FastAPI:
    app = FastAPI(title="resyduo", docs_url=None, redoc_url=None)

    @app.exception_handler(ResyduoError)
    async def _domain_error(request: Request, exc: ResyduoError):
        status, code = _STATUS.get(type(exc), (400, "bad_request"))
        if isinstance(exc, UnknownKeysError):
            code = f"unknown_{exc.kind}"
        return _error_response(status, code, str(exc))

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request: Request, exc: RequestValidationError):
        return _error_response(400, "bad_request", str(exc.errors()))

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return _error_response(400, "bad_request", str(exc))

    @app.get("/api/v1/health")
    def health():
        return {
            "status": "ok",
            "models": {k: bundle.get(k) is not None for k in ("T", "P", "L")},
        }

    @app.get("/api/v1/catalog/tags")
    def catalog_tags(prefix: str = ""):
        model = _require(bundle, "T")
        prefix = normalize_tag(prefix)
        return [t for t in model.training_matrix.row_labels if t.startswith(prefix)]

    @app.get("/api/v1/catalog/components")
    def catalog_components(prefix: str = ""):
        for kind in ("P", "T", "L"):
            model = bundle.get(kind)
            if model is not None:
                ids = (
                    model.training_matrix.row_labels
                    if kind == "L"
                    else model.training_matrix.col_labels
                )
                break
        else:
            raise _ModelNotLoaded("P")
        names = bundle.component_names or {}
        low = prefix.lower()
        out = []
        for cid in ids:
            name = names.get(cid, cid)
            if cid.lower().startswith(low) or name.lower().startswith(low):
                out.append({"id": cid, "name": name})
        return out

    def _check_n(n):
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")

    @app.post("/api/v1/recommend/components-by-tags")
    def by_tags(req: _TagRequest):
        _check_n(req.n)
        recs = recommend_type1(_require(bundle, "T"), req.tags, req.n)
        return {"items": [{"id": c, "score": s} for c, s in recs.entries]}

    @app.post("/api/v1/recommend/components-by-project")
    def by_project(req: _ComponentRequest):
        _check_n(req.n)
        recs = recommend_type2(_require(bundle, "P"), req.components, req.n)
        return {"items": [{"id": c, "score": s} for c, s in recs.entries]}

    @app.post("/api/v1/recommend/libraries")
    def libraries(req: _ComponentRequest):
        _check_n(req.n)
        recs = recommend_type3(_require(bundle, "L"), req.components, req.n)
        return {"items": [{"name": c, "score": s} for c, s in recs.entries]}

    @app.get("/api/v1/projects")
    def list_projects():
        return {"items": [d.to_obj() for d in store.list()]}

    @app.post("/api/v1/projects", status_code=201)
    def create_project(req: _DraftCreate):
        return store.create(req.name, req.selected_components, req.sketch).to_obj()

    @app.get("/api/v1/projects/{draft_id}")
    def get_project(draft_id: str):
        return store.get(draft_id).to_obj()

    @app.put("/api/v1/projects/{draft_id}")
    def update_project(draft_id: str, req: _DraftUpdate):
        return store.update(
            draft_id,
            name=req.name,
            selected_components=req.selected_components,
            sketch=req.sketch,
        ).to_obj()

    @app.delete("/api/v1/projects/{draft_id}", status_code=204)
    def delete_project(draft_id: str):
        store.delete(draft_id)
        return Response(status_code=204)

    @app.get("/api/v1/projects/{draft_id}/sketch")
    def get_sketch(draft_id: str):
        return PlainTextResponse(store.get_sketch(draft_id))

    @app.put("/api/v1/projects/{draft_id}/sketch", status_code=204)
    async def put_sketch(draft_id: str, request: Request):
        body = await request.body()
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            return _error_response(400, "bad_request", "sketch must be valid UTF-8 text")
        store.put_sketch(draft_id, text)
        return Response(status_code=204)

    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
