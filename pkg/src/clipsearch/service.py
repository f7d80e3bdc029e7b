"""HTTP search service over one loaded database generation.

JSON API consumed by the web UI: POST /search runs the unified clipping
pipeline, GET /meta and GET /videos/{id}/frames back the viewer, and
POST /export turns answers into the submission CSV.  All handlers read
from an immutable generation, so the service is stateless and concurrent
requests always agree.
"""

from __future__ import annotations

import base64
import logging
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field, StrictInt

from .clipper import ClipConfig, Databases, Query, RetrievalError, Suggestion, unified_clipping
from .ingest import Generation, frame_to_ms

logger = logging.getLogger(__name__)

MAX_QUERIES = 16


class QuerySpec(BaseModel):
    text: Optional[str] = None
    image_payload: Optional[list[float] | str] = None  # vector, or base64 image bytes
    use_frame_emb: bool = False
    use_text_emb: bool = False
    use_text_raw: bool = False


class BudgetSpec(BaseModel):
    k_vis: int = Field(default=500, gt=0)
    k_text_emb: int = Field(default=500, gt=0)
    k_text_raw: int = Field(default=500, gt=0)


class SearchRequest(BaseModel):
    queries: list[QuerySpec] = Field(min_length=1, max_length=MAX_QUERIES)
    T_ms: Optional[int] = Field(default=None, gt=0)
    K: Optional[int] = Field(default=None, gt=0)
    budgets: Optional[BudgetSpec] = None


class AnswerSpec(BaseModel):
    video_id: str
    frame_indices: list[StrictInt] = Field(min_length=1)


class ExportRequest(BaseModel):
    answers: list[AnswerSpec] = Field(min_length=1)


def suggestion_to_dict(s: Suggestion) -> dict:
    return {
        "video_id": s.video_id,
        "start_ms": s.start_ms,
        "end_ms": s.end_ms,
        "frames": [
            {
                "timestamp_ms": f.timestamp_ms,
                "query_id": f.query_id,
                "score": f.score,
                "source": f.source,
            }
            for f in s.retrieved_frames
        ],
    }


def build_queries(specs: list[QuerySpec], encoder) -> tuple[list[Query], list[str]]:
    """Turn wire query specs into clipper queries.

    A base64 image payload is forwarded to the encoder; failures downgrade
    the query's embedding sources to a warning (raw text still runs).
    """
    queries = []
    warnings = []
    for qid, spec in enumerate(specs):
        vector = None
        payload = spec.image_payload
        if isinstance(payload, str):
            if encoder is None:
                warnings.append(f"query {qid}: no encoder for image bytes")
            else:
                try:
                    vector = tuple(encoder.embed_image(base64.b64decode(payload)))
                except Exception as exc:
                    warnings.append(f"query {qid}: image encoding failed ({exc})")
        elif payload is not None:
            vector = tuple(payload)
        queries.append(
            Query(
                query_id=qid,
                text=spec.text,
                image_vector=vector,
                use_frame_emb=spec.use_frame_emb,
                use_text_emb=spec.use_text_emb,
                use_text_raw=spec.use_text_raw,
            )
        )
    return queries, warnings


def export_csv(answers: list[AnswerSpec]) -> bytes:
    """`video_id,frame_1[,frame_2,...]` rows, CRLF line endings, UTF-8."""
    rows = [
        ",".join([a.video_id] + [str(i) for i in a.frame_indices]) for a in answers
    ]
    return ("\r\n".join(rows) + "\r\n").encode("utf-8")


def create_app(
    generation: Generation | None,
    encoder=None,
    defaults: ClipConfig | None = None,
) -> FastAPI:
    defaults = defaults or ClipConfig()
    app = FastAPI(title="clipsearch")
    state = {"generation": generation}

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.post("/search")
    def search(req: SearchRequest):
        gen = state["generation"]
        if gen is None:
            return JSONResponse(status_code=503, content={"detail": "no generation loaded"})
        budgets = req.budgets or BudgetSpec()
        config = ClipConfig(
            T_ms=req.T_ms or defaults.T_ms,
            K=req.K or defaults.K,
            k_vis=budgets.k_vis,
            k_text_emb=budgets.k_text_emb,
            k_text_raw=budgets.k_text_raw,
        )
        try:
            queries, warnings = build_queries(req.queries, encoder)
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        dbs = Databases(gen.visual, gen.text_emb, gen.text_raw, encoder)
        try:
            suggestions, clip_warnings = unified_clipping(queries, config, dbs)
        except RetrievalError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        return {
            "suggestions": [suggestion_to_dict(s) for s in suggestions],
            "warnings": warnings + clip_warnings,
        }

    @app.get("/meta")
    def meta():
        gen = state["generation"]
        if gen is None:
            return JSONResponse(status_code=503, content={"detail": "no generation loaded"})
        return {
            "generation": gen.checksum,
            "videos": gen.meta.get("videos", {}),
            "defaults": {
                "T_ms": defaults.T_ms,
                "K": defaults.K,
                "k_vis": defaults.k_vis,
                "k_text_emb": defaults.k_text_emb,
                "k_text_raw": defaults.k_text_raw,
            },
        }

    @app.get("/videos/{video_id}/frames")
    def frames(video_id: str, request: Request):
        gen = state["generation"]
        if gen is None:
            return JSONResponse(status_code=503, content={"detail": "no generation loaded"})
        videos = gen.meta.get("videos", {})
        if video_id not in videos:
            return JSONResponse(status_code=404, content={"detail": f"unknown video {video_id}"})
        try:
            lo = int(request.query_params.get("from", 1))
            hi = int(request.query_params.get("to", 1 << 31))
        except ValueError:
            return JSONResponse(status_code=416, content={"detail": "non-integer range"})
        if lo > hi or lo < 1:
            return JSONResponse(status_code=416, content={"detail": "invalid range"})
        fps = videos[video_id]["fps"]
        keyframes = _video_keyframes(gen, video_id)
        out = [
            {
                "frame_index": idx,
                "timestamp_ms": frame_to_ms(idx, fps),
                "thumbnail_url": f"/videos/{video_id}/thumbs/{idx}.jpg",
            }
            for idx in keyframes
            if lo <= idx <= hi
        ]
        return {"video_id": video_id, "fps": fps, "frames": out}

    @app.post("/export")
    def export(req: ExportRequest):
        body = export_csv(req.answers)
        return Response(
            content=body,
            media_type="text/csv; charset=utf-8",
            headers={"Content-Disposition": "attachment; filename=answers.csv"},
        )

    return app


def _video_keyframes(gen: Generation, video_id: str) -> list[int]:
    out = []
    with open(gen.path / "keyframes.tsv", encoding="utf-8") as fh:
        for line in fh:
            vid, idx = line.rstrip("\n").split("\t")
            if vid == video_id:
                out.append(int(idx))
    return out
