"""Unified clip suggestion pipeline.

Retrieval hits from every enabled source (frame embeddings, caption/subtitle
embeddings, raw text) are merged into one timestamp-sorted list.  A linear
two-pointer sweep over each video emits one candidate clip per hit: the
longest window ending at that hit whose span stays within T.  Candidates are
ranked by the number of distinct query ids they cover, ties broken by the
highest per-frame score, and the top K are returned.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Protocol, Sequence

from .index import (
    DenseIndex,
    RetrievedFrame,
    TextIndex,
    retrieve_embedding,
    retrieve_raw,
)


class EncoderClient(Protocol):
    """Turns query text or image bytes into embedding vectors."""

    def embed_text(self, text: str) -> Sequence[float]: ...

    def embed_image(self, image_bytes: bytes) -> Sequence[float]: ...


@dataclass(frozen=True)
class Query:
    """One scene description with per-source routing flags."""

    query_id: int
    text: str | None = None
    image_vector: tuple[float, ...] | None = None
    use_frame_emb: bool = False
    use_text_emb: bool = False
    use_text_raw: bool = False

    def __post_init__(self):
        if not (self.use_frame_emb or self.use_text_emb or self.use_text_raw):
            raise ValueError(f"query {self.query_id}: no source enabled")
        if (self.use_text_emb or self.use_text_raw) and not self.text:
            raise ValueError(f"query {self.query_id}: text sources need text")
        if self.use_frame_emb and self.image_vector is None and not self.text:
            raise ValueError(
                f"query {self.query_id}: frame embedding needs an image vector or text"
            )


@dataclass(frozen=True)
class ClipConfig:
    T_ms: int = 60_000
    K: int = 100
    k_vis: int = 500
    k_text_emb: int = 500
    k_text_raw: int = 500
    prune_dominated: bool = False

    def __post_init__(self):
        for name in ("T_ms", "K", "k_vis", "k_text_emb", "k_text_raw"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class Databases:
    """The stores (and optional encoder) the clipper dispatches to."""

    visual: DenseIndex | None = None
    text_emb: DenseIndex | None = None
    text_raw: TextIndex | None = None
    encoder: EncoderClient | None = None


@dataclass(frozen=True)
class Suggestion:
    video_id: str
    start_ms: int
    end_ms: int
    retrieved_frames: tuple[RetrievedFrame, ...]

    def __post_init__(self):
        if not self.retrieved_frames:
            raise ValueError("suggestion must cover at least one frame")

    @property
    def unique_query_count(self) -> int:
        return len({f.query_id for f in self.retrieved_frames})

    @property
    def max_score(self) -> float:
        return max(f.score for f in self.retrieved_frames)


@dataclass(frozen=True)
class Candidate:
    """Internal sweep output: a clip plus its precomputed ranking stats."""

    video_id: str
    start_ms: int
    end_ms: int
    lo: int  # slice bounds into the per-video hit list, inclusive
    hi: int
    unique_queries: int
    max_score: float


class RetrievalError(RuntimeError):
    """Raised when no retrieval source could run for any query."""


def better(a: Suggestion, b: Suggestion) -> bool:
    """True iff a outranks b: more distinct query ids, then higher max score."""
    ua, ub = a.unique_query_count, b.unique_query_count
    if ua != ub:
        return ua > ub
    return a.max_score > b.max_score


def ranking_key(unique_queries: int, max_score: float, video_id: str, start_ms: int, end_ms: int):
    """Total order completing the better-comparator deterministically."""
    return (-unique_queries, -max_score, video_id, start_ms, end_ms)


def _query_vector(q: Query, dbs: Databases):
    if q.image_vector is not None:
        return q.image_vector
    if dbs.encoder is None:
        raise RetrievalError("no encoder configured and no precomputed vector")
    return dbs.encoder.embed_text(q.text)


def retrieve_all(
    queries: Sequence[Query], config: ClipConfig, dbs: Databases
) -> tuple[list[RetrievedFrame], list[str]]:
    """Dispatch every query to its enabled sources and merge the hits.

    Duplicates across sources/queries are kept as distinct entries.  The
    merged list is sorted by (video_id, timestamp_ms), stable within ties.
    Encoder failures skip that query's embedding sources with a warning;
    if nothing at all could be retrieved from any source, raises.
    """
    if not queries:
        raise ValueError("queries must be non-empty")
    hits: list[RetrievedFrame] = []
    warnings: list[str] = []
    any_source_ran = False
    for q in queries:
        vec = None
        if q.use_frame_emb or q.use_text_emb:
            try:
                vec = _query_vector(q, dbs)
            except Exception as exc:
                warnings.append(f"query {q.query_id}: embedding skipped ({exc})")
        if q.use_frame_emb and vec is not None and dbs.visual is not None:
            hits.extend(
                retrieve_embedding(dbs.visual, vec, config.k_vis, q.query_id, "frame_emb")
            )
            any_source_ran = True
        if q.use_text_emb and vec is not None and dbs.text_emb is not None:
            hits.extend(
                retrieve_embedding(
                    dbs.text_emb, vec, config.k_text_emb, q.query_id, "text_emb"
                )
            )
            any_source_ran = True
        if q.use_text_raw and dbs.text_raw is not None:
            hits.extend(
                retrieve_raw(dbs.text_raw, q.text, config.k_text_raw, q.query_id)
            )
            any_source_ran = True
    if not any_source_ran:
        raise RetrievalError("all sources failed for all queries: " + "; ".join(warnings))
    hits.sort(key=lambda f: (f.video_id, f.timestamp_ms))
    return hits, warnings


def sweep_candidates(
    hits: Sequence[RetrievedFrame], t_ms: int
) -> list[Candidate]:
    """Two-pointer sweep emitting one candidate per hit.

    `hits` must be sorted by (video_id, timestamp_ms).  For each right
    pointer r the left pointer l advances minimally until the window span
    fits within t_ms; the candidate covers hits[l..r] of that video.
    Unique-query counts and the window maximum score are maintained
    incrementally, so the sweep is linear in len(hits).
    """
    out: list[Candidate] = []
    start = 0
    while start < len(hits):
        video = hits[start].video_id
        end = start
        while end < len(hits) and hits[end].video_id == video:
            end += 1
        group = hits[start:end]
        counts: dict[int, int] = {}
        unique = 0
        maxq: deque[int] = deque()  # indices with decreasing scores
        left = 0
        for r, hit in enumerate(group):
            c = counts.get(hit.query_id, 0)
            counts[hit.query_id] = c + 1
            if c == 0:
                unique += 1
            while maxq and group[maxq[-1]].score <= hit.score:
                maxq.pop()
            maxq.append(r)
            while hit.timestamp_ms - group[left].timestamp_ms > t_ms:
                gone = group[left]
                counts[gone.query_id] -= 1
                if counts[gone.query_id] == 0:
                    del counts[gone.query_id]
                    unique -= 1
                if maxq[0] == left:
                    maxq.popleft()
                left += 1
            out.append(
                Candidate(
                    video,
                    group[left].timestamp_ms,
                    hit.timestamp_ms,
                    start + left,
                    start + r,
                    unique,
                    group[maxq[0]].score,
                )
            )
        start = end
    return out


def rank_candidates(
    candidates: Sequence[Candidate], prune_dominated: bool = False
) -> list[Candidate]:
    """Stable sort by the completed better-order; optional subset pruning.

    A dominated candidate covers a subset of another candidate's hits in
    the same video; pruning them is off by default.
    """
    if prune_dominated:
        kept = []
        for c in candidates:
            dominated = any(
                o.video_id == c.video_id
                and (o.lo, o.hi) != (c.lo, c.hi)
                and o.lo <= c.lo
                and c.hi <= o.hi
                for o in candidates
            )
            if not dominated:
                kept.append(c)
        candidates = kept
    return sorted(
        candidates,
        key=lambda c: ranking_key(
            c.unique_queries, c.max_score, c.video_id, c.start_ms, c.end_ms
        ),
    )


def unified_clipping(
    queries: Sequence[Query], config: ClipConfig, dbs: Databases
) -> tuple[list[Suggestion], list[str]]:
    """Full pipeline: retrieve, sweep per video, rank, return top K."""
    hits, warnings = retrieve_all(queries, config, dbs)
    if not hits:
        return [], warnings
    candidates = sweep_candidates(hits, config.T_ms)
    ranked = rank_candidates(candidates, config.prune_dominated)
    suggestions = [
        Suggestion(c.video_id, c.start_ms, c.end_ms, tuple(hits[c.lo : c.hi + 1]))
        for c in ranked[: config.K]
    ]
    return suggestions, warnings
