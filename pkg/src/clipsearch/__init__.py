"""Clip-based multimodal video event search.

Submodules: dake (keyframe extraction), index (dense + text stores),
clipper (suggestion pipeline), recap (captioning), ingest (offline
database builds), evaluation (synthetic benchmarks), service (HTTP API).
"""

from .clipper import ClipConfig, Databases, Query, Suggestion, better, unified_clipping
from .dake import (
    FrameSizeSeries,
    KeyframeSet,
    coverage_ratio,
    enforce_coverage,
    score_frames,
    select_keyframes,
    steepness,
)
from .index import (
    DenseIndex,
    EmbeddingRecord,
    RetrievedFrame,
    TextIndex,
    TextRecord,
    build_dense_index,
    retrieve_embedding,
    retrieve_raw,
)
from .recap import (
    CaptionResult,
    HashMockLVLM,
    HTTPLVLMClient,
    KeyframeContext,
    Shot,
    ShotMemory,
    build_keyframe_prompt,
    caption_keyframe,
    caption_shots,
)

__version__ = "0.1.0"
