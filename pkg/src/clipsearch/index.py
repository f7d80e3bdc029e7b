"""In-process multimodal stores.

Two kinds of store back the search engine: a dense index over L2-normalized
embedding vectors answering exact top-k cosine queries, and a text index
over raw captions/subtitles scored with BM25.  Both are built once and then
immutable, so concurrent readers need no locking.

Embedding blob format (bit-exact): magic "UCEM", version byte 0x01,
u32-LE dimension, u64-LE row count, then rows of little-endian float32.
A sidecar text manifest carries one `video_id<TAB>timestamp_ms<TAB>kind`
line per row.
"""

from __future__ import annotations

import math
import re
import struct
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

EMBEDDING_KINDS = ("frame", "caption", "subtitle")
TEXT_KINDS = ("caption", "subtitle")
RETRIEVAL_SOURCES = ("frame_emb", "text_emb", "text_raw")

BLOB_MAGIC = b"UCEM"
BLOB_VERSION = 1

BM25_K1 = 1.2
BM25_B = 0.75

_WORD_RE = re.compile(r"\w+", re.UNICODE)


class IndexBuildError(ValueError):
    """Raised when a store cannot be built from the given records."""


@dataclass(frozen=True)
class EmbeddingRecord:
    video_id: str
    timestamp_ms: int
    vector: tuple[float, ...]
    kind: str  # frame | caption | subtitle

    def __post_init__(self):
        if self.kind not in EMBEDDING_KINDS:
            raise ValueError(f"unknown embedding kind {self.kind!r}")
        if self.timestamp_ms < 0:
            raise ValueError("timestamp_ms must be non-negative")


@dataclass(frozen=True)
class TextRecord:
    video_id: str
    timestamp_ms: int
    span_ms: int
    body: str
    kind: str  # caption | subtitle

    def __post_init__(self):
        if self.kind not in TEXT_KINDS:
            raise ValueError(f"unknown text kind {self.kind!r}")
        if not self.body.strip():
            raise ValueError("body must be non-empty")
        if self.span_ms < 0:
            raise ValueError("span_ms must be >= 0")


@dataclass(frozen=True)
class RetrievedFrame:
    video_id: str
    timestamp_ms: int
    query_id: int
    score: float
    source: str  # frame_emb | text_emb | text_raw


class DenseIndex:
    """Exact top-k cosine search over a fixed set of embedding records.

    Vectors are stored L2-normalized so the dot product is the cosine.
    Built once via build_dense_index; immutable afterwards.
    """

    def __init__(self, matrix: np.ndarray, meta: list[tuple[str, int, str]]):
        self._matrix = matrix
        self._meta = meta

    def __len__(self):
        return len(self._meta)

    @property
    def dimension(self) -> int:
        return self._matrix.shape[1] if len(self._meta) else 0

    @property
    def meta(self) -> list[tuple[str, int, str]]:
        return list(self._meta)


def build_dense_index(records: Sequence[EmbeddingRecord]) -> DenseIndex:
    """Validate, normalize, and pack records into a DenseIndex.

    (video_id, timestamp_ms, kind) is a unique key; duplicates, dimension
    mismatches, non-finite values and zero vectors are build errors.
    """
    if not records:
        return DenseIndex(np.zeros((0, 0)), [])
    dim = len(records[0].vector)
    seen: set[tuple[str, int, str]] = set()
    rows = np.zeros((len(records), dim))
    meta = []
    for row, rec in enumerate(records):
        key = (rec.video_id, rec.timestamp_ms, rec.kind)
        if key in seen:
            raise IndexBuildError(f"duplicate record {key}")
        seen.add(key)
        if len(rec.vector) != dim:
            raise IndexBuildError(
                f"dimension mismatch at {key}: got {len(rec.vector)}, expected {dim}"
            )
        vec = np.asarray(rec.vector, dtype=np.float64)
        if not np.all(np.isfinite(vec)):
            raise IndexBuildError(f"non-finite vector at {key}")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise IndexBuildError(f"zero vector at {key}")
        rows[row] = vec / norm
        meta.append(key)
    return DenseIndex(rows, meta)


def retrieve_embedding(
    index: DenseIndex,
    query_vec: Sequence[float],
    k: int,
    query_id: int,
    source: str = "frame_emb",
) -> list[RetrievedFrame]:
    """Exact top-k cosine hits, scores mapped to [0, 1] via (1 + cos) / 2.

    Descending score; ties broken by (video_id, timestamp_ms).  Returns
    fewer than k hits when the store is smaller.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(index) == 0:
        return []
    q = np.asarray(query_vec, dtype=np.float64)
    if q.shape != (index.dimension,):
        raise ValueError(
            f"query dimension {q.shape} does not match store dimension {index.dimension}"
        )
    norm = float(np.linalg.norm(q))
    if norm == 0.0:
        raise ValueError("query vector must be non-zero")
    cos = index._matrix @ (q / norm)
    scores = np.clip((1.0 + cos) / 2.0, 0.0, 1.0)
    meta = index._meta
    order = sorted(
        range(len(meta)), key=lambda i: (-scores[i], meta[i][0], meta[i][1])
    )
    if source not in RETRIEVAL_SOURCES:
        raise ValueError(f"unknown source {source!r}")
    return [
        RetrievedFrame(meta[i][0], meta[i][1], query_id, float(scores[i]), source)
        for i in order[:k]
    ]


def tokenize(text: str) -> list[str]:
    """Unicode-aware lowercase word segmentation, no stemming."""
    return _WORD_RE.findall(text.lower())


class TextIndex:
    """BM25 inverted index over raw caption/subtitle records."""

    def __init__(self, records: Sequence[TextRecord]):
        self.records = list(records)
        docs = [tokenize(r.body) for r in self.records]
        self._doc_lens = [len(d) for d in docs]
        self._avgdl = (sum(self._doc_lens) / len(docs)) if docs else 0.0
        self._term_freqs = [Counter(d) for d in docs]
        self._postings: dict[str, list[int]] = {}
        for doc_id, tf in enumerate(self._term_freqs):
            for term in tf:
                self._postings.setdefault(term, []).append(doc_id)
        n = len(docs)
        self._idf = {
            t: math.log(1.0 + (n - len(p) + 0.5) / (len(p) + 0.5))
            for t, p in self._postings.items()
        }

    def __len__(self):
        return len(self.records)

    def bm25_scores(self, query_text: str) -> dict[int, float]:
        """Raw BM25 score for every document hit by at least one query term."""
        terms = tokenize(query_text)
        if not terms:
            raise ValueError("query is empty after tokenization")
        scores: dict[int, float] = {}
        for term in set(terms):
            idf = self._idf.get(term)
            if idf is None:
                continue
            qtf = terms.count(term)
            for doc_id in self._postings[term]:
                f = self._term_freqs[doc_id][term]
                dl = self._doc_lens[doc_id]
                denom = f + BM25_K1 * (1 - BM25_B + BM25_B * dl / self._avgdl)
                scores[doc_id] = scores.get(doc_id, 0.0) + qtf * idf * f * (
                    BM25_K1 + 1
                ) / denom
        return scores


def retrieve_raw(
    store: TextIndex, query_text: str, k: int, query_id: int
) -> list[RetrievedFrame]:
    """Top-k text records by BM25, scores min-max normalized to [0, 1].

    A single hit (or an all-tied result list) normalizes to 1.0.  Ties
    broken by (video_id, timestamp_ms).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    raw = store.bm25_scores(query_text)
    if not raw:
        return []
    order = sorted(
        raw,
        key=lambda d: (-raw[d], store.records[d].video_id, store.records[d].timestamp_ms),
    )[:k]
    top = [raw[d] for d in order]
    lo, hi = min(top), max(top)
    span = hi - lo
    out = []
    for doc_id, score in zip(order, top):
        norm = 1.0 if span == 0.0 else (score - lo) / span
        rec = store.records[doc_id]
        out.append(
            RetrievedFrame(rec.video_id, rec.timestamp_ms, query_id, norm, "text_raw")
        )
    return out


def write_embedding_blob(
    blob_path, manifest_path, records: Sequence[EmbeddingRecord]
) -> None:
    """Serialize records to the binary blob + sidecar manifest pair."""
    dim = len(records[0].vector) if records else 0
    with open(blob_path, "wb") as fh:
        fh.write(BLOB_MAGIC)
        fh.write(bytes([BLOB_VERSION]))
        fh.write(struct.pack("<IQ", dim, len(records)))
        for rec in records:
            if len(rec.vector) != dim:
                raise ValueError("records have mixed dimensions")
            fh.write(np.asarray(rec.vector, dtype="<f4").tobytes())
    with open(manifest_path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(f"{rec.video_id}\t{rec.timestamp_ms}\t{rec.kind}\n")


def read_embedding_blob(blob_path, manifest_path) -> list[EmbeddingRecord]:
    """Load an embedding blob + manifest pair back into records."""
    blob_path = Path(blob_path)
    data = blob_path.read_bytes()
    if data[:4] != BLOB_MAGIC:
        raise ValueError(f"{blob_path}: bad magic {data[:4]!r}")
    if data[4] != BLOB_VERSION:
        raise ValueError(f"{blob_path}: unsupported version {data[4]}")
    dim, count = struct.unpack_from("<IQ", data, 5)
    offset = 5 + struct.calcsize("<IQ")
    expected = offset + count * dim * 4
    if len(data) != expected:
        raise ValueError(f"{blob_path}: expected {expected} bytes, found {len(data)}")
    matrix = np.frombuffer(data, dtype="<f4", count=count * dim, offset=offset)
    matrix = matrix.reshape(count, dim)
    records = []
    with open(manifest_path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if len(lines) != count:
        raise ValueError(
            f"{manifest_path}: {len(lines)} manifest lines for {count} blob rows"
        )
    for row, line in enumerate(lines):
        video_id, ts, kind = line.split("\t")
        records.append(
            EmbeddingRecord(video_id, int(ts), tuple(float(x) for x in matrix[row]), kind)
        )
    return records


def write_text_records(fh, records: Iterable[TextRecord]) -> None:
    """Write `video_id<TAB>ts<TAB>span<TAB>kind<TAB>body` with escaped text."""
    for rec in records:
        fh.write(
            f"{rec.video_id}\t{rec.timestamp_ms}\t{rec.span_ms}\t{rec.kind}\t"
            f"{escape_text(rec.body)}\n"
        )


def read_text_records(fh) -> list[TextRecord]:
    records = []
    for line in fh:
        line = line.rstrip("\n")
        if not line:
            continue
        video_id, ts, span, kind, body = line.split("\t")
        records.append(TextRecord(video_id, int(ts), int(span), unescape_text(body), kind))
    return records


def escape_text(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def unescape_text(text: str) -> str:
    out = []
    it = iter(text)
    for ch in it:
        if ch != "\\":
            out.append(ch)
            continue
        nxt = next(it, "")
        out.append({"t": "\t", "n": "\n", "\\": "\\"}.get(nxt, "\\" + nxt))
    return "".join(out)
