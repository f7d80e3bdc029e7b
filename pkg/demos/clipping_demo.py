"""Clip suggestion walkthrough on a small hand-built corpus.

Two videos get a handful of frame embeddings and caption snippets.  We then
issue a mixed query set (one text query against the raw caption index, one
vector query against the frame embeddings) and print the ranked clip
suggestions with their supporting frames.
"""

import numpy as np

from clipsearch.clipper import ClipConfig, Databases, Query, unified_clipping
from clipsearch.index import EmbeddingRecord, TextIndex, TextRecord, build_dense_index

rng = np.random.default_rng(0)

def vec(hot):
    v = rng.normal(0, 0.05, 8)
    v[hot] += 1.0
    return tuple(v)

# Video A: a parade sequence around t=10s, video B: a kitchen scene.
frames = []
for t_ms in range(0, 30_000, 2_000):
    frames.append(EmbeddingRecord("A", t_ms, vec(0 if 8_000 <= t_ms <= 14_000 else 3), "frame"))
    frames.append(EmbeddingRecord("B", t_ms, vec(5), "frame"))
visual = build_dense_index(frames)

captions = [
    TextRecord("A", 8_000, 0, "a lion dance troupe enters the square", "caption"),
    TextRecord("A", 12_000, 0, "the lion dance reaches the stage", "caption"),
    TextRecord("A", 24_000, 0, "crowd disperses after the parade", "caption"),
    TextRecord("B", 4_000, 0, "a chef chops vegetables", "caption"),
    TextRecord("B", 18_000, 0, "add the stock and simmer", "subtitle"),
]
text_raw = TextIndex(captions)

dbs = Databases(visual=visual, text_emb=None, text_raw=text_raw)
queries = [
    Query(0, text="lion dance", use_text_raw=True),
    Query(1, image_vector=vec(0), use_frame_emb=True),
]
config = ClipConfig(T_ms=8_000, K=5)

suggestions, warnings = unified_clipping(queries, config, dbs)
for w in warnings:
    print("warning:", w)

print(f"top {len(suggestions)} suggestions (window <= {config.T_ms} ms)\n")
for rank, s in enumerate(suggestions, 1):
    print(f"{rank}. video {s.video_id}  [{s.start_ms}..{s.end_ms}] ms  "
          f"queries={s.unique_query_count}  max_score={s.max_score:.3f}")
    for f in s.retrieved_frames:
        print(f"     t={f.timestamp_ms:>6d}  q{f.query_id}  {f.source:<9s}  "
              f"score={f.score:.3f}")
    print()
