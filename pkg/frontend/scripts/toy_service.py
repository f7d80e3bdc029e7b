"""Builds a small deterministic corpus and serves it for the UI tests.

Usage: python3 toy_service.py PORT
"""

import sys
import tempfile
from pathlib import Path

import numpy as np
import uvicorn

from clipsearch import ingest
from clipsearch.index import EmbeddingRecord, write_embedding_blob
from clipsearch.ingest import frame_to_ms
from clipsearch.service import create_app

FPS = 25.0
N_FRAMES = 120
DIM = 8

PHRASES = [
    "a red fire truck drives past the market",
    "children playing football in the park",
    "a chef stirs beef in a hot pan",
    "crowd watches the lion dance downtown",
]


def build_corpus(root: Path) -> Path:
    rng = np.random.default_rng(1234)
    lines = []
    for v in range(3):
        vid = f"V{v:03d}"
        sizes = np.concatenate([
            level + rng.integers(-400, 400, N_FRAMES // 4)
            for level in (40_000, 85_000, 42_000, 88_000)
        ])
        sizes_path = root / f"{vid}.sizes.tsv"
        sizes_path.write_text(
            "".join(f"{i}\t{int(s)}\n" for i, s in enumerate(sizes, 1)), encoding="utf-8"
        )
        records = [
            EmbeddingRecord(vid, frame_to_ms(i, FPS), tuple(rng.normal(size=DIM)), "frame")
            for i in range(1, N_FRAMES + 1)
        ]
        write_embedding_blob(root / f"{vid}.emb", root / f"{vid}.emb.tsv", records)
        subs = root / f"{vid}.vtt"
        cues = [
            f"00:00:0{t}.000 --> 00:00:0{t}.900\n{PHRASES[(v + t) % len(PHRASES)]}\n"
            for t in range(4)
        ]
        subs.write_text("WEBVTT\n\n" + "\n".join(cues), encoding="utf-8")
        lines.append(f"{vid}\t{FPS}\t{sizes_path.name}\t{vid}.emb\t{subs.name}\t-\t-")
    manifest = root / "corpus.tsv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


def main():
    port = int(sys.argv[1])
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        manifest = build_corpus(root)
        report = ingest.build_database(manifest, root / "db", rho=0.05)
        app = create_app(report.generation)
        uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")


if __name__ == "__main__":
    main()
