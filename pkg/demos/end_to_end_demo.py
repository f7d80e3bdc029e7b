"""End to end: synthesize a corpus on disk, ingest it, query the service.

Builds two small videos (frame-size series, embedding blobs, WebVTT
subtitles, caption files), ingests them into an immutable generation,
mounts the HTTP app in-process, and walks through a search plus a CSV
answer export.
"""

import json
import tempfile
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from clipsearch import ingest
from clipsearch.index import EmbeddingRecord, write_embedding_blob
from clipsearch.ingest import frame_to_ms
from clipsearch.service import create_app

FPS = 25.0
N_FRAMES = 200
DIM = 8

def build_corpus(root: Path, rng) -> Path:
    lines = []
    for v, topic in enumerate(["a parade with a lion dance", "a cooking show"]):
        vid = f"V{v:03d}"
        # Frame sizes: four segments so the keyframe selector has real cuts.
        sizes = np.concatenate([
            level + rng.integers(-400, 400, N_FRAMES // 4)
            for level in (40_000, 90_000, 45_000, 95_000)
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
        subs.write_text(
            "WEBVTT\n\n"
            f"00:00:01.000 --> 00:00:03.000\nthe scene shows {topic}\n\n"
            f"00:00:05.000 --> 00:00:07.000\nmore of {topic} continues\n",
            encoding="utf-8",
        )

        caps = root / f"{vid}.captions.tsv"
        caps.write_text(
            f"{vid}\t2000\tcaption\tkeyframe caption: {topic} at full swing\n",
            encoding="utf-8",
        )
        lines.append(f"{vid}\t{FPS}\t{sizes_path.name}\t{vid}.emb\t{subs.name}\t-\t{caps.name}")
    manifest = root / "corpus.tsv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest

with tempfile.TemporaryDirectory() as tmp:
    root = Path(tmp)
    manifest = build_corpus(root, np.random.default_rng(7))

    report = ingest.build_database(manifest, root / "db", rho=0.05)
    gen = report.generation
    print(f"ingested generation {gen.checksum}")
    for vid, info in gen.meta["videos"].items():
        print(f"  {vid}: {info['keyframes']} keyframes, "
              f"{info['text_records']} text records")

    client = TestClient(create_app(gen))

    print("\nGET /meta")
    print(json.dumps(client.get("/meta").json(), indent=2)[:400], "...")

    print("\nPOST /search for 'lion dance'")
    body = client.post("/search", json={
        "queries": [{"text": "lion dance", "use_text_raw": True}],
        "T_ms": 10_000, "K": 3,
    }).json()
    for s in body["suggestions"]:
        print(f"  {s['video_id']} [{s['start_ms']}..{s['end_ms']}] ms, "
              f"{len(s['frames'])} supporting hits")

    print("\nPOST /export for the best clip's frames")
    best = body["suggestions"][0]
    frame = round(best["start_ms"] * FPS / 1000) + 1
    resp = client.post("/export", json={
        "answers": [{"video_id": best["video_id"], "frame_indices": [frame]}]
    })
    print("  CSV:", resp.content)
