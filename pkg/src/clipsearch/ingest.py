"""Offline pipeline from raw per-video artifacts to a search generation.

A corpus manifest lists, per video, the frame-size file, embedding blobs,
and optional subtitle/shot/caption files.  Building a generation runs
keyframe selection, filters frame embeddings to the selected keyframes,
loads text records, and writes an immutable directory whose name is the
hash of its contents.  Re-running on unchanged inputs reproduces the same
generation byte for byte; a `current` symlink publishes it atomically.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import shutil
from dataclasses import dataclass, field
from pathlib import Path

from . import dake
from .index import (
    DenseIndex,
    EmbeddingRecord,
    TextIndex,
    TextRecord,
    build_dense_index,
    read_embedding_blob,
    read_text_records,
    unescape_text,
    write_embedding_blob,
    write_text_records,
)

logger = logging.getLogger(__name__)

DEFAULT_RHO = dake.DEFAULT_RATIO

_VTT_TS_RE = re.compile(r"^(?:(\d+):)?(\d{2}):(\d{2})[.,](\d{3})$")


class IngestError(RuntimeError):
    pass


@dataclass(frozen=True)
class VideoManifest:
    video_id: str
    fps: float
    frame_size_file: Path
    embedding_blobs: tuple[Path, ...] = ()
    subtitle_file: Path | None = None
    shot_file: Path | None = None
    caption_file: Path | None = None

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError(f"{self.video_id}: fps must be positive")


def frame_to_ms(frame_index: int, fps: float) -> int:
    """1-based frame index to milliseconds."""
    return round(1000.0 * (frame_index - 1) / fps)


def compute_frame_sizes(frame_dir, video_id: str, fps: float) -> dake.FrameSizeSeries:
    """Build a frame-size series from a directory of per-frame image files.

    Files must be named by zero-padded frame index starting at 1, with one
    shared extension; sizes come straight from the file system.
    """
    frame_dir = Path(frame_dir)
    files = sorted(p for p in frame_dir.iterdir() if p.is_file())
    if not files:
        raise IngestError(f"{frame_dir}: no frame files")
    extensions = {p.suffix for p in files}
    if len(extensions) != 1:
        raise IngestError(f"{frame_dir}: mixed extensions {sorted(extensions)}")
    by_index = {}
    for p in files:
        try:
            by_index[int(p.stem)] = p
        except ValueError:
            raise IngestError(f"{frame_dir}: non-numeric frame file {p.name}")
    sizes = []
    for idx in range(1, len(by_index) + 1):
        if idx not in by_index:
            raise IngestError(f"{frame_dir}: missing frame index {idx}")
        sizes.append(by_index[idx].stat().st_size)
    return dake.FrameSizeSeries(video_id, fps, tuple(sizes))


def _parse_vtt_timestamp(text: str, lineno: int) -> int:
    m = _VTT_TS_RE.match(text.strip())
    if m is None:
        raise IngestError(f"line {lineno}: malformed timestamp {text!r}")
    hours = int(m.group(1) or 0)
    return ((hours * 60 + int(m.group(2))) * 60 + int(m.group(3))) * 1000 + int(m.group(4))


def ingest_subtitles(path, video_id: str) -> list[TextRecord]:
    """Parse a WebVTT file into subtitle TextRecords, one per cue."""
    records = []
    with open(path, encoding="utf-8-sig") as fh:
        lines = fh.read().split("\n")
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        if "-->" not in line:
            i += 1
            continue
        lineno = i + 1
        start_s, _, rest = line.partition("-->")
        end_s = rest.strip().split(" ")[0]  # drop cue settings
        start = _parse_vtt_timestamp(start_s, lineno)
        end = _parse_vtt_timestamp(end_s, lineno)
        i += 1
        body_lines = []
        while i < len(lines) and lines[i].strip():
            body_lines.append(lines[i].strip())
            i += 1
        body = " ".join(body_lines)
        if not body:
            logger.warning("%s line %d: empty cue skipped", path, lineno)
            continue
        records.append(TextRecord(video_id, start, max(end - start, 0), body, "subtitle"))
    return records


def read_caption_file(path, video_id: str) -> list[TextRecord]:
    """Parse `video_id<TAB>timestamp_ms<TAB>kind<TAB>caption` lines."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise IngestError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            vid, ts, kind, body = parts
            if vid != video_id:
                raise IngestError(f"{path}:{lineno}: video id {vid!r} != {video_id!r}")
            records.append(TextRecord(vid, int(ts), 0, unescape_text(body), kind))
    return records


def read_shot_file(path, video_id: str):
    """Parse `shot_index<TAB>start_ms<TAB>end_ms<TAB>keyframes<TAB>subtitle` lines.

    Keyframes are comma-separated image references; the subtitle field uses
    the same tab/newline escaping as caption files and may be empty.
    """
    from .recap import Shot

    shots = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise IngestError(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
            idx, start, end, frames, subtitle = parts
            shots.append(
                Shot(
                    int(idx),
                    video_id,
                    tuple(frames.split(",")),
                    unescape_text(subtitle),
                    int(start),
                    int(end),
                )
            )
    return shots


def read_corpus_manifest(path) -> list[VideoManifest]:
    """One video per line: tab-separated fields, `-` for absent optionals.

    Columns: video_id, fps, frame_size_file, embedding_blobs (comma
    separated), subtitle_file, shot_file, caption_file.  Paths are
    resolved relative to the manifest's directory.  Each blob path `X`
    expects its sidecar manifest at `X.tsv`.
    """
    path = Path(path)
    base = path.parent
    out = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 7:
                raise IngestError(f"{path}:{lineno}: expected 7 fields, got {len(parts)}")
            vid, fps, sizes, blobs, subs, shots, caps = parts
            if vid in seen:
                raise IngestError(f"{path}:{lineno}: duplicate video_id {vid}")
            seen.add(vid)

            def opt(p):
                return None if p == "-" else base / p

            out.append(
                VideoManifest(
                    vid,
                    float(fps),
                    base / sizes,
                    tuple(base / b for b in blobs.split(",")) if blobs != "-" else (),
                    opt(subs),
                    opt(shots),
                    opt(caps),
                )
            )
    return out


@dataclass
class Generation:
    """One immutable, loadable build of the search database."""

    path: Path
    checksum: str
    visual: DenseIndex
    text_emb: DenseIndex
    text_raw: TextIndex
    meta: dict


@dataclass
class BuildReport:
    generation: Generation | None = None
    failures: dict[str, str] = field(default_factory=dict)


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _ingest_video(
    vm: VideoManifest, rho: float, coverage_seconds: float, index_all_frames: bool
) -> tuple[list[EmbeddingRecord], list[EmbeddingRecord], list[TextRecord], list[int]]:
    series = dake.read_frame_size_series(vm.frame_size_file, vm.video_id, vm.fps)
    window = max(1, round(coverage_seconds * vm.fps))
    keyframes = dake.enforce_coverage(
        dake.select_keyframes(series, rho), series, window
    )
    keyframe_ts = {frame_to_ms(i, vm.fps) for i in keyframes.indices}

    visual: list[EmbeddingRecord] = []
    textual: list[EmbeddingRecord] = []
    for blob in vm.embedding_blobs:
        for rec in read_embedding_blob(blob, Path(str(blob) + ".tsv")):
            if rec.video_id != vm.video_id:
                raise IngestError(f"{blob}: record for foreign video {rec.video_id}")
            if rec.kind == "frame":
                if index_all_frames or rec.timestamp_ms in keyframe_ts:
                    visual.append(rec)
            else:
                textual.append(rec)

    texts: list[TextRecord] = []
    if vm.subtitle_file is not None:
        texts.extend(ingest_subtitles(vm.subtitle_file, vm.video_id))
    if vm.caption_file is not None:
        texts.extend(read_caption_file(vm.caption_file, vm.video_id))
    return visual, textual, texts, list(keyframes.indices)


def build_database(
    manifest_path,
    out_dir,
    rho: float = DEFAULT_RHO,
    coverage_seconds: float = 2.0,
    index_all_frames: bool = False,
) -> BuildReport:
    """Build a generation directory from a corpus manifest.

    Per-video failures are recorded and skipped; more than half the corpus
    failing aborts the build.  The finished directory is renamed to
    gen-<hash> and published behind an atomic `current` symlink, so the
    operation is idempotent and restartable.
    """
    videos = read_corpus_manifest(manifest_path)
    if not videos:
        raise IngestError("empty corpus manifest")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    report = BuildReport()
    visual: list[EmbeddingRecord] = []
    textual: list[EmbeddingRecord] = []
    texts: list[TextRecord] = []
    meta_videos = {}
    keyframe_rows = []
    for vm in videos:
        try:
            vis, txt_emb, txt, kf = _ingest_video(
                vm, rho, coverage_seconds, index_all_frames
            )
        except Exception as exc:
            logger.warning("video %s failed: %s", vm.video_id, exc)
            report.failures[vm.video_id] = str(exc)
            continue
        visual.extend(vis)
        textual.extend(txt_emb)
        texts.extend(txt)
        keyframe_rows.extend((vm.video_id, i) for i in kf)
        meta_videos[vm.video_id] = {
            "fps": vm.fps,
            "keyframes": len(kf),
            "visual_records": len(vis),
            "text_embedding_records": len(txt_emb),
            "text_records": len(txt),
        }
    if len(report.failures) * 2 > len(videos):
        raise IngestError(
            f"{len(report.failures)}/{len(videos)} videos failed: {report.failures}"
        )

    # Validate everything up front so a broken corpus never gets published.
    visual_index = build_dense_index(visual)
    text_emb_index = build_dense_index(textual)
    text_index = TextIndex(texts)

    staging = out_dir / "gen-staging"
    if staging.exists():
        shutil.rmtree(staging)
    staging.mkdir()
    write_embedding_blob(staging / "visual.emb", staging / "visual.emb.tsv", visual)
    write_embedding_blob(staging / "text_emb.emb", staging / "text_emb.emb.tsv", textual)
    with open(staging / "text_records.tsv", "w", encoding="utf-8") as fh:
        write_text_records(fh, texts)
    with open(staging / "keyframes.tsv", "w", encoding="utf-8") as fh:
        for vid, idx in keyframe_rows:
            fh.write(f"{vid}\t{idx}\n")
    meta = {
        "rho": rho,
        "coverage_seconds": coverage_seconds,
        "index_all_frames": index_all_frames,
        "videos": meta_videos,
        "failures": report.failures,
    }
    with open(staging / "meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, indent=1)
        fh.write("\n")

    names = sorted(p.name for p in staging.iterdir())
    with open(staging / "CHECKSUMS", "w", encoding="utf-8") as fh:
        for name in names:
            fh.write(f"{_sha256_file(staging / name)}  {name}\n")
    checksum = _sha256_file(staging / "CHECKSUMS")[:16]

    final = out_dir / f"gen-{checksum}"
    if final.exists():
        shutil.rmtree(staging)  # identical build already published
    else:
        staging.rename(final)
    _publish(out_dir, final)

    report.generation = Generation(
        final, checksum, visual_index, text_emb_index, text_index, meta
    )
    return report


def _publish(out_dir: Path, generation_dir: Path) -> None:
    """Point `current` at the generation with an atomic replace."""
    tmp = out_dir / ".current.tmp"
    if tmp.is_symlink() or tmp.exists():
        tmp.unlink()
    os.symlink(generation_dir.name, tmp)
    os.replace(tmp, out_dir / "current")


def load_generation(path) -> Generation:
    """Load a generation directory (or a `current` symlink) for serving."""
    path = Path(path).resolve()
    visual = build_dense_index(read_embedding_blob(path / "visual.emb", path / "visual.emb.tsv"))
    text_emb = build_dense_index(
        read_embedding_blob(path / "text_emb.emb", path / "text_emb.emb.tsv")
    )
    with open(path / "text_records.tsv", encoding="utf-8") as fh:
        text_raw = TextIndex(read_text_records(fh))
    with open(path / "meta.json", encoding="utf-8") as fh:
        meta = json.load(fh)
    checksum = _sha256_file(path / "CHECKSUMS")[:16]
    return Generation(path, checksum, visual, text_emb, text_raw, meta)
