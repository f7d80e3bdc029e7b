"""Training-free keyframe extraction from compressed frame sizes.

Dynamic scenes change the byte size of compressed frames abruptly, while
static scenes keep it stable.  We score each frame by the normalized rate
of change ("steepness") of its JPEG size against the next few frames,
pick the top fraction, and optionally force at least one keyframe into
every fixed-width window.  No decoder or learned model is involved.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# How many frames ahead each frame is compared against.
LOOKAHEAD = 3

DEFAULT_RATIO = 0.02


@dataclass(frozen=True)
class FrameSizeSeries:
    """Per-video sequence of compressed frame byte sizes, 1-indexed."""

    video_id: str
    fps: float
    sizes: tuple[int, ...]

    def __post_init__(self):
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        if len(self.sizes) < 2:
            raise ValueError("need at least 2 frames")
        if any(s < 0 for s in self.sizes):
            raise ValueError("frame sizes must be non-negative")
        if max(self.sizes) == 0:
            raise ValueError("all frame sizes are zero (degenerate video)")

    def __len__(self):
        return len(self.sizes)


@dataclass(frozen=True)
class SteepnessEntry:
    frame_index: int  # 1-based
    steepness: float


@dataclass(frozen=True)
class KeyframeSet:
    video_id: str
    indices: tuple[int, ...]  # strictly increasing, 1-based
    rho: float
    coverage_window: int | None = None

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")


def steepness(i: int, j: int, s_i: int, s_j: int, s_max: int) -> float:
    """Normalized rate of change of frame size between frames i and j.

    Returns a / sqrt((j-i)^2 + a^2) with a = 100 * |s_j - s_i| / s_max,
    which lies in [0, 1) and is invariant to rescaling all sizes.
    """
    if j <= i:
        raise ValueError(f"j must exceed i, got i={i}, j={j}")
    if s_max <= 0:
        raise ValueError("s_max must be positive (degenerate video)")
    a = 100.0 * abs(s_j - s_i) / s_max
    if a == 0.0:
        return 0.0
    return a / math.hypot(j - i, a)


def score_frames(series: FrameSizeSeries) -> list[SteepnessEntry]:
    """Mean steepness of each frame against its next LOOKAHEAD frames.

    Returns n-1 entries in ascending frame index; frame i averages
    steepness(i, j) for j in i+1 .. min(n, i+LOOKAHEAD).
    """
    scores = _score_array(series)
    return [SteepnessEntry(i + 1, float(s)) for i, s in enumerate(scores)]


def _score_array(series: FrameSizeSeries) -> np.ndarray:
    s = np.asarray(series.sizes, dtype=np.float64)
    n = len(s)
    s_max = float(s.max())
    sums = np.zeros(n - 1)
    counts = np.zeros(n - 1)
    # Accumulate in ascending distance so the summation order matches a
    # scalar inner loop over j = i+1 .. i+LOOKAHEAD exactly.
    for d in range(1, LOOKAHEAD + 1):
        if d >= n:
            break
        a = 100.0 * np.abs(s[d:] - s[:-d]) / s_max
        sums[: n - d] += a / np.hypot(float(d), a)
        counts[: n - d] += 1
    return sums / counts


def select_keyframes(series: FrameSizeSeries, rho: float) -> KeyframeSet:
    """Top floor(rho * (n-1)) frames by mean steepness.

    Ties are broken by ascending frame index; the returned indices are
    sorted ascending.  Coverage enforcement is a separate step.
    """
    if not 0 < rho <= 1:
        raise ValueError(f"rho must be in (0, 1], got {rho}")
    scores = _score_array(series)
    k = math.floor(rho * len(scores))
    # Descending by score, ascending index on ties.
    order = np.lexsort((np.arange(len(scores)), -scores))
    chosen = np.sort(order[:k]) + 1
    return KeyframeSet(series.video_id, tuple(int(i) for i in chosen), rho)


def enforce_coverage(
    selected: KeyframeSet, series: FrameSizeSeries, window_frames: int
) -> KeyframeSet:
    """Guarantee a keyframe in every disjoint window of window_frames frames.

    Windows start at frame 1; a window with no selected frame receives the
    frame with the highest steepness inside it (smallest index on ties).
    The last frame, which has no steepness entry, counts as steepness 0.
    """
    if window_frames < 1:
        raise ValueError("window_frames must be >= 1")
    scores = _score_array(series)
    scores = np.append(scores, 0.0)  # frame n
    n = len(series)
    have = set(selected.indices)
    added = []
    for w in range(1, n + 1, window_frames):
        hi = w + window_frames - 1
        if hi > n:
            break  # trailing partial window
        if any(idx in have for idx in range(w, hi + 1)):
            continue
        window = scores[w - 1 : hi]
        added.append(w + int(np.argmax(window)))  # argmax takes smallest on ties
    indices = tuple(sorted(have.union(added)))
    return KeyframeSet(selected.video_id, indices, selected.rho, window_frames)


def coverage_ratio(
    detections: Sequence[int], reference: Sequence[int], delta: int
) -> float:
    """Fraction of reference points matched by a detection within delta.

    A detection x matches reference r when x - delta <= r <= x, i.e. the
    detection lies in [r, r + delta].  Each reference counts at most once.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if not reference:
        raise ValueError("reference must be non-empty")
    det = sorted(detections)
    hits = 0
    for r in reference:
        pos = bisect_left(det, r)
        if pos < len(det) and det[pos] <= r + delta:
            hits += 1
    return hits / len(reference)


def read_frame_size_series(path, video_id: str, fps: float) -> FrameSizeSeries:
    """Load a `frame_index<TAB>size_bytes` file with ascending 1-based indices."""
    sizes = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                idx_s, size_s = line.split("\t")
                idx, size = int(idx_s), int(size_s)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed record {line!r}")
            if idx != len(sizes) + 1:
                raise ValueError(
                    f"{path}:{lineno}: expected frame index {len(sizes) + 1}, got {idx}"
                )
            sizes.append(size)
    return FrameSizeSeries(video_id, fps, tuple(sizes))


def write_keyframe_manifest(fh, keyframes: Iterable[KeyframeSet]) -> None:
    """Write `video_id<TAB>frame_index` lines, indices ascending per video."""
    for ks in keyframes:
        for idx in ks.indices:
            fh.write(f"{ks.video_id}\t{idx}\n")
