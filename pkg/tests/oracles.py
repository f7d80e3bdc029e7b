"""Independent brute-force reference implementations used by the tests.

Everything here is deliberately naive (scalar loops, full enumeration)
and shares no code with the library paths it checks.
"""

import math
from collections import Counter

import numpy as np


def steepness_ref(i, j, s_i, s_j, s_max):
    # Scalar np.hypot matches the rounding of the library's vectorized
    # path; math.hypot/sqrt can drift by an ulp and break bit-level
    # selection comparisons.
    a = 100.0 * abs(s_j - s_i) / s_max
    return float(a / np.hypot(float(j - i), a)) if a else 0.0


def score_frames_ref(sizes):
    """Scalar re-implementation of the mean-steepness scoring loop."""
    n = len(sizes)
    s_max = max(sizes)
    out = []
    for i in range(1, n):
        total = 0.0
        count = 0
        for j in range(i + 1, min(n, i + 3) + 1):
            total += steepness_ref(i, j, sizes[i - 1], sizes[j - 1], s_max)
            count += 1
        out.append((i, total / count))
    return out


def select_keyframes_ref(sizes, rho):
    """Sort-with-tie-break oracle for top-ratio keyframe selection."""
    entries = score_frames_ref(sizes)
    ranked = sorted(entries, key=lambda e: (-e[1], e[0]))
    k = math.floor(rho * len(entries))
    return sorted(idx for idx, _ in ranked[:k])


def coverage_ratio_ref(detections, reference, delta):
    """Brute-force pairwise matching."""
    hits = sum(
        1 for r in reference if any(x - delta <= r <= x for x in detections)
    )
    return hits / len(reference)


def dense_topk_ref(records, query_vec, k):
    """Full-scan cosine top-k over (video_id, timestamp_ms, vector) records.

    Returns [(video_id, timestamp_ms)] in the contract order: descending
    (1+cos)/2 score, ties by (video_id, timestamp_ms).
    """
    qnorm = math.sqrt(sum(x * x for x in query_vec))
    scored = []
    for video_id, ts, vec in records:
        vnorm = math.sqrt(sum(x * x for x in vec))
        cos = sum(a * b for a, b in zip(vec, query_vec)) / (vnorm * qnorm)
        scored.append(((1 + cos) / 2, video_id, ts))
    scored.sort(key=lambda t: (-t[0], t[1], t[2]))
    return [(v, ts) for _, v, ts in scored[:k]]


def bm25_ref(docs, query_terms, k1=1.2, b=0.75):
    """Textbook BM25 over tokenized docs; returns raw scores per doc."""
    n = len(docs)
    avgdl = sum(len(d) for d in docs) / n
    df = Counter()
    for d in docs:
        for t in set(d):
            df[t] += 1
    scores = []
    for d in docs:
        tf = Counter(d)
        s = 0.0
        for t in query_terms:
            if t not in tf:
                continue
            idf = math.log(1.0 + (n - df[t] + 0.5) / (df[t] + 0.5))
            s += idf * tf[t] * (k1 + 1) / (tf[t] + k1 * (1 - b + b * len(d) / avgdl))
        scores.append(s)
    return scores


def clip_candidates_ref(hits, t_ms):
    """Enumerate one candidate per hit: minimal-l window ending at that hit.

    `hits` is a list of objects with video_id / timestamp_ms / query_id /
    score, sorted by (video_id, timestamp_ms).  Returns tuples
    (video_id, start, end, unique_queries, max_score, frames).
    """
    by_video = {}
    for h in hits:
        by_video.setdefault(h.video_id, []).append(h)
    out = []
    for video in sorted(by_video):
        group = by_video[video]
        for r in range(len(group)):
            l = r
            while l > 0 and group[r].timestamp_ms - group[l - 1].timestamp_ms <= t_ms:
                l -= 1
            frames = group[l : r + 1]
            out.append(
                (
                    video,
                    frames[0].timestamp_ms,
                    frames[-1].timestamp_ms,
                    len({f.query_id for f in frames}),
                    max(f.score for f in frames),
                    tuple(frames),
                )
            )
    return out


def rank_ref(candidates):
    """Stable sort by the completed better-order."""
    return sorted(candidates, key=lambda c: (-c[3], -c[4], c[0], c[1], c[2]))
