"""Desk-scale evaluation of keyframe extraction on synthetic signals.

Real challenge videos are not redistributable, so boundary recall is
measured on synthetic frame-size series with planted step discontinuities
and seeded jitter.  The coverage-ratio curve sweeps the keyframe ratio and
the matching window and must be monotone along both axes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dake

DEFAULT_RHO_GRID = (0.005, 0.01, 0.02, 0.05)
# Error windows in seconds; multiplied by fps to get frame deltas.
DEFAULT_DELTA_SECONDS = (0.0, 0.5, 1.0, 2.0)

BASE_LEVEL = 100_000


@dataclass(frozen=True)
class SyntheticSeriesSpec:
    n: int
    planted: tuple[int, ...]  # 1-based boundary indices, ascending
    jump: float  # step height as a fraction of the maximum size
    noise: float  # uniform relative jitter amplitude
    seed: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not 0 < self.jump <= 1:
            raise ValueError("jump must be in (0, 1]")
        if self.noise < 0:
            raise ValueError("noise must be >= 0")
        if self.jump < 10 * self.noise:
            raise ValueError("jump must be at least 10x the noise amplitude")
        prev = None
        for p in self.planted:
            if not 4 <= p <= self.n - 4:
                raise ValueError(f"planted index {p} too close to the series ends")
            if prev is not None and p - prev < 8:
                raise ValueError("planted indices must be separated by >= 8")
            prev = p


def synthesize(
    spec: SyntheticSeriesSpec, video_id: str = "synthetic", fps: float = 25.0
) -> tuple[dake.FrameSizeSeries, tuple[int, ...]]:
    """Piecewise-constant sizes stepping at each planted index, plus jitter.

    A planted index p means the size level changes between frames p and
    p+1, so p is the last frame of the old segment; the returned ground
    truth is exactly spec.planted.  Deterministic per seed.
    """
    levels = np.full(spec.n, float(BASE_LEVEL))
    high = float(BASE_LEVEL)
    low = high * (1.0 - spec.jump)
    level, at_high = high, True
    prev = 0
    segments = list(spec.planted) + [spec.n]
    for boundary in segments:
        levels[prev:boundary] = level
        at_high = not at_high
        level = high if at_high else low
        prev = boundary
    rng = np.random.default_rng(spec.seed)
    if spec.noise > 0:
        levels = levels * (1.0 + rng.uniform(-spec.noise, spec.noise, spec.n))
    sizes = tuple(int(round(s)) for s in levels)
    return dake.FrameSizeSeries(video_id, fps, sizes), spec.planted


def coverage_curve(
    series: dake.FrameSizeSeries,
    reference: Sequence[int],
    rhos: Sequence[float],
    deltas: Sequence[int],
    coverage_window: int | None = None,
) -> list[tuple[float, int, float]]:
    """Coverage ratio for each (rho, delta) grid cell.

    Each cell runs top-ratio selection, coverage enforcement, and the
    one-sided match rule against the reference boundaries.  Rows come out
    in grid order: (rho, delta, coverage).
    """
    if not reference:
        raise ValueError("reference must be non-empty")
    if coverage_window is None:
        coverage_window = max(1, round(2 * series.fps))
    rows = []
    for rho in rhos:
        selected = dake.enforce_coverage(
            dake.select_keyframes(series, rho), series, coverage_window
        )
        for delta in deltas:
            ratio = dake.coverage_ratio(selected.indices, reference, delta)
            rows.append((rho, int(delta), ratio))
    return rows


def load_spec(path) -> tuple[SyntheticSeriesSpec, dict]:
    """Read a synthetic-series spec JSON file.

    Required keys: n, planted, jump, noise, seed.  Optional: fps, rhos,
    deltas (frame counts); the extras are returned as a separate dict.
    """
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    spec = SyntheticSeriesSpec(
        n=data["n"],
        planted=tuple(data["planted"]),
        jump=data["jump"],
        noise=data.get("noise", 0.0),
        seed=data.get("seed", 0),
    )
    extras = {
        "fps": data.get("fps", 25.0),
        "rhos": tuple(data.get("rhos", DEFAULT_RHO_GRID)),
        "deltas": tuple(data.get("deltas", ())),
    }
    return spec, extras


def write_curve_csv(fh, rows: Sequence[tuple[float, int, float]]) -> None:
    fh.write("rho,delta,coverage\n")
    for rho, delta, cov in rows:
        fh.write(f"{rho},{delta},{cov}\n")
