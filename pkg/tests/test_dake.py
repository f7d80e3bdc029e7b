import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clipsearch import dake

from oracles import coverage_ratio_ref, score_frames_ref, select_keyframes_ref


def series(sizes, fps=25.0, video_id="v"):
    return dake.FrameSizeSeries(video_id, fps, tuple(sizes))


class TestSteepness:
    def test_zero_change(self):
        assert dake.steepness(1, 2, 500, 500, 1000) == 0.0

    def test_hand_values(self):
        # Frozen from the scalar oracle: a=10, d=1 and d=2.
        assert dake.steepness(1, 2, 500, 600, 1000) == pytest.approx(
            10 / math.sqrt(101), abs=1e-12
        )
        assert dake.steepness(1, 3, 500, 600, 1000) == pytest.approx(
            10 / math.sqrt(104), abs=1e-12
        )

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            dake.steepness(2, 2, 1, 2, 10)
        with pytest.raises(ValueError):
            dake.steepness(1, 2, 0, 0, 0)

    @given(
        st.integers(1, 100),
        st.integers(1, 50),
        st.integers(0, 10**6),
        st.integers(0, 10**6),
    )
    def test_bounded(self, i, gap, s_i, s_j):
        s_max = max(s_i, s_j, 1)
        val = dake.steepness(i, i + gap, s_i, s_j, s_max)
        assert 0.0 <= val < 1.0

    def test_scale_invariance(self):
        base = dake.steepness(3, 5, 4000, 9000, 12000)
        for c in (2, 7, 1000):
            scaled = dake.steepness(3, 5, 4000 * c, 9000 * c, 12000 * c)
            assert scaled == pytest.approx(base, rel=1e-12)

    def test_monotone_in_size_change(self):
        vals = [dake.steepness(1, 3, 0, d, 1000) for d in (10, 50, 200, 900)]
        assert vals == sorted(vals)
        assert len(set(vals)) == len(vals)


class TestScoreFrames:
    def test_step_series(self):
        entries = dake.score_frames(series([100, 100, 100, 1000]))
        expected = score_frames_ref([100, 100, 100, 1000])
        assert [e.frame_index for e in entries] == [1, 2, 3]
        for entry, (idx, val) in zip(entries, expected):
            assert entry.steepness == pytest.approx(val, abs=1e-12)
        # hand values: i=1 averages {0, 0, 90/sqrt(8109)}, etc.
        assert entries[0].steepness == pytest.approx(90 / math.sqrt(8109) / 3, abs=1e-9)
        assert entries[2].steepness == pytest.approx(90 / math.sqrt(8101), abs=1e-9)

    def test_constant_series(self):
        entries = dake.score_frames(series([42] * 10))
        assert all(e.steepness == 0.0 for e in entries)

    def test_two_frames(self):
        entries = dake.score_frames(series([100, 100]))
        assert entries == [dake.SteepnessEntry(1, 0.0)]

    @given(st.lists(st.integers(0, 10**5), min_size=2, max_size=60).filter(max))
    @settings(max_examples=50)
    def test_matches_scalar_oracle(self, sizes):
        entries = dake.score_frames(series(sizes))
        for entry, (idx, val) in zip(entries, score_frames_ref(sizes)):
            assert entry.frame_index == idx
            assert entry.steepness == val  # bit-identical summation order


class TestSelectKeyframes:
    def test_single_pick(self):
        assert dake.select_keyframes(series([100, 100, 100, 1000]), 0.34).indices == (3,)

    def test_rho_one_selects_all(self):
        sizes = [100, 900, 200, 700, 100, 100]
        assert dake.select_keyframes(series(sizes), 1.0).indices == (1, 2, 3, 4, 5)

    def test_tie_break_by_index(self):
        assert dake.select_keyframes(series([7] * 5), 0.5).indices == (1, 2)

    def test_rejects_bad_rho(self):
        for rho in (0.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                dake.select_keyframes(series([1, 2]), rho)

    def test_matches_oracle_on_random_series(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            n = int(rng.integers(2, 400))
            sizes = rng.integers(0, 10**6, n).tolist()
            if max(sizes) == 0:
                sizes[0] = 1
            rho = float(rng.uniform(0.01, 1.0))
            got = dake.select_keyframes(series(sizes), rho)
            assert list(got.indices) == select_keyframes_ref(sizes, rho)
            assert len(got.indices) == math.floor(rho * (n - 1))


class TestEnforceCoverage:
    def test_already_covered(self):
        s = series([100, 100, 100, 1000])
        ks = dake.KeyframeSet("v", (3,), 0.34)
        assert dake.enforce_coverage(ks, s, 4).indices == (3,)

    def test_fills_empty_windows_constant(self):
        s = series([5] * 8)
        ks = dake.KeyframeSet("v", (), 0.01)
        assert dake.enforce_coverage(ks, s, 4).indices == (1, 5)

    def test_fills_with_max_steepness(self):
        # Frozen from the scoring oracle: in window [5..8] frame 6 carries
        # the largest mean steepness (both its comparisons cross the jump).
        s = series([100, 100, 100, 100, 100, 900, 100, 100])
        ks = dake.KeyframeSet("v", (1,), 0.1)
        assert dake.enforce_coverage(ks, s, 4).indices == (1, 6)

    def test_no_empty_windows_after_enforcement(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            n = int(rng.integers(2, 300))
            sizes = rng.integers(1, 10**5, n).tolist()
            w = int(rng.integers(1, max(2, n // 2)))
            rho = float(rng.uniform(0.005, 0.3))
            s = series(sizes)
            out = dake.enforce_coverage(dake.select_keyframes(s, rho), s, w)
            have = set(out.indices)
            for start in range(1, n + 1, w):
                if start + w - 1 > n:
                    break
                assert any(i in have for i in range(start, start + w))

    def test_result_superset_of_input(self):
        s = series([1, 9, 1, 9, 1, 9, 1, 9, 1])
        ks = dake.select_keyframes(s, 0.25)
        out = dake.enforce_coverage(ks, s, 3)
        assert set(ks.indices) <= set(out.indices)


class TestCoverageRatio:
    def test_partial_match(self):
        assert dake.coverage_ratio([10, 50], [12, 48], 5) == 0.5

    def test_identity_match(self):
        ref = [3, 9, 27]
        assert dake.coverage_ratio(ref, ref, 0) == 1.0

    def test_no_detections(self):
        assert dake.coverage_ratio([], [1], 100) == 0.0

    def test_empty_reference_rejected(self):
        with pytest.raises(ValueError):
            dake.coverage_ratio([1], [], 1)

    @given(
        st.lists(st.integers(0, 200), max_size=30),
        st.lists(st.integers(0, 200), min_size=1, max_size=30),
        st.integers(0, 50),
    )
    @settings(max_examples=60)
    def test_matches_brute_force_and_monotone(self, det, ref, delta):
        got = dake.coverage_ratio(det, ref, delta)
        assert got == coverage_ratio_ref(det, ref, delta)
        assert got <= dake.coverage_ratio(det, ref, delta + 7)
        assert got <= dake.coverage_ratio(det + [123], ref, delta)


class TestSeriesIO:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "sizes.tsv"
        p.write_text("1\t312\n2\t500\n", encoding="utf-8")
        s = dake.read_frame_size_series(p, "vid", 30.0)
        assert s.sizes == (312, 500) and s.fps == 30.0

    def test_gap_rejected(self, tmp_path):
        p = tmp_path / "sizes.tsv"
        p.write_text("1\t312\n3\t500\n", encoding="utf-8")
        with pytest.raises(ValueError, match="expected frame index 2"):
            dake.read_frame_size_series(p, "vid", 30.0)

    def test_manifest_format(self, tmp_path):
        import io

        buf = io.StringIO()
        dake.write_keyframe_manifest(buf, [dake.KeyframeSet("vid", (2, 7), 0.1)])
        assert buf.getvalue() == "vid\t2\nvid\t7\n"


def test_frame_size_series_invariants():
    with pytest.raises(ValueError):
        dake.FrameSizeSeries("v", 25, (5,))
    with pytest.raises(ValueError):
        dake.FrameSizeSeries("v", 0, (1, 2))
    with pytest.raises(ValueError):
        dake.FrameSizeSeries("v", 25, (0, 0))
    with pytest.raises(ValueError):
        dake.FrameSizeSeries("v", 25, (1, -2))
