import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_seq
from facestyle import errors
from facestyle.features import SpectralConfig
from facestyle.metrics import (
    METRIC_NAMES,
    MetricsReport,
    compute_metrics,
    evaluate_pairs,
    fdd,
    fdtw,
    ffe,
    fve,
    lve,
)
from facestyle.motion import MotionSequence, RegionMask
from oracles import brute_force_dtw, naive_frequency_matrix


def seq_from(frames):
    return MotionSequence(np.asarray(frames, dtype=np.float64))


def test_identity_zero(rng):
    s = random_seq(rng, 10, 4)
    mask = RegionMask((0, 1), (2, 3))
    assert compute_metrics(s, s, mask) == {n: 0.0 for n in METRIC_NAMES}


def test_lve_single_frame():
    gt = seq_from(np.zeros((1, 2, 3)))
    pred = seq_from([[[0.3, 0, 0], [0, 0, 0]]])
    assert lve(pred, gt, RegionMask((0, 1), ())) == pytest.approx(0.09, abs=1e-15)


def test_lve_mean_of_frame_maxima():
    gt = seq_from(np.zeros((2, 2, 3)))
    pred = seq_from([[[0.3, 0, 0], [0, 0, 0]], [[0, 0.1, 0], [0, 0, 0.05]]])
    assert lve(pred, gt, RegionMask((0, 1), ())) == pytest.approx(0.05, abs=1e-15)


def test_lve_errors(rng):
    a = random_seq(rng, 3, 2)
    with pytest.raises(errors.EmptyRegion):
        lve(a, a, RegionMask((), (0,)))
    with pytest.raises(errors.DimensionMismatch):
        lve(a, random_seq(rng, 3, 3), RegionMask((0,), ()))
    with pytest.raises(errors.DimensionMismatch):
        lve(a, random_seq(rng, 4, 2), RegionMask((0,), ()))
    with pytest.raises(errors.IndexOutOfRange):
        lve(a, a, RegionMask((5,), ()))


def test_fve_examples(rng):
    gt = seq_from(np.zeros((1, 2, 3)))
    pred = seq_from([[[0.3, 0, 0], [0, 0, 0]]])
    assert fve(pred, gt) == pytest.approx(0.045, abs=1e-15)
    g = random_seq(rng, 5, 3)
    p = random_seq(rng, 5, 3)
    doubled = seq_from(g.frames + 2 * (p.frames - g.frames))
    assert fve(doubled, g) == pytest.approx(4 * fve(p, g), rel=1e-12)


def test_lve_at_least_fve_when_lip_covers_face(rng):
    g, p = random_seq(rng, 6, 5), random_seq(rng, 6, 5)
    assert lve(p, g, RegionMask(range(5), ())) >= fve(p, g)


def test_fdtw_single_frame():
    gt = seq_from(np.zeros((1, 1, 3)))
    pred = seq_from([[[0, 1, 0]]])
    assert fdtw(pred, gt) == 0.5


def test_fdtw_unequal_lengths_and_mismatch(rng):
    a, b = random_seq(rng, 4, 2), random_seq(rng, 7, 2)
    assert fdtw(a, b) == brute_force_dtw(a.frames, b.frames)
    with pytest.raises(errors.DimensionMismatch):
        fdtw(a, random_seq(rng, 4, 3))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_fdtw_equals_path_enumeration(t1, t2, n, seed):
    rng = np.random.default_rng(seed)
    a, b = random_seq(rng, t1, n), random_seq(rng, t2, n)
    assert fdtw(a, b) == brute_force_dtw(a.frames, b.frames)


def test_fdtw_not_worse_than_diagonal(rng):
    a, b = random_seq(rng, 9, 3), random_seq(rng, 9, 3)
    diag = np.mean(np.linalg.norm(a.frames - b.frames, axis=2).mean(axis=1))
    # diagonal path sums T costs but normalizes by 2T
    assert fdtw(a, b) <= diag / 2 + 1e-12


def sine_vertex_frames(T, amps, bin_, axis=0):
    t = np.arange(T)
    frames = np.zeros((T, len(amps), 3))
    for v, a in enumerate(amps):
        frames[:, v, axis] = a * np.sin(2 * np.pi * bin_ * t / T)
    return MotionSequence(frames)


def test_fdd_cancellation():
    # gt vertices share amplitude a; pred splits it a +/- delta at another bin
    gt = sine_vertex_frames(64, [1.0, 1.0], 3)
    pred = sine_vertex_frames(64, [1.5, 0.5], 5)
    mask = RegionMask((), (0, 1))
    assert abs(fdd(pred, gt, mask)) < 1e-9
    assert ffe(pred, gt) > 0.1


def test_fdd_direct_and_sign():
    gt = seq_from([[[0, 0, 0]], [[2, 0, 0]]])  # norms {0, 2}: dyn 1
    pred = seq_from(np.zeros((2, 1, 3)))
    mask = RegionMask((), (0,))
    assert fdd(pred, gt, mask) == 1.0
    assert fdd(gt, pred, mask) == -1.0
    with pytest.raises(errors.EmptyRegion):
        fdd(pred, gt, RegionMask((0,), ()))


def test_ffe_constant_offset(rng):
    x = rng.normal(size=(30, 3, 3))
    x -= x.mean(axis=0)
    gt = seq_from(x)
    for c in (0.1, 1.0, -2.5):
        assert ffe(seq_from(x + c), gt) == pytest.approx(c * c, rel=1e-9)


def test_ffe_cosine_channel():
    T, N = 64, 2
    t = np.arange(T)
    frames = np.zeros((T, N, 3))
    frames[:, 0, 0] = np.cos(2 * np.pi * 3 * t / T)
    gt = seq_from(frames)
    pred = seq_from(np.zeros((T, N, 3)))
    oracle = naive_frequency_matrix(frames, 20)
    expected = np.sum(oracle ** 2) / (3 * N)
    assert ffe(pred, gt) == pytest.approx(expected, rel=1e-12)
    assert ffe(pred, gt) == pytest.approx(0.25 / 6, rel=1e-12)


def test_ffe_symmetric_and_nonnegative(rng):
    a, b = random_seq(rng, 20, 3), random_seq(rng, 20, 3)
    assert ffe(a, b) == pytest.approx(ffe(b, a), abs=1e-12)
    assert ffe(a, b) >= 0
    assert ffe(a, b, SpectralConfig(3)) <= ffe(a, b)


def test_ffe_errors(rng):
    with pytest.raises(errors.TooShort):
        ffe(random_seq(rng, 1, 2), random_seq(rng, 1, 2))
    with pytest.raises(errors.DimensionMismatch):
        ffe(random_seq(rng, 5, 2), random_seq(rng, 6, 2))


def test_report_order_and_threads(rng):
    pairs = [(f"s{i}", random_seq(rng, 8, 3), random_seq(rng, 8, 3)) for i in range(6)]
    mask = RegionMask((0,), (1, 2))
    serial = evaluate_pairs(pairs, mask).to_dict()
    threaded = evaluate_pairs(pairs, mask, threads=4).to_dict()
    assert serial == threaded
    assert [r["id"] for r in serial["sequences"]] == [f"s{i}" for i in range(6)]
    assert list(serial["sequences"][0]) == ["id", *METRIC_NAMES]
    assert list(serial["mean"]) == list(METRIC_NAMES)


def test_report_metric_filter(rng):
    pairs = [("a", random_seq(rng, 8, 3), random_seq(rng, 8, 3))]
    rep = evaluate_pairs(pairs, None, ("ffe",)).to_dict()
    assert list(rep["sequences"][0]) == ["id", "ffe"]
    assert list(rep["mean"]) == ["ffe"]


def test_report_rejects_nonfinite():
    with pytest.raises(ValueError):
        MetricsReport().add("x", {"fve": math.nan})
