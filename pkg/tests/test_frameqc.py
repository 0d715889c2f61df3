from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import ndimage

from aslgen.frameqc import (
    PSNR_IDENTICAL, DimensionMismatch, QcThresholds, SeriesTooShort, Tier, blur_score, classify_frames,
    dense_flow, image_metrics, landmark_jump, load_drop_frames, save_qc_reports, ssim, to_gray,
)
from aslgen.posedict import LEFT_HAND, RIGHT_HAND, PoseClip
from aslgen.posedict.skeleton import rest_frame


def textured(seed=0, shape=(96, 96)):
    rng = np.random.default_rng(seed)
    img = ndimage.gaussian_filter(rng.uniform(0, 255, shape), 2.0)
    return (img - img.min()) / (img.max() - img.min()) * 255


def shifted(img, dx):
    return np.roll(img, dx, axis=1)


def interior(f, m=20):
    return f[m:-m, m:-m]


def test_identical_frames_zero_flow():
    a = textured()
    assert np.abs(dense_flow(a, a)).max() <= 1e-6
    assert blur_score(a, a) <= 1e-6


def test_flat_images_zero_flow():
    a = np.full((64, 64), 90.0)
    assert np.abs(dense_flow(a, a + 0)).max() <= 1e-6


def test_shift_recovered():
    a = textured()
    f = interior(dense_flow(a, shifted(a, 3)))
    assert abs(np.median(f[..., 0]) - 3) <= 0.5
    assert abs(np.median(f[..., 1])) <= 0.5


def test_shift_matches_opencv():
    cv2 = pytest.importorskip("cv2")
    a = textured(3)
    b = shifted(a, 3)
    ref = cv2.calcOpticalFlowFarneback(a.astype(np.uint8), b.astype(np.uint8), None, 0.5, 3, 15, 3, 5, 1.1, 0)
    ours = dense_flow(a.astype(np.uint8), b.astype(np.uint8))
    assert abs(np.median(interior(ours)[..., 0]) - np.median(interior(ref)[..., 0])) <= 0.25


def test_swap_negates_translation():
    a = textured(1)
    b = shifted(a, 3)
    fwd = np.median(interior(dense_flow(a, b))[..., 0])
    bwd = np.median(interior(dense_flow(b, a))[..., 0])
    assert abs(fwd + bwd) <= 0.5


def test_blur_score_of_shift():
    a = textured(2)
    assert blur_score(a, shifted(a, 3)) == pytest.approx(3.0, abs=0.5)


def test_flow_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        dense_flow(np.zeros((10, 10)), np.zeros((10, 11)))


def test_gray_is_bt601():
    px = np.array([[[255, 0, 0], [0, 255, 0], [0, 0, 255]]], np.uint8)
    assert np.allclose(to_gray(px), [[0.299 * 255, 0.587 * 255, 0.114 * 255]])


def th(**kw):
    return QcThresholds(**kw)


def test_jump_constant_series():
    assert not landmark_jump(np.zeros((20, 21, 2)), th()).any()


def test_jump_hand_example():
    s = np.zeros((6, 1, 2))
    s[5] = (10, 10)
    flags = landmark_jump(s, th(window=5, jump_max=1.0))
    assert flags.tolist() == [False] * 5 + [True]


def test_jump_infinite_threshold():
    s = np.random.default_rng(0).normal(size=(30, 21, 2)) * 10
    assert not landmark_jump(s, th(jump_max=math.inf)).any()


def test_jump_series_too_short():
    with pytest.raises(SeriesTooShort):
        landmark_jump(np.zeros((3, 21, 2)), th(window=5))


def test_jump_first_window_never_flagged():
    s = np.random.default_rng(1).normal(size=(12, 21, 2))
    flags = landmark_jump(s, th(window=5, jump_max=1e-6))
    assert not flags[:5].any() and flags[5:].all()


def test_thresholds_validation():
    with pytest.raises(ValueError):
        QcThresholds(window=1)
    with pytest.raises(ValueError):
        QcThresholds(flow_mag_max=0)
    with pytest.raises(ValueError):
        QcThresholds.from_mapping({"bogus": 1})
    assert QcThresholds.from_mapping({"window": 3}).window == 3


def make_clip(n=12, jumps=(), missing=()):
    f = rest_frame()
    pts = {g: np.repeat(np.asarray(a)[None], n, axis=0).copy() for g, a in f.points.items()}
    valid = {g: np.ones(n, bool) for g in pts}
    for t in jumps:
        pts[RIGHT_HAND][t, :, 0] += 0.2
    for t in missing:
        valid[LEFT_HAND][t] = False
    return PoseClip("c", "X", pts, valid)


def test_all_clean_accepted():
    r = classify_frames(make_clip(), None)
    assert all(t is Tier.ACCEPTED for t in r.tiers)
    assert r.proposed == r.valid == r.all


def test_missing_hand_excluded_from_valid():
    r = classify_frames(make_clip(missing=(3,)), None)
    assert 3 in r.all and 3 not in r.valid and 3 not in r.proposed
    assert r.tiers[3] is Tier.MISSING


def test_mixed_fixture_enumerated():
    # frame 7 jumps and is blurred, frame 9 jumps only, frame 3 missing and blurred, frame 10 blurred only
    clip = make_clip(n=12, jumps=(7, 9), missing=(3,))
    blur = [0.0] * 12
    for t in (3, 7, 10):
        blur[t] = 10.0
    blur[5] = 4.0  # exactly at threshold: accepted
    r = classify_frames(clip, None, th(window=5, jump_max=0.05), blur_scores=blur)
    # hand x offsets: 0.2 at frames 7 and 9. Window means (5 previous valid frames):
    #   t=7: mean 0 -> 0.2 jump, but blur wins; t=8: mean 0.04 -> |0-0.04| ok
    #   t=9: mean 0.04 -> 0.16 jump; t=10: mean 0.08 -> jump, blur wins; t=11: mean 0.08 -> jump
    expect = {3: Tier.MISSING, 7: Tier.BLUR, 9: Tier.JUMP, 10: Tier.BLUR, 11: Tier.JUMP}
    for t in range(12):
        assert r.tiers[t] is expect.get(t, Tier.ACCEPTED), t
    assert r.proposed <= r.valid <= r.all
    assert r.rejected() == [3, 7, 9, 10, 11]


def test_classify_with_images_blur():
    a = textured(4, (64, 64))
    imgs = [a, a, shifted(a, 8), shifted(a, 8)]
    clip = make_clip(n=4)
    r = classify_frames(clip, imgs, th(window=5))
    assert r.tiers[2] is Tier.BLUR
    assert [r.tiers[i] for i in (0, 1, 3)] == [Tier.ACCEPTED] * 3


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 0.3), st.floats(0.0, 0.5), st.floats(0.5, 10))
def test_tiers_monotone_and_nested(seed, jump_max, extra, flow_max):
    rng = np.random.default_rng(seed)
    n = 15
    clip = make_clip(n=n, jumps=tuple(rng.choice(n, 3, replace=False)), missing=tuple(rng.choice(n, 2, replace=False)))
    blur = list(rng.uniform(0, 12, n))
    lo = classify_frames(clip, None, th(jump_max=jump_max, flow_mag_max=flow_max), blur)
    hi = classify_frames(clip, None, th(jump_max=jump_max + extra, flow_mag_max=flow_max + extra), blur)
    assert lo.proposed <= lo.valid <= lo.all
    assert lo.proposed <= hi.proposed
    again = classify_frames(clip, None, th(jump_max=jump_max, flow_mag_max=flow_max), blur)
    assert again.tiers == lo.tiers


def test_qc_report_round_trip(tmp_path):
    r = classify_frames(make_clip(missing=(2,)), None)
    save_qc_reports({"c": r}, tmp_path / "qc.json", QcThresholds())
    assert load_drop_frames(tmp_path / "qc.json") == {"c": [2]}


# image metrics


def test_metrics_identical():
    a = np.random.default_rng(0).integers(0, 255, (32, 32, 3)).astype(np.uint8)
    m = image_metrics(a, a)
    assert m["l1"] == 0 and m["ssim"] == pytest.approx(1.0) and m["psnr"] == PSNR_IDENTICAL


def test_metrics_offset_by_one():
    a = np.random.default_rng(0).integers(0, 254, (32, 32, 3)).astype(np.uint8)
    m = image_metrics(a, a + 1)
    assert m["l1"] == 1.0
    assert m["psnr"] == pytest.approx(20 * math.log10(255), abs=1e-9)
    assert round(m["psnr"], 2) == 48.13


def test_metrics_black_white():
    assert image_metrics(np.zeros((8, 8, 3)), np.full((8, 8, 3), 255))["l1"] == 255


def test_metrics_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        image_metrics(np.zeros((8, 8, 3)), np.zeros((8, 9, 3)))


def test_ssim_matches_skimage():
    from skimage.metrics import structural_similarity
    rng = np.random.default_rng(5)
    for _ in range(5):
        a = rng.integers(0, 256, (40, 50, 3)).astype(np.uint8)
        b = np.clip(a.astype(int) + rng.integers(-40, 40, a.shape), 0, 255).astype(np.uint8)
        ref = structural_similarity(a, b, gaussian_weights=True, sigma=1.5, use_sample_covariance=False,
                                    data_range=255, channel_axis=-1)
        assert ssim(a, b) == pytest.approx(ref, abs=1e-9)
