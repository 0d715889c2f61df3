from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aslgen.gloss import build_lexicon
from aslgen.posedict import (
    BODY, FACE, LEFT_HAND, RIGHT_HAND, BodyTarget, DegenerateScale, DictionaryConfig, NoValidData,
    PoseClip, build_dictionary, compute_neutral, constant_clip, default_neutral, impute,
    load_dictionary, normalize_clip, read_clip, retime, save_dictionary, trim, write_clip_binary,
    write_clip_jsonl,
)
from aslgen.posedict.dictionary import neutral_in_clip_space
from aslgen.posedict.skeleton import rest_frame

GROUPS = (BODY, FACE, LEFT_HAND, RIGHT_HAND)


def random_clip(rng, n=8, id="c", gloss="GIVE", fps=30.0, valid_p=1.0) -> PoseClip:
    neutral = rest_frame()
    pts = {g: neutral.points[g][None] + rng.normal(0, 0.02, (n, *neutral.points[g].shape)) for g in GROUPS}
    val = {g: rng.random(n) < valid_p for g in GROUPS}
    for g in GROUPS:
        pts[g][~val[g]] = 0.0
    return PoseClip(id, gloss, pts, val, fps)


def scalar_clip(values, valid):
    """A clip whose every coordinate of the right hand equals the given per-frame scalar."""
    n = len(values)
    neutral = rest_frame()
    pts = {g: np.repeat(neutral.points[g][None], n, axis=0) for g in GROUPS}
    pts[RIGHT_HAND] = np.broadcast_to(np.asarray(values, float)[:, None, None], (n, 21, 3)).copy()
    val = {g: np.ones(n, dtype=bool) for g in GROUPS}
    val[RIGHT_HAND] = np.asarray(valid, dtype=bool)
    return PoseClip("s", "GIVE", pts, val)


# -- impute ----------------------------------------------------------------

def test_impute_interior_midpoint():
    clip = scalar_clip([0.0, 0.0, 2.0], [True, False, True])
    out = impute(clip, rest_frame())
    assert np.allclose(out.points[RIGHT_HAND][1], 1.0)
    assert out.fully_valid


def test_impute_leading_run_is_neutral():
    clip = scalar_clip([0, 0, 0, 5, 6], [False, False, False, True, True])
    neutral = rest_frame()
    out = impute(clip, neutral)
    for t in range(3):
        assert np.array_equal(out.points[RIGHT_HAND][t], neutral.points[RIGHT_HAND])
    assert np.all(out.points[RIGHT_HAND][3:] == clip.points[RIGHT_HAND][3:])


def test_impute_fingerspelling_holds_non_dominant_hand():
    rng = np.random.default_rng(0)
    clip = random_clip(rng, n=10, gloss="fs-A-B")
    neutral = rest_frame()
    out = impute(clip, neutral, is_fingerspelling=True)
    for t in range(10):
        assert np.array_equal(out.points[LEFT_HAND][t], neutral.points[LEFT_HAND])
    assert np.array_equal(out.points[RIGHT_HAND], clip.points[RIGHT_HAND])


def test_impute_no_valid_data():
    clip = scalar_clip([0, 0], [False, False])
    with pytest.raises(NoValidData):
        impute(clip, None)
    assert impute(clip, rest_frame()).fully_valid


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.2, 1.0))
def test_impute_keeps_valid_coordinates(seed, p):
    rng = np.random.default_rng(seed)
    clip = random_clip(rng, n=12, valid_p=p)
    out = impute(clip, rest_frame())
    for g in GROUPS:
        v = clip.valid[g]
        assert np.array_equal(out.points[g][v], clip.points[g][v])
        assert np.all(np.isfinite(out.points[g]))
    assert out.fully_valid


# -- normalize -------------------------------------------------------------

def _shoulder_clip(left, right, n=3):
    neutral = rest_frame()
    pts = {g: np.repeat(neutral.points[g][None], n, axis=0).astype(float) for g in GROUPS}
    pts[BODY][:, 11] = left
    pts[BODY][:, 12] = right
    val = {g: np.ones(n, dtype=bool) for g in GROUPS}
    return PoseClip("n", "GIVE", pts, val)


def test_normalize_worked_example():
    clip = _shoulder_clip((2.0, 0.0), (0.0, 0.0))
    out = normalize_clip(clip, BodyTarget(center=(0.0, 0.0), shoulder_width=1.0))
    for g in GROUPS:
        expected = clip.points[g].copy() * 0.5
        expected[..., :2] -= (0.5, 0.0)
        assert np.allclose(out.points[g], expected, atol=1e-12)


def test_normalize_identity_at_target():
    clip = constant_clip("r", "REST", rest_frame(), 4)
    out = normalize_clip(clip, BodyTarget())
    for g in GROUPS:
        assert np.allclose(out.points[g], clip.points[g], atol=1e-12)


def test_normalize_degenerate():
    clip = _shoulder_clip((1.0, 1.0), (1.0, 1.0))
    with pytest.raises(DegenerateScale):
        normalize_clip(clip)


def test_normalize_anchors_shoulder_midpoint():
    rng = np.random.default_rng(3)
    clip = random_clip(rng, n=20)
    out = normalize_clip(clip)
    mids = (out.points[BODY][:, 11] + out.points[BODY][:, 12]) / 2
    running = np.cumsum(mids, axis=0) / np.arange(1, 21)[:, None]
    assert np.allclose(running, BodyTarget().center, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.3, 3.0), st.floats(-1, 1), st.floats(-1, 1))
def test_normalize_idempotent(seed, scale, dx, dy):
    rng = np.random.default_rng(seed)
    clip = random_clip(rng, n=6)
    pts = {g: a * scale for g, a in clip.points.items()}
    for g in GROUPS:
        pts[g][..., 0] += dx
        pts[g][..., 1] += dy
    clip = clip.with_arrays(pts)
    once = normalize_clip(clip)
    twice = normalize_clip(once)
    for g in GROUPS:
        assert np.allclose(once.points[g], twice.points[g], atol=1e-9)


# -- trim and retime -------------------------------------------------------

def test_trim():
    rng = np.random.default_rng(1)
    clip = random_clip(rng, n=10)
    assert trim(clip) is clip
    from dataclasses import replace
    cut = trim(replace(clip, trim=(2, 5)))
    assert len(cut) == 3 and cut.trim == (0, 3)
    assert np.array_equal(cut.points[BODY], clip.points[BODY][2:5])
    assert trim(cut) is cut


def _linear_clip(n):
    t = np.arange(n, dtype=float)
    return scalar_clip(t, np.ones(n, dtype=bool))


def test_retime_identity():
    clip = _linear_clip(9)
    assert retime(clip, 1.0) is clip


def test_retime_linear_motion():
    clip = _linear_clip(10)
    out = retime(clip, 2.0)
    assert len(out) == 5
    v = out.points[RIGHT_HAND][:, 0, 0]
    assert v[0] == 0.0 and v[-1] == 9.0
    assert np.allclose(v, np.linspace(0, 9, 5))


def test_retime_slowdown_doubles():
    assert len(retime(_linear_clip(10), 0.5)) == 20


def test_retime_rejects_bad_factor():
    for f in (0.0, -1.0, float("inf"), float("nan")):
        with pytest.raises(ValueError):
            retime(_linear_clip(4), f)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 40), st.floats(0.25, 4.0))
def test_retime_round_trip(seed, n, f):
    rng = np.random.default_rng(seed)
    clip = random_clip(rng, n=n)
    back = retime(retime(clip, f), 1 / f)
    for g in GROUPS:
        a, b = clip.points[g], back.points[g]
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[-1], b[-1])
        # one step of the retimed clip spans max(f, 1) source frames
        step = np.abs(np.diff(a, axis=0)).max()
        src_t = np.linspace(0, n - 1, len(b))
        ref = np.stack([a[int(round(x))] for x in src_t])
        assert np.abs(b - ref).max() <= math.ceil(max(f, 1.0)) * step + 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.floats(0.25, 4.0))
def test_retime_round_trip_exact_on_linear_motion(n, f):
    clip = _linear_clip(n)
    back = retime(retime(clip, f), 1 / f)
    v = back.points[RIGHT_HAND][:, 0, 0]
    assert np.allclose(v, np.linspace(0, n - 1, len(v)), atol=1e-9)


# -- dictionary ------------------------------------------------------------

def test_build_dictionary_indexes_and_skips():
    rng = np.random.default_rng(5)
    clips = [random_clip(rng, id="g1"), random_clip(rng, id="g2"),
             random_clip(rng, id="cl", gloss="3-CL:car-drive"),
             random_clip(rng, id="bad", gloss="i:GIVE:"),
             random_clip(rng, id="fs", gloss="fs-AB"),
             random_clip(rng, id="qm", gloss="QMwg"),
             random_clip(rng, id="tree", gloss="TREE")]
    d, rep = build_dictionary(clips, build_lexicon([("give", "GIVE")]))
    assert d.by_gloss["GIVE"] == ("g1", "g2")
    assert d.by_gloss["fs-A-B"] == ("fs",)
    skipped = {s["id"]: s["reason"] for s in rep.skipped}
    assert set(skipped) == {"cl", "bad"} and "classifier" in skipped["cl"]
    # spelled letters and the question marker need no lexicon entry
    assert rep.not_in_lexicon == ["TREE"]
    for clip in d.clips.values():
        assert clip.fully_valid


def test_build_dictionary_fingerspelling_is_sped_up():
    rng = np.random.default_rng(6)
    d, _ = build_dictionary([random_clip(rng, n=30, id="f", gloss="fs-A")],
                            config=DictionaryConfig(fingerspell_speedup=1.5))
    assert len(d.clips["f"]) == 20


def test_build_dictionary_empty():
    d, rep = build_dictionary([])
    assert len(d) == 0 and rep.skipped == [] and rep.accepted == []


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_build_dictionary_full_validity(seed):
    rng = np.random.default_rng(seed)
    clips = [random_clip(rng, n=int(rng.integers(2, 15)), id=f"c{i}", valid_p=0.6) for i in range(4)]
    for c in clips:
        c.valid[BODY][0] = True
    d, rep = build_dictionary(clips)
    for clip in d.clips.values():
        assert clip.fully_valid


def test_neutral_round_trips_through_clip_space():
    rng = np.random.default_rng(8)
    clip = random_clip(rng, n=4)
    pts = {g: a * 3.0 + 1.0 for g, a in clip.points.items()}
    clip = clip.with_arrays(pts)
    raw = neutral_in_clip_space(clip, rest_frame(), BodyTarget())
    # a clip that is the raw neutral everywhere must normalize back onto the neutral
    n = constant_clip("x", "X", raw, 2)
    from aslgen.posedict.preprocess import similarity_params
    s, m0 = similarity_params(clip, BodyTarget())
    c = np.asarray(BodyTarget().center)
    for g in GROUPS:
        back = n.points[g][0].copy() * s
        back[..., :2] += c - s * m0
        assert np.allclose(back, rest_frame().points[g], atol=1e-12)


def test_neutral_asset_matches_rest_skeleton():
    asset, ref = default_neutral(), rest_frame()
    for g in GROUPS:
        assert np.allclose(asset.points[g], ref.points[g], atol=1e-12)
    clips = [constant_clip(f"r{i}", "REST", ref, 2) for i in range(3)]
    med = compute_neutral(clips, ["r0", "r1", "r2"])
    assert np.allclose(med.points[FACE], ref.points[FACE])


def test_dictionary_save_load(tmp_path):
    rng = np.random.default_rng(9)
    d, _ = build_dictionary([random_clip(rng, id="a"), random_clip(rng, id="b", gloss="BOOK")])
    p1, p2 = tmp_path / "d1.bin", tmp_path / "d2.bin"
    save_dictionary(d, p1)
    back = load_dictionary(p1)
    save_dictionary(back, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert back.by_gloss == d.by_gloss
    for k in d.clips:
        for g in GROUPS:
            assert np.array_equal(back.clips[k].points[g], d.clips[k].points[g])


def test_clip_file_formats(tmp_path):
    rng = np.random.default_rng(10)
    clip = random_clip(rng, n=5, valid_p=0.7)
    write_clip_jsonl(clip, tmp_path / "c.jsonl")
    write_clip_binary(clip, tmp_path / "c.posc")
    a, b = read_clip(tmp_path / "c.jsonl"), read_clip(tmp_path / "c.posc")
    for g in GROUPS:
        assert np.allclose(a.points[g], clip.points[g], atol=1e-9)
        assert np.array_equal(b.points[g], clip.points[g])
        assert np.array_equal(a.valid[g], clip.valid[g]) and np.array_equal(b.valid[g], clip.valid[g])
    assert (a.id, a.gloss, a.fps, a.trim) == (clip.id, clip.gloss, clip.fps, clip.trim)
