"""Containers, clip/triplet sampling and temporally consistent augmentation."""

import numpy as np
import pytest

from anonvad.data import (
    AugmentationParams,
    ClipTriplet,
    Video,
    VideoClip,
    augment_clip,
    center_crop_resize,
    sample_clip,
    sample_triplet,
)
from anonvad.data.sampling import clip_span, valid_clip_starts
from anonvad.errors import SamplingError, ShapeError

RNG = np.random.default_rng(31)


def make_video(num_frames=64, res=32, seed=0):
    rng = np.random.default_rng(seed)
    frames = rng.uniform(size=(num_frames, 3, res, res)).astype(np.float32)
    return Video(frames=frames, video_id=f"v{seed}", label=0)


def test_video_invariants():
    with pytest.raises(ShapeError):
        Video(frames=np.zeros((3, 32, 32), dtype=np.float32), video_id="x", label=0)
    with pytest.raises(ValueError):
        Video(frames=np.full((4, 3, 8, 8), 1.5, dtype=np.float32), video_id="x", label=0)
    video = make_video()
    assert not video.frames.flags.writeable


def test_sample_clip_index_arithmetic():
    video = make_video(num_frames=64)
    clip = sample_clip(video, start=0, length=16, skip=2)
    assert clip.length == 16
    expected = video.frames[0:31:2]
    assert np.array_equal(clip.frames, expected)  # frames 0, 2, ..., 30
    clip = sample_clip(make_video(num_frames=32), start=1, length=16, skip=2)
    assert np.array_equal(clip.frames, make_video(num_frames=32).frames[1:32:2])


def test_sample_clip_boundary_error():
    video = make_video(num_frames=31)
    with pytest.raises(SamplingError, match="31"):
        sample_clip(video, start=1, length=16, skip=2)  # 1 + 30 >= 31


def test_sample_clip_never_out_of_range_randomized():
    for _ in range(300):
        t = int(RNG.integers(1, 80))
        length = int(RNG.integers(1, 20))
        skip = int(RNG.integers(1, 4))
        start = int(RNG.integers(-5, 80))
        video = make_video(num_frames=t, res=8, seed=int(RNG.integers(1000)))
        last = start + (length - 1) * skip
        if 0 <= start and last < t:
            clip = sample_clip(video, start, length, skip)
            assert clip.length == length
        else:
            with pytest.raises(SamplingError):
                sample_clip(video, start, length, skip)


def _aug_pair(res=32, out=32):
    return (
        AugmentationParams.identity((res, res), out),
        AugmentationParams.identity((res, res), out),
    )


def test_sample_triplet_fixed_distance():
    video = make_video(num_frames=64)
    a1, a2 = _aug_pair()
    rng = np.random.default_rng(0)
    triplet = sample_triplet(video, 0, a1, a2, rng, negative_distance=8)
    assert triplet.negative.start_index == 8  # -8 is invalid from anchor 0
    assert triplet.anchor.start_index == triplet.positive.start_index == 0
    assert triplet.negative.source_id == triplet.anchor.source_id


def test_sample_triplet_random_mode_validity():
    video = make_video(num_frames=256, res=8)
    a1, a2 = _aug_pair(8, 8)
    rng = np.random.default_rng(5)
    starts = valid_clip_starts(video, 16, 2)
    for _ in range(1000):
        triplet = sample_triplet(video, 0, a1, a2, rng)
        assert triplet.negative.start_index != 0
        assert triplet.negative.start_index in starts


def test_sample_triplet_too_short_video():
    video = make_video(num_frames=33)
    a1, a2 = _aug_pair()
    with pytest.raises(SamplingError, match="disjoint"):
        sample_triplet(video, 0, a1, a2, np.random.default_rng(0))


def test_sample_triplet_invariants_sweep():
    a1, a2 = _aug_pair(16, 16)
    for trial in range(200):
        t = int(RNG.integers(62, 200))
        video = make_video(num_frames=t, res=16, seed=trial)
        starts = valid_clip_starts(video, 16, 2)
        anchor = int(RNG.integers(starts.start, starts.stop))
        triplet = sample_triplet(video, anchor, a1, a2, np.random.default_rng(trial))
        assert triplet.anchor.start_index == triplet.positive.start_index == anchor
        assert triplet.negative.start_index != anchor
        assert triplet.negative.start_index in starts


def test_clip_triplet_invariant_enforced():
    video = make_video()
    c0 = sample_clip(video, 0, 16, 2)
    c8 = sample_clip(video, 8, 16, 2)
    with pytest.raises(ValueError):
        ClipTriplet(anchor=c0, positive=c8, negative=c8)
    with pytest.raises(ValueError):
        ClipTriplet(anchor=c0, positive=c0, negative=c0)


def test_augment_identity_is_exact():
    video = make_video()
    clip = sample_clip(video, 0, 16, 2)
    out = augment_clip(clip, AugmentationParams.identity((32, 32), 32))
    assert np.array_equal(out.frames, clip.frames)


def test_augment_flip_involution():
    video = make_video()
    clip = sample_clip(video, 0, 16, 2)
    flip = AugmentationParams(crop=(0, 0, 32, 32), out_size=32, flip=True)
    once = augment_clip(clip, flip)
    twice = augment_clip(once, flip)
    resized_only = augment_clip(clip, AugmentationParams.identity((32, 32), 32))
    assert np.array_equal(twice.frames, resized_only.frames)


def test_augment_temporal_consistency():
    # a clip of identical frames stays identical after any augmentation
    frame = RNG.uniform(size=(3, 32, 32)).astype(np.float32)
    frames = np.repeat(frame[None], 16, axis=0)
    video = Video(frames=frames, video_id="const", label=0)
    clip = sample_clip(video, 0, 16, 1)
    for trial in range(20):
        params = AugmentationParams.sample(np.random.default_rng(trial), (32, 32), 24)
        out = augment_clip(clip, params)
        deltas = out.frames - out.frames[0]
        assert float(np.abs(deltas).max()) == 0.0


def test_augment_coordinate_grid_consistency():
    # encode pixel coordinates as values; the transform of frame 0 must equal
    # the transform of frame L-1 exactly
    yy, xx = np.mgrid[0:32, 0:32].astype(np.float32) / 32.0
    grid = np.stack([yy, xx, (yy + xx) / 2])
    video = Video(frames=np.repeat(grid[None], 8, 0), video_id="grid", label=0)
    clip = sample_clip(video, 0, 8, 1)
    params = AugmentationParams.sample(np.random.default_rng(3), (32, 32), 16)
    out = augment_clip(clip, params)
    assert np.array_equal(out.frames[0], out.frames[-1])


def test_augment_output_range_and_size():
    video = make_video()
    clip = sample_clip(video, 0, 16, 2)
    for trial in range(10):
        params = AugmentationParams.sample(np.random.default_rng(trial), (32, 32), 24, jitter=0.5)
        out = augment_clip(clip, params)
        assert out.frames.shape == (16, 3, 24, 24)
        assert out.frames.min() >= 0.0 and out.frames.max() <= 1.0


def test_augment_bad_crop_rejected():
    video = make_video()
    clip = sample_clip(video, 0, 16, 2)
    bad = AugmentationParams(crop=(20, 20, 20, 20), out_size=32)
    with pytest.raises(ValueError, match="crop"):
        augment_clip(clip, bad)


def test_augment_erase_region():
    video = make_video()
    clip = sample_clip(video, 0, 16, 2)
    params = AugmentationParams(crop=(0, 0, 32, 32), out_size=32, erase=(4, 6, 5, 7))
    out = augment_clip(clip, params)
    assert (out.frames[:, :, 4:9, 6:13] == 0.0).all()
    assert np.array_equal(out.frames[:, :, 0:4, :], clip.frames[:, :, 0:4, :])


def test_center_crop_resize_shapes():
    frames = RNG.uniform(size=(5, 3, 32, 32)).astype(np.float32)
    out = center_crop_resize(frames, 32)
    assert out.shape == (5, 3, 32, 32)
    single = center_crop_resize(frames[0], 16)
    assert single.shape == (3, 16, 16)


def test_clip_span():
    assert clip_span(16, 2) == 31
    assert clip_span(1, 5) == 1
