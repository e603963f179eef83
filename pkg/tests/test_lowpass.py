import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from umgf.lowpass import (
    LowPassSpec,
    box_mean,
    cascaded_box,
    gaussian_blur,
    gaussian_kernel,
    window_counts,
    window_stats,
)


def test_box_mean_3x3_impulse():
    img = np.zeros((3, 3))
    img[1, 1] = 9.0
    expected = np.array([[2.25, 1.5, 2.25], [1.5, 1.0, 1.5], [2.25, 1.5, 2.25]])
    np.testing.assert_allclose(box_mean(img, 1), expected, rtol=0, atol=1e-15)
    np.testing.assert_allclose(oracles.box_mean(img, 1), expected, rtol=0, atol=1e-15)


@pytest.mark.parametrize("r", [1, 4, 8, 16])
def test_box_mean_matches_brute_force(each_backend, rng, r):
    img = rng.random((64, 64))
    np.testing.assert_allclose(box_mean(img, r), oracles.box_mean(img, r), rtol=0, atol=1e-9)


def test_box_mean_multichannel_is_per_channel(rng):
    img = rng.random((9, 11, 3))
    out = box_mean(img, 2)
    for c in range(3):
        np.testing.assert_array_equal(out[:, :, c], box_mean(img[:, :, c], 2))


def test_radius_larger_than_image(rng):
    img = rng.random((3, 4))
    np.testing.assert_allclose(box_mean(img, 50), np.full((3, 4), img.mean()), atol=1e-15)


def test_window_counts():
    counts = window_counts(3, 3, 1)
    np.testing.assert_array_equal(counts, [[4, 6, 4], [6, 9, 6], [4, 6, 4]])


@pytest.mark.parametrize("r", [0, -1, 1.5])
def test_box_rejects_bad_radius(r):
    with pytest.raises(ValueError):
        box_mean(np.zeros((4, 4)), r)


def test_cascaded_box(rng):
    img = rng.random((40, 40))
    np.testing.assert_array_equal(cascaded_box(img, 3, 1), box_mean(img, 3))
    np.testing.assert_array_equal(cascaded_box(img, 8, 2), box_mean(box_mean(img, 8), 8))
    with pytest.raises(ValueError):
        cascaded_box(img, 3, 0)


def test_gaussian_kernel_shape():
    k = gaussian_kernel(1.5)
    assert k.size == 2 * 5 + 1
    assert k.sum() == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_array_equal(k, k[::-1])


def test_gaussian_impulse_response():
    img = np.zeros((41, 41))
    img[20, 20] = 1.0
    out = gaussian_blur(img, 2.0)
    assert out.sum() == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(out, out[::-1], atol=1e-17)
    np.testing.assert_allclose(out, out.T, atol=1e-17)


@pytest.mark.parametrize("sigma", [0.7, 1.5, 3.0])
def test_gaussian_matches_dense_2d(each_backend, rng, sigma):
    img = rng.random((16, 16))
    np.testing.assert_allclose(gaussian_blur(img, sigma), oracles.gaussian_blur_dense(img, sigma),
                               rtol=0, atol=1e-10)


def test_gaussian_rejects_bad_sigma():
    with pytest.raises(ValueError):
        gaussian_blur(np.zeros((4, 4)), 0.0)


SPECS = [LowPassSpec("box", radius=2), LowPassSpec("cascaded_box", radius=3, count=2),
         LowPassSpec("gaussian", sigma=1.2)]


@settings(max_examples=30, deadline=None)
@given(c=st.floats(-5, 5, allow_nan=False), h=st.integers(1, 12), w=st.integers(1, 12))
def test_constants_preserved_exactly(c, h, w):
    img = np.full((h, w), c)
    for spec in SPECS:
        assert np.all(spec.apply(img) == c)


@settings(max_examples=30, deadline=None)
@given(img=arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)),
                  elements=st.floats(-3, 3, allow_nan=False)))
def test_smoothing_stays_in_range(img):
    for spec in SPECS:
        out = spec.apply(img)
        assert out.min() >= img.min() and out.max() <= img.max()


@pytest.mark.parametrize("text, spec", [
    ("box:8", LowPassSpec("box", radius=8)),
    ("cbox:8,2", LowPassSpec("cascaded_box", radius=8, count=2)),
    ("cbox:4", LowPassSpec("cascaded_box", radius=4, count=2)),
    ("gauss:1.5", LowPassSpec("gaussian", sigma=1.5)),
])
def test_lowpass_parse(text, spec):
    assert LowPassSpec.parse(text) == spec
    assert LowPassSpec.parse(str(spec)) == spec


@pytest.mark.parametrize("text", ["box:0", "box:1.5", "gauss:0", "median:3", "box:3,2", ""])
def test_lowpass_parse_rejects(text):
    with pytest.raises(ValueError):
        LowPassSpec.parse(text)


def test_window_stats_matches_two_pass_oracle(rng):
    I, G = rng.random((32, 32)), rng.random((32, 32))
    st_ = window_stats(I, G, 4)
    mI, mG, vG, cIG = oracles.window_stats(I, G, 4)
    for got, want in [(st_.mean_I, mI), (st_.mean_G, mG), (st_.var_G, vG), (st_.cov_IG, cIG)]:
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-9)


def test_window_stats_degenerate_cases(rng):
    G = np.full((10, 10), 0.4)
    st_ = window_stats(rng.random((10, 10)), G, 2)
    assert np.all(st_.var_G == 0)
    np.testing.assert_allclose(st_.cov_IG, 0, atol=1e-15)
    X = rng.random((10, 10))
    st_ = window_stats(X, X, 2)
    np.testing.assert_array_equal(st_.cov_IG, st_.var_G)
    assert np.all(st_.var_G >= 0)


def test_window_stats_dimension_mismatch():
    with pytest.raises(ValueError):
        window_stats(np.zeros((4, 4)), np.zeros((4, 5)), 1)
    with pytest.raises(ValueError):
        window_stats(np.zeros((4, 4, 3)), np.zeros((4, 4, 3)), 1)
