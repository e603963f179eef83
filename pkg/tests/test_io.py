import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from umgf.io import ImageFormatError, load_image, save_flow, save_image


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_bytes(data)
    return p


def test_p5_maxval_255(tmp_path):
    img = load_image(write(tmp_path, "a.pgm", b"P5\n1 1\n255\n\xff"))
    assert img.shape == (1, 1)
    assert img[0, 0] == 1.0


def test_p6_16bit(tmp_path):
    payload = np.array([65535, 0, 32768], dtype=">u2").tobytes()
    img = load_image(write(tmp_path, "a.ppm", b"P6\n1 1\n65535\n" + payload))
    np.testing.assert_array_equal(img[0, 0], [1.0, 0.0, 32768 / 65535])


def test_header_comments(tmp_path):
    img = load_image(write(tmp_path, "a.pgm", b"P5\n# made by hand\n2 1 # width height\n255\n\x00\x80"))
    np.testing.assert_array_equal(img, [[0.0, 128 / 255]])


def test_pfm_little_endian(tmp_path):
    data = b"Pf\n1 1\n-1.0\n" + np.array([0.25], dtype="<f4").tobytes()
    assert load_image(write(tmp_path, "a.pfm", data))[0, 0] == 0.25
    img = np.array([[0.25]])
    save_image(img, tmp_path / "b.pfm")
    np.testing.assert_array_equal(load_image(tmp_path / "b.pfm"), img)


def test_pfm_big_endian_and_bottom_up(tmp_path):
    rows = np.array([[1.0, 2.0], [3.0, 4.0]], dtype=">f4")  # stored bottom row first
    img = load_image(write(tmp_path, "a.pfm", b"Pf\n2 2\n1.0\n" + rows.tobytes()))
    np.testing.assert_array_equal(img, [[3.0, 4.0], [1.0, 2.0]])


@pytest.mark.parametrize("data, match", [
    (b"P3\n1 1\n255\n1", "magic"),
    (b"P5\n2 2\n255\n\x00", "truncated"),
    (b"P5\n1 1\n0\n\x00", "maxval"),
    (b"P5\n1 1\n70000\n\x00\x00", "maxval"),
    (b"Pf\n1 1\n-1.0\n" + np.array([np.nan], dtype="<f4").tobytes(), "nonfinite"),
    (b"Pf\n2 1\n-1.0\n\x00\x00\x00\x00", "truncated"),
])
def test_load_errors(tmp_path, data, match):
    with pytest.raises(ImageFormatError, match=match):
        load_image(write(tmp_path, "bad", data))


def test_save_quantization(tmp_path):
    save_image(np.array([[0.5, 1.2, -0.1, 0.5 / 255]]), tmp_path / "a.pgm", "pgm8")
    raw = (tmp_path / "a.pgm").read_bytes()
    # round(127.5) -> 128 with round-half-up; 0.5 lands exactly on the tie too
    assert list(raw[-4:]) == [128, 255, 0, 1]


def test_save_16bit_big_endian(tmp_path):
    save_image(np.array([[1.0, 0.5]]), tmp_path / "a.pgm", "pgm16")
    raw = (tmp_path / "a.pgm").read_bytes()
    assert np.frombuffer(raw[-4:], dtype=">u2").tolist() == [65535, 32768]


@pytest.mark.parametrize("fmt, shape", [("pgm8", (2, 2, 3)), ("ppm8", (2, 2)), ("pfm", (2, 2, 2))])
def test_channel_format_mismatch(tmp_path, fmt, shape):
    with pytest.raises(ImageFormatError):
        save_image(np.zeros(shape), tmp_path / "x", fmt)


def test_save_rejects_nonfinite(tmp_path):
    with pytest.raises(ValueError):
        save_image(np.array([[np.inf]]), tmp_path / "x.pfm")


images = st.tuples(st.integers(1, 6), st.integers(1, 6), st.sampled_from([1, 3])).flatmap(
    lambda s: arrays(np.float64, (s[0], s[1]) if s[2] == 1 else s,
                     elements=st.floats(-2, 2, allow_nan=False, width=32)))


@settings(max_examples=40, deadline=None)
@given(img=images)
def test_pfm_round_trip_is_lossless_for_float32(tmp_path_factory, img):
    d = tmp_path_factory.mktemp("rt")
    save_image(img, d / "a.pfm")
    back = load_image(d / "a.pfm")
    np.testing.assert_array_equal(back, img)
    save_image(back, d / "b.pfm")
    assert (d / "a.pfm").read_bytes() == (d / "b.pfm").read_bytes()


@settings(max_examples=40, deadline=None)
@given(img=images, bits=st.sampled_from([8, 16]))
def test_pnm_round_trip_keeps_quantized_samples(tmp_path_factory, img, bits):
    d = tmp_path_factory.mktemp("rt")
    kind = "pgm" if img.ndim == 2 else "ppm"
    save_image(img, d / f"a.{kind}", f"{kind}{bits}")
    once = load_image(d / f"a.{kind}")
    save_image(once, d / f"b.{kind}", f"{kind}{bits}")
    assert (d / f"a.{kind}").read_bytes() == (d / f"b.{kind}").read_bytes()
    maxval = 2**bits - 1
    np.testing.assert_array_equal(once * maxval, np.floor(np.clip(img, 0, 1) * maxval + 0.5))


def test_flow_round_trip(tmp_path, rng):
    flow = rng.normal(size=(4, 5, 2)).astype(np.float32).astype(np.float64)
    save_flow(flow, tmp_path / "a.flo")
    np.testing.assert_array_equal(load_image(tmp_path / "a.flo"), flow)
