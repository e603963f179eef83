"""Channel conversion, resampling and noise synthesis on float64 images."""
from __future__ import annotations

import math

import numpy as np

# ITU-R BT.601 luma weights
GRAY_WEIGHTS = (0.299, 0.587, 0.114)


def as_hwc(img: np.ndarray) -> np.ndarray:
    """View any image as ``(H, W, C)`` float64."""
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 2:
        return img[:, :, None]
    if img.ndim != 3:
        raise ValueError(f"expected a 2-D or 3-D image, got shape {img.shape}")
    return img


def like(out: np.ndarray, ref: np.ndarray) -> np.ndarray:
    """Drop the channel axis again when ``ref`` was 2-D."""
    if np.ndim(ref) == 2 and out.ndim == 3:
        return out[:, :, 0]
    return out


def channels(img: np.ndarray) -> int:
    return 1 if img.ndim == 2 else img.shape[2]


def to_grayscale(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if channels(img) != 3:
        raise ValueError(f"to_grayscale needs 3 channels, got {channels(img)}")
    r, g, b = img[:, :, 0], img[:, :, 1], img[:, :, 2]
    wr, _, wb = GRAY_WEIGHTS
    # g + wr(r-g) + wb(b-g) == wr r + wg g + wb b, and is exact on grey pixels
    return g + wr * (r - g) + wb * (b - g)


def replicate_channels(img: np.ndarray, n: int = 3) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if channels(img) != 1:
        raise ValueError(f"replicate_channels needs 1 channel, got {channels(img)}")
    return np.repeat(as_hwc(img), n, axis=2)


def _keys_cubic(t: np.ndarray, a: float = -0.5) -> np.ndarray:
    t = np.abs(t)
    t2, t3 = t * t, t * t * t
    near = (a + 2) * t3 - (a + 3) * t2 + 1
    far = a * t3 - 5 * a * t2 + 8 * a * t - 4 * a
    return np.where(t <= 1, near, np.where(t < 2, far, 0.0))


def _resample_matrix(n_in: int, n_out: int, method: str) -> np.ndarray:
    """Dense (n_out, n_in) matrix mapping input samples to output samples."""
    scale = n_in / n_out
    dst = np.arange(n_out)
    m = np.zeros((n_out, n_in))
    if method == "nearest":
        idx = np.minimum(np.floor((dst + 0.5) * scale).astype(np.int64), n_in - 1)
        m[dst, idx] = 1.0
        return m
    src = (dst + 0.5) * scale - 0.5
    if method == "bilinear":
        taps = np.arange(0, 2)
        kern = lambda t: np.maximum(0.0, 1.0 - np.abs(t))  # noqa: E731
    elif method == "bicubic":
        taps = np.arange(-1, 3)
        kern = _keys_cubic
    else:
        raise ValueError(f"unknown resize method {method!r}")
    base = np.floor(src).astype(np.int64)
    for t in taps:
        j = base + t
        w = kern(src - j)
        # edge samples clamped
        np.add.at(m, (dst, np.clip(j, 0, n_in - 1)), w)
    return m / m.sum(axis=1, keepdims=True)


def resize(img: np.ndarray, new_w: int, new_h: int, method: str = "bilinear") -> np.ndarray:
    """Resample with half-pixel-centred coordinates.

    Bicubic output may overshoot ``[0, 1]``; it is not clamped.
    """
    if new_w < 1 or new_h < 1:
        raise ValueError("target size must be at least 1x1")
    src = as_hwc(img)
    h, w, _ = src.shape
    if method == "nearest":
        ys = np.minimum(np.floor((np.arange(new_h) + 0.5) * h / new_h).astype(np.int64), h - 1)
        xs = np.minimum(np.floor((np.arange(new_w) + 0.5) * w / new_w).astype(np.int64), w - 1)
        return like(np.ascontiguousarray(src[np.ix_(ys, xs)]), img)
    my = _resample_matrix(h, new_h, method)
    mx = _resample_matrix(w, new_w, method)
    out = np.einsum("yi,ijc,xj->yxc", my, src, mx, optimize=True)
    return like(np.ascontiguousarray(out), img)


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator; identical streams for identical seeds on every platform."""
    return np.random.Generator(np.random.PCG64(int(seed)))


def add_gaussian_noise(img: np.ndarray, sigma: float, rng: np.random.Generator | int) -> np.ndarray:
    """Add i.i.d. N(0, sigma^2) noise in [0, 1] units.  The result is not clamped."""
    if not sigma >= 0 or not math.isfinite(sigma):
        raise ValueError(f"sigma must be a finite non-negative number, got {sigma}")
    img = np.asarray(img, dtype=np.float64)
    if not isinstance(rng, np.random.Generator):
        rng = make_rng(rng)
    noise = rng.standard_normal(img.shape)
    if sigma == 0:
        return img.copy()
    return img + sigma * noise
