"""Shift-invariant smoothing filters and windowed statistics.

Every filter uses clipped windows: at the border a window only covers the
in-bounds pixels and is normalised by their actual count.  Box sums come
from a summed-area table, so their cost does not depend on the radius.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .imageops import as_hwc, like


@dataclass(frozen=True)
class LowPassSpec:
    """Which low-pass filter to use as ``F_L``.

    ``kind`` is ``"box"``, ``"cascaded_box"`` or ``"gaussian"``.  ``radius``
    applies to the box kinds, ``sigma`` to the Gaussian and ``count`` to the
    cascade.
    """

    kind: str = "box"
    radius: int = 8
    sigma: float = 0.0
    count: int = 2

    def __post_init__(self):
        if self.kind in ("box", "cascaded_box"):
            if self.radius < 1:
                raise ValueError(f"box radius must be >= 1, got {self.radius}")
            if self.kind == "cascaded_box" and self.count < 1:
                raise ValueError(f"cascade count must be >= 1, got {self.count}")
        elif self.kind == "gaussian":
            if not self.sigma > 0:
                raise ValueError(f"gaussian sigma must be > 0, got {self.sigma}")
        else:
            raise ValueError(f"unknown low-pass kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "LowPassSpec":
        """Parse ``box:R``, ``cbox:R,N`` or ``gauss:S``."""
        m = re.fullmatch(r"\s*(box|cbox|gauss):([0-9.eE+-]+)(?:,(\d+))?\s*", text)
        if not m:
            raise ValueError(f"bad low-pass spec {text!r}; use box:R, cbox:R,N or gauss:S")
        kind, value, extra = m.groups()
        if kind == "gauss":
            if extra is not None:
                raise ValueError(f"bad low-pass spec {text!r}")
            return cls("gaussian", sigma=float(value))
        if not value.isdigit():
            raise ValueError(f"box radius must be an integer in {text!r}")
        if kind == "box":
            if extra is not None:
                raise ValueError(f"bad low-pass spec {text!r}")
            return cls("box", radius=int(value))
        return cls("cascaded_box", radius=int(value), count=int(extra) if extra else 2)

    def __str__(self) -> str:
        if self.kind == "box":
            return f"box:{self.radius}"
        if self.kind == "cascaded_box":
            return f"cbox:{self.radius},{self.count}"
        return f"gauss:{self.sigma:g}"

    def apply(self, img: np.ndarray) -> np.ndarray:
        if self.kind == "box":
            return box_mean(img, self.radius)
        if self.kind == "cascaded_box":
            return cascaded_box(img, self.radius, self.count)
        return gaussian_blur(img, self.sigma)


def _window_bounds(n: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(n)
    return np.maximum(idx - r, 0), np.minimum(idx + r + 1, n)


def window_counts(h: int, w: int, r: int) -> np.ndarray:
    """Number of in-bounds pixels in each clipped (2r+1)^2 window."""
    y0, y1 = _window_bounds(h, r)
    x0, x1 = _window_bounds(w, r)
    return ((y1 - y0)[:, None] * (x1 - x0)[None, :]).astype(np.float64)


def _offset(src: np.ndarray) -> np.ndarray:
    # Subtracting the first sample keeps constant images exact and shrinks
    # the magnitude of the running sums.
    return src[0, 0, :].copy()


def _clip_to_range(out: np.ndarray, src: np.ndarray) -> np.ndarray:
    # A windowed mean lies inside the global range; only rounding can leave it.
    lo = src.min(axis=(0, 1))
    hi = src.max(axis=(0, 1))
    return np.clip(out, lo, hi, out=out)


def box_sum(img: np.ndarray, r: int) -> np.ndarray:
    """Sum over each clipped (2r+1)^2 window."""
    src = as_hwc(img)
    h, w, _ = src.shape
    y0, y1 = _window_bounds(h, r)
    x0, x1 = _window_bounds(w, r)
    s = _kernels.integral_image(src)
    return like(_kernels.box_sum(s, y0, y1, x0, x1), img)


def box_mean(img: np.ndarray, r: int) -> np.ndarray:
    """Mean over each clipped (2r+1)^2 window, divided by its true pixel count."""
    if int(r) != r or r < 1:
        raise ValueError(f"box radius must be an integer >= 1, got {r}")
    r = int(r)
    src = as_hwc(img)
    h, w, _ = src.shape
    base = _offset(src)
    y0, y1 = _window_bounds(h, r)
    x0, x1 = _window_bounds(w, r)
    s = _kernels.integral_image(src - base)
    sums = _kernels.box_sum(s, y0, y1, x0, x1)
    out = sums / window_counts(h, w, r)[:, :, None] + base
    return like(_clip_to_range(out, src), img)


def cascaded_box(img: np.ndarray, r: int, n: int = 2) -> np.ndarray:
    if n < 1:
        raise ValueError(f"cascade count must be >= 1, got {n}")
    out = img
    for _ in range(n):
        out = box_mean(out, r)
    return out


def gaussian_kernel(sigma: float) -> np.ndarray:
    """Unit-sum Gaussian taps with half-width ceil(3 sigma)."""
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    half = max(1, math.ceil(3.0 * sigma))
    t = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-0.5 * (t / sigma) ** 2)
    return k / k.sum()


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur, renormalised over the in-bounds taps."""
    kernel = gaussian_kernel(sigma)
    src = as_hwc(img)
    base = _offset(src)
    out = _kernels.conv_cols(_kernels.conv_rows(src - base, kernel), kernel) + base
    return like(_clip_to_range(out, src), img)


@dataclass(frozen=True)
class WindowStats:
    mean_I: np.ndarray
    mean_G: np.ndarray
    var_G: np.ndarray
    cov_IG: np.ndarray


def _single(img: np.ndarray, name: str) -> np.ndarray:
    img = np.asarray(img, dtype=np.float64)
    if img.ndim == 3 and img.shape[2] == 1:
        img = img[:, :, 0]
    if img.ndim != 2:
        raise ValueError(f"{name} must be single-channel, got shape {img.shape}")
    return img


def window_stats(I: np.ndarray, G: np.ndarray, r: int) -> WindowStats:
    """Local means of I and G, variance of G and covariance of I and G.

    The variance is floored at zero; the covariance is left signed.
    """
    I = _single(I, "I")
    G = _single(G, "G")
    if I.shape != G.shape:
        raise ValueError(f"dimension mismatch: I {I.shape} vs G {G.shape}")
    # One pass over a stacked 4-channel image keeps the table work shared.
    stack = np.stack([I, G, G * G, I * G], axis=2)
    means = box_mean(stack, r)
    mean_I, mean_G, mean_GG, mean_IG = (means[:, :, k] for k in range(4))
    var_G = np.maximum(mean_GG - mean_G * mean_G, 0.0)
    if I is G or np.array_equal(I, G):
        cov_IG = var_G.copy()
    else:
        cov_IG = mean_IG - mean_I * mean_G
    return WindowStats(mean_I, mean_G, var_G, cov_IG)
