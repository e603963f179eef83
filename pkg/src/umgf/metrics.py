"""Image quality metrics: RMSE, PSNR, SSIM and end-point error."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .imageops import as_hwc

PSNR_CAP = 99.0
# depth stored in [0, 1]; multiplying by 255 reports centimetres
DEPTH_CM_SCALE = 255.0


@dataclass
class MetricReport:
    rmse: float = float("nan")
    psnr: float = float("nan")
    ssim: float = float("nan")
    epe: float = float("nan")
    border_exclude: int = 0
    extra: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        return {"rmse": self.rmse, "psnr": self.psnr, "ssim": self.ssim, "epe": self.epe}

    def __str__(self) -> str:
        parts = [f"{k}={v:.6g}" for k, v in self.as_row().items() if not math.isnan(v)]
        return " ".join(parts) if parts else "(no metrics)"


def _same_shape(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a, b


def rmse(a: np.ndarray, b: np.ndarray, border: int = 0, scale: float = 1.0) -> float:
    """Root-mean-square error over the interior, ``border`` pixels dropped per side."""
    a, b = _same_shape(a, b)
    h, w = a.shape[:2]
    if border < 0 or 2 * border >= min(h, w):
        raise ValueError(f"border {border} too large for a {w}x{h} image")
    if border:
        a = a[border:h - border, border:w - border]
        b = b[border:h - border, border:w - border]
    return float(np.sqrt(np.mean((a - b) ** 2)) * scale)


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """PSNR in dB with peak 1.0, capped at 99 dB."""
    a, b = _same_shape(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse < 1e-12:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * math.log10(1.0 / mse))


def _gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    t = np.arange(size) - (size - 1) / 2
    g = np.exp(-(t**2) / (2 * sigma**2))
    g /= g.sum()
    return g


def _filter_valid(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    rows = np.lib.stride_tricks.sliding_window_view(x, n, axis=1) @ g
    return np.lib.stride_tricks.sliding_window_view(rows, n, axis=0) @ g


def ssim(a: np.ndarray, b: np.ndarray, data_range: float = 1.0) -> float:
    """Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03.

    Only windows fully inside the image are scored.  Multi-channel images
    are scored per channel and averaged.
    """
    a, b = _same_shape(a, b)
    a, b = as_hwc(a), as_hwc(b)
    g = _gaussian_window()
    if min(a.shape[:2]) < g.shape[0]:
        raise ValueError(f"ssim needs images of at least {g.shape[0]}x{g.shape[0]}")
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2
    scores = []
    for c in range(a.shape[2]):
        x, y = a[:, :, c], b[:, :, c]
        mx, my = _filter_valid(x, g), _filter_valid(y, g)
        sxx = _filter_valid(x * x, g) - mx * mx
        syy = _filter_valid(y * y, g) - my * my
        sxy = _filter_valid(x * y, g) - mx * my
        num = (2 * mx * my + c1) * (2 * sxy + c2)
        den = (mx * mx + my * my + c1) * (sxx + syy + c2)
        scores.append(float(np.mean(num / den)))
    return float(np.mean(scores))


def epe(a: np.ndarray, b: np.ndarray) -> float:
    """Mean Euclidean distance between two 2-channel flow fields."""
    a, b = _same_shape(a, b)
    if a.ndim != 3 or a.shape[2] != 2:
        raise ValueError(f"epe needs 2-channel flow fields, got shape {a.shape}")
    d = a - b
    return float(np.mean(np.sqrt(d[:, :, 0] ** 2 + d[:, :, 1] ** 2)))
