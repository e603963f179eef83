"""Hot windowed-sum kernels with a numba path and a pure-numpy path.

The numba path is used when numba imports cleanly and the environment
variable ``UMGF_DISABLE_NUMBA`` is unset (or ``0``).  Both paths follow the
same summation order so their results agree to rounding level; callers
never need to know which one ran.

All kernels operate on C-contiguous float64 arrays of shape (H, W, C).
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return decorator


def _env_disabled() -> bool:
    return os.environ.get("UMGF_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


_backend = "numba" if NUMBA_AVAILABLE and not _env_disabled() else "numpy"


def get_backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    """Switch kernels between ``"numba"`` and ``"numpy"`` at runtime."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba is not installed")
    _backend = name


# --- numba kernels ---------------------------------------------------------


@njit(cache=True)
def _integral_nb(img):
    h, w, c = img.shape
    s = np.zeros((h + 1, w + 1, c))
    # column prefix first, then row prefix: same order as the numpy path
    for y in range(h):
        for x in range(w):
            for ch in range(c):
                s[y + 1, x + 1, ch] = s[y, x + 1, ch] + img[y, x, ch]
    for y in range(1, h + 1):
        for x in range(2, w + 1):
            for ch in range(c):
                s[y, x, ch] += s[y, x - 1, ch]
    return s


@njit(cache=True)
def _box_sum_nb(s, y0, y1, x0, x1):
    h = y0.shape[0]
    w = x0.shape[0]
    c = s.shape[2]
    out = np.empty((h, w, c))
    for y in range(h):
        a = y0[y]
        b = y1[y]
        for x in range(w):
            l = x0[x]
            r = x1[x]
            for ch in range(c):
                out[y, x, ch] = s[b, r, ch] - s[a, r, ch] - s[b, l, ch] + s[a, l, ch]
    return out


@njit(cache=True)
def _conv_rows_nb(img, kernel):
    # renormalised 1-D correlation along axis 1 (x), clipped at the borders
    h, w, c = img.shape
    half = kernel.shape[0] // 2
    out = np.empty((h, w, c))
    for x in range(w):
        lo = max(0, x - half)
        hi = min(w - 1, x + half)
        norm = 0.0
        for xx in range(lo, hi + 1):
            norm += kernel[xx - x + half]
        for y in range(h):
            for ch in range(c):
                acc = 0.0
                for xx in range(lo, hi + 1):
                    acc += kernel[xx - x + half] * img[y, xx, ch]
                out[y, x, ch] = acc / norm
    return out


# --- numpy kernels ---------------------------------------------------------


def _integral_np(img: np.ndarray) -> np.ndarray:
    h, w, c = img.shape
    s = np.zeros((h + 1, w + 1, c))
    np.cumsum(img, axis=0, out=s[1:, 1:])
    np.cumsum(s[1:, 1:], axis=1, out=s[1:, 1:])
    return s


def _box_sum_np(s, y0, y1, x0, x1) -> np.ndarray:
    return (
        s[np.ix_(y1, x1)]
        - s[np.ix_(y0, x1)]
        - s[np.ix_(y1, x0)]
        + s[np.ix_(y0, x0)]
    )


def _conv_rows_np(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    h, w, c = img.shape
    half = kernel.shape[0] // 2
    acc = np.zeros_like(img)
    norm = np.zeros(w)
    for t in range(-half, half + 1):
        k = kernel[t + half]
        lo = max(0, -t)
        hi = min(w, w - t)
        if lo >= hi:
            continue
        acc[:, lo:hi] += k * img[:, lo + t:hi + t]
        norm[lo:hi] += k
    return acc / norm[None, :, None]


# --- dispatch --------------------------------------------------------------


def integral_image(img: np.ndarray) -> np.ndarray:
    """Summed-area table of shape (H+1, W+1, C); first row and column are zero."""
    img = np.ascontiguousarray(img, dtype=np.float64)
    if _backend == "numba":
        return _integral_nb(img)
    return _integral_np(img)


def box_sum(s: np.ndarray, y0, y1, x0, x1) -> np.ndarray:
    """Rectangle sums ``[y0, y1) x [x0, x1)`` per output pixel from a table ``s``."""
    if _backend == "numba":
        return _box_sum_nb(s, y0, y1, x0, x1)
    return _box_sum_np(s, y0, y1, x0, x1)


def conv_rows(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Border-renormalised correlation of each row with an odd-length kernel."""
    img = np.ascontiguousarray(img, dtype=np.float64)
    kernel = np.ascontiguousarray(kernel, dtype=np.float64)
    if _backend == "numba":
        return _conv_rows_nb(img, kernel)
    return _conv_rows_np(img, kernel)


def conv_cols(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Same as :func:`conv_rows` along axis 0."""
    return np.ascontiguousarray(conv_rows(img.transpose(1, 0, 2), kernel).transpose(1, 0, 2))
