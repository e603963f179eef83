"""Classical guided filter and the edge-aware weighted guided filter.

Per window ``k`` the local linear model ``I ~ a_k G + b_k`` is fitted in
closed form (ridge penalty ``eps`` on ``a_k``); the output averages the
predictions of all windows covering a pixel, ``out = mean(a) G + mean(b)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable

import numpy as np

from .imageops import as_hwc, like
from .lowpass import box_mean, window_stats

# default grid for hyperparameter search
EPS_GRID = (0.01**2, 0.02**2, 0.05**2, 0.1**2, 0.2**2, 0.4**2)
RADIUS_GRID = (2, 4, 8, 16)


@dataclass(frozen=True)
class GuidedParams:
    r: int = 8
    eps: float = 0.05**2

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise ValueError(f"radius must be an integer >= 1, got {self.r}")
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")


@dataclass(frozen=True)
class WgfParams:
    """``lam`` scales the spatial regularisation; ``var_eps`` stabilises the ratio."""

    r: int
    lam: float
    var_eps: float = 0.001**2
    local_r: int = 1

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise ValueError(f"radius must be an integer >= 1, got {self.r}")
        if not self.lam > 0:
            raise ValueError(f"lambda must be > 0, got {self.lam}")
        if not self.var_eps > 0:
            raise ValueError(f"var_eps must be > 0, got {self.var_eps}")


@dataclass(frozen=True)
class CoefficientMaps:
    a_bar: np.ndarray
    b_bar: np.ndarray
    # per-window coefficients before averaging
    a: np.ndarray
    b: np.ndarray


def _coefficients(I, G, r, eps) -> CoefficientMaps:
    st = window_stats(I, G, r)
    a = st.cov_IG / (st.var_G + eps)
    b = st.mean_I - a * st.mean_G
    ab = box_mean(np.stack([a, b], axis=2), r)
    return CoefficientMaps(ab[:, :, 0], ab[:, :, 1], a, b)


def gf_coefficients(I: np.ndarray, G: np.ndarray, p: GuidedParams) -> CoefficientMaps:
    return _coefficients(I, G, p.r, p.eps)


def wgf_epsilon_map(G: np.ndarray, p: WgfParams) -> np.ndarray:
    """Spatially varying regularisation ``lam / Gamma``.

    ``Gamma`` compares the 3x3 local variance of each pixel with the image
    average of those variances; edges get a small ``eps``, flat areas a large one.
    """
    G = np.asarray(G, dtype=np.float64)
    var = window_stats(G, G, p.local_r).var_G
    gamma = (var + p.var_eps) / (var.mean() + p.var_eps)
    return p.lam / gamma


def wgf_coefficients(I: np.ndarray, G: np.ndarray, p: WgfParams) -> CoefficientMaps:
    return _coefficients(I, G, p.r, wgf_epsilon_map(G, p))


def _per_channel(I, G, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a single-channel filter to each channel of I.

    G is either shared (one channel) or paired channel-by-channel with I.
    """
    Ic, Gc = as_hwc(I), as_hwc(G)
    if Ic.shape[:2] != Gc.shape[:2]:
        raise ValueError(f"dimension mismatch: I {Ic.shape[:2]} vs G {Gc.shape[:2]}")
    n = Ic.shape[2]
    if Gc.shape[2] not in (1, n):
        raise ValueError(f"guidance has {Gc.shape[2]} channels, target has {n}")
    out = np.empty_like(Ic)
    for c in range(n):
        g = Gc[:, :, c if Gc.shape[2] == n else 0]
        out[:, :, c] = fn(Ic[:, :, c], g)
    return like(out, I)


def guided_filter(I: np.ndarray, G: np.ndarray, p: GuidedParams) -> np.ndarray:
    def run(i, g):
        cm = _coefficients(i, g, p.r, p.eps)
        return cm.a_bar * g + cm.b_bar

    return _per_channel(I, G, run)


def weighted_guided_filter(I: np.ndarray, G: np.ndarray, p: WgfParams) -> np.ndarray:
    def run(i, g):
        cm = _coefficients(i, g, p.r, wgf_epsilon_map(g, p))
        return cm.a_bar * g + cm.b_bar

    return _per_channel(I, G, run)


def grid_search(
    score: Callable[[int, float], float],
    radii: Iterable[int] = RADIUS_GRID,
    eps_values: Iterable[float] = EPS_GRID,
    maximize: bool = True,
) -> tuple[tuple[int, float], float]:
    """Exhaustive search over ``(r, eps)``; returns the best pair and its score.

    Ties keep the first pair in grid order, so results are deterministic.
    """
    best = None
    best_score = None
    for r, eps in product(radii, eps_values):
        s = score(r, eps)
        better = best_score is None or (s > best_score if maximize else s < best_score)
        if better:
            best, best_score = (r, eps), s
    return best, best_score
