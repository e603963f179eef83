"""Unsharp-mask guided filtering.

The filter output is a low-passed target plus a per-pixel amount of the
guidance's unsharp mask::

    out = amount * G_m + F_L(I),   G_m = G - F_L(G),  I_m = I - F_L(I)

Only one coefficient map (the amount) decides how much guidance structure
is transferred.  With the guided-filter slope as the amount and ``F_L`` a
cascade of two box means of the guided-filter radius, this is the usual
guided filter with the window-mean of ``mean(G)`` substituted for the
per-window means.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Union

import numpy as np

from .guided import (
    GuidedParams,
    WgfParams,
    _per_channel,
    gf_coefficients,
    wgf_coefficients,
)
from .imageops import as_hwc, like
from .io import ImageFormatError, load_image, save_image
from .lowpass import LowPassSpec, box_mean, window_stats

DEFAULT_LOWPASS = LowPassSpec("box", radius=8)


@dataclass(frozen=True)
class MaskPair:
    I_m: np.ndarray
    G_m: np.ndarray
    low_I: np.ndarray
    low_G: np.ndarray


def _check_pair(I, G):
    Ic, Gc = as_hwc(I), as_hwc(G)
    if Ic.shape[:2] != Gc.shape[:2]:
        raise ValueError(f"dimension mismatch: I {Ic.shape[:2]} vs G {Gc.shape[:2]}")
    if Gc.shape[2] not in (1, Ic.shape[2]):
        raise ValueError(f"guidance has {Gc.shape[2]} channels, target has {Ic.shape[2]}")
    return Ic, Gc


def unsharp_masks(I: np.ndarray, G: np.ndarray, f: LowPassSpec = DEFAULT_LOWPASS) -> MaskPair:
    I = np.asarray(I, dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    _check_pair(I, G)
    low_I = f.apply(I)
    low_G = low_I if G is I else f.apply(G)
    return MaskPair(I - low_I, G - low_G, low_I, low_G)


def amount_from_gf(I: np.ndarray, G: np.ndarray, p: GuidedParams) -> np.ndarray:
    """Window-averaged guided-filter slope, used as the amount."""
    return gf_coefficients(I, G, p).a_bar


def amount_from_wgf(I: np.ndarray, G: np.ndarray, p: WgfParams) -> np.ndarray:
    return wgf_coefficients(I, G, p).a_bar


def _combine(amount, G, low_I, low_G) -> np.ndarray:
    # amount*G_m + F_L(I), arranged so amount == 0 gives F_L(I) bit-exactly
    # and amount == 1 with G == I gives I bit-exactly.
    a = as_hwc(amount)
    return a * as_hwc(G) + (as_hwc(low_I) - a * as_hwc(low_G))


def _check_amount(amount, I):
    amount = np.asarray(amount, dtype=np.float64)
    Ic = as_hwc(I)
    ac = as_hwc(amount)
    if ac.shape[:2] != Ic.shape[:2]:
        raise ValueError(f"amount map is {ac.shape[:2]}, target is {Ic.shape[:2]}")
    if ac.shape[2] not in (1, Ic.shape[2]):
        raise ValueError(f"amount map has {ac.shape[2]} channels, target has {Ic.shape[2]}")
    if not np.all(np.isfinite(amount)):
        raise ValueError("amount map contains nonfinite values")
    return amount


def filter_with_amount(
    I: np.ndarray,
    G: np.ndarray,
    amount: np.ndarray,
    f: LowPassSpec = DEFAULT_LOWPASS,
    masks: MaskPair | None = None,
) -> np.ndarray:
    """``amount * G_m + F_L(I)``; a single-channel amount broadcasts over channels."""
    I = np.asarray(I, dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    _check_pair(I, G)
    amount = _check_amount(amount, I)
    if masks is None:
        masks = unsharp_masks(I, G, f)
    out = _combine(amount, G, masks.low_I, masks.low_G)
    return like(out, I)


def filter_unsharp_exact(I: np.ndarray, G: np.ndarray, p: GuidedParams) -> np.ndarray:
    """Guided filter written without ``b``.

    ``out_i = mean_k a_k (G_i - mean(G)_k) + mean_k mean(I)_k`` over the
    windows ``k`` covering ``i``.  Algebraically identical to
    :func:`umgf.guided.guided_filter`.
    """

    def run(i, g):
        st = window_stats(i, g, p.r)
        a = st.cov_IG / (st.var_G + p.eps)
        sm = box_mean(np.stack([a, a * st.mean_G, st.mean_I], axis=2), p.r)
        return g * sm[:, :, 0] - sm[:, :, 1] + sm[:, :, 2]

    return _per_channel(I, G, run)


AmountParams = Union[GuidedParams, WgfParams, float, str, os.PathLike, None]


@dataclass(frozen=True)
class AmountRule:
    """How the amount map is produced at each filtering stage.

    ``kind`` is one of ``"gf"``, ``"wgf"``, ``"constant"`` or ``"external"``
    and ``params`` is respectively a :class:`GuidedParams`, a
    :class:`WgfParams`, a float or a path to a single-channel PFM file.
    """

    kind: str
    params: AmountParams = None

    def __post_init__(self):
        expected = {
            "gf": GuidedParams,
            "wgf": WgfParams,
            "constant": (int, float),
            "external": (str, os.PathLike),
        }
        if self.kind not in expected:
            raise ValueError(f"unknown amount rule {self.kind!r}")
        if not isinstance(self.params, expected[self.kind]):
            raise TypeError(f"amount rule {self.kind!r} got params {self.params!r}")
        if self.kind == "constant" and not np.isfinite(self.params):
            raise ValueError("constant amount must be finite")

    @classmethod
    def constant(cls, value: float) -> "AmountRule":
        return cls("constant", float(value))

    def evaluate(self, target: np.ndarray, G: np.ndarray) -> np.ndarray:
        """Amount map for filtering ``target`` under ``G``."""
        h, w = np.shape(target)[:2]
        if self.kind == "constant":
            return np.full((h, w), float(self.params))
        if self.kind == "external":
            return load_amount_map(self.params, (h, w))
        fn = amount_from_gf if self.kind == "gf" else amount_from_wgf
        return _per_channel(target, G, lambda i, g: fn(i, g, self.params))


def successive_filter(
    I: np.ndarray,
    G: np.ndarray,
    rule: AmountRule,
    f: LowPassSpec = DEFAULT_LOWPASS,
    L: int = 1,
) -> list[np.ndarray]:
    """Run ``L`` amount stages and return every stage's output.

    ``G_m``, ``F_L(I)`` and ``F_L(G)`` are computed once.  Stage ``l`` feeds
    the previous output back as the target, i.e. its target mask is
    ``out^(l-1) - F_L(I)`` with ``out^(0) = I``, while the low-pass base and
    the guidance mask stay fixed.
    """
    if int(L) != L or L < 1:
        raise ValueError(f"stage count must be an integer >= 1, got {L}")
    I = np.asarray(I, dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    _check_pair(I, G)
    masks = unsharp_masks(I, G, f)
    outputs = []
    prev = I
    for _ in range(int(L)):
        amount = _check_amount(rule.evaluate(prev, G), I)
        prev = like(_combine(amount, G, masks.low_I, masks.low_G), I)
        outputs.append(prev)
    return outputs


def save_amount_map(amount: np.ndarray, path: str | os.PathLike) -> None:
    save_image(amount, path, "pfm")


def load_amount_map(path: str | os.PathLike, expected_dims: tuple[int, int]) -> np.ndarray:
    """Load a single-channel PFM amount map of size ``(height, width)``."""
    amount = load_image(path)
    if amount.ndim != 2:
        raise ImageFormatError(f"{path}: amount map must be single-channel")
    if amount.shape != tuple(expected_dims):
        raise ValueError(
            f"{path}: amount map is {amount.shape[0]}x{amount.shape[1]} (HxW), "
            f"expected {expected_dims[0]}x{expected_dims[1]}"
        )
    return amount
