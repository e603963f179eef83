"""Application pipelines and the deterministic synthetic test corpus."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .guided import EPS_GRID, RADIUS_GRID, GuidedParams, WgfParams, grid_search, guided_filter, weighted_guided_filter
from .imageops import add_gaussian_noise, channels, make_rng, resize, to_grayscale
from .lowpass import LowPassSpec, box_mean, gaussian_blur
from .metrics import DEPTH_CM_SCALE, MetricReport, epe, psnr, rmse, ssim
from .unsharp import AmountRule, successive_filter

METHODS = ("gf", "wgf", "umgf_gf", "umgf_wgf", "box", "none")
SYNTH_KINDS = ("piecewise_constant", "ramp_plus_edges", "texture")


# --- synthetic corpus -------------------------------------------------------


@dataclass(frozen=True)
class SynthSpec:
    width: int = 128
    height: int = 128
    kind: str = "piecewise_constant"
    seed: int = 0
    edge_count: int = 8

    def __post_init__(self):
        if self.kind not in SYNTH_KINDS:
            raise ValueError(f"unknown synthetic kind {self.kind!r}")
        if self.width < 1 or self.height < 1:
            raise ValueError("synthetic image must be at least 1x1")
        if self.edge_count < 1:
            raise ValueError("edge_count must be >= 1")


def _partition(h: int, w: int, n: int, rng: np.random.Generator) -> list[tuple[int, int, int, int]]:
    """Guillotine-cut the image into exactly ``n`` rectangles."""
    if n > h * w:
        raise ValueError(f"cannot cut a {w}x{h} image into {n} regions")
    rects = [(0, h, 0, w)]
    while len(rects) < n:
        sizes = np.array([(y1 - y0) * (x1 - x0) if (y1 - y0 > 1 or x1 - x0 > 1) else 0
                          for y0, y1, x0, x1 in rects], dtype=np.float64)
        k = int(rng.choice(len(rects), p=sizes / sizes.sum()))
        y0, y1, x0, x1 = rects.pop(k)
        axes = [ax for ax, size in ((0, y1 - y0), (1, x1 - x0)) if size > 1]
        ax = axes[int(rng.integers(len(axes)))]
        if ax == 0:
            cut = int(rng.integers(y0 + 1, y1))
            rects += [(y0, cut, x0, x1), (cut, y1, x0, x1)]
        else:
            cut = int(rng.integers(x0 + 1, x1))
            rects += [(y0, y1, x0, cut), (y0, y1, cut, x1)]
    return rects


def _band_limited(h: int, w: int, rng: np.random.Generator, sigma: float = 2.0) -> np.ndarray:
    """Zero-mean, unit-std smoothed white noise."""
    noise = gaussian_blur(rng.standard_normal((h, w)), sigma)
    noise -= noise.mean()
    return noise / noise.std()


def synth_corpus(spec: SynthSpec) -> np.ndarray:
    rng = make_rng(spec.seed)
    h, w, n = spec.height, spec.width, spec.edge_count
    if spec.kind == "piecewise_constant":
        # one level per stratum of [0.1, 0.9] keeps all levels distinct
        strata = rng.permutation(n)
        levels = 0.1 + 0.8 * (strata + rng.uniform(0.2, 0.8, size=n)) / n
        img = np.empty((h, w))
        for (y0, y1, x0, x1), level in zip(_partition(h, w, n, rng), levels):
            img[y0:y1, x0:x1] = level
        return img
    if spec.kind == "ramp_plus_edges":
        yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
        theta = rng.uniform(0, 2 * np.pi)
        img = (xx * np.cos(theta) + yy * np.sin(theta)) / max(h, w)
        for _ in range(n):
            cy, cx = rng.uniform(0, h), rng.uniform(0, w)
            phi = rng.uniform(0, 2 * np.pi)
            step = rng.uniform(0.1, 0.3) * rng.choice([-1.0, 1.0])
            img = img + step * (((xx - cx) * np.cos(phi) + (yy - cy) * np.sin(phi)) > 0)
        lo, hi = img.min(), img.max()
        if hi == lo:
            return np.full((h, w), 0.5)
        return 0.05 + 0.9 * (img - lo) / (hi - lo)
    return np.clip(0.5 + 0.15 * _band_limited(h, w, rng), 0.0, 1.0)


def synth_pair(spec: SynthSpec) -> tuple[np.ndarray, np.ndarray]:
    """A synthetic target and a guidance image sharing its edges.

    The guidance is an affine remap of the target plus faint texture, drawn
    from a separate stream so the target alone stays reproducible.
    """
    img = synth_corpus(spec)
    rng = make_rng((spec.seed + 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF)
    guidance = 0.1 + 0.8 * (1.0 - img) + 0.02 * _band_limited(spec.height, spec.width, rng)
    return img, guidance


# --- filtering dispatch -----------------------------------------------------


@dataclass(frozen=True)
class MethodParams:
    """Parameters shared by the pipeline methods.

    ``lam`` is the weighted filter's lambda (``eps`` is used when unset);
    ``lowpass`` defaults to two cascaded box means of radius ``r`` for the
    unsharp-mask methods; ``iters`` is the number of successive stages.
    """

    r: int = 8
    eps: float = 0.05**2
    lam: float | None = None
    var_eps: float = 0.001**2
    lowpass: LowPassSpec | None = None
    iters: int = 1

    @property
    def guided(self) -> GuidedParams:
        return GuidedParams(self.r, self.eps)

    @property
    def weighted(self) -> WgfParams:
        return WgfParams(self.r, self.eps if self.lam is None else self.lam, self.var_eps)

    @property
    def low(self) -> LowPassSpec:
        return self.lowpass or LowPassSpec("cascaded_box", radius=self.r, count=2)

    def describe(self) -> str:
        parts = [f"r={self.r}", f"eps={self.eps:g}"]
        if self.lam is not None:
            parts.append(f"lambda={self.lam:g}")
        if self.lowpass is not None:
            parts.append(f"lowpass={self.lowpass}")
        if self.iters != 1:
            parts.append(f"iters={self.iters}")
        return ";".join(parts)


def apply_method(I: np.ndarray, G: np.ndarray, method: str, params: MethodParams) -> np.ndarray:
    if method == "gf":
        return guided_filter(I, G, params.guided)
    if method == "wgf":
        return weighted_guided_filter(I, G, params.weighted)
    if method in ("umgf_gf", "umgf_wgf"):
        rule = AmountRule("gf", params.guided) if method == "umgf_gf" else AmountRule("wgf", params.weighted)
        return successive_filter(I, G, rule, params.low, params.iters)[-1]
    if method == "box":
        return box_mean(I, params.r)
    if method == "none":
        return np.array(I, dtype=np.float64)
    raise ValueError(f"unknown method {method!r}")


def _guidance_for(target: np.ndarray, guidance: np.ndarray) -> np.ndarray:
    # a 1-channel target takes grayscale guidance
    if channels(target) == 1 and channels(guidance) == 3:
        return to_grayscale(guidance)
    return guidance


# --- pipelines --------------------------------------------------------------


def denoise_pipeline(
    clean: np.ndarray,
    sigma: float,
    seed: int,
    method: str = "gf",
    params: MethodParams = MethodParams(),
) -> tuple[MetricReport, np.ndarray]:
    """Add noise, filter the noisy image under its own guidance, score against ``clean``."""
    noisy = add_gaussian_noise(clean, sigma, make_rng(seed))
    out = apply_method(noisy, noisy, method, params)
    report = MetricReport(psnr=psnr(out, clean), ssim=ssim(out, clean))
    report.extra["psnr_input"] = psnr(noisy, clean)
    return report, out


def upsample_pipeline(
    gt: np.ndarray,
    guidance: np.ndarray,
    scale: int,
    method: str = "gf",
    params: MethodParams = MethodParams(),
    mode: str = "depth",
    border: int = 6,
) -> tuple[MetricReport, np.ndarray]:
    """Downsample ``gt``, bicubic-upsample it back and filter under ``guidance``.

    Depth (``mode="depth"``) is downsampled with nearest neighbour and scored
    by RMSE in centimetres (samples times 255) with a ``border`` crop.  Flow
    (``mode="flow"``, 2 channels) is downsampled bilinearly, normalised to
    ``[0, 1]`` for filtering and scored by EPE in its original units.
    """
    if scale not in (2, 4, 8, 16):
        raise ValueError(f"scale must be 2, 4, 8 or 16, got {scale}")
    gt = np.asarray(gt, dtype=np.float64)
    h, w = gt.shape[:2]
    if h % scale or w % scale:
        raise ValueError(f"{w}x{h} is not divisible by scale {scale}")
    if np.shape(guidance)[:2] != (h, w):
        raise ValueError("guidance and ground truth differ in size")
    G = _guidance_for(gt, np.asarray(guidance, dtype=np.float64))
    if mode == "depth":
        low = resize(gt, w // scale, h // scale, "nearest")
        up = resize(low, w, h, "bicubic")
        out = apply_method(up, G, method, params)
        report = MetricReport(rmse=rmse(out, gt, border, DEPTH_CM_SCALE), ssim=ssim(out, gt),
                              border_exclude=border)
        report.extra["rmse_bicubic"] = rmse(up, gt, border, DEPTH_CM_SCALE)
        return report, out
    if mode == "flow":
        if channels(gt) != 2:
            raise ValueError("flow mode needs a 2-channel ground truth")
        lo, hi = float(gt.min()), float(gt.max())
        span = hi - lo if hi > lo else 1.0
        norm = (gt - lo) / span
        low = resize(norm, w // scale, h // scale, "bilinear")
        up = resize(low, w, h, "bicubic")
        if channels(G) != 1:
            G = to_grayscale(G) if channels(G) == 3 else G[:, :, :1]
        out = apply_method(up, G, method, params) * span + lo
        report = MetricReport(epe=epe(out, gt), ssim=ssim((out - lo) / span, norm), border_exclude=0)
        report.extra.update(flow_offset=lo, flow_scale=span, epe_bicubic=epe(up * span + lo, gt))
        return report, out
    raise ValueError(f"unknown upsampling mode {mode!r}")


def detail_enhance(
    I: np.ndarray,
    lam: float = 5.0,
    base: LowPassSpec | GuidedParams = GuidedParams(16, 0.1**2),
) -> np.ndarray:
    """``lam * (I - B) + I``; ``B`` is a low-pass or a self-guided filter of I.

    The result is not clamped.
    """
    if not lam >= 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    I = np.asarray(I, dtype=np.float64)
    if lam == 0:
        return I.copy()
    if isinstance(base, GuidedParams):
        B = guided_filter(I, I, base)
    else:
        B = base.apply(I)
    return lam * (I - B) + I


def flash_noflash(
    noflash: np.ndarray,
    flash: np.ndarray,
    params: GuidedParams = GuidedParams(8, 0.2**2),
    method: str = "gf",
) -> np.ndarray:
    """Denoise a no-flash image per channel under its flash counterpart.

    A 3-channel flash image guides channel by channel; a 1-channel one is
    shared across channels.
    """
    noflash = np.asarray(noflash, dtype=np.float64)
    flash = np.asarray(flash, dtype=np.float64)
    if noflash.shape[:2] != flash.shape[:2]:
        raise ValueError("flash and no-flash images differ in size")
    mp = MethodParams(params.r, params.eps)
    if method == "gf":
        return guided_filter(noflash, flash, params)
    if method == "umgf":
        return apply_method(noflash, flash, "umgf_gf", mp)
    raise ValueError(f"unknown flash/no-flash method {method!r}")


# --- corpus-level tuning ----------------------------------------------------


def tune_denoise(
    images: Sequence[np.ndarray],
    sigma: float,
    seeds: Sequence[int],
    method: str,
    radii=RADIUS_GRID,
    eps_values=EPS_GRID,
    base: MethodParams = MethodParams(),
) -> tuple[MethodParams, float]:
    """Pick ``(r, eps)`` maximising the corpus-mean PSNR."""

    def score(r, eps):
        p = replace(base, r=r, eps=eps)
        return float(np.mean([denoise_pipeline(img, sigma, s, method, p)[0].psnr
                              for img, s in zip(images, seeds)]))

    (r, eps), best = grid_search(score, radii, eps_values)
    return replace(base, r=r, eps=eps), best


def tune_upsample(
    pairs: Sequence[tuple[np.ndarray, np.ndarray]],
    scale: int,
    method: str,
    radii=RADIUS_GRID,
    eps_values=EPS_GRID,
    base: MethodParams = MethodParams(),
    mode: str = "depth",
    border: int = 6,
) -> tuple[MethodParams, float]:
    """Pick ``(r, eps)`` minimising the corpus-mean RMSE (EPE for flow)."""
    key = "rmse" if mode == "depth" else "epe"

    def score(r, eps):
        p = replace(base, r=r, eps=eps)
        return float(np.mean([getattr(upsample_pipeline(gt, g, scale, method, p, mode, border)[0], key)
                              for gt, g in pairs]))

    (r, eps), best = grid_search(score, radii, eps_values, maximize=False)
    return replace(base, r=r, eps=eps), best
