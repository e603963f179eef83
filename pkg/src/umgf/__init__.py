"""Guided image filtering with a single-coefficient unsharp-mask formulation.

Images are float64 numpy arrays, ``(H, W)`` for one channel or
``(H, W, C)`` with interleaved channels, nominally in ``[0, 1]``.
"""
from ._kernels import get_backend, set_backend
from .guided import (
    CoefficientMaps,
    GuidedParams,
    WgfParams,
    gf_coefficients,
    guided_filter,
    weighted_guided_filter,
    wgf_coefficients,
    wgf_epsilon_map,
)
from .imageops import add_gaussian_noise, make_rng, replicate_channels, resize, to_grayscale
from .io import load_image, save_image
from .lowpass import LowPassSpec, WindowStats, box_mean, cascaded_box, gaussian_blur, window_stats
from .metrics import MetricReport, epe, psnr, rmse, ssim
from .pipelines import (
    MethodParams,
    SynthSpec,
    denoise_pipeline,
    detail_enhance,
    flash_noflash,
    synth_corpus,
    synth_pair,
    upsample_pipeline,
)
from .unsharp import (
    AmountRule,
    MaskPair,
    amount_from_gf,
    amount_from_wgf,
    filter_unsharp_exact,
    filter_with_amount,
    load_amount_map,
    save_amount_map,
    successive_filter,
    unsharp_masks,
)

__version__ = "0.1.0"

__all__ = [
    "AmountRule",
    "CoefficientMaps",
    "GuidedParams",
    "LowPassSpec",
    "MaskPair",
    "MethodParams",
    "MetricReport",
    "SynthSpec",
    "WgfParams",
    "WindowStats",
    "add_gaussian_noise",
    "amount_from_gf",
    "amount_from_wgf",
    "box_mean",
    "cascaded_box",
    "denoise_pipeline",
    "detail_enhance",
    "epe",
    "filter_unsharp_exact",
    "filter_with_amount",
    "flash_noflash",
    "gaussian_blur",
    "get_backend",
    "gf_coefficients",
    "guided_filter",
    "load_amount_map",
    "load_image",
    "make_rng",
    "psnr",
    "replicate_channels",
    "resize",
    "rmse",
    "save_amount_map",
    "save_image",
    "set_backend",
    "ssim",
    "successive_filter",
    "synth_corpus",
    "synth_pair",
    "to_grayscale",
    "unsharp_masks",
    "upsample_pipeline",
    "weighted_guided_filter",
    "wgf_coefficients",
    "wgf_epsilon_map",
    "window_stats",
]
