"""Batch command-line front end.

Exit codes: 0 on success, 1 when processing fails, 2 on bad usage.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .guided import GuidedParams, WgfParams, gf_coefficients, guided_filter, weighted_guided_filter, wgf_coefficients
from .imageops import as_hwc, channels, to_grayscale
from .io import ImageFormatError, format_for_path, load_image, parse_size, save_image
from .lowpass import LowPassSpec
from .metrics import MetricReport, epe, psnr, rmse, ssim
from .pipelines import (
    METHODS,
    SYNTH_KINDS,
    MethodParams,
    SynthSpec,
    denoise_pipeline,
    detail_enhance,
    synth_corpus,
    synth_pair,
    tune_denoise,
    tune_upsample,
    upsample_pipeline,
)
from .unsharp import AmountRule, save_amount_map, successive_filter

log = logging.getLogger("umgf")

IMAGE_SUFFIXES = (".pgm", ".ppm", ".pnm", ".pfm", ".flo")
REPORT_FIELDS = ("path", "method", "params", "rmse", "psnr", "ssim", "epe")


class UsageError(Exception):
    pass


# --- argument helpers -------------------------------------------------------


def _lowpass(text: str) -> LowPassSpec:
    try:
        return LowPassSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _amount(text: str) -> tuple[str, str | None]:
    kind, _, arg = text.partition(":")
    if kind in ("gf", "wgf") and not arg:
        return kind, None
    if kind == "constant" and arg:
        try:
            if not math.isfinite(float(arg)):
                raise ValueError
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad constant amount {arg!r}") from None
        return kind, arg
    if kind == "external" and arg:
        return kind, arg
    raise argparse.ArgumentTypeError(f"bad amount {text!r}; use gf, wgf, constant:K or external:PATH")


def _radii(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radius list {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"bad radius list {text!r}")
    return values


def _size(text: str) -> tuple[int, int]:
    try:
        return parse_size(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_filter_flags(p: argparse.ArgumentParser, radius: int = 8, eps: float = 0.05**2) -> None:
    p.add_argument("--radius", type=_positive_int, default=radius, help="window radius r")
    p.add_argument("--eps", type=_positive_float, default=eps,
                   help="regularisation in squared intensity units (0.05^2 = 0.0025)")
    p.add_argument("--lambda", dest="lam", type=_positive_float, default=None,
                   help="weighted filter lambda (defaults to --eps)")
    p.add_argument("--var-eps", type=_positive_float, default=0.001**2,
                   help="weighted filter variance stabiliser")
    p.add_argument("--lowpass", type=_lowpass, default=None,
                   help="low-pass F_L: box:R, cbox:R,N or gauss:S")
    p.add_argument("--iters", type=_positive_int, default=1, help="successive stages L")


def _add_batch_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--csv", type=Path, default=None, help="write a metric report CSV")
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    p.add_argument("--tune-split", type=int, default=0, metavar="K",
                   help="grid-search radius/eps on the first K batch images, report on the rest")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None,
                        help="flat key=value file; command-line flags take precedence")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="umgf", description="Guided and unsharp-mask guided image filtering.")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = sub.add_parser("filter", parents=[common], help="filter images under guidance")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--guidance", type=Path, default=None, help="defaults to the input (self-guided)")
    p.add_argument("--method", choices=("gf", "wgf", "umgf"), default="gf")
    p.add_argument("--amount", type=_amount, default=("gf", None),
                   help="umgf amount rule: gf, wgf, constant:K or external:PATH")
    _add_filter_flags(p)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--dump-amount", type=Path, default=None)
    p.add_argument("--dump-coeffs", type=Path, default=None)
    p.add_argument("--jobs", type=_positive_int, default=1)
    subs["filter"] = p

    p = sub.add_parser("enhance", parents=[common], help="unsharp-mask detail enhancement")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=5.0, help="enhancement amount")
    p.add_argument("--base", choices=("gf", "lowpass"), default="gf")
    p.add_argument("--radius", type=_positive_int, default=16)
    p.add_argument("--eps", type=_positive_float, default=0.1**2)
    p.add_argument("--lowpass", type=_lowpass, default=LowPassSpec("box", radius=8))
    p.add_argument("--jobs", type=_positive_int, default=1)
    subs["enhance"] = p

    p = sub.add_parser("denoise", parents=[common], help="add noise, filter, score")
    p.add_argument("--input", type=Path, required=True, help="clean image or directory")
    p.add_argument("--output", type=Path, default=None)
    p.add_argument("--sigma", type=float, default=25.0, help="noise std in 8-bit units")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--method", choices=METHODS, default="gf")
    _add_filter_flags(p)
    _add_batch_flags(p)
    subs["denoise"] = p

    p = sub.add_parser("upsample", parents=[common], help="guided joint upsampling")
    p.add_argument("--input", type=Path, required=True, help="ground-truth image or directory")
    p.add_argument("--guidance", type=Path, required=True, help="guidance image or directory")
    p.add_argument("--output", type=Path, default=None)
    p.add_argument("--scale", type=int, choices=(2, 4, 8, 16), default=4)
    p.add_argument("--mode", choices=("depth", "flow"), default="depth")
    p.add_argument("--border", type=int, default=6)
    p.add_argument("--method", choices=METHODS, default="gf")
    _add_filter_flags(p)
    _add_batch_flags(p)
    subs["upsample"] = p

    p = sub.add_parser("metrics", parents=[common], help="compare two images")
    p.add_argument("reference", type=Path)
    p.add_argument("test", type=Path)
    p.add_argument("--border", type=int, default=0)
    p.add_argument("--scale", type=float, default=1.0, help="RMSE multiplier (255 for depth in cm)")
    p.add_argument("--csv", type=Path, default=None)
    subs["metrics"] = p

    p = sub.add_parser("synth", parents=[common], help="write a synthetic corpus")
    p.add_argument("--kind", choices=SYNTH_KINDS, default="piecewise_constant")
    p.add_argument("--size", type=_size, default=(128, 128), help="WxH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=_positive_int, default=1)
    p.add_argument("--edge-count", type=_positive_int, default=8)
    p.add_argument("--with-guidance", action="store_true", help="also write paired guidance images")
    p.add_argument("--outdir", type=Path, required=True)
    subs["synth"] = p

    p = sub.add_parser("bench", parents=[common], help="time the filtering kernels")
    p.add_argument("--size", type=_size, default=(1024, 1024), help="WxH")
    p.add_argument("--radii", type=_radii, default=[2, 32])
    p.add_argument("--reps", type=_positive_int, default=5)
    p.add_argument("--ops", default="box_mean", help="comma list of " + ",".join(bench_mod.OPS))
    p.add_argument("--backend", choices=("both", "numba", "numpy"), default="both")
    p.add_argument("--csv", type=Path, default=None)
    p.add_argument("--check", action="store_true",
                   help="fail unless box_mean at the largest radius is within 1.5x of the smallest")
    subs["bench"] = p
    return parser, subs


def read_config(path: Path) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(sub: argparse.ArgumentParser, path: Path) -> None:
    if not path.is_file():
        raise UsageError(f"config file {path} does not exist")
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    # --lambda is stored as 'lam'
    aliases = {"lambda": "lam"}
    defaults = {}
    for key, value in read_config(path).items():
        dest = aliases.get(key, key)
        if dest not in actions:
            raise UsageError(f"{path}: unknown key {key!r}")
        action = actions[dest]
        if isinstance(action, argparse._StoreTrueAction):
            defaults[dest] = value.lower() in ("1", "true", "yes", "on")
            continue
        try:
            converted = action.type(value) if action.type else value
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"{path}: bad value for {key}: {exc}") from None
        if action.choices is not None and converted not in action.choices:
            raise UsageError(f"{path}: {key} must be one of {list(action.choices)}")
        defaults[dest] = converted
        # a required flag satisfied by the config file
        action.required = False
    sub.set_defaults(**defaults)


def _prescan_config(argv: list[str], subs: dict) -> tuple[str | None, Path | None]:
    command = next((a for a in argv if a in subs), None)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", type=Path, default=None)
    known, _ = pre.parse_known_args(argv)
    return command, known.config


# --- batching ---------------------------------------------------------------


def list_inputs(path: Path) -> list[Path]:
    """A single file, or the image files in a directory in lexicographic order."""
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES and p.is_file())
        if not files:
            raise UsageError(f"no images found in {path}")
        return files
    if not path.is_file():
        raise UsageError(f"input {path} does not exist")
    return [path]


def _output_for(src: Path, output: Path | None, batch: bool) -> Path | None:
    if output is None:
        return None
    if batch:
        return output / src.name
    return output


def _pair_inputs(inputs: list[Path], guidance: Path | None, batch: bool) -> list[Path | None]:
    if guidance is None:
        return [None] * len(inputs)
    if batch:
        if not guidance.is_dir():
            raise UsageError("--guidance must be a directory when --input is a directory")
        paired = [guidance / p.name for p in inputs]
        missing = [str(p) for p in paired if not p.is_file()]
        if missing:
            raise UsageError(f"missing guidance images: {', '.join(missing)}")
        return paired
    if not guidance.is_file():
        raise UsageError(f"guidance {guidance} does not exist")
    return [guidance]


def _check_output(path: Path | None, batch: bool, channel_hint: int | None = None) -> None:
    if path is None:
        return
    if batch:
        path.mkdir(parents=True, exist_ok=True)
        return
    if not path.parent.exists():
        raise UsageError(f"output directory {path.parent} does not exist")
    if path.suffix.lower() not in IMAGE_SUFFIXES:
        raise UsageError(f"cannot infer an image format from {path}")


def _save(img: np.ndarray, path: Path) -> None:
    fmt = format_for_path(path, channels(img))
    if fmt == "pfm" and channels(img) not in (1, 3):
        raise ImageFormatError(f"{path}: pfm needs 1 or 3 channels")
    save_image(img, path, fmt)


def _run_jobs(fn, tasks: list, jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def _write_report_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=REPORT_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (_fmt(row[k]) if isinstance(row[k], float) else row[k]) for k in REPORT_FIELDS})


def _fmt(v: float) -> str:
    return "" if math.isnan(v) else repr(v)


def _report_row(path: Path, method: str, params: str, report: MetricReport) -> dict:
    return {"path": str(path), "method": method, "params": params, **report.as_row()}


def _method_params(args) -> MethodParams:
    return MethodParams(r=args.radius, eps=args.eps, lam=args.lam, var_eps=args.var_eps,
                        lowpass=args.lowpass, iters=args.iters)


def _match_guidance(I: np.ndarray, G: np.ndarray) -> np.ndarray:
    if I.shape[:2] != G.shape[:2]:
        raise ValueError(f"input is {I.shape[1]}x{I.shape[0]}, guidance is {G.shape[1]}x{G.shape[0]}")
    if channels(I) == 1 and channels(G) == 3:
        return to_grayscale(G)
    return G


def _suffixed(path: Path, suffix: str) -> Path:
    return path.with_name(f"{path.stem}{suffix}{path.suffix}")


# --- commands ---------------------------------------------------------------


def _filter_one(task) -> None:
    args, src, guide, out = task
    I = load_image(src)
    G = I if guide is None else _match_guidance(I, load_image(guide))
    if args.method in ("gf", "wgf"):
        if args.method == "gf":
            p = GuidedParams(args.radius, args.eps)
            result = guided_filter(I, G, p)
        else:
            p = WgfParams(args.radius, args.lam if args.lam is not None else args.eps, args.var_eps)
            result = weighted_guided_filter(I, G, p)
        _save(result, out)
        if args.dump_coeffs is not None:
            coeff = gf_coefficients if args.method == "gf" else wgf_coefficients
            Ic, Gc = as_hwc(I), as_hwc(G)
            maps = [coeff(Ic[:, :, c], Gc[:, :, c if Gc.shape[2] > 1 else 0], p) for c in range(Ic.shape[2])]
            a = np.stack([m.a_bar for m in maps], axis=2)
            b = np.stack([m.b_bar for m in maps], axis=2)
            base = _dump_path(args.dump_coeffs, src, out)
            save_image(a[:, :, 0] if a.shape[2] == 1 else a, _suffixed(base, "_a"), "pfm")
            save_image(b[:, :, 0] if b.shape[2] == 1 else b, _suffixed(base, "_b"), "pfm")
        log.info("%s -> %s", src, out)
        return

    kind, arg = args.amount
    if kind == "gf":
        rule = AmountRule("gf", GuidedParams(args.radius, args.eps))
    elif kind == "wgf":
        rule = AmountRule("wgf", WgfParams(args.radius, args.lam if args.lam is not None else args.eps, args.var_eps))
    elif kind == "constant":
        rule = AmountRule.constant(float(arg))
    else:
        rule = AmountRule("external", arg)
    lowpass = args.lowpass or LowPassSpec("box", radius=8)
    outputs = successive_filter(I, G, rule, lowpass, args.iters)
    if len(outputs) == 1:
        _save(outputs[0], out)
    else:
        for k, img in enumerate(outputs, 1):
            _save(img, _suffixed(out, f"_{k}"))
    if args.dump_amount is not None:
        base = _dump_path(args.dump_amount, src, out)
        prev = I
        for k, img in enumerate(outputs, 1):
            amount = rule.evaluate(prev, G)
            prev = img
            target = base if len(outputs) == 1 else _suffixed(base, f"_{k}")
            save_amount_map(amount, target)
    log.info("%s -> %s", src, out)


def _dump_path(dump: Path, src: Path, out: Path) -> Path:
    # in batch mode the dump flag names a directory
    if dump.is_dir():
        return dump / (src.stem + ".pfm")
    return dump


def cmd_filter(args) -> int:
    inputs = list_inputs(args.input)
    batch = args.input.is_dir()
    guides = _pair_inputs(inputs, args.guidance, batch)
    _check_output(args.output, batch)
    if args.method == "umgf" and args.amount[0] == "external" and not Path(args.amount[1]).is_file():
        raise UsageError(f"amount map {args.amount[1]} does not exist")
    for dump in (args.dump_amount, args.dump_coeffs):
        if dump is not None:
            if batch:
                dump.mkdir(parents=True, exist_ok=True)
            elif not dump.parent.exists():
                raise UsageError(f"directory {dump.parent} does not exist")
    tasks = [(args, src, g, _output_for(src, args.output, batch)) for src, g in zip(inputs, guides)]
    _run_jobs(_filter_one, tasks, args.jobs)
    return 0


def _enhance_one(task) -> None:
    args, src, out = task
    I = load_image(src)
    base = GuidedParams(args.radius, args.eps) if args.base == "gf" else args.lowpass
    _save(detail_enhance(I, args.lam, base), out)
    log.info("%s -> %s", src, out)


def cmd_enhance(args) -> int:
    if not args.lam >= 0:
        raise UsageError("--lambda must be >= 0")
    inputs = list_inputs(args.input)
    batch = args.input.is_dir()
    _check_output(args.output, batch)
    _run_jobs(_enhance_one, [(args, s, _output_for(s, args.output, batch)) for s in inputs], args.jobs)
    return 0


def _denoise_one(task) -> dict:
    args, src, seed, out = task
    clean = load_image(src)
    params = _method_params(args)
    report, img = denoise_pipeline(clean, args.sigma / 255.0, seed, args.method, params)
    if out is not None:
        _save(img, out)
    log.info("%s seed=%d %s", src, seed, report)
    return _report_row(src, args.method, f"{params.describe()};sigma={args.sigma:g};seed={seed}", report)


def _tune_count(args, inputs: list[Path]) -> int:
    k = args.tune_split
    if k == 0:
        return 0
    if k < 0 or k >= len(inputs):
        raise UsageError(f"--tune-split must leave at least one of {len(inputs)} images for evaluation")
    if args.method in ("none", "box"):
        raise UsageError(f"--tune-split has nothing to tune for method {args.method}")
    return k


def _apply_tuned(args, params: MethodParams, score: float) -> None:
    log.info("tuned radius=%d eps=%g (split score %.4f)", params.r, params.eps, score)
    args.radius, args.eps = params.r, params.eps


def cmd_denoise(args) -> int:
    if not args.sigma >= 0:
        raise UsageError("--sigma must be >= 0")
    inputs = list_inputs(args.input)
    batch = args.input.is_dir()
    _check_output(args.output, batch)
    n_tune = _tune_count(args, inputs)
    # image k of a batch uses seed + k, so results do not depend on --jobs
    seeds = [args.seed + k for k in range(len(inputs))]
    if n_tune:
        params, score = tune_denoise([load_image(p) for p in inputs[:n_tune]], args.sigma / 255.0,
                                     seeds[:n_tune], args.method, base=_method_params(args))
        _apply_tuned(args, params, score)
    tasks = [(args, s, seeds[k], _output_for(s, args.output, batch))
             for k, s in enumerate(inputs) if k >= n_tune]
    rows = _run_jobs(_denoise_one, tasks, args.jobs)
    _emit(rows, args.csv)
    return 0


def _upsample_one(task) -> dict:
    args, src, guide, out = task
    gt = load_image(src)
    G = load_image(guide)
    params = _method_params(args)
    report, img = upsample_pipeline(gt, G, args.scale, args.method, params, args.mode, args.border)
    if out is not None:
        _save(img, out)
    log.info("%s %s", src, report)
    return _report_row(src, args.method, f"{params.describe()};scale={args.scale};mode={args.mode}", report)


def cmd_upsample(args) -> int:
    inputs = list_inputs(args.input)
    batch = args.input.is_dir()
    guides = _pair_inputs(inputs, args.guidance, batch)
    _check_output(args.output, batch)
    n_tune = _tune_count(args, inputs)
    if n_tune:
        pairs = [(load_image(s), load_image(g)) for s, g in zip(inputs[:n_tune], guides[:n_tune])]
        params, score = tune_upsample(pairs, args.scale, args.method, base=_method_params(args),
                                      mode=args.mode, border=args.border)
        _apply_tuned(args, params, score)
    tasks = [(args, s, g, _output_for(s, args.output, batch))
             for s, g in list(zip(inputs, guides))[n_tune:]]
    rows = _run_jobs(_upsample_one, tasks, args.jobs)
    _emit(rows, args.csv)
    return 0


def _emit(rows: list[dict], csv_path: Path | None) -> None:
    for row in rows:
        print(" ".join(f"{k}={_fmt(row[k]) if isinstance(row[k], float) else row[k]}" for k in REPORT_FIELDS))
    if csv_path is not None:
        _write_report_csv(csv_path, rows)


def cmd_metrics(args) -> int:
    for p in (args.reference, args.test):
        if not p.is_file():
            raise UsageError(f"{p} does not exist")
    a = load_image(args.reference)
    b = load_image(args.test)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    report = MetricReport(border_exclude=args.border)
    report.rmse = rmse(a, b, args.border, args.scale)
    report.psnr = psnr(a, b)
    if min(a.shape[:2]) >= 11:
        report.ssim = ssim(a, b)
    if channels(a) == 2:
        report.epe = epe(a, b)
    _emit([_report_row(args.test, "metrics", f"reference={args.reference};border={args.border}", report)],
          args.csv)
    return 0


def cmd_synth(args) -> int:
    width, height = args.size
    args.outdir.mkdir(parents=True, exist_ok=True)
    rows = []
    for k in range(args.count):
        seed = args.seed + k
        spec = SynthSpec(width, height, args.kind, seed, args.edge_count)
        name = f"{args.kind}_{k:04d}.pfm"
        if args.with_guidance:
            img, guide = synth_pair(spec)
            (args.outdir / "guidance").mkdir(exist_ok=True)
            save_image(guide, args.outdir / "guidance" / name, "pfm")
        else:
            img = synth_corpus(spec)
        save_image(img, args.outdir / name, "pfm")
        rows.append({"file": name, "kind": args.kind, "width": width, "height": height,
                     "seed": seed, "edge_count": args.edge_count})
    with open(args.outdir / "manifest.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    log.info("wrote %d images to %s", len(rows), args.outdir)
    return 0


def cmd_bench(args) -> int:
    width, height = args.size
    ops = [o.strip() for o in args.ops.split(",") if o.strip()]
    unknown = [o for o in ops if o not in bench_mod.OPS]
    if unknown:
        raise UsageError(f"unknown ops: {', '.join(unknown)}")
    if args.check and "box_mean" not in ops:
        raise UsageError("--check needs box_mean among --ops")
    if args.backend == "both":
        backends = bench_mod.available_backends()
    else:
        if args.backend not in bench_mod.available_backends():
            raise UsageError(f"backend {args.backend} is not available")
        backends = [args.backend]
    rows = bench_mod.run_bench(width, height, args.radii, args.reps, ops, backends)
    if args.csv is not None:
        with open(args.csv, "w", newline="") as fh:
            bench_mod.write_csv(rows, fh)
    bench_mod.write_csv(rows, sys.stdout)
    if args.check:
        failed = False
        for name in backends:
            ratio = bench_mod.radius_ratio(rows, f"box_mean[{name}]")
            ok = ratio <= 1.5
            failed |= not ok
            print(f"box_mean[{name}] radius ratio {ratio:.3f} {'ok' if ok else 'FAILED'}", file=sys.stderr)
        if failed:
            return 1
    return 0


COMMANDS = {
    "filter": cmd_filter,
    "enhance": cmd_enhance,
    "denoise": cmd_denoise,
    "upsample": cmd_upsample,
    "metrics": cmd_metrics,
    "synth": cmd_synth,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    command, config = _prescan_config(argv, subs)
    if command is not None and config is not None:
        try:
            _apply_config(subs[command], config)
        except UsageError as exc:
            print(f"umgf {command}: error: {exc}", file=sys.stderr)
            return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"umgf {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - reported as a processing failure
        print(f"umgf {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
