"""Wall-clock timing of the filtering kernels on both backends."""
from __future__ import annotations

import csv
import time
from contextlib import contextmanager
from typing import Iterable, TextIO

import numpy as np

from . import _kernels
from .guided import GuidedParams, guided_filter
from .imageops import make_rng
from .lowpass import LowPassSpec, box_mean
from .unsharp import amount_from_gf, filter_with_amount

CSV_FIELDS = ("op", "radius", "width", "height", "median_ms")

OPS = {
    "box_mean": lambda img, r: box_mean(img, r),
    "guided_filter": lambda img, r: guided_filter(img, img, GuidedParams(r, 0.01)),
    "umgf": lambda img, r: filter_with_amount(
        img, img, amount_from_gf(img, img, GuidedParams(r, 0.01)),
        LowPassSpec("cascaded_box", radius=r, count=2)),
}


@contextmanager
def backend(name: str):
    previous = _kernels.get_backend()
    _kernels.set_backend(name)
    try:
        yield
    finally:
        _kernels.set_backend(previous)


def available_backends() -> list[str]:
    return ["numba", "numpy"] if _kernels.NUMBA_AVAILABLE else ["numpy"]


def time_op(fn, img, r, reps: int) -> float:
    """Median wall time in milliseconds over ``reps`` calls, after one warm-up."""
    fn(img, r)
    samples = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(img, r)
        samples.append((time.perf_counter() - t0) * 1e3)
    return float(np.median(samples))


def run_bench(
    width: int,
    height: int,
    radii: Iterable[int],
    reps: int = 5,
    ops: Iterable[str] = ("box_mean",),
    backends: Iterable[str] | None = None,
    seed: int = 0,
) -> list[dict]:
    img = make_rng(seed).random((height, width))
    rows = []
    for name in backends or available_backends():
        with backend(name):
            for op in ops:
                for r in radii:
                    rows.append({
                        "op": f"{op}[{name}]",
                        "radius": int(r),
                        "width": width,
                        "height": height,
                        "median_ms": time_op(OPS[op], img, r, reps),
                    })
    return rows


def radius_ratio(rows: list[dict], op: str) -> float:
    """Time at the largest radius divided by time at the smallest, for one op."""
    sel = sorted((row for row in rows if row["op"] == op), key=lambda row: row["radius"])
    return sel[-1]["median_ms"] / sel[0]["median_ms"]


def write_csv(rows: list[dict], fh: TextIO) -> None:
    writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**row, "median_ms": f"{row['median_ms']:.4f}"})
