"""Binary PGM/PPM (P5/P6) and PFM (Pf/PF) reading and writing.

Images are float64 numpy arrays: ``(H, W)`` for one channel, ``(H, W, C)``
otherwise, row 0 at the top.  Integer formats map to ``[0, 1]`` by dividing
by maxval; PFM samples pass through unchanged.
"""
from __future__ import annotations

import os
import re
from pathlib import Path

import numpy as np

FORMATS = ("pgm8", "pgm16", "ppm8", "ppm16", "pfm")


class ImageFormatError(ValueError):
    pass


def _read_pnm_header(data: bytes):
    # magic, width, height, maxval separated by whitespace, '#' comments allowed
    tokens = []
    pos = 2
    n = len(data)
    while len(tokens) < 3:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos < n and data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    if pos >= n or not data[pos:pos + 1].isspace():
        raise ImageFormatError("truncated header")
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise ImageFormatError(f"malformed header: {exc}") from None
    return width, height, maxval, pos + 1


def _load_pnm(data: bytes, channels: int) -> np.ndarray:
    width, height, maxval, offset = _read_pnm_header(data)
    if width < 1 or height < 1:
        raise ImageFormatError(f"invalid dimensions {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise ImageFormatError(f"maxval {maxval} outside 1..65535")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height * channels
    payload = data[offset:offset + count * dtype.itemsize]
    if len(payload) < count * dtype.itemsize:
        raise ImageFormatError("truncated payload")
    raw = np.frombuffer(payload, dtype=dtype).astype(np.float64)
    img = raw.reshape(height, width, channels) / maxval
    return img[:, :, 0] if channels == 1 else img


def _load_pfm(data: bytes) -> np.ndarray:
    lines = data.split(b"\n", 3)
    if len(lines) < 4:
        raise ImageFormatError("truncated header")
    magic = lines[0].strip()
    channels = 1 if magic == b"Pf" else 3
    try:
        width, height = (int(t) for t in lines[1].split())
        scale = float(lines[2].strip())
    except ValueError as exc:
        raise ImageFormatError(f"malformed header: {exc}") from None
    if width < 1 or height < 1 or scale == 0.0:
        raise ImageFormatError("invalid PFM header")
    dtype = np.dtype("<f4") if scale < 0 else np.dtype(">f4")
    count = width * height * channels
    payload = lines[3][:count * 4]
    if len(payload) < count * 4:
        raise ImageFormatError("truncated payload")
    raw = np.frombuffer(payload, dtype=dtype)
    if not np.all(np.isfinite(raw)):
        raise ImageFormatError("nonfinite PFM sample")
    # PFM rows run bottom-up
    img = raw.astype(np.float64).reshape(height, width, channels)[::-1]
    img = np.ascontiguousarray(img)
    return img[:, :, 0] if channels == 1 else img


FLO_MAGIC = b"PIEH"


def _load_flo(data: bytes) -> np.ndarray:
    # Middlebury .flo: magic, int32 width, int32 height, float32 (u, v) pairs
    if len(data) < 12:
        raise ImageFormatError("truncated header")
    width, height = (int(v) for v in np.frombuffer(data[4:12], dtype="<i4"))
    if width < 1 or height < 1:
        raise ImageFormatError(f"invalid dimensions {width}x{height}")
    count = width * height * 2
    payload = data[12:12 + count * 4]
    if len(payload) < count * 4:
        raise ImageFormatError("truncated payload")
    raw = np.frombuffer(payload, dtype="<f4")
    if not np.all(np.isfinite(raw)):
        raise ImageFormatError("nonfinite flow sample")
    return raw.astype(np.float64).reshape(height, width, 2)


def save_flow(flow: np.ndarray, path: str | os.PathLike) -> None:
    """Write a 2-channel flow field as a Middlebury ``.flo`` file."""
    flow = np.asarray(flow, dtype=np.float64)
    if flow.ndim != 3 or flow.shape[2] != 2:
        raise ImageFormatError(f"flow must have 2 channels, got shape {flow.shape}")
    h, w = flow.shape[:2]
    Path(path).write_bytes(FLO_MAGIC + np.array([w, h], dtype="<i4").tobytes()
                           + np.ascontiguousarray(flow, dtype="<f4").tobytes())


def load_image(path: str | os.PathLike) -> np.ndarray:
    data = Path(path).read_bytes()
    magic = data[:2]
    if magic == b"P5":
        return _load_pnm(data, 1)
    if magic == b"P6":
        return _load_pnm(data, 3)
    if magic in (b"Pf", b"PF"):
        return _load_pfm(data)
    if data[:4] == FLO_MAGIC:
        return _load_flo(data)
    raise ImageFormatError(f"unsupported magic number {magic!r}")


def _quantize(img: np.ndarray, maxval: int) -> np.ndarray:
    # clamp, then round half up
    return np.floor(np.clip(img, 0.0, 1.0) * maxval + 0.5).astype(np.int64)


def format_for_path(path: str | os.PathLike, channels: int, bits: int = 8) -> str:
    """Pick a save format from the file extension."""
    ext = Path(path).suffix.lower()
    if ext == ".pfm":
        return "pfm"
    if ext == ".flo":
        return "flo"
    if ext in (".pgm", ".ppm", ".pnm"):
        kind = "pgm" if channels == 1 else "ppm"
        return f"{kind}{bits}"
    raise ImageFormatError(f"cannot infer image format from {str(path)!r}")


def save_image(img: np.ndarray, path: str | os.PathLike, format: str | None = None) -> None:
    """Write ``img`` as ``format`` (inferred from the extension when omitted).

    Integer formats clamp to ``[0, 1]`` and round half up; PFM stores
    32-bit floats, so samples are rounded to float32 on the way out.
    """
    img = np.asarray(img, dtype=np.float64)
    channels = 1 if img.ndim == 2 else img.shape[2]
    if format is None:
        format = format_for_path(path, channels)
    if format == "flo":
        save_flow(img, path)
        return
    if format not in FORMATS:
        raise ImageFormatError(f"unknown format {format!r}")
    if not np.all(np.isfinite(img)):
        raise ValueError("image contains nonfinite samples")
    height, width = img.shape[:2]

    if format == "pfm":
        if channels not in (1, 3):
            raise ImageFormatError(f"pfm needs 1 or 3 channels, got {channels}")
        magic = b"Pf" if channels == 1 else b"PF"
        header = magic + f"\n{width} {height}\n-1.0\n".encode()
        body = np.ascontiguousarray(img[::-1], dtype="<f4").tobytes()
    else:
        want = 1 if format.startswith("pgm") else 3
        if channels != want:
            raise ImageFormatError(f"{format} needs {want} channel(s), got {channels}")
        maxval = 255 if format.endswith("8") else 65535
        magic = b"P5" if want == 1 else b"P6"
        header = magic + f"\n{width} {height}\n{maxval}\n".encode()
        dtype = "u1" if maxval == 255 else ">u2"
        body = _quantize(img, maxval).astype(dtype).tobytes()
    Path(path).write_bytes(header + body)


_SIZE_RE = re.compile(r"^(\d+)(?:[xX](\d+))?$")


def parse_size(text: str) -> tuple[int, int]:
    """Parse ``"WxH"`` or ``"N"`` into ``(width, height)``."""
    m = _SIZE_RE.match(text.strip())
    if not m:
        raise ValueError(f"bad size {text!r}, expected WxH")
    w = int(m.group(1))
    h = int(m.group(2)) if m.group(2) else w
    if w < 1 or h < 1:
        raise ValueError(f"bad size {text!r}")
    return w, h
