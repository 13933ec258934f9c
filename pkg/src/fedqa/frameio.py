"""Loading and storing luminance frames.

Supported sources: 8-bit binary PGM (P5), 8-bit PNG (RGB converted via BT.709
luma by default, BT.601 by flag), raw planar YUV420/YUV444/gray streams (dims
from flags or a JSON sidecar), and Y4M streams. Samples are kept as float64 on
the 0..255 scale throughout; quantization happens only on store.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from PIL import Image

__all__ = [
    "FrameSource",
    "load_frame",
    "iter_frames",
    "count_frames",
    "store_frame",
]

LUMA_WEIGHTS = {
    "bt709": (0.2126, 0.7152, 0.0722),
    "bt601": (0.299, 0.587, 0.114),
}

_RAW_FORMATS = {
    "yuv420": 1.5,
    "yuv420p": 1.5,
    "yuv444": 3.0,
    "yuv444p": 3.0,
    "gray": 1.0,
    "y": 1.0,
}

_FRAME_SUFFIXES = (".pgm", ".png")


@dataclass(frozen=True)
class FrameSource:
    """Resolved description of where frames come from."""

    path: str
    kind: str  # pgm | png | yuv | y4m | dir
    width: int | None = None
    height: int | None = None
    pixel_format: str | None = None


def rgb_to_luma(rgb: np.ndarray, matrix: str = "bt709") -> np.ndarray:
    """Weighted sum of 8-bit RGB channels on the 0..255 scale."""
    try:
        wr, wg, wb = LUMA_WEIGHTS[matrix]
    except KeyError:
        raise ValueError(f"unknown luma matrix {matrix!r}, expected bt709 or bt601")
    rgb = np.asarray(rgb, dtype=np.float64)
    return wr * rgb[..., 0] + wg * rgb[..., 1] + wb * rgb[..., 2]


def _read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary (P5) PGM file")
    # header tokens may be separated by whitespace and '#' comments
    pos = 2
    tokens = []
    while len(tokens) < 3:
        match = re.match(rb"(?:\s+|#[^\n]*\n)*([0-9]+)", data[pos:])
        if match is None:
            raise ValueError(f"{path}: malformed PGM header")
        tokens.append(int(match.group(1)))
        pos += match.end()
    width, height, maxval = tokens
    if not 0 < maxval < 256:
        raise ValueError(f"{path}: unsupported bit depth (maxval {maxval})")
    pos += 1  # single whitespace byte after maxval
    payload = data[pos : pos + width * height]
    if len(payload) != width * height:
        raise ValueError(f"{path}: truncated PGM payload")
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width).astype(np.float64)


def _read_png(path: str, matrix: str) -> np.ndarray:
    with Image.open(path) as img:
        arr = np.asarray(img)
    if arr.dtype != np.uint8:
        raise ValueError(f"{path}: only 8-bit PNG is supported, got dtype {arr.dtype}")
    if arr.ndim == 2:
        return arr.astype(np.float64)
    if arr.ndim == 3 and arr.shape[2] in (3, 4):
        return rgb_to_luma(arr[..., :3], matrix)
    raise ValueError(f"{path}: unsupported PNG layout {arr.shape}")


def _sidecar_dims(path: str) -> tuple[int | None, int | None, str | None]:
    sidecar = path + ".json"
    if not os.path.exists(sidecar):
        return None, None, None
    with open(sidecar) as fh:
        meta = json.load(fh)
    return meta.get("width"), meta.get("height"), meta.get("format")


def _raw_frame_bytes(width: int, height: int, pixel_format: str) -> int:
    try:
        factor = _RAW_FORMATS[pixel_format]
    except KeyError:
        raise ValueError(
            f"unknown raw pixel format {pixel_format!r}, expected one of {sorted(_RAW_FORMATS)}"
        )
    size = width * height * factor
    if size != int(size):
        raise ValueError(f"odd dimensions {width}x{height} for {pixel_format}")
    return int(size)


def _iter_raw(path: str, width: int, height: int, pixel_format: str) -> Iterator[np.ndarray]:
    frame_bytes = _raw_frame_bytes(width, height, pixel_format)
    y_bytes = width * height
    with open(path, "rb") as fh:
        while True:
            chunk = fh.read(frame_bytes)
            if not chunk:
                return
            if len(chunk) < frame_bytes:
                raise ValueError(f"{path}: truncated raw frame ({len(chunk)} bytes)")
            yield (
                np.frombuffer(chunk[:y_bytes], dtype=np.uint8)
                .reshape(height, width)
                .astype(np.float64)
            )


_Y4M_CHROMA_FACTORS = {
    "420": 1.5,
    "420jpeg": 1.5,
    "420mpeg2": 1.5,
    "420paldv": 1.5,
    "422": 2.0,
    "444": 3.0,
    "mono": 1.0,
}


def _iter_y4m(path: str) -> Iterator[np.ndarray]:
    with open(path, "rb") as fh:
        header = fh.readline()
        if not header.startswith(b"YUV4MPEG2"):
            raise ValueError(f"{path}: missing YUV4MPEG2 signature")
        width = height = None
        chroma = "420"
        for token in header.split()[1:]:
            tag, value = token[:1], token[1:].decode("ascii", "replace")
            if tag == b"W":
                width = int(value)
            elif tag == b"H":
                height = int(value)
            elif tag == b"C":
                chroma = value
        if width is None or height is None:
            raise ValueError(f"{path}: Y4M header without W/H")
        if chroma not in _Y4M_CHROMA_FACTORS:
            raise ValueError(f"{path}: unsupported Y4M chroma mode C{chroma}")
        frame_bytes = int(width * height * _Y4M_CHROMA_FACTORS[chroma])
        y_bytes = width * height
        while True:
            marker = fh.readline()
            if not marker:
                return
            if not marker.startswith(b"FRAME"):
                raise ValueError(f"{path}: expected FRAME marker, got {marker[:16]!r}")
            chunk = fh.read(frame_bytes)
            if len(chunk) < frame_bytes:
                raise ValueError(f"{path}: truncated Y4M frame")
            yield (
                np.frombuffer(chunk[:y_bytes], dtype=np.uint8)
                .reshape(height, width)
                .astype(np.float64)
            )


def _resolve(path, width=None, height=None, pixel_format=None) -> FrameSource:
    path = os.fspath(path)
    if os.path.isdir(path):
        return FrameSource(path, "dir")
    suffix = os.path.splitext(path)[1].lower()
    if suffix == ".pgm":
        return FrameSource(path, "pgm")
    if suffix == ".png":
        return FrameSource(path, "png")
    if suffix == ".y4m":
        return FrameSource(path, "y4m")
    if suffix in (".yuv", ".raw", ".y", ".gray"):
        sw, sh, sf = _sidecar_dims(path)
        width = width or sw
        height = height or sh
        pixel_format = pixel_format or sf or ("gray" if suffix in (".y", ".gray") else None)
        if not width or not height or not pixel_format:
            raise ValueError(
                f"{path}: raw input needs width/height/pixel-format "
                "(flags or a '<file>.json' sidecar)"
            )
        return FrameSource(path, "yuv", int(width), int(height), pixel_format)
    raise ValueError(f"{path}: unsupported input format {suffix!r}")


def _dir_frames(path: str) -> list[str]:
    names = sorted(
        n for n in os.listdir(path) if os.path.splitext(n)[1].lower() in _FRAME_SUFFIXES
    )
    if not names:
        raise ValueError(f"{path}: no frame files (*.pgm, *.png) found")
    return [os.path.join(path, n) for n in names]


def iter_frames(
    path,
    width: int | None = None,
    height: int | None = None,
    pixel_format: str | None = None,
    matrix: str = "bt709",
) -> Iterator[np.ndarray]:
    """Yield float64 luminance frames from a file, stream, or directory."""
    src = _resolve(path, width, height, pixel_format)
    if src.kind == "pgm":
        yield _read_pgm(src.path)
    elif src.kind == "png":
        yield _read_png(src.path, matrix)
    elif src.kind == "y4m":
        yield from _iter_y4m(src.path)
    elif src.kind == "yuv":
        yield from _iter_raw(src.path, src.width, src.height, src.pixel_format)
    else:
        for name in _dir_frames(src.path):
            yield from iter_frames(name, matrix=matrix)


def load_frame(
    path,
    width: int | None = None,
    height: int | None = None,
    pixel_format: str | None = None,
    matrix: str = "bt709",
) -> np.ndarray:
    """Load the first (or only) frame of an input as a float64 array."""
    for frame in iter_frames(path, width, height, pixel_format, matrix):
        return frame
    raise ValueError(f"{os.fspath(path)}: no frames found")


def count_frames(path, **kwargs) -> int:
    return sum(1 for _ in iter_frames(path, **kwargs))


def _quantize(frame: np.ndarray) -> np.ndarray:
    # round half up, then clamp to the 8-bit range
    return np.clip(np.floor(np.asarray(frame, dtype=np.float64) + 0.5), 0, 255).astype(
        np.uint8
    )


def store_frame(frame, path, format: str | None = None) -> None:
    """Write a frame as 8-bit PGM, PNG, or raw Y bytes (by suffix or format)."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 2:
        raise ValueError(f"expected a 2-D frame, got shape {frame.shape}")
    path = os.fspath(path)
    kind = format or os.path.splitext(path)[1].lower().lstrip(".")
    data = _quantize(frame)
    if kind == "pgm":
        header = f"P5\n{frame.shape[1]} {frame.shape[0]}\n255\n".encode("ascii")
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(data.tobytes())
    elif kind == "png":
        Image.fromarray(data, mode="L").save(path)
    elif kind in ("y", "gray", "yuv", "raw"):
        with open(path, "wb") as fh:
            fh.write(data.tobytes())
    else:
        raise ValueError(f"unsupported output format {kind!r}")
