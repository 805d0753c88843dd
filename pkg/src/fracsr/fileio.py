"""PNG and binary PGM/PPM reading and writing.

Loaded samples are float64 scaled to ``[0, 1]``; saving clamps to ``[0, 1]``
and rounds half away from zero onto the target bit depth.
"""
from __future__ import annotations

import os
import re

import numpy as np
import png

from .errors import ImageIOError

_PNM_EXT = {".pgm": 1, ".ppm": 3, ".pnm": None}


def _ext(path):
    return os.path.splitext(str(path))[1].lower()


def load_image(path):
    ext = _ext(path)
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise ImageIOError(path, exc.strerror or str(exc)) from exc
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _read_png(path, data)
    if data[:2] in (b"P5", b"P6"):
        return _read_pnm(path, data)
    raise ImageIOError(path, f"unsupported image format (extension {ext or 'none'!r})")


def _read_png(path, data):
    try:
        width, height, rows, info = png.Reader(bytes=data).asDirect()
        arr = np.vstack([np.asarray(r, dtype=np.float64) for r in rows])
    except png.Error as exc:
        raise ImageIOError(path, f"corrupt PNG: {exc}") from exc
    planes = info["planes"]
    maxval = float(2 ** info["bitdepth"] - 1)
    arr = arr.reshape(height, width, planes) / maxval
    if info.get("alpha"):
        arr = arr[..., :-1]
    if arr.shape[2] == 1:
        return arr[..., 0]
    return arr


_PNM_HEADER = re.compile(rb"(P[56])\s+(?:#.*?\n\s*)*(\d+)\s+(?:#.*?\n\s*)*(\d+)\s+(?:#.*?\n\s*)*(\d+)\s")


def _read_pnm(path, data):
    m = _PNM_HEADER.match(data)
    if not m:
        raise ImageIOError(path, "malformed PNM header")
    magic, w, h, maxval = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
    if not 0 < maxval < 65536:
        raise ImageIOError(path, f"unsupported PNM maxval {maxval}")
    planes = 1 if magic == b"P5" else 3
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = w * h * planes
    body = data[m.end() :]
    if len(body) < count * dtype.itemsize:
        raise ImageIOError(path, "truncated PNM pixel data")
    arr = np.frombuffer(body, dtype=dtype, count=count).astype(np.float64) / maxval
    return arr.reshape(h, w) if planes == 1 else arr.reshape(h, w, 3)


def quantize(img, bitdepth=8):
    """Clamp to [0, 1] and round half away from zero to integer codes."""
    maxval = 2**bitdepth - 1
    a = np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
    return np.floor(a * maxval + 0.5).astype(np.uint16 if bitdepth > 8 else np.uint8)


def save_image(img, path, bitdepth=8):
    if bitdepth not in (8, 16):
        raise ImageIOError(path, f"unsupported bit depth {bitdepth}")
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 3 and a.shape[2] == 1:
        a = a[..., 0]
    if a.ndim not in (2, 3) or (a.ndim == 3 and a.shape[2] != 3):
        raise ImageIOError(path, f"cannot save array of shape {a.shape}")
    q = quantize(a, bitdepth)
    ext = _ext(path)
    try:
        if ext == ".png":
            _write_png(path, q, bitdepth)
        elif ext in _PNM_EXT:
            want = _PNM_EXT[ext]
            planes = 1 if q.ndim == 2 else 3
            if want is not None and want != planes:
                raise ImageIOError(path, f"{ext} needs {want} channel(s), image has {planes}")
            _write_pnm(path, q, bitdepth)
        else:
            raise ImageIOError(path, f"unsupported output extension {ext or 'none'!r}")
    except OSError as exc:
        if isinstance(exc, ImageIOError):
            raise
        raise ImageIOError(path, exc.strerror or str(exc)) from exc


def _write_png(path, q, bitdepth):
    h, w = q.shape[:2]
    greyscale = q.ndim == 2
    writer = png.Writer(w, h, greyscale=greyscale, bitdepth=bitdepth)
    rows = q.reshape(h, -1)
    with open(path, "wb") as fh:
        writer.write(fh, rows.tolist())


def _write_pnm(path, q, bitdepth):
    h, w = q.shape[:2]
    magic = b"P5" if q.ndim == 2 else b"P6"
    maxval = 2**bitdepth - 1
    body = q.astype(">u2" if bitdepth == 16 else "u1").tobytes()
    with open(path, "wb") as fh:
        fh.write(magic + b"\n%d %d\n%d\n" % (w, h, maxval))
        fh.write(body)
