"""Image operators: Gaussian blur, decimation, their exact adjoints, bicubic
resize, finite-difference gradients and BT.601 colour conversion.

Images are plain ``numpy`` arrays of float64, shaped ``(H, W)`` for a single
channel or ``(H, W, 3)`` for colour, with samples nominally in ``[0, 1]``.
All padding is replicate-edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class ScaleFactor:
    s: int

    def __post_init__(self):
        s = self.s
        if isinstance(s, bool) or int(s) != s or s < 2 or (int(s) & (int(s) - 1)):
            raise DomainError(f"scale factor must be a power of two >= 2, got {s!r}")
        object.__setattr__(self, "s", int(s))

    @property
    def levels(self):
        return self.s.bit_length() - 1


def as_scale(s):
    return s if isinstance(s, ScaleFactor) else ScaleFactor(s)


@dataclass(frozen=True)
class GaussianKernel:
    sigma: float
    radius: int
    taps1d: tuple

    @property
    def taps(self):
        t = np.asarray(self.taps1d)
        return np.outer(t, t)

    def flipped(self):
        return GaussianKernel(self.sigma, self.radius, tuple(reversed(self.taps1d)))


def gaussian_kernel(sigma):
    """Sampled, unit-sum separable Gaussian with radius ``ceil(3 * sigma)``."""
    if not sigma > 0:
        raise DomainError(f"Gaussian sigma must be positive, got {sigma!r}")
    radius = max(1, math.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    g = np.exp(-0.5 * (x / sigma) ** 2)
    g /= g.sum()
    return GaussianKernel(float(sigma), radius, tuple(g.tolist()))


def _as_2d(img):
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError(f"expected a single-channel image, got shape {a.shape}")
    return a


def _conv_axis(x, taps, axis):
    r = len(taps) // 2
    n = x.shape[axis]
    pad = [(0, 0)] * x.ndim
    pad[axis] = (r, r)
    xp = np.pad(x, pad, mode="edge")
    out = np.zeros_like(x)
    for m, k in enumerate(taps):
        o = m - r
        out += k * np.take(xp, np.arange(r - o, r - o + n), axis=axis)
    return out


def _conv_axis_adjoint(y, taps, axis):
    r = len(taps) // 2
    n = y.shape[axis]
    y = np.moveaxis(y, axis, 0)
    z = np.zeros((n + 2 * r,) + y.shape[1:])
    for m, k in enumerate(taps):
        o = m - r
        z[r - o : r - o + n] += k * y
    out = z[r : r + n].copy()
    out[0] += z[:r].sum(axis=0)
    out[-1] += z[r + n :].sum(axis=0)
    return np.moveaxis(out, 0, axis)


def convolve(img, kernel):
    """Separable convolution with replicate-edge padding; output keeps the shape."""
    a = _as_2d(img)
    t = kernel.taps1d
    return _conv_axis(_conv_axis(a, t, 0), t, 1)


def convolve_adjoint(img, kernel):
    """Exact transpose of :func:`convolve`, padding folded back onto the edges.

    In the interior this is convolution with the flipped kernel.
    """
    a = _as_2d(img)
    t = kernel.taps1d
    return _conv_axis_adjoint(_conv_axis_adjoint(a, t, 1), t, 0)


def downsample(img, s):
    """Keep the samples whose indices are multiples of ``s`` (top-left aligned)."""
    s = as_scale(s).s
    a = _as_2d(img)
    if a.shape[0] % s or a.shape[1] % s:
        raise DimensionError(f"image shape {a.shape} is not divisible by scale {s}")
    return a[::s, ::s].copy()


def upsample_zerofill(img, s):
    """Adjoint of :func:`downsample`: place samples at ``s * index``, zeros elsewhere."""
    s = as_scale(s).s
    a = _as_2d(img)
    out = np.zeros((a.shape[0] * s, a.shape[1] * s))
    out[::s, ::s] = a
    return out


def blur_downsample(img, kernel, s):
    """Forward observation model: blur, then decimate."""
    return downsample(convolve(img, kernel), s)


def blur_downsample_adjoint(img, kernel, s):
    return convolve_adjoint(upsample_zerofill(img, s), kernel)


def gradient(img):
    """Central differences ``(gx, gy)`` along columns and rows, replicate padded."""
    a = _as_2d(img)
    p = np.pad(a, 1, mode="edge")
    gx = 0.5 * (p[1:-1, 2:] - p[1:-1, :-2])
    gy = 0.5 * (p[2:, 1:-1] - p[:-2, 1:-1])
    return gx, gy


def _diff_adjoint_axis(y, axis):
    a = 0.5 * np.moveaxis(y, axis, 0)
    out = np.zeros_like(a)
    out[1:] += a[:-1]
    out[-1] += a[-1]
    out[:-1] -= a[1:]
    out[0] -= a[0]
    return np.moveaxis(out, 0, axis)


def gradient_adjoint(gx, gy):
    """Transpose of :func:`gradient` (a discrete negative divergence)."""
    return _diff_adjoint_axis(_as_2d(gx), 1) + _diff_adjoint_axis(_as_2d(gy), 0)


def _catmull_rom_weights(t):
    t2 = t * t
    t3 = t2 * t
    return (
        0.5 * (-t3 + 2 * t2 - t),
        0.5 * (3 * t3 - 5 * t2 + 2),
        0.5 * (-3 * t3 + 4 * t2 + t),
        0.5 * (t3 - t2),
    )


def _cubic_axis(x, s, axis):
    n = x.shape[axis]
    pos = np.arange(n * s) / s
    i0 = np.floor(pos).astype(int)
    t = pos - i0
    shape = [1] * x.ndim
    shape[axis] = n * s
    out = 0.0
    for k, w in zip(range(-1, 3), _catmull_rom_weights(t)):
        idx = np.clip(i0 + k, 0, n - 1)
        out = out + w.reshape(shape) * np.take(x, idx, axis=axis)
    return out


def bicubic_resize(img, s):
    """Catmull-Rom (a = -0.5) upsampling by an integer factor.

    Low-resolution sample ``i`` lands on output index ``s * i``, matching
    :func:`downsample`.  Works per channel on colour arrays.
    """
    s = s.s if isinstance(s, ScaleFactor) else int(s)
    if s < 1:
        raise DomainError(f"resize factor must be >= 1, got {s}")
    a = np.asarray(img, dtype=np.float64)
    if a.ndim not in (2, 3):
        raise DimensionError(f"unsupported image shape {a.shape}")
    return _cubic_axis(_cubic_axis(a, s, 0), s, 1)


_KR, _KB = 0.299, 0.114
_KG = 1.0 - _KR - _KB
_Y = np.array([_KR, _KG, _KB])
_U = (0.436 / (1.0 - _KB)) * (np.array([0.0, 0.0, 1.0]) - _Y)
_V = (0.615 / (1.0 - _KR)) * (np.array([1.0, 0.0, 0.0]) - _Y)
RGB_TO_YUV = np.stack([_Y, _U, _V])
YUV_TO_RGB = np.linalg.inv(RGB_TO_YUV)


def _as_rgb(img):
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 3 or a.shape[2] != 3:
        raise DimensionError(f"expected a 3-channel image, got shape {a.shape}")
    return a


def rgb_to_yuv(img):
    """BT.601 full-range RGB -> YUV (U, V centred on zero)."""
    return _as_rgb(img) @ RGB_TO_YUV.T


def yuv_to_rgb(img):
    return _as_rgb(img) @ YUV_TO_RGB.T


def luma(img):
    """Y channel of a colour image; single-channel input is returned as float."""
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 2:
        return a
    return _as_rgb(a) @ _Y
