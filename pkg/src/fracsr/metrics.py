"""Image quality measures: RMSE, SSIM and GLCM texture features.

Inputs are single-channel float images nominally in ``[0, 1]``; RMSE and
SSIM are reported on the 8-bit scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
PEAK = 255.0


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionError(f"metrics need single-channel images, got {a.shape} and {b.shape}")
    if a.shape != b.shape:
        raise DimensionError(f"image dimensions differ: {a.shape} vs {b.shape}")
    return a, b


def rmse(a, b):
    a, b = _pair(a, b)
    d = (a - b) * PEAK
    return float(np.sqrt(np.mean(d * d)))


def _gauss_window():
    x = np.arange(SSIM_WINDOW) - SSIM_WINDOW // 2
    g = np.exp(-0.5 * (x / SSIM_SIGMA) ** 2)
    return g / g.sum()


def _valid_filter(x, g):
    # separable 'valid' correlation
    n = len(g)
    h, w = x.shape
    tmp = sum(g[k] * x[k : h - n + 1 + k, :] for k in range(n))
    return sum(g[k] * tmp[:, k : w - n + 1 + k] for k in range(n))


def ssim_map(a, b):
    a, b = _pair(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise DimensionError(f"image {a.shape} is smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} SSIM window")
    a = a * PEAK
    b = b * PEAK
    g = _gauss_window()
    mu_a = _valid_filter(a, g)
    mu_b = _valid_filter(b, g)
    var_a = _valid_filter(a * a, g) - mu_a * mu_a
    var_b = _valid_filter(b * b, g) - mu_b * mu_b
    cov = _valid_filter(a * b, g) - mu_a * mu_b
    c1 = (SSIM_K1 * PEAK) ** 2
    c2 = (SSIM_K2 * PEAK) ** 2
    num = (2 * mu_a * mu_b + c1) * (2 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return num / den


def ssim(a, b):
    """Mean local SSIM over every fully contained 11x11 Gaussian window."""
    return float(ssim_map(a, b).mean())


def quantize_levels(img, levels):
    img = np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0)
    return np.minimum((img * levels).astype(np.int64), levels - 1)


def glcm(img, levels=8, offset=(0, 1)):
    """Symmetric, normalised gray-level co-occurrence matrix."""
    if int(levels) != levels or levels < 2:
        raise DomainError(f"GLCM needs at least 2 gray levels, got {levels!r}")
    levels = int(levels)
    q = quantize_levels(img, levels)
    if q.ndim != 2:
        raise DimensionError(f"GLCM needs a single-channel image, got {q.shape}")
    dr, dc = offset
    h, w = q.shape
    r0, r1 = max(0, -dr), min(h, h - dr)
    c0, c1 = max(0, -dc), min(w, w - dc)
    if r1 <= r0 or c1 <= c0:
        raise DimensionError(f"offset {offset} leaves no pixel pairs in a {h}x{w} image")
    i = q[r0:r1, c0:c1].ravel()
    j = q[r0 + dr : r1 + dr, c0 + dc : c1 + dc].ravel()
    m = np.zeros((levels, levels))
    np.add.at(m, (i, j), 1.0)
    m = m + m.T
    return m / m.sum()


@dataclass(frozen=True)
class TextureFeatures:
    energy: float
    homogeneity: float
    entropy: float

    def as_array(self):
        return np.array([self.energy, self.homogeneity, self.entropy])


def glcm_features(img, levels=8, offset=(0, 1)):
    """Energy, homogeneity and entropy (normalised to [0, 1]) of the GLCM."""
    p = glcm(img, levels, offset)
    i, j = np.indices(p.shape)
    nz = p[p > 0]
    return TextureFeatures(
        energy=float(np.sum(p * p)),
        homogeneity=float(np.sum(p / (1.0 + np.abs(i - j)))),
        entropy=float(-np.sum(nz * np.log2(nz)) / np.log2(levels * levels)),
    )


def texture_similarity(ref, test, levels=8, offset=(0, 1)):
    """Mean relative deviation of the test image's texture features; 0 is a match."""
    ref, test = _pair(ref, test)
    fr = glcm_features(ref, levels, offset).as_array()
    ft = glcm_features(test, levels, offset).as_array()
    return float(np.mean(np.abs(ft - fr) / np.maximum(np.abs(fr), 1e-9)))


@dataclass(frozen=True)
class QualityReport:
    rmse: float
    ssim: float
    texture_ref: TextureFeatures
    texture_test: TextureFeatures
    texture_similarity: float


def quality_report(ref, test):
    return QualityReport(
        rmse=rmse(ref, test),
        ssim=ssim(ref, test),
        texture_ref=glcm_features(ref),
        texture_test=glcm_features(test),
        texture_similarity=texture_similarity(ref, test),
    )
