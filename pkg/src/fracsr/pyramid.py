"""x2 pyramid refinement by directional fractional-gradient interpolation.

One level doubles both dimensions.  Originals stay on the even lattice of
the fine grid; the remaining sites are filled in two passes:

1. *center* sites (both coordinates odd) from the original samples,
2. *between* sites (one coordinate odd) from originals plus centers.

At each inserted site the local edge orientation (structure tensor of the
surrounding known gradients) picks a mask.  The mask runs outwards along
both rays of its line over samples centred on the local base, the mean of
the two nearest known samples on the line.  The two one-sided fractional
differences correct the base; the result is blended with the isotropic
axis-aligned pair by orientation coherence.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import fracgrad
from .config import PipelineConfig
from .errors import ConfigurationError, DimensionError, DomainError
from .imaging import (
    ScaleFactor,
    as_scale,
    bicubic_resize,
    blur_downsample,
    gaussian_kernel,
    gradient,
    luma,
    rgb_to_yuv,
    yuv_to_rgb,
)
from .reconstruct import ReconstructionTrace, reconstruct


@dataclass
class GradientField:
    gx: np.ndarray
    gy: np.ndarray

    def __iter__(self):
        return iter((self.gx, self.gy))

    @property
    def shape(self):
        return self.gx.shape


@dataclass
class PyramidLevel:
    index: int
    known: np.ndarray
    inserted_mask: np.ndarray | None = None

    @classmethod
    def from_image(cls, img, index=0):
        img = np.asarray(img, dtype=np.float64)
        return cls(index, img, np.zeros(img.shape, dtype=bool))


@dataclass
class AlphaSearchResult:
    alpha_star: float
    criterion: float
    per_alpha_trace: list
    image: np.ndarray = field(repr=False)
    gradient: GradientField = field(repr=False)


class _Sites:
    """Gathers known-lattice samples around one class of inserted sites.

    Sites sit at fine coordinates ``(2i + r0, 2j + c0)``.  ``lattices[p]``
    holds the known samples at fine coordinates ``(2a + p, 2b + p)``; reads
    past the border clamp the lattice index (replicate padding per lattice).
    """

    def __init__(self, lattices, r0, c0):
        self.lattices = lattices
        self.r0, self.c0 = r0, c0
        h, w = lattices[0].shape
        self.rows = np.arange(h)
        self.cols = np.arange(w)
        self._cache = {}

    def get(self, dr, dc):
        key = (dr, dc)
        if key not in self._cache:
            pr, pc = (self.r0 + dr) % 2, (self.c0 + dc) % 2
            lat = self.lattices.get(pr) if pr == pc else None
            if lat is None:
                raise ConfigurationError(f"offset {key} does not reach a known sample")
            h, w = lat.shape
            r = np.clip(self.rows + (self.r0 + dr - pr) // 2, 0, h - 1)
            c = np.clip(self.cols + (self.c0 + dc - pc) // 2, 0, w - 1)
            self._cache[key] = lat[np.ix_(r, c)]
        return self._cache[key]

    def combine(self, taps):
        out = 0.0
        for dr, dc, w in taps:
            out = out + w * self.get(dr, dc)
        return out


def _evaluate_mask(sites, mask):
    """Interpolated value and along-mask derivative for every site.

    Both rays see the mask on the base-centred samples.  Each ray's response
    is a one-sided fractional difference pointing at the site; their mean,
    scaled by 1/8, is the correction added to the base.  With first-order
    taps this is the four-point cubic midpoint rule.
    """
    lead_f = sites.combine(mask.lead)
    lead_b = sites.combine(mask.reversed_lead())
    base = 0.5 * (lead_f + lead_b)
    d_f = sites.combine(mask.stencil) - base * mask.tap_sum
    d_b = sites.combine(mask.reversed_stencil()) - base * mask.tap_sum
    u = base + 0.0625 * (d_f + d_b)
    slope = 0.5 * (d_b - d_f) / mask.spacing
    return u, slope


def _fill(sites, bank, gx, gy, coherence):
    """Fill one site class.

    Each site takes its nearest-angle mask; the result is blended with the
    isotropic pair (mean of the axis-aligned masks) by orientation
    coherence, so flat or isotropic neighbourhoods fall back entirely.

    Returns the values and a per-site gradient estimate
    ``(tangent_row, tangent_col, slope, flat, flat_gx, flat_gy)``.
    """
    theta, flat = fracgrad.edge_angles(gx, gy)
    choice = fracgrad.select_mask_indices(theta, bank)
    shape = theta.shape
    u = np.zeros(shape)
    slope = np.zeros(shape)
    t_row = np.zeros(shape)
    t_col = np.zeros(shape)
    for k, mask in enumerate(bank.masks):
        sel = (choice == k) & ~flat
        if not sel.any():
            continue
        uk, sk = _evaluate_mask(sites, mask)
        u[sel] = uk[sel]
        slope[sel] = sk[sel]
        t_row[sel], t_col[sel] = mask.unit
    u_h, s_h = _evaluate_mask(sites, bank.fallback[0])
    u_v, s_v = _evaluate_mask(sites, bank.fallback[1])
    w = np.where(flat, 0.0, coherence)
    u = w * u + (1.0 - w) * 0.5 * (u_h + u_v)
    flat_gx = np.where(flat, s_h, 0.0)
    flat_gy = np.where(flat, s_v, 0.0)
    return u, (t_row, t_col, slope, flat, flat_gx, flat_gy)


def _orientation(pairs):
    """Dominant gradient of several ``(gx, gy)`` samples via the structure tensor.

    Returns ``(gx, gy, coherence)``: a vector along the principal eigenvector
    scaled by the RMS gradient along it (opposite-signed gradients across a
    thin line reinforce instead of cancelling), and the coherence
    ``(l1 - l2) / (l1 + l2)`` in [0, 1].
    """
    jxx = sum(gx * gx for gx, _ in pairs)
    jyy = sum(gy * gy for _, gy in pairs)
    jxy = sum(gx * gy for gx, gy in pairs)
    trace = jxx + jyy
    root = np.sqrt((jxx - jyy) ** 2 + 4.0 * jxy * jxy)
    mag = np.sqrt(0.5 * (trace + root) / len(pairs))
    coherence = np.where(trace > 0, root / np.where(trace > 0, trace, 1.0), 0.0)
    phi = 0.5 * np.arctan2(2.0 * jxy, jxx - jyy)
    return mag * np.cos(phi), mag * np.sin(phi), np.clip(coherence, 0.0, 1.0)


def _known_gradient(sites, dr, dc):
    """Stride-2 central differences at the known sample ``(dr, dc)`` away."""
    gx = 0.5 * (sites.get(dr, dc + 2) - sites.get(dr, dc - 2))
    gy = 0.5 * (sites.get(dr + 2, dc) - sites.get(dr - 2, dc))
    return gx, gy


def _center_orientation(sites):
    tl, tr = sites.get(-1, -1), sites.get(-1, 1)
    bl, br = sites.get(1, -1), sites.get(1, 1)
    pairs = [(0.5 * ((tr + br) - (tl + bl)), 0.5 * ((bl + br) - (tl + tr)))]
    pairs += [_known_gradient(sites, dr, dc) for dr in (-1, 1) for dc in (-1, 1)]
    return _orientation(pairs)


def _between_orientation(sites):
    gx = 0.5 * (sites.get(0, 1) - sites.get(0, -1))
    gy = 0.5 * (sites.get(1, 0) - sites.get(-1, 0))
    pairs = [(gx, gy)]
    pairs += [_known_gradient(sites, dr, dc) for dr, dc in ((0, 1), (0, -1), (1, 0), (-1, 0))]
    return _orientation(pairs)


def _merge_gradient(base_gx, base_gy, est):
    t_row, t_col, slope, flat, fgx, fgy = est
    along = base_gx * t_col + base_gy * t_row
    gx = base_gx + (slope - along) * t_col
    gy = base_gy + (slope - along) * t_row
    gx = np.where(flat, fgx, gx)
    gy = np.where(flat, fgy, gy)
    return gx, gy


def interpolate_level(level, alpha=1.0, banks=None, support=3):
    """Refine one pyramid level by a factor of two.

    Parameters
    ----------
    level : PyramidLevel or ndarray
        Known samples of the current level.
    alpha : float
        Fractional order of the masks; ignored when ``banks`` is given.
    banks : MaskBanks, optional
        Prebuilt center/between mask banks.

    Returns
    -------
    (ndarray, GradientField)
        The refined image and its gradient field.  Original sites carry the
        central-difference gradient of the refined image; inserted sites have
        their along-mask component replaced by the fractional estimate.
    """
    f = level.known if isinstance(level, PyramidLevel) else np.asarray(level, dtype=np.float64)
    if f.ndim != 2:
        raise DimensionError(f"interpolation needs a single-channel image, got {f.shape}")
    if banks is None:
        banks = fracgrad.build_mask_banks(alpha, support)
    h, w = f.shape

    centers = _Sites({0: f}, 1, 1)
    c_vals, c_est = _fill(centers, banks.center, *_center_orientation(centers))

    lattices = {0: f, 1: c_vals}
    horiz = _Sites(lattices, 0, 1)
    h_vals, h_est = _fill(horiz, banks.between, *_between_orientation(horiz))
    vert = _Sites(lattices, 1, 0)
    v_vals, v_est = _fill(vert, banks.between, *_between_orientation(vert))

    u = np.empty((2 * h, 2 * w))
    u[0::2, 0::2] = f
    u[1::2, 1::2] = c_vals
    u[0::2, 1::2] = h_vals
    u[1::2, 0::2] = v_vals

    gx, gy = gradient(u)
    for (r0, c0), est in (((1, 1), c_est), ((0, 1), h_est), ((1, 0), v_est)):
        sx, sy = _merge_gradient(gx[r0::2, c0::2], gy[r0::2, c0::2], est)
        gx[r0::2, c0::2] = sx
        gy[r0::2, c0::2] = sy
    return u, GradientField(gx, gy)


def inserted_mask(shape):
    """Boolean mask of inserted sites on a refined grid of ``shape``."""
    m = np.ones(shape, dtype=bool)
    m[0::2, 0::2] = False
    return m


def alpha_criterion(f, u, grad, kernel, s=2):
    """Fidelity of an interpolated level: image term plus gradient term.

    Fine-grid gradients are rescaled by ``s`` so both gradient fields are
    per coarse pixel.
    """
    fx, fy = gradient(f)
    img_term = np.linalg.norm(blur_downsample(u, kernel, s) - f)
    rx = blur_downsample(s * grad.gx, kernel, s) - fx
    ry = blur_downsample(s * grad.gy, kernel, s) - fy
    grad_term = np.sqrt(np.sum(rx * rx) + np.sum(ry * ry))
    return float(img_term + grad_term)


def optimize_alpha(f, grid, kernel, s=2, support=3):
    """Search ``grid`` for the order whose interpolation best matches ``f``.

    Ties go to the larger order.
    """
    grid = [float(a) for a in grid]
    if not grid:
        raise ConfigurationError("alpha grid is empty")
    for a in grid:
        if not 0.0 < a <= 1.0:
            raise DomainError(f"alpha grid values must lie in (0, 1], got {a}")
    s = as_scale(s).s
    if s != 2:
        raise DomainError("one pyramid level refines by exactly 2")
    f = np.asarray(f, dtype=np.float64)
    trace = []
    best = None
    for a in grid:
        u, g = interpolate_level(f, a, support=support)
        j = alpha_criterion(f, u, g, kernel, s)
        trace.append((a, j))
        if best is None or j < best[1] or (j == best[1] and a > best[0]):
            best = (a, j, u, g)
    a, j, u, g = best
    return AlphaSearchResult(a, j, trace, u, g)


@dataclass
class LevelReport:
    index: int
    alpha: float
    alpha_trace: list
    energies: list
    best_iter: int
    wall_ms: float


def super_resolve(f, s, cfg=None, trace=None):
    """Upscale a single-channel image by the power of two ``s``.

    Each level runs the alpha search (or uses the configured fixed order),
    interpolates, then reconstructs against the level's input.  A list passed
    as ``trace`` receives one :class:`LevelReport` per level.
    """
    cfg = cfg or PipelineConfig()
    scale = as_scale(s)
    cur = np.asarray(f, dtype=np.float64)
    if cur.ndim != 2:
        raise DimensionError(f"super_resolve needs a single-channel image, got {cur.shape}")
    kernel = gaussian_kernel(cfg.sigma)
    for level in range(scale.levels):
        t0 = time.perf_counter()
        if cfg.alpha is None:
            search = optimize_alpha(cur, cfg.alpha_grid, kernel, 2, cfg.support)
            alpha, alpha_trace = search.alpha_star, search.per_alpha_trace
            u0, grad = search.image, search.gradient
        else:
            alpha, alpha_trace = float(cfg.alpha), []
            u0, grad = interpolate_level(cur, alpha, support=cfg.support)
        rtrace = ReconstructionTrace()
        cur = reconstruct(u0, cur, (grad.gx, grad.gy), cfg.reconstruction, kernel, 2, rtrace)
        if trace is not None:
            trace.append(
                LevelReport(
                    level,
                    alpha,
                    alpha_trace,
                    rtrace.energies,
                    rtrace.best_iter,
                    1000.0 * (time.perf_counter() - t0),
                )
            )
    return cur


def upscale(img, s, cfg=None, trace=None):
    """Upscale a grayscale or RGB image.

    Colour input in ``luma`` mode runs the pipeline on Y and bicubic on U and
    V; ``grayscale`` mode returns the upscaled luma only.
    """
    cfg = cfg or PipelineConfig()
    a = np.asarray(img, dtype=np.float64)
    if a.ndim == 2:
        return super_resolve(a, s, cfg, trace)
    if cfg.color_mode == "grayscale":
        return super_resolve(luma(a), s, cfg, trace)
    yuv = rgb_to_yuv(a)
    y = super_resolve(yuv[..., 0], s, cfg, trace)
    chroma = bicubic_resize(yuv[..., 1:], ScaleFactor(as_scale(s).s))
    return yuv_to_rgb(np.dstack([y, chroma]))


def degrade(hr, s, sigma=0.55):
    """Blur-and-decimate an HR image consistently with the level model.

    Each level assumes its input is its output blurred by ``sigma`` (in that
    level's pixels) and decimated by two.  Composing the levels gives, up to
    sampling effects, one blur of ``sigma * sqrt((4**levels - 1) / 3)`` HR
    pixels followed by decimation by ``s``, which is what is applied here.
    """
    scale = as_scale(s)
    eff = sigma * np.sqrt((4.0**scale.levels - 1.0) / 3.0)
    kernel = gaussian_kernel(eff)
    a = np.asarray(hr, dtype=np.float64)
    if a.ndim == 2:
        return blur_downsample(crop_to_multiple(a, scale.s), kernel, scale.s)
    a = crop_to_multiple(a, scale.s)
    return np.dstack([blur_downsample(a[..., c], kernel, scale.s) for c in range(a.shape[2])])


def crop_to_multiple(img, s):
    h, w = img.shape[:2]
    return img[: h - h % s, : w - w % s]
