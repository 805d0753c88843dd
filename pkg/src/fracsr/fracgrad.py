"""Grünwald-Letnikov coefficients and directional fractional-gradient masks.

Masks live on the x2 refinement lattice used by the pyramid.  Offsets are
``(row, col)`` in fine-grid pixels relative to an inserted site.  Angles are
measured from the +col axis towards +row (rows grow downwards), folded to
``[0, 180)`` because an edge orientation has no heading.

Two site kinds exist:

``center``
    both fine coordinates odd; known samples sit where both are even.
``between``
    exactly one fine coordinate odd; known samples sit where both
    coordinates share a parity (originals plus the filled centers).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError

CENTER = "center"
BETWEEN = "between"

CENTER_LABELS = (0.0, 30.0, 60.0, 90.0, 120.0, 150.0)
BETWEEN_LABELS = (0.0, 20.0, 40.0, 60.0, 80.0, 100.0, 120.0, 140.0, 160.0)

FLAT_THRESHOLD = 1e-9


@dataclass(frozen=True)
class FracCoeffs:
    alpha: float
    taps: tuple

    @property
    def length(self):
        return len(self.taps)

    def as_array(self):
        return np.asarray(self.taps, dtype=np.float64)


def _check_alpha(alpha):
    if not (isinstance(alpha, (int, float, np.floating, np.integer)) and 0.0 < alpha <= 1.0):
        raise DomainError(f"fractional order must lie in (0, 1], got {alpha!r}")


def gl_coefficients(alpha, n):
    """Return the n+1 Grünwald-Letnikov weights ``(-1)**j * binom(alpha, j)``.

    Generated with the recurrence ``w_j = (1 - (alpha + 1) / j) * w_{j-1}``,
    ``w_0 = 1``.

    >>> gl_coefficients(0.5, 3).taps
    (1.0, -0.5, -0.125, -0.0625)
    """
    _check_alpha(alpha)
    if int(n) != n or n < 0:
        raise DomainError(f"number of terms must be a non-negative integer, got {n!r}")
    alpha = float(alpha)
    taps = [1.0]
    for j in range(1, int(n) + 1):
        taps.append((1.0 - (alpha + 1.0) / j) * taps[-1])
    return FracCoeffs(alpha, tuple(taps))


def frac_derivative_1d(signal, alpha, n):
    """Truncated G-L derivative of a 1-D signal with replicate-edge padding.

    ``out[t] = sum_j w_j * signal[max(t - j, 0)]`` for ``j = 0..n``.
    """
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise DomainError("signal must be a non-empty 1-D sequence")
    w = gl_coefficients(alpha, n).taps
    out = np.zeros_like(x)
    idx = np.arange(x.size)
    for j, wj in enumerate(w):
        out += wj * x[np.maximum(idx - j, 0)]
    return out


@dataclass(frozen=True)
class EdgeDirection:
    theta_deg: float
    flat: bool = False

    def __post_init__(self):
        object.__setattr__(self, "theta_deg", float(self.theta_deg) % 180.0)


def edge_angles(gx, gy):
    """Vectorised edge orientation ``90 + atan(gy / gx)`` folded into [0, 180).

    Returns ``(theta, flat)`` arrays; ``flat`` marks sites whose gradient norm
    is below :data:`FLAT_THRESHOLD`, where ``theta`` is set to 0.
    """
    gx = np.asarray(gx, dtype=np.float64)
    gy = np.asarray(gy, dtype=np.float64)
    theta = np.mod(90.0 + np.degrees(np.arctan2(gy, gx)), 180.0)
    # arctan2 can land exactly on 180 after the shift for tiny negative angles
    theta = np.where(theta >= 180.0, theta - 180.0, theta)
    flat = np.hypot(gx, gy) < FLAT_THRESHOLD
    theta = np.where(flat, 0.0, theta)
    return theta, flat


def edge_direction(gx, gy):
    theta, flat = edge_angles(gx, gy)
    return EdgeDirection(float(theta), bool(flat))


def estimate_edge_direction(patch):
    """Edge orientation of a small window from central differences.

    The gradient is averaged over every interior pixel of ``patch`` (at least
    3x3).  A flat window yields ``EdgeDirection(0, flat=True)``.
    """
    p = np.asarray(patch, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] < 3 or p.shape[1] < 3:
        raise DomainError(f"edge patch must be at least 3x3, got shape {p.shape}")
    gx = 0.5 * (p[1:-1, 2:] - p[1:-1, :-2]).mean()
    gy = 0.5 * (p[2:, 1:-1] - p[:-2, 1:-1]).mean()
    return edge_direction(gx, gy)


@dataclass(frozen=True)
class FracMask:
    """Directional G-L stencil anchored at an inserted site.

    ``stencil`` holds ``(drow, dcol, coeff)`` triples of the forward ray; the
    backward ray is its point reflection.  ``lead`` holds the interpolation
    weights of the nearest known point on the forward ray (the ``w_0`` tap).
    """

    alpha: float
    direction_deg: float
    kind: str
    stencil: tuple
    lead: tuple
    tap_sum: float
    spacing: float
    unit: tuple
    support_radius: int = field(default=0)

    def reversed_stencil(self):
        return tuple((-dr, -dc, c) for dr, dc, c in self.stencil)

    def reversed_lead(self):
        return tuple((-dr, -dc, w) for dr, dc, w in self.lead)


def _minor_split(x, parity):
    """Catmull-Rom weights of ``x`` over known offsets of the given parity.

    Known offsets along the minor axis are two fine pixels apart, so the
    four nearest ones get the cubic weights of the fractional position.
    """
    x = round(x, 12)
    lo = 2 * math.floor((x - parity) / 2.0) + parity
    t = (x - lo) / 2.0
    if t < 1e-12:
        return ((lo, 1.0),)
    if t > 1.0 - 1e-12:
        return ((lo + 2, 1.0),)
    t2 = t * t
    t3 = t2 * t
    weights = (
        0.5 * (-t3 + 2 * t2 - t),
        0.5 * (3 * t3 - 5 * t2 + 2),
        0.5 * (-3 * t3 + 4 * t2 + t),
        0.5 * (t3 - t2),
    )
    return tuple((lo + 2 * k, w) for k, w in zip((-1, 0, 1, 2), weights))


def line_points(theta_deg, kind, count):
    """Known-lattice sample points along the forward ray at ``theta_deg``.

    Point ``j`` sits ``2j + 1`` fine pixels out along the dominant axis; its
    minor-axis coordinate is split with cubic weights over the nearest known
    lattice rows (or columns).  Returns one tuple of ``(drow, dcol, weight)``
    per point.
    """
    if kind not in (CENTER, BETWEEN):
        raise ConfigurationError(f"unknown site kind {kind!r}")
    parity = 1 if kind == CENTER else 0
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    points = []
    for j in range(count):
        m = 2 * j + 1
        if abs(c) >= abs(s) - 1e-12:
            dc = m if c > 0 else -m
            split = _minor_split(m * s / abs(c), parity)
            points.append(tuple((dr, dc, w) for dr, w in split))
        else:
            dr = m if s > 0 else -m
            split = _minor_split(m * c / abs(s), parity)
            points.append(tuple((dr, dc, w) for dc, w in split))
    return points


def make_mask(alpha, theta_deg, kind, support=3, taps=None):
    """Build one directional mask.

    ``taps`` overrides the G-L weights (used to build classical-difference
    masks for comparison); otherwise ``gl_coefficients(alpha, support - 1)``.
    """
    if support < 2:
        raise DomainError(f"mask support must be >= 2, got {support}")
    if taps is None:
        taps = gl_coefficients(alpha, support - 1).taps
    elif len(taps) != support:
        raise DomainError("explicit taps must have one weight per support point")
    points = line_points(theta_deg, kind, support)
    stencil = tuple(
        (dr, dc, float(wj) * w) for wj, pt in zip(taps, points) for dr, dc, w in pt
    )
    t = math.radians(theta_deg)
    c, s = math.cos(t), math.sin(t)
    spacing = 2.0 / max(abs(c), abs(s))
    radius = max(max(abs(dr), abs(dc)) for dr, dc, _ in stencil)
    return FracMask(
        alpha=float(alpha),
        direction_deg=float(theta_deg),
        kind=kind,
        stencil=stencil,
        lead=points[0],
        tap_sum=float(sum(taps)),
        spacing=spacing,
        unit=(s, c),
        support_radius=int(radius),
    )


@dataclass(frozen=True)
class MaskBank:
    kind: str
    masks: tuple
    fallback: tuple

    @property
    def labels(self):
        return np.array([m.direction_deg for m in self.masks])


@dataclass(frozen=True)
class MaskBanks:
    center: MaskBank
    between: MaskBank
    alpha: float
    support: int


def _bank(alpha, kind, labels, support, taps):
    masks = tuple(make_mask(alpha, a, kind, support, taps) for a in labels)
    by_label = {m.direction_deg: m for m in masks}
    fallback = tuple(
        by_label.get(a) or make_mask(alpha, a, kind, support, taps) for a in (0.0, 90.0)
    )
    return MaskBank(kind, masks, fallback)


def build_mask_banks(alpha, support=3, taps=None):
    """Six center-site masks (30 degree pitch) and nine between-site masks (20)."""
    if taps is None:
        _check_alpha(alpha)
    if support < 2:
        raise DomainError(f"mask support must be >= 2, got {support}")
    return MaskBanks(
        center=_bank(alpha, CENTER, CENTER_LABELS, support, taps),
        between=_bank(alpha, BETWEEN, BETWEEN_LABELS, support, taps),
        alpha=float(alpha),
        support=int(support),
    )


def _angular_distance(theta, labels):
    d = np.abs(np.mod(np.asarray(theta, dtype=np.float64)[..., None] - labels, 180.0))
    return np.round(np.minimum(d, 180.0 - d), 9)


def select_mask_indices(theta, bank):
    """Index of the nearest-angle mask for every entry of ``theta``.

    Ties go to the smaller label.
    """
    if not bank.masks:
        raise ConfigurationError("mask bank is empty")
    labels = bank.labels
    order = np.argsort(labels, kind="stable")
    dist = _angular_distance(theta, labels[order])
    # argmin returns the first minimum, i.e. the smallest label among ties
    return order[np.argmin(dist, axis=-1)]


def select_mask(theta, bank):
    if isinstance(theta, EdgeDirection):
        theta = theta.theta_deg
    if not bank.masks:
        raise ConfigurationError("mask bank is empty")
    return bank.masks[int(select_mask_indices(float(theta), bank))]


def apply_mask(image, mask):
    """Raw stencil response of ``mask`` at every pixel of a dense image.

    Reads outside the image use replicate-edge padding.
    """
    img = np.asarray(image, dtype=np.float64)
    h, w = img.shape
    rows = np.arange(h)
    cols = np.arange(w)
    out = np.zeros_like(img)
    for dr, dc, coeff in mask.stencil:
        r = np.clip(rows + dr, 0, h - 1)
        c = np.clip(cols + dc, 0, w - 1)
        out += coeff * img[np.ix_(r, c)]
    return out
