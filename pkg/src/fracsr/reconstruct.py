"""Energy minimisation that sharpens an interpolated pyramid level.

The energy is

    C(u) = 1/2 ||D u - f||^2 + lambda/2 ||grad u - G||^2

with ``D`` the blur-then-decimate observation operator and ``G`` the target
gradient field.  It is minimised with a per-pixel accumulated-gradient
scheme close to AdaDelta (decayed sums of squared gradients and squared
updates drive the step size).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DivergenceError, DomainError
from .imaging import (
    as_scale,
    blur_downsample,
    blur_downsample_adjoint,
    gradient,
    gradient_adjoint,
)


@dataclass(frozen=True)
class ReconstructionConfig:
    lam: float = 0.05
    eta: float = 1.5
    beta: float = 0.9
    gamma: float = 0.01
    eps: float = 1e-8
    max_iters: int = 100
    rel_tol: float = 1e-4

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lambda must be > 0, got {self.lam}")
        if not self.eta > 0:
            raise DomainError(f"eta must be > 0, got {self.eta}")
        if not 0 < self.beta < 1:
            raise DomainError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.gamma > 0:
            raise DomainError(f"gamma must be > 0, got {self.gamma}")
        if not self.eps > 0:
            raise DomainError(f"eps must be > 0, got {self.eps}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise DomainError(f"max_iters must be a positive integer, got {self.max_iters}")
        if self.rel_tol < 0:
            raise DomainError(f"rel_tol must be >= 0, got {self.rel_tol}")


@dataclass
class OptimizerState:
    """Running accumulators of the descent; owned by one reconstruction run."""

    sum_g2: np.ndarray
    sum_dx2: np.ndarray
    last_delta: np.ndarray
    iter: int = 0

    @classmethod
    def zeros(cls, shape):
        return cls(np.zeros(shape), np.zeros(shape), np.zeros(shape), 0)

    def step(self, g, cfg):
        """Advance one iteration with gradient ``g`` and return the update."""
        self.sum_g2 = cfg.beta * self.sum_g2 + cfg.gamma * g * g
        mean_g = np.sqrt(self.sum_g2 + cfg.eps)
        mean_dx = np.sqrt(self.sum_dx2 + cfg.eps)
        delta = -cfg.eta * (mean_dx / mean_g) * g
        self.sum_dx2 = cfg.beta * self.sum_dx2 + cfg.gamma * delta * delta
        self.last_delta = delta
        self.iter += 1
        return delta


def _check(u, f, grad_target, s):
    u = np.asarray(u, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    if u.ndim != 2 or f.ndim != 2:
        raise DimensionError("energy terms need single-channel images")
    if u.shape != (f.shape[0] * s, f.shape[1] * s):
        raise DimensionError(f"u has shape {u.shape}, expected {s}x the shape {f.shape} of f")
    gx, gy = grad_target
    if np.shape(gx) != u.shape or np.shape(gy) != u.shape:
        raise DimensionError("target gradient field does not match u")
    return u, f


def _residuals(u, f, grad_target, kernel, s):
    r = blur_downsample(u, kernel, s) - f
    ux, uy = gradient(u)
    gx, gy = grad_target
    return r, ux - gx, uy - gy


def energy(u, f, grad_target, kernel, s, lam):
    """Fidelity plus gradient-matching energy of ``u`` (coarse-grid fidelity)."""
    s = as_scale(s).s
    u, f = _check(u, f, grad_target, s)
    r, dx, dy = _residuals(u, f, grad_target, kernel, s)
    return 0.5 * float(np.sum(r * r)) + 0.5 * lam * float(np.sum(dx * dx) + np.sum(dy * dy))


def energy_gradient(u, f, grad_target, kernel, s, lam):
    """Exact gradient of :func:`energy` with respect to ``u``."""
    s = as_scale(s).s
    u, f = _check(u, f, grad_target, s)
    r, dx, dy = _residuals(u, f, grad_target, kernel, s)
    return blur_downsample_adjoint(r, kernel, s) + lam * gradient_adjoint(dx, dy)


@dataclass
class ReconstructionTrace:
    energies: list = field(default_factory=list)
    best_iter: int = 0
    iterations: int = 0


def reconstruct(u0, f, grad_target, cfg, kernel, s, trace=None):
    """Minimise the level energy from ``u0`` and return the best iterate.

    The update rule is not monotone, so the lowest-energy iterate seen is
    returned.  Stops after ``cfg.max_iters`` updates or once the relative
    energy change drops below ``cfg.rel_tol``.  Pass a
    :class:`ReconstructionTrace` to record per-iteration energies.
    """
    s = as_scale(s).s
    u, f = _check(u0, f, grad_target, s)
    u = u.copy()
    state = OptimizerState.zeros(u.shape)
    c = energy(u, f, grad_target, kernel, s, cfg.lam)
    if not np.isfinite(c):
        raise DivergenceError(0, "initial energy is not finite")
    best_c, best_u, best_t = c, u.copy(), 0
    if trace is not None:
        trace.energies.append(c)
    for t in range(1, int(cfg.max_iters) + 1):
        g = energy_gradient(u, f, grad_target, kernel, s, cfg.lam)
        if not np.all(np.isfinite(g)):
            raise DivergenceError(t, f"non-finite gradient at iteration {t}")
        u = u + state.step(g, cfg)
        c_new = energy(u, f, grad_target, kernel, s, cfg.lam)
        if not np.isfinite(c_new):
            raise DivergenceError(t, f"non-finite energy at iteration {t}")
        if trace is not None:
            trace.energies.append(c_new)
            trace.iterations = t
        if c_new < best_c:
            best_c, best_u, best_t = c_new, u.copy(), t
        if abs(c_new - c) / max(c, cfg.eps) < cfg.rel_tol:
            break
        c = c_new
    if trace is not None:
        trace.best_iter = best_t
    return best_u
