"""Pipeline configuration and its flat ``key = value`` file format."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import ConfigurationError, DomainError
from .imaging import ScaleFactor
from .reconstruct import ReconstructionConfig

DEFAULT_ALPHA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 11))

COLOR_MODES = ("luma", "grayscale")

_RECON_KEYS = {
    "lambda": "lam",
    "eta": "eta",
    "beta": "beta",
    "gamma": "gamma",
    "eps": "eps",
    "max_iters": "max_iters",
    "rel_tol": "rel_tol",
}


@dataclass(frozen=True)
class PipelineConfig:
    scale: int = 2
    alpha: float | None = None  # None selects per-level search over alpha_grid
    alpha_grid: tuple = DEFAULT_ALPHA_GRID
    sigma: float = 0.55
    support: int = 3
    color_mode: str = "luma"
    reconstruction: ReconstructionConfig = field(default_factory=ReconstructionConfig)

    def __post_init__(self):
        ScaleFactor(self.scale)
        object.__setattr__(self, "alpha_grid", tuple(float(a) for a in self.alpha_grid))
        if not self.alpha_grid:
            raise ConfigurationError("alpha grid is empty")
        for a in self.alpha_grid + ((self.alpha,) if self.alpha is not None else ()):
            if not 0.0 < a <= 1.0:
                raise DomainError(f"alpha values must lie in (0, 1], got {a}")
        if not self.sigma > 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")
        if int(self.support) != self.support or self.support < 2:
            raise DomainError(f"support must be an integer >= 2, got {self.support}")
        if self.color_mode not in COLOR_MODES:
            raise ConfigurationError(f"color_mode must be one of {COLOR_MODES}")

    @property
    def alpha_mode(self):
        return "auto" if self.alpha is None else "fixed"

    def to_text(self):
        lines = [
            f"scale = {self.scale}",
            f"alpha = {'auto' if self.alpha is None else repr(float(self.alpha))}",
            "alpha_grid = " + ", ".join(repr(a) for a in self.alpha_grid),
            f"sigma = {self.sigma!r}",
            f"support = {self.support}",
            f"color_mode = {self.color_mode}",
        ]
        for key, attr in _RECON_KEYS.items():
            lines.append(f"{key} = {getattr(self.reconstruction, attr)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text, base=None):
        return (base or cls()).updated(parse_config_text(text))

    def updated(self, values):
        """Return a copy with string or typed overrides applied by key."""
        top, recon = {}, {}
        for key, raw in values.items():
            if raw is None:
                continue
            if key in _RECON_KEYS:
                attr = _RECON_KEYS[key]
                recon[attr] = int(raw) if attr == "max_iters" else float(raw)
            elif key == "scale":
                top["scale"] = int(raw)
            elif key == "alpha":
                top["alpha"] = _parse_alpha(raw)
            elif key == "alpha_grid":
                top["alpha_grid"] = _parse_grid(raw)
            elif key == "sigma":
                top["sigma"] = float(raw)
            elif key == "support":
                top["support"] = int(raw)
            elif key == "color_mode":
                top["color_mode"] = str(raw).strip()
            else:
                raise ConfigurationError(f"unknown configuration key {key!r}")
        if recon:
            top["reconstruction"] = replace(self.reconstruction, **recon)
        return replace(self, **top)


def _parse_alpha(raw):
    if raw is None or (isinstance(raw, str) and raw.strip().lower() == "auto"):
        return None
    return float(raw)


def _parse_grid(raw):
    if isinstance(raw, str):
        return tuple(float(x) for x in raw.split(",") if x.strip())
    return tuple(float(x) for x in raw)


def parse_config_text(text):
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        values[key] = value
    return values


def load_config(path, base=None):
    with open(path, encoding="utf-8") as fh:
        return PipelineConfig.from_text(fh.read(), base)


__all__ = ["PipelineConfig", "DEFAULT_ALPHA_GRID", "load_config", "parse_config_text"]
