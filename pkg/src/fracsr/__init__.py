"""Pyramid super-resolution driven by directional fractional-order gradients."""
from .config import PipelineConfig, load_config
from .errors import (
    ConfigurationError,
    DimensionError,
    DivergenceError,
    DomainError,
    FracSRError,
    ImageIOError,
)
from .fileio import load_image, save_image
from .fracgrad import build_mask_banks, gl_coefficients, make_mask
from .imaging import ScaleFactor, bicubic_resize, gaussian_kernel
from .metrics import glcm_features, rmse, ssim, texture_similarity
from .pyramid import degrade, interpolate_level, optimize_alpha, super_resolve, upscale
from .reconstruct import ReconstructionConfig, energy, energy_gradient, reconstruct

__version__ = "0.1.0"
