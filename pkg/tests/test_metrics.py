import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import ndimage
from skimage.feature import graycomatrix
from skimage.metrics import structural_similarity

from fracsr.errors import DimensionError, DomainError
from fracsr.metrics import (
    glcm,
    glcm_features,
    quality_report,
    quantize_levels,
    rmse,
    ssim,
    texture_similarity,
)

images = arrays(np.float64, (16, 16), elements=st.floats(0, 1))


def test_rmse_constant_offset(rng):
    x = rng.random((10, 10)) * 0.5
    assert rmse(x, x + 5 / 255) == pytest.approx(5.0)
    assert rmse(x, x) == 0.0
    with pytest.raises(DimensionError):
        rmse(x, x[:5])


def _sk_ssim(a, b):
    return structural_similarity(
        a * 255, b * 255, gaussian_weights=True, sigma=1.5, use_sample_covariance=False, data_range=255
    )


def test_ssim_matches_reference_implementation(rng):
    a = rng.random((40, 33))
    b = np.clip(a + 0.2 * rng.standard_normal(a.shape), 0, 1)
    assert ssim(a, b) == pytest.approx(_sk_ssim(a, b), abs=1e-12)


def test_ssim_of_negative_image(rng):
    a = ndimage.gaussian_filter(rng.random((48, 48)), 2)
    a = 0.2 + 0.6 * (a - a.min()) / np.ptp(a)
    assert ssim(a, 1 - a) < 0.5
    assert ssim(a, a) == pytest.approx(1.0, abs=1e-12)


def test_ssim_window_too_big():
    with pytest.raises(DimensionError):
        ssim(np.ones((10, 30)), np.ones((10, 30)))


@given(images, images)
def test_symmetry(a, b):
    assert rmse(a, b) == pytest.approx(rmse(b, a))
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)
    assert -1.0 <= ssim(a, b) <= 1.0 + 1e-12


@given(images)
def test_identity(x):
    assert rmse(x, x) == 0
    assert ssim(x, x) == pytest.approx(1.0, abs=1e-9)
    assert texture_similarity(x, x) == 0


@given(images, st.integers(2, 16))
def test_glcm_properties(x, levels):
    p = glcm(x, levels)
    assert np.allclose(p, p.T)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    f = glcm_features(x, levels)
    assert 0 < f.energy <= 1 + 1e-12
    assert 0 < f.homogeneity <= 1 + 1e-12
    assert 0 <= f.entropy <= 1 + 1e-12


def test_glcm_matches_reference(rng):
    x = rng.random((30, 25))
    q = quantize_levels(x, 8).astype(np.uint8)
    for offset, angle, dist in (((0, 1), 0.0, 1), ((1, 0), np.pi / 2, 1), ((0, 2), 0.0, 2)):
        ref = graycomatrix(q, [dist], [angle], levels=8, symmetric=True, normed=True)[:, :, 0, 0]
        assert np.allclose(glcm(x, 8, offset), ref, atol=1e-15)


def test_constant_image_features():
    f = glcm_features(np.full((8, 8), 0.4))
    assert (f.energy, f.homogeneity, f.entropy) == (1.0, 1.0, 0.0)


def test_checkerboard_features():
    x = np.indices((8, 8)).sum(axis=0) % 2 * 1.0
    p = glcm(x, 2)
    assert np.allclose(p, [[0, 0.5], [0.5, 0]])
    f = glcm_features(x, 2)
    assert f.energy == pytest.approx(0.5)
    assert f.homogeneity == pytest.approx(0.5)
    assert f.entropy == pytest.approx(0.5)


def test_levels_domain():
    with pytest.raises(DomainError):
        glcm_features(np.zeros((4, 4)), 1)


def test_texture_similarity_formula(rng):
    a = rng.random((20, 20))
    b = ndimage.uniform_filter(a, 3)
    fa, fb = glcm_features(a).as_array(), glcm_features(b).as_array()
    assert texture_similarity(a, b) == pytest.approx(np.mean(np.abs(fb - fa) / fa))


def test_texture_error_grows_with_blur(rng):
    x = ndimage.gaussian_filter(rng.random((64, 64)), 1.0)
    x = (x - x.min()) / np.ptp(x)
    errs = [texture_similarity(x, ndimage.gaussian_filter(x, s)) for s in (0.5, 1.0, 2.0, 4.0)]
    assert errs == sorted(errs)


def test_quality_report(rng):
    a = rng.random((16, 16))
    r = quality_report(a, a)
    assert r.rmse == 0 and r.ssim == pytest.approx(1.0) and r.texture_similarity == 0
