import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import ndimage

from fracsr import imaging as im
from fracsr.errors import DimensionError, DomainError


def test_scale_factor():
    assert im.ScaleFactor(8).levels == 3
    for bad in (0, 1, 3, 6, -2, 2.5, True):
        with pytest.raises(DomainError):
            im.ScaleFactor(bad)


@given(st.floats(0.1, 4.0))
def test_gaussian_unit_sum_symmetric(sigma):
    k = im.gaussian_kernel(sigma)
    t = np.asarray(k.taps1d)
    assert t.sum() == pytest.approx(1.0)
    assert np.allclose(t, t[::-1])
    assert k.taps.sum() == pytest.approx(1.0)


def test_gaussian_rejects_bad_sigma():
    with pytest.raises(DomainError):
        im.gaussian_kernel(0.0)


def test_convolve_matches_scipy(rng):
    img = rng.random((20, 17))
    k = im.gaussian_kernel(1.1)
    ref = ndimage.correlate(img, k.taps, mode="nearest")
    assert np.allclose(im.convolve(img, k), ref, atol=1e-13)


def _dot_check(op, adj, shape_in, shape_out, rng):
    x = rng.standard_normal(shape_in)
    y = rng.standard_normal(shape_out)
    lhs = np.vdot(op(x), y)
    rhs = np.vdot(x, adj(y))
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


@pytest.mark.parametrize("sigma", [0.55, 1.7])
def test_convolve_adjoint(sigma, rng):
    k = im.gaussian_kernel(sigma)
    _dot_check(lambda x: im.convolve(x, k), lambda y: im.convolve_adjoint(y, k), (9, 13), (9, 13), rng)


@pytest.mark.parametrize("s", [2, 4])
def test_blur_downsample_adjoint(s, rng):
    k = im.gaussian_kernel(0.55)
    _dot_check(
        lambda x: im.blur_downsample(x, k, s),
        lambda y: im.blur_downsample_adjoint(y, k, s),
        (8 * s, 5 * s),
        (8, 5),
        rng,
    )


def test_gradient_adjoint(rng):
    gx = rng.standard_normal((7, 9))
    gy = rng.standard_normal((7, 9))
    x = rng.standard_normal((7, 9))
    ux, uy = im.gradient(x)
    assert np.vdot(ux, gx) + np.vdot(uy, gy) == pytest.approx(np.vdot(x, im.gradient_adjoint(gx, gy)))


def test_gradient_of_ramp():
    x = np.tile(np.arange(6.0), (4, 1)) * 3.0
    gx, gy = im.gradient(x)
    assert np.allclose(gx[:, 1:-1], 3.0)
    assert np.allclose(gx[:, 0], 1.5)
    assert np.allclose(gy, 0.0)


def test_downsample_and_zerofill():
    x = np.arange(16.0).reshape(4, 4)
    assert im.downsample(x, 2).tolist() == [[0.0, 2.0], [8.0, 10.0]]
    z = im.upsample_zerofill(im.downsample(x, 2), 2)
    assert z[0, 0] == 0.0 and z[2, 2] == 10.0 and z[1, 1] == 0.0
    with pytest.raises(DimensionError):
        im.downsample(np.ones((5, 4)), 2)


def _cubic_oracle_1d(x, s):
    # direct Catmull-Rom evaluation with clamped indices
    n = len(x)
    out = []
    for k in range(n * s):
        p = k / s
        i = int(np.floor(p))
        t = p - i
        v = [x[min(max(i + d, 0), n - 1)] for d in (-1, 0, 1, 2)]
        out.append(
            0.5
            * (
                2 * v[1]
                + (-v[0] + v[2]) * t
                + (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) * t * t
                + (-v[0] + 3 * v[1] - 3 * v[2] + v[3]) * t**3
            )
        )
    return np.array(out)


@pytest.mark.parametrize("s", [2, 4])
def test_bicubic_matches_direct_evaluation(s, rng):
    img = rng.random((6, 5))
    out = im.bicubic_resize(img, s)
    rows = np.array([_cubic_oracle_1d(r, s) for r in img])
    ref = np.array([_cubic_oracle_1d(c, s) for c in rows.T]).T
    assert np.allclose(out, ref, atol=1e-12)
    assert np.allclose(out[::s, ::s], img)


def test_bicubic_colour_and_ramp():
    ramp = np.tile(np.arange(8.0), (8, 1))
    out = im.bicubic_resize(ramp, 2)
    # interior of a linear ramp is reproduced exactly
    assert np.allclose(out[:, 2:12], np.arange(2, 12) / 2.0)
    rgb = np.dstack([ramp, ramp * 0.5, ramp * 0.25])
    assert im.bicubic_resize(rgb, 4).shape == (32, 32, 3)


@given(st.lists(st.floats(0, 1), min_size=3, max_size=3))
def test_yuv_round_trip(rgb):
    px = np.array(rgb).reshape(1, 1, 3)
    assert np.allclose(im.yuv_to_rgb(im.rgb_to_yuv(px)), px, atol=1e-12)


def test_yuv_grey_has_no_chroma():
    g = np.full((2, 2, 3), 0.4)
    yuv = im.rgb_to_yuv(g)
    assert np.allclose(yuv[..., 0], 0.4)
    assert np.allclose(yuv[..., 1:], 0.0)
    assert im.luma(np.array([[[1.0, 0.0, 0.0]]]))[0, 0] == pytest.approx(0.299)
