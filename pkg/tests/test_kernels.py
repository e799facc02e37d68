import numpy as np
import pytest

from multibump import kernels


rng = np.random.default_rng(11)


def test_laplacian_1d_second_difference():
    h = 0.1
    x = np.arange(-5, 5 + h / 2, h)
    u = x ** 2
    lap = kernels.laplacian(u, h)
    # centered second difference is exact on quadratics away from the edges
    assert np.allclose(lap[1:-1], 2.0, atol=1e-10)


def test_laplacian_2d_matches_separable():
    h = 0.2
    n = 41
    u = rng.standard_normal((n, n))
    lap = kernels.laplacian(u, h)
    expect = np.zeros_like(u)
    expect[1:-1, :] += (u[2:, :] - 2 * u[1:-1, :] + u[:-2, :])
    expect[0, :] += (u[1, :] - 2 * u[0, :])
    expect[-1, :] += (u[-2, :] - 2 * u[-1, :])
    expect[:, 1:-1] += (u[:, 2:] - 2 * u[:, 1:-1] + u[:, :-2])
    expect[:, 0] += (u[:, 1] - 2 * u[:, 0])
    expect[:, -1] += (u[:, -2] - 2 * u[:, -1])
    assert np.allclose(lap, expect / h ** 2, atol=1e-12)


@pytest.mark.skipif(kernels.BACKEND != "numba",
                    reason="numba backend unavailable")
def test_backend_parity_laplacian():
    h = 0.07
    u1 = rng.standard_normal(301)
    u2 = rng.standard_normal((61, 61))
    assert np.array_equal(kernels.laplacian(u1, h),
                          kernels._laplacian_1d_numpy(u1, h)) or \
        np.allclose(kernels.laplacian(u1, h),
                    kernels._laplacian_1d_numpy(u1, h), atol=1e-14)
    assert np.allclose(kernels.laplacian(u2, h),
                       kernels._laplacian_2d_numpy(u2, h), atol=1e-14)


@pytest.mark.skipif(kernels.BACKEND != "numba",
                    reason="numba backend unavailable")
def test_backend_parity_envelope():
    coords = rng.uniform(-20, 20, size=(500, 2))
    centers = rng.uniform(-10, 10, size=(3, 2))
    a = kernels.envelope_sum(coords, centers, 0.75)
    b = kernels._envelope_sum_numpy(coords, centers, 0.75)
    assert np.allclose(a, b, rtol=1e-13)


def test_envelope_sum_positive_and_symmetric():
    coords = np.linspace(-10, 10, 201)[:, None]
    centers = np.array([[0.0]])
    vals = kernels.envelope_sum(coords, centers, 0.5)
    assert np.all(vals > 0)
    assert np.allclose(vals, vals[::-1])
    assert np.isclose(np.max(vals), 1.0)


def test_radial_translate_sum_matches_profile(gs_cubic):
    coords = np.linspace(-8, 8, 321)[:, None]
    centers = np.array([[1.5]])
    vals = kernels.radial_translate_sum(
        coords, centers, float(gs_cubic.r_table[1] - gs_cubic.r_table[0]),
        gs_cubic.spline_coefficients(), gs_cubic.r_max,
        gs_cubic.decay_amplitude, gs_cubic.decay_rate,
        gs_cubic.tail_exponent)
    direct = gs_cubic.evaluate(np.abs(coords[:, 0] - 1.5))
    assert np.max(np.abs(vals - direct)) < 1e-10
