import math

import numpy as np
import pytest

from multibump.groundstate import (Nonlinearity, compute_ground_state,
                                   interaction_constant, linearized_spectrum,
                                   ode_residual)


def test_cubic_1d_matches_sech(gs_cubic):
    x = np.linspace(0, 10, 501)
    exact = math.sqrt(2.0) / np.cosh(x)
    assert abs(gs_cubic.center_value - math.sqrt(2.0)) < 1e-6
    assert np.max(np.abs(gs_cubic.evaluate(x) - exact)) < 1e-5


def test_quadratic_1d_matches_sech_squared(gs_quadratic):
    x = np.linspace(0, 10, 501)
    exact = 1.5 / np.cosh(x / 2.0) ** 2
    assert abs(gs_quadratic.center_value - 1.5) < 1e-6
    assert np.max(np.abs(gs_quadratic.evaluate(x) - exact)) < 1e-5


def test_energies(gs_cubic, gs_quadratic):
    assert abs(gs_cubic.energy - 4.0 / 3.0) < 1e-4
    assert abs(gs_quadratic.energy - 6.0 / 5.0) < 1e-4


def test_decay_law(gs_cubic, gs_quadratic):
    # w ~ amp * exp(-r) with amp = 2 sqrt(2) (cubic) and 6 (quadratic)
    assert abs(gs_cubic.decay_rate - 1.0) < 0.02
    assert abs(gs_cubic.decay_amplitude - 2.0 * math.sqrt(2.0)) < 1e-2
    assert abs(gs_quadratic.decay_amplitude - 6.0) < 2e-2


def test_interaction_constant(gs_cubic, gs_quadratic):
    g1 = interaction_constant(gs_cubic)
    assert abs(g1 - 4.0 * math.sqrt(2.0)) / (4.0 * math.sqrt(2.0)) < 1e-3
    g1q = interaction_constant(gs_quadratic)
    assert abs(g1q - 12.0) / 12.0 < 1e-3


def test_spectrum_poschl_teller(gs_cubic):
    report = linearized_spectrum(gs_cubic)
    assert abs(report.lambda1 - 3.0) < 1e-3
    assert report.kernel_dim == 1
    assert report.positive_count == 1
    near_zero = [lam for lam, _, _ in report.eigenvalues if abs(lam) < 1e-4]
    assert len(near_zero) == 1


def test_ode_residual_small(gs_cubic):
    assert ode_residual(gs_cubic) < 1e-7


def test_2d_ground_state(gs_cubic_2d):
    # standard value for the 2D cubic ground state height
    assert abs(gs_cubic_2d.center_value - 2.2062) < 5e-4
    assert gs_cubic_2d.kernel_dim == 2
    assert ode_residual(gs_cubic_2d) < 1e-7


def test_subcritical_validation():
    with pytest.raises(ValueError):
        Nonlinearity(7.0).check_subcritical(3)
    Nonlinearity(3.0).check_subcritical(3)


def test_radial_monotone(gs_cubic):
    r = np.linspace(0, 12, 400)
    w = gs_cubic.evaluate(r)
    assert np.all(np.diff(w) < 0)
    assert np.all(w > 0)
