import numpy as np
import pytest

from multibump.ansatz import (Configuration, algebraic_potential,
                              validate_configuration, zero_potential)
from multibump.grid import ConvergenceError, Grid
from multibump.reduction import (aligned_configuration,
                                 calibrate_increment_constant,
                                 correction_decay_study,
                                 delta_regime_warning,
                                 increment_bound_check,
                                 orthogonality_defect, solve_projected)


def test_single_bump_zero_correction(gs_cubic, grid_medium):
    cfg = Configuration(np.zeros((1, 1)), 1.0)
    res = solve_projected(cfg, zero_potential(), 0.0, gs_cubic, grid_medium)
    # the base state solves the discrete equation exactly
    assert res.newton_iterations == 0
    assert res.star_norm < 1e-9
    assert np.max(np.abs(res.multipliers)) < 1e-10


def test_orthogonality_random_configs(gs_cubic):
    grid = Grid(dim=1, half_width=55.0, spacing=0.05)
    rng = np.random.default_rng(21)
    pot = zero_potential()
    for _ in range(5):
        k = int(rng.integers(1, 4))
        rho = float(rng.uniform(8.0, 12.0))
        while True:
            pts = rng.uniform(-20.0, 20.0, size=(k, 1))
            if validate_configuration(pts, rho)[0]:
                break
        res = solve_projected(Configuration(pts, rho), pot, 0.0, gs_cubic,
                              grid)
        assert orthogonality_defect(res, gs_cubic) < 1e-10
        assert res.final_residual < 1e-10


def test_two_spike_correction_scales(gs_cubic, grid_medium):
    res = solve_projected(aligned_configuration(10.0), zero_potential(), 0.0,
                          gs_cubic, grid_medium)
    # the correction is of the order of the spike interaction w(rho)
    assert 1e-4 < res.star_norm < 1e-2


def test_decay_study_rate(gs_cubic):
    study = correction_decay_study(gs_cubic, zero_potential(), 0.0,
                                   [8.0, 10.0, 12.0])
    assert study.xi_fit >= 0.5
    assert np.all(np.diff(study.star_norms) < 0)


def test_boundary_margin_guard(gs_cubic):
    grid = Grid(dim=1, half_width=20.0, spacing=0.05)
    cfg = Configuration(np.array([[0.0], [15.0]]), 10.0)
    with pytest.raises(ValueError):
        solve_projected(cfg, zero_potential(), 0.0, gs_cubic, grid)


def test_delta_regime_warning():
    assert delta_regime_warning(1e-9, 10.0) is None
    assert delta_regime_warning(1e-3, 10.0) is not None


def test_increment_bound_calibrated(gs_cubic):
    grid = Grid(dim=1, half_width=45.0, spacing=0.05)
    c = calibrate_increment_constant(gs_cubic, zero_potential(), 0.0, grid,
                                     rho=10.0, xi=0.5)
    base = Configuration(np.array([[-6.0]]), 12.0)
    rep = increment_bound_check(base, [6.0], algebraic_potential(m=2), 1e-9,
                                gs_cubic, grid, C=c, xi=0.5)
    assert rep.passed
    assert rep.lhs >= 0.0 and rep.rhs > 0.0
