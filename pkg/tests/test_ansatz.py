import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from multibump.ansatz import (Configuration, WeightedNormParams,
                              algebraic_potential, build_ansatz,
                              check_hypotheses, discrete_ansatz,
                              discrete_bump, kernel_functions, smooth_cutoff,
                              snap_to_grid, sub_exponential_potential,
                              validate_configuration, weighted_norm,
                              zero_potential)
from multibump.grid import Field, Grid
from multibump.reduction import residual


def test_configuration_separation():
    good = np.array([[0.0], [10.0]])
    bad = np.array([[0.0], [5.0]])
    assert validate_configuration(good, 8.0)[0]
    ok, diag = validate_configuration(bad, 8.0)
    assert not ok and diag["pair"] == (0, 1)
    with pytest.raises(ValueError):
        Configuration(bad, 8.0)


def test_snap_to_grid(grid_medium):
    cfg = Configuration(np.array([[0.123], [10.077]]), 9.0)
    snapped = snap_to_grid(cfg, grid_medium)
    h = grid_medium.spacing
    assert np.allclose(snapped.points / h, np.round(snapped.points / h))
    assert snap_to_grid(snapped, grid_medium).points.tolist() == \
        snapped.points.tolist()


def test_build_ansatz_peaks(gs_cubic, grid_medium):
    cfg = Configuration(np.array([[-5.0], [5.0]]), 9.0)
    u = build_ansatz(cfg, gs_cubic, grid_medium)
    x = grid_medium.axis
    expected = gs_cubic.center_value + float(gs_cubic.evaluate(10.0))
    for q in (-5.0, 5.0):
        i = int(np.argmin(np.abs(x - q)))
        assert abs(u.values[i] - expected) < 1e-5


def test_discrete_bump_is_discrete_solution(gs_cubic, grid_medium):
    u = discrete_bump(gs_cubic, grid_medium)
    res = residual(u, zero_potential(), 0.0, gs_cubic.nonlinearity)
    assert np.max(np.abs(res.values)) < 1e-11


def test_discrete_ansatz_translate_exact(gs_cubic, grid_medium):
    cfg = Configuration(np.array([[7.35]]), 1.0)
    u = discrete_ansatz(cfg, gs_cubic, grid_medium)
    res = residual(u, zero_potential(), 0.0, gs_cubic.nonlinearity)
    # lattice translate of the discrete bump stays discretely exact
    assert np.max(np.abs(res.values)) < 1e-11


def test_smooth_cutoff_shape():
    r = np.linspace(0, 10, 101)
    chi = smooth_cutoff(r, 4.0, 6.0)
    assert np.all(chi[r <= 4.0] == 1.0)
    assert np.all(chi[r >= 6.0] == 0.0)
    assert np.all(np.diff(chi) <= 1e-12)


def test_kernel_functions_localized(gs_cubic, grid_medium):
    cfg = Configuration(np.array([[-6.0], [6.0]]), 10.0)
    zs = kernel_functions(cfg, gs_cubic, grid_medium)
    assert len(zs) == 2
    x = grid_medium.axis
    # cutoff kills Z_1 near the other spike
    far = np.abs(x - 6.0) < 1.0
    assert np.max(np.abs(zs[0].values[far])) == 0.0


@given(st.floats(min_value=0.1, max_value=10.0))
@settings(max_examples=20, deadline=None)
def test_weighted_norm_homogeneous(scale):
    grid = Grid(dim=1, half_width=20.0, spacing=0.1)
    cfg = Configuration(np.array([[0.0]]), 1.0)
    rng = np.random.default_rng(9)
    h = Field(grid, np.exp(-np.abs(grid.axis)) *
              rng.standard_normal(grid.points_per_axis))
    n1 = weighted_norm(h, cfg)
    n2 = weighted_norm(h * scale, cfg)
    assert np.isclose(n2, scale * n1, rtol=1e-12)


def test_hypothesis_checker_presets():
    assert check_hypotheses(algebraic_potential(m=2)).passed
    assert check_hypotheses(sub_exponential_potential(rate=0.3)).passed
    # faster-than-threshold exponential decay violates the slow-decay bound
    fast = sub_exponential_potential(rate=0.8)
    assert not check_hypotheses(fast, eta_bar=0.5).slow_decay
    assert not check_hypotheses(zero_potential()).passed


def test_weighted_norm_params_admissibility():
    params = WeightedNormParams(eta=0.75)
    assert params.check_admissible(holder_sigma=1.0, eta_bar=0.5) == []
    assert params.check_admissible(holder_sigma=1.0, eta_bar=0.8)
    with pytest.raises(ValueError):
        WeightedNormParams(eta=0.4)
