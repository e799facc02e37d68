import numpy as np

from multibump.ansatz import Configuration, algebraic_potential, \
    zero_potential
from multibump.energy import (full_energy, predicted_energy, reduced_energy,
                              single_bump_grid_energy,
                              two_bump_interaction_study)
from multibump.grid import Grid
from multibump.reduction import aligned_configuration


def test_single_bump_reduced_equals_grid_energy(gs_cubic, grid_medium):
    cfg = Configuration(np.zeros((1, 1)), 1.0)
    m = reduced_energy(cfg, zero_potential(), 0.0, gs_cubic, grid_medium)
    i_h = single_bump_grid_energy(gs_cubic, grid_medium)
    assert abs(m - i_h) < 1e-13


def test_grid_energy_converges_to_continuum(gs_cubic):
    i_fine = single_bump_grid_energy(gs_cubic,
                                     Grid(dim=1, half_width=16.0,
                                          spacing=0.02))
    assert abs(i_fine - 4.0 / 3.0) < 1e-4


def test_two_bump_interaction_ratios(gs_cubic, grid_medium):
    rows = two_bump_interaction_study(gs_cubic, [10.0, 12.0, 14.0],
                                      grid_medium)
    ratios = [r.ratio for r in rows]
    assert abs(ratios[0] - 1.0) < 0.3
    # error shrinks with separation
    errors = [abs(r - 1.0) for r in ratios]
    assert errors[2] < errors[1] < errors[0]


def test_reduced_energy_increases_with_separation(gs_cubic, grid_medium):
    pot = zero_potential()
    m10 = reduced_energy(aligned_configuration(10.0), pot, 0.0, gs_cubic,
                         grid_medium)
    m12 = reduced_energy(aligned_configuration(12.0), pot, 0.0, gs_cubic,
                         grid_medium)
    assert m12 > m10


def test_predicted_energy_accuracy(gs_cubic, grid_medium):
    from multibump.groundstate import interaction_constant
    pot = zero_potential()
    cfg = aligned_configuration(10.0)
    m = reduced_energy(cfg, pot, 0.0, gs_cubic, grid_medium)
    pred = predicted_energy(cfg, pot, 0.0, gs_cubic, grid=grid_medium)
    tol = 0.3 * interaction_constant(gs_cubic) * gs_cubic.evaluate(10.0)
    assert abs(pred - m) < tol


def test_potential_term_raises_energy(gs_cubic, grid_wide):
    pot = algebraic_potential(m=2)
    cfg = Configuration(np.zeros((1, 1)), 1.0)
    with_v = reduced_energy(cfg, pot, 1e-9, gs_cubic, grid_wide)
    without = reduced_energy(cfg, zero_potential(), 0.0, gs_cubic, grid_wide)
    gain = with_v - without
    assert 0 < gain < 1e-8


def test_full_energy_breakdown_sums(gs_cubic, grid_medium):
    from multibump.ansatz import discrete_ansatz
    cfg = Configuration(np.zeros((1, 1)), 1.0)
    u = discrete_ansatz(cfg, gs_cubic, grid_medium)
    br = full_energy(u, zero_potential(), 0.0, gs_cubic.nonlinearity)
    assert np.isclose(br.total,
                      br.quadratic_part + br.potential_part
                      + br.nonlinear_part, rtol=1e-12)
