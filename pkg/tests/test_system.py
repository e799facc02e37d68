import math

import numpy as np
import pytest

from multibump.ansatz import Configuration, algebraic_potential, \
    zero_potential
from multibump.grid import Grid
from multibump.system import (PairField, coupled_ansatz, coupled_bump_energy,
                              coupled_interaction_study, coupled_polish,
                              coupled_residual, coupled_solve_projected,
                              coupled_spectrum, estimate_beta_star,
                              interaction_strength, synchronized_amplitudes,
                              weighted_hypothesis_check)


def test_amplitude_algebra():
    p = synchronized_amplitudes(1.0, 1.0, 3.0)
    assert p.alpha == pytest.approx(0.5, abs=1e-14)
    assert p.gamma == pytest.approx(0.5, abs=1e-14)
    assert interaction_strength(p) == pytest.approx(0.5, abs=1e-14)
    decoupled = synchronized_amplitudes(1.0, 1.0, 0.0)
    assert decoupled.alpha == 1.0 and decoupled.gamma == 1.0
    assert not decoupled.admissible


def test_amplitude_errors():
    with pytest.raises(ValueError):
        synchronized_amplitudes(1.0, 1.0, 1.0)      # singular beta^2 = mu1 mu2
    with pytest.raises(ValueError):
        synchronized_amplitudes(1.0, 4.0, 3.0)      # negative radicand


def test_admissibility_ranges():
    assert synchronized_amplitudes(1.0, 2.0, 0.5).admissible
    assert synchronized_amplitudes(1.0, 2.0, 3.0).admissible
    assert not synchronized_amplitudes(1.0, 1.0, -0.2).admissible
    assert synchronized_amplitudes(1.0, 1.0, -0.2,
                                   beta_star=0.4285).admissible


def test_coupled_spectrum_decoupled_oracle(gs_cubic):
    p = synchronized_amplitudes(1.0, 1.0, 0.0)
    spec = coupled_spectrum(p, gs_cubic)
    assert spec.positive_count == 2
    assert spec.kernel_dim == 2
    tops = sorted((lam for lam, *_ in spec.eigenvalues), reverse=True)[:2]
    assert np.allclose(tops, 3.0, atol=1e-3)


def test_coupled_spectrum_nondegenerate_beta3(gs_cubic):
    p = synchronized_amplitudes(1.0, 1.0, 3.0)
    spec = coupled_spectrum(p, gs_cubic)
    assert spec.kernel_dim == gs_cubic.dim
    assert spec.nondegenerate
    assert spec.branch_coefficients == pytest.approx((0.0, 3.0), abs=1e-12)


def test_beta_star(gs_cubic):
    bs = estimate_beta_star(1.0, 1.0, gs_cubic)
    # exact transition of the branch coefficient (3-b)/(1+b) through 6
    assert abs(bs - 3.0 / 7.0) < 2e-3


def test_coupled_residual_decoupled_scalar(gs_cubic, grid_medium):
    from multibump.ansatz import discrete_ansatz
    p = synchronized_amplitudes(1.0, 1.0, 0.0)
    cfg = Configuration(np.zeros((1, 1)), 1.0)
    w = discrete_ansatz(cfg, gs_cubic, grid_medium)
    from multibump.grid import Field
    pair = PairField(w, Field(grid_medium, np.zeros(grid_medium.shape)))
    res = coupled_residual(pair, zero_potential(), zero_potential(), 0.0, p)
    assert np.max(np.abs(res.u.values)) < 1e-11
    assert np.max(np.abs(res.v.values)) == 0.0


def test_coupled_bump_energy_decoupled(gs_cubic):
    p = synchronized_amplitudes(1.0, 1.0, 0.0)
    grid = Grid(dim=1, half_width=16.0, spacing=0.02)
    assert abs(coupled_bump_energy(p, gs_cubic, grid) - 8.0 / 3.0) < 1e-4


def test_coupled_projected_solve_orthogonal(gs_cubic, grid_medium):
    p = synchronized_amplitudes(1.0, 1.0, 3.0)
    cfg = Configuration(np.array([[-5.0], [5.0]]), 10.0)
    res = coupled_solve_projected(cfg, zero_potential(), zero_potential(),
                                  0.0, p, gs_cubic, grid_medium)
    assert res.final_residual < 1e-10


def test_coupled_interaction_constant(gs_cubic, grid_medium):
    from multibump.groundstate import interaction_constant
    p = synchronized_amplitudes(1.0, 1.0, 3.0)
    rows = coupled_interaction_study([10.0], p, gs_cubic, grid_medium,
                                     interaction_constant(gs_cubic))
    assert abs(rows[0].ratio - 1.0) < 0.3


def test_coupled_polish_symmetric(gs_cubic, grid_medium):
    p = synchronized_amplitudes(1.0, 1.0, 3.0)
    cfg = Configuration(np.zeros((1, 1)), 1.0)
    rep = coupled_polish(cfg, zero_potential(), zero_potential(), 0.0, p,
                         gs_cubic, grid_medium)
    assert rep.residual < 1e-10
    assert rep.symmetry_defect < 1e-8


def test_weighted_hypothesis():
    p = synchronized_amplitudes(1.0, 1.0, 3.0)
    assert weighted_hypothesis_check(algebraic_potential(m=2),
                                     zero_potential(), p).passed
    assert not weighted_hypothesis_check(zero_potential(), zero_potential(),
                                         p).passed
