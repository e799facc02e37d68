import numpy as np
import pytest

from multibump.ansatz import Configuration, algebraic_potential, \
    zero_potential
from multibump.grid import Field, Grid
from multibump.maximize import (build_ledger, count_local_maxima,
                                interior_check, ledger_noise_floor,
                                maximize_reduced_energy, multiplier_check,
                                packing_check, pattern_search,
                                polish_solution)


def test_pattern_search_finds_lattice_optimum():
    target = np.array([[3.15], [-7.8]])

    def objective(pts):
        return -float(np.sum((pts - target) ** 2))

    pts, val, evals = pattern_search(objective, np.array([[12.0], [-20.0]]),
                                     rho=5.0, radius=30.0, h=0.05)
    assert np.max(np.abs(pts - target)) <= 0.05 / 2 + 1e-12
    assert evals < 500


def test_pattern_search_respects_separation():
    # unconstrained optimum collides; search must stop at distance rho
    def objective(pts):
        return -float(np.sum(pts ** 2))

    pts, _, _ = pattern_search(objective, np.array([[-8.0], [8.0]]),
                               rho=6.0, radius=30.0, h=0.05)
    assert abs(pts[0, 0] - pts[1, 0]) >= 6.0 - 1e-12


def test_delta_zero_supremum_flagged(gs_cubic):
    grid = Grid(dim=1, half_width=45.0, spacing=0.05)
    rec = maximize_reduced_energy(2, zero_potential(), 0.0, gs_cubic, grid,
                                  rho=10.0, n_restarts=1)
    # pure attraction: spikes run to the search boundary
    assert rec.supremum_flag
    assert not interior_check(rec, 10.0)


def test_ledger_strict_increments(gs_cubic, grid_wide):
    ledger = build_ledger(2, algebraic_potential(m=2), 1e-9, gs_cubic,
                          grid_wide, rho=10.0, n_restarts=2, seed=0)
    assert ledger.increments_strict
    assert not ledger.flags
    c1 = ledger.entries[0].value
    assert c1 - ledger.bump_energy > 10 * ledger.noise_floor
    assert ledger.entries[1].increment > 10 * ledger.noise_floor
    # maximizer interior, multipliers vanish
    assert ledger.entries[1].interior_margin > 0.5
    assert ledger.entries[1].multiplier_max < 1e-8


def test_polish_and_multipliers_at_maximizer(gs_cubic, grid_wide):
    pot = algebraic_potential(m=2)
    rec = maximize_reduced_energy(2, pot, 1e-9, gs_cubic, grid_wide,
                                  rho=10.0, n_restarts=1)
    rep = multiplier_check(rec, pot, 1e-9, gs_cubic, grid_wide)
    assert rep.multiplier_max < 1e-8
    assert rep.diagonally_dominant
    # diagonal ~ -int (w')^2 = -4/3 for the 1D cubic
    assert np.allclose(rep.diagonal, -4.0 / 3.0, atol=5e-3)
    polish = polish_solution(rec, pot, 1e-9, gs_cubic, grid_wide)
    assert polish.residual < 1e-10
    assert polish.min_value > -1e-12
    assert polish.n_local_maxima == 2


def test_count_local_maxima():
    g = Grid(dim=1, half_width=10.0, spacing=0.1)
    x = g.axis
    u = Field(g, np.exp(-(x - 3) ** 2) + 0.5 * np.exp(-(x + 4) ** 2))
    n, maxima = count_local_maxima(u)
    assert n == 2
    assert sorted(np.round(maxima.ravel()).tolist()) == [-4.0, 3.0]


def test_packing_check(gs_cubic):
    cfg = Configuration(np.array([[0.0], [10.0], [20.0]]), 10.0)
    worst, bound, ok = packing_check(cfg, gs_cubic)
    assert ok
    assert worst < bound


def test_noise_floor_positive():
    assert ledger_noise_floor(3, 4.0 / 3.0) > 0
