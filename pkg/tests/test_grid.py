import json

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from multibump.grid import (Field, Grid, GridError, dirichlet_form, inner,
                            integrate, laplacian_matrix, load_field,
                            save_field, solve_bordered_system)


def gaussian_field(grid, width=2.0):
    coords = grid.coords()
    r2 = np.sum(coords ** 2, axis=1)
    return Field(grid, np.exp(-r2 / width ** 2))


def test_grid_invariants():
    g = Grid(dim=1, half_width=10.0, spacing=0.1)
    assert g.points_per_axis % 2 == 1
    assert g.axis[g.points_per_axis // 2] == 0.0
    with pytest.raises((ValueError, GridError)):
        Grid(dim=1, half_width=10.0, spacing=0.5)


def test_integrate_gaussian():
    g = Grid(dim=2, half_width=10.0, spacing=0.1)
    f = gaussian_field(g, width=1.0)
    assert np.isclose(integrate(f), np.pi, atol=1e-6)


def test_dirichlet_form_is_exact_laplacian_quadratic_form():
    g = Grid(dim=2, half_width=3.0, spacing=0.1)
    rng = np.random.default_rng(5)
    u = Field(g, rng.standard_normal(g.shape))
    lap = laplacian_matrix(g)
    quad = -float(u.flat @ (lap @ u.flat)) * g.spacing ** g.dim
    assert np.isclose(dirichlet_form(u), quad, rtol=1e-12)


def test_bordered_solve_substitution():
    g = Grid(dim=1, half_width=5.0, spacing=0.1)
    n = g.points_per_axis
    rng = np.random.default_rng(3)
    a = laplacian_matrix(g) - sp.identity(n) * 2.0
    constraints = [Field(g, rng.standard_normal(n)) for _ in range(2)]
    rhs = Field(g, rng.standard_normal(n))
    x, mu = solve_bordered_system(a, constraints, rhs, [0.0, 0.0])
    # substitution: A x + sum mu_j c_j = rhs and <x, c_j> = 0
    recon = a @ x.flat + sum(m * c.flat for m, c in zip(mu, constraints))
    assert np.max(np.abs(recon - rhs.flat)) < 1e-9
    for c in constraints:
        assert abs(inner(x, c)) < 1e-9


def test_bordered_solve_operator_branch():
    g = Grid(dim=1, half_width=5.0, spacing=0.1)
    n = g.points_per_axis
    rng = np.random.default_rng(4)
    a = (laplacian_matrix(g) - sp.identity(n) * 2.0).tocsc()

    def action(v):
        return a @ v

    constraints = [Field(g, rng.standard_normal(n))]
    rhs = Field(g, rng.standard_normal(n))
    x, mu = solve_bordered_system(action, constraints, rhs, [0.0])
    recon = a @ x.flat + mu[0] * constraints[0].flat
    assert np.max(np.abs(recon - rhs.flat)) < 1e-7
    assert abs(inner(x, constraints[0])) < 1e-7


def test_field_save_load_roundtrip(tmp_path):
    g = Grid(dim=2, half_width=2.0, spacing=0.1)
    f = gaussian_field(g)
    save_field(f, tmp_path / "field")
    meta = json.loads((tmp_path / "field.json").read_text())
    assert meta["dim"] == 2
    assert meta["spacing"] == 0.1
    assert meta["points_per_axis"] == g.points_per_axis
    back = load_field(tmp_path / "field")
    assert back.grid == g
    assert np.array_equal(back.values, f.values)


@given(st.floats(min_value=-5.0, max_value=5.0),
       st.floats(min_value=-5.0, max_value=5.0))
@settings(max_examples=20, deadline=None)
def test_integrate_linearity(a, b):
    g = Grid(dim=1, half_width=6.0, spacing=0.1)
    u = gaussian_field(g, 1.0)
    v = gaussian_field(g, 2.0)
    lhs = integrate(Field(g, a * u.values + b * v.values))
    rhs = a * integrate(u) + b * integrate(v)
    assert np.isclose(lhs, rhs, rtol=1e-10, atol=1e-12)
