"""Rectangular grids, fields, differential operators, quadrature and
bordered (constrained) linear solves.

All fields live on uniform tensor grids over [-L, L]^dim with an odd number
of nodes per axis, Dirichlet zero outside the box.  Everything here is pure:
Grid and Field are immutable after construction.
"""

import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import kernels


class GridError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    """A linear or nonlinear solve failed to reach its tolerance."""

    def __init__(self, message, residual=None, history=None):
        super().__init__(message)
        self.residual = residual
        self.history = history


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-L, L]^dim with spacing h and an odd node count."""

    dim: int
    half_width: float
    spacing: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise GridError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.spacing <= 0 or self.half_width <= 0:
            raise GridError("spacing and half_width must be positive")
        if self.spacing > 0.25:
            raise GridError(f"spacing {self.spacing} too coarse; need h <= 0.25 "
                            "to resolve the unit-rate exponential decay")

    @property
    def points_per_axis(self):
        return 2 * round(self.half_width / self.spacing) + 1

    @property
    def shape(self):
        return (self.points_per_axis,) * self.dim

    @property
    def size(self):
        return self.points_per_axis ** self.dim

    @property
    def axis(self):
        m = self.points_per_axis // 2
        return (np.arange(self.points_per_axis) - m) * self.spacing

    def coords(self):
        """Node coordinates as an (size, dim) array, row-major order."""
        ax = self.axis
        if self.dim == 1:
            return ax[:, None]
        mesh = np.meshgrid(*([ax] * self.dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def trapezoid_weights(self):
        """Row-major quadrature weights (tensor-product trapezoid rule)."""
        w1 = np.full(self.points_per_axis, self.spacing)
        w1[0] = w1[-1] = 0.5 * self.spacing
        w = w1
        for _ in range(self.dim - 1):
            w = np.multiply.outer(w, w1)
        return w.ravel()


@dataclass(frozen=True)
class Field:
    """Real scalar function sampled on a Grid (row-major values)."""

    grid: Grid
    values: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise GridError("Field values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def flat(self):
        return self.values.ravel()

    def __add__(self, other):
        _check_same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, s):
        return Field(self.grid, self.values * s)

    __rmul__ = __mul__

    def sup_norm(self):
        return float(np.max(np.abs(self.values)))


def _check_same_grid(u, v):
    if u.grid != v.grid:
        raise GridError("fields live on different grids")


def zero_field(grid):
    return Field(grid, np.zeros(grid.shape))


def laplacian(u: Field) -> Field:
    return Field(u.grid, kernels.laplacian(u.values, u.grid.spacing))


def apply_schrodinger_operator(u: Field, potential_samples: Field, delta: float) -> Field:
    """Linear part of the equation operator: Lap(u) - (1 + delta*V) u."""
    _check_same_grid(u, potential_samples)
    lap = kernels.laplacian(u.values, u.grid.spacing)
    return Field(u.grid, lap - (1.0 + delta * potential_samples.values) * u.values)


def integrate(u: Field) -> float:
    """Trapezoidal quadrature over the box (compensated summation)."""
    return math.fsum((u.grid.trapezoid_weights() * u.flat).tolist())


def inner(u: Field, v: Field) -> float:
    _check_same_grid(u, v)
    return math.fsum((u.grid.trapezoid_weights() * u.flat * v.flat).tolist())


def dirichlet_form(u: Field) -> float:
    """Integral of |grad u|^2, discretized so that it is the exact quadratic
    form of the grid Laplacian with zero ghost nodes.

    Forward differences on cell edges (including edges to the zero boundary)
    give sum h^dim (D+ u)^2 = -<u, Lap_h u> to roundoff, and are 2nd-order
    accurate for the continuum integral (midpoint rule per edge).
    """
    v = u.values
    h = u.grid.spacing
    scale = h ** (u.grid.dim - 2)
    total = []
    for ax in range(u.grid.dim):
        padded = np.concatenate(
            [np.zeros_like(np.take(v, [0], axis=ax)), v,
             np.zeros_like(np.take(v, [0], axis=ax))], axis=ax)
        diff = np.diff(padded, axis=ax)
        total.extend((scale * diff.ravel() ** 2).tolist())
    return math.fsum(total)


def l2_product_flat(u: Field) -> float:
    """Plain h^dim-weighted integral of u^2 (fields vanishing at the boundary)."""
    h = u.grid.spacing ** u.grid.dim
    return math.fsum((h * u.flat ** 2).tolist())


def h1_norm(u: Field) -> float:
    return math.sqrt(dirichlet_form(u) + l2_product_flat(u))


def laplacian_matrix(grid: Grid):
    """Sparse matrix of the grid Laplacian (Dirichlet zero outside)."""
    n = grid.points_per_axis
    h2 = grid.spacing ** 2
    one_d = sp.diags([np.ones(n - 1), -2.0 * np.ones(n), np.ones(n - 1)],
                     [-1, 0, 1], format="csr") / h2
    eye = sp.identity(n, format="csr")
    if grid.dim == 1:
        return one_d
    if grid.dim == 2:
        return sp.kron(one_d, eye) + sp.kron(eye, one_d)
    return (sp.kron(sp.kron(one_d, eye), eye)
            + sp.kron(sp.kron(eye, one_d), eye)
            + sp.kron(sp.kron(eye, eye), one_d))


def schrodinger_matrix(grid: Grid, potential_flat, delta, fprime_flat=None):
    """Sparse matrix of Lap - (1 + delta*V) + diag(fprime)."""
    a = laplacian_matrix(grid) - sp.diags(1.0 + delta * np.asarray(potential_flat))
    if fprime_flat is not None:
        a = a + sp.diags(np.asarray(fprime_flat))
    return a.tocsc()


GRAM_CONDITION_LIMIT = 1e8


def solve_bordered_system(A, constraints, rhs: Field, rhs_constraints,
                          tol=1e-10, maxiter=2000):
    """Solve A x + sum_j mu_j c_j = rhs subject to <x, c_j> = g_j.

    `A` is a sparse matrix/ndarray (direct solve) or a callable/LinearOperator
    (Krylov on the augmented system, diagonally preconditioned when `A` exposes
    a `diagonal` method).  Inner products use the trapezoid quadrature weights.
    Returns (x: Field, mu: list of float).
    """
    grid = rhs.grid
    m = len(constraints)
    n = grid.size
    w = grid.trapezoid_weights()
    cmat = np.column_stack([c.flat for c in constraints]) if m else np.zeros((n, 0))
    if m:
        gram = (w[:, None] * cmat).T @ cmat
        cond = np.linalg.cond(gram)
        if not np.isfinite(cond) or cond > GRAM_CONDITION_LIMIT:
            raise ConvergenceError(
                f"constraint Gram matrix ill-conditioned (cond={cond:.3e})")
    b = np.concatenate([rhs.flat, np.asarray(rhs_constraints, dtype=float)])

    direct = sp.issparse(A) or isinstance(A, np.ndarray)
    if direct:
        A = sp.csc_matrix(A)
        border_rows = sp.csr_matrix((w[:, None] * cmat).T) if m else None
        if m:
            aug = sp.bmat([[A, sp.csc_matrix(cmat)],
                           [border_rows, None]], format="csc")
        else:
            aug = A
        sol = spla.spsolve(aug, b)
    else:
        op = A if isinstance(A, spla.LinearOperator) else None

        def aug_matvec(z):
            x, mu = z[:n], z[n:]
            ax = op.matvec(x) if op is not None else np.asarray(A(x))
            top = ax + cmat @ mu
            bottom = (w * x) @ cmat
            return np.concatenate([top, bottom])

        aug_op = spla.LinearOperator((n + m, n + m), matvec=aug_matvec)
        sol, info = spla.gmres(aug_op, b, rtol=min(tol, 1e-12), atol=0.0,
                               maxiter=maxiter, restart=200)
        if info != 0:
            res = np.linalg.norm(aug_matvec(sol) - b)
            raise ConvergenceError("bordered Krylov solve did not converge",
                                   residual=res)

    x = Field(grid, sol[:n])
    mu = [float(v) for v in sol[n:]]

    # verify by direct substitution (the contract is checkable)
    if direct:
        ax = A @ x.flat
    else:
        ax = op.matvec(x.flat) if op is not None else np.asarray(A(x.flat))
    res_top = ax + cmat @ np.asarray(mu) - rhs.flat
    scale = 1.0 + np.linalg.norm(b)
    resid = np.linalg.norm(res_top) / scale
    if m:
        resid = max(resid, np.max(np.abs((w * x.flat) @ cmat
                                         - np.asarray(rhs_constraints, dtype=float))) / scale)
    if resid > tol:
        raise ConvergenceError(f"bordered solve residual {resid:.3e} above {tol:.1e}",
                               residual=resid)
    return x, mu


# ---------------------------------------------------------------------------
# field dump format: little-endian float64 payload + JSON sidecar
# ---------------------------------------------------------------------------

def save_field(u: Field, path):
    path = Path(path)
    payload = np.ascontiguousarray(u.flat, dtype="<f8")
    path.with_suffix(".bin").write_bytes(payload.tobytes())
    meta = {"dim": u.grid.dim, "half_width": u.grid.half_width,
            "spacing": u.grid.spacing, "points_per_axis": u.grid.points_per_axis}
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2))


def load_field(path) -> Field:
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    grid = Grid(meta["dim"], meta["half_width"], meta["spacing"])
    if grid.points_per_axis != meta["points_per_axis"]:
        raise GridError("sidecar points_per_axis inconsistent with geometry")
    values = np.frombuffer(path.with_suffix(".bin").read_bytes(), dtype="<f8")
    return Field(grid, values.reshape(grid.shape))
