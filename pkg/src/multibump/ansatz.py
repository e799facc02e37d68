"""Spike configurations, the k-bump ansatz, near-kernel functions Z_ij,
the weighted sup norm, and potential presets with hypothesis checks."""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse.linalg as spla

from . import kernels
from .grid import Field, Grid, GridError, schrodinger_matrix
from .groundstate import GroundState


@dataclass(frozen=True)
class Configuration:
    """k spike centers with min pairwise distance >= rho."""

    points: np.ndarray = dc_field(repr=True)
    rho: float = 10.0

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or not np.all(np.isfinite(pts)):
            raise ValueError("points must be a finite (k, dim) array")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        object.__setattr__(self, "points", pts)
        ok, diag = validate_configuration(pts, self.rho)
        if not ok:
            raise ValueError(f"configuration violates the separation "
                             f"constraint: pair {diag['pair']}, "
                             f"margin {diag['margin']:.4f}")

    @property
    def k(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


def validate_configuration(points, rho):
    """Membership test for the separation constraint, with diagnostics."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    k = pts.shape[0]
    if k == 1:
        return True, {"pair": None, "margin": math.inf}
    best = (math.inf, None)
    for i in range(k):
        for j in range(i + 1, k):
            d = float(np.linalg.norm(pts[i] - pts[j]))
            if d < best[0]:
                best = (d, (i, j))
    margin = best[0] - rho
    return margin >= 0, {"pair": best[1], "margin": margin}


def snap_to_grid(config: Configuration, grid: Grid) -> Configuration:
    """Round each spike center to the nearest grid node.

    Nodes are the lattice h*Z; the separation margin changes by at most
    sqrt(dim)*h, which we absorb by shrinking rho when rounding would
    violate it."""
    h = grid.spacing
    pts = np.round(config.points / h) * h
    rho = config.rho
    ok, diag = validate_configuration(pts, rho)
    if not ok:
        rho = rho + diag["margin"] - 1e-12
    return Configuration(pts, rho)


def _check_margin(config, grid, margin=10.0):
    if np.max(np.abs(config.points)) > grid.half_width - margin:
        raise GridError(f"spike within {margin} of the box boundary; "
                        "enlarge the grid")


def build_ansatz(config: Configuration, gs: GroundState, grid: Grid) -> Field:
    """Sum of translated radial profiles (cubic interpolation of the table)."""
    _check_margin(config, grid)
    vals = kernels.radial_translate_sum(
        grid.coords(), config.points, float(gs.r_table[1] - gs.r_table[0]),
        gs.spline_coefficients(), gs.r_max, gs.decay_amplitude, gs.decay_rate,
        gs.tail_exponent)
    return Field(grid, vals)


def smooth_cutoff(r, r_inner, r_outer):
    """Quintic smoothstep: 1 for r <= r_inner, 0 for r >= r_outer."""
    r = np.asarray(r, dtype=float)
    t = np.clip((r - r_inner) / (r_outer - r_inner), 0.0, 1.0)
    return 1.0 - t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)


def kernel_functions(config: Configuration, gs: GroundState, grid: Grid):
    """Localized translation derivatives Z_ij = d(w_{Q_i})/dx_j * cutoff_i.

    The cutoff is 1 inside |x-Q_i| <= (rho-1)/2 and 0 outside rho/2, so
    supports for distinct spikes are disjoint whenever the configuration is
    separated."""
    _check_margin(config, grid)
    coords = grid.coords()
    rho = config.rho
    out = []
    for q in config.points:
        diff = coords - q[None, :]
        r = np.sqrt(np.sum(diff ** 2, axis=1))
        chi = smooth_cutoff(r, (rho - 1.0) / 2.0, rho / 2.0)
        wp = gs.derivative(r)
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(r[:, None] > 0, diff / np.maximum(r, 1e-300)[:, None], 0.0)
        for j in range(config.dim):
            out.append(Field(grid, chi * wp * unit[:, j]))
    return out


@dataclass(frozen=True)
class WeightedNormParams:
    """Decay rate eta of the spike envelope used by the weighted sup norm.

    `envelope_floor` caps the amplification far from every spike, where the
    envelope underflows the solver's roundoff floor and the sup would
    otherwise measure linear-algebra noise instead of the correction."""

    eta: float = 0.75
    envelope_floor: float = 1e-6

    def __post_init__(self):
        if not (0.5 < self.eta < 1.0):
            raise ValueError("eta must lie in (1/2, 1)")
        if not (0 <= self.envelope_floor < 1e-2):
            raise ValueError("envelope_floor must be small and nonnegative")

    def check_admissible(self, holder_sigma, eta_bar=None):
        """eta + sigma > 1, (1+sigma) eta > 1, and eta above the potential's
        decay certificate."""
        problems = []
        if self.eta + holder_sigma <= 1.0:
            problems.append("eta + sigma <= 1")
        if (1.0 + holder_sigma) * self.eta <= 1.0:
            problems.append("(1+sigma)*eta <= 1")
        if eta_bar is not None and self.eta <= eta_bar:
            problems.append("eta <= eta_bar of the potential")
        return problems


def envelope(config: Configuration, grid: Grid, params: WeightedNormParams) -> Field:
    vals = kernels.envelope_sum(grid.coords(), config.points, params.eta)
    return Field(grid, vals)


def weighted_norm(h: Field, config: Configuration,
                  params: WeightedNormParams = WeightedNormParams()) -> float:
    """sup |h(x)| / sum_i exp(-eta |x - Q_i|) over the grid nodes."""
    w = kernels.envelope_sum(h.grid.coords(), config.points, params.eta)
    return float(np.max(np.abs(h.flat) / np.maximum(w, params.envelope_floor)))


# ---------------------------------------------------------------------------
# discretely exact single bump and lattice ansatz
# ---------------------------------------------------------------------------

_BUMP_CACHE = {}


def discrete_bump(gs: GroundState, grid: Grid) -> Field:
    """Single bump centered at the origin node solving the *discrete*
    equation Lap_h u - u + f(u) = 0 exactly (to 1e-12).

    Lattice translates of this field are then discretely exact single-spike
    solutions, so projected corrections measure spike interaction and the
    potential term rather than discretization error."""
    key = (id(gs), grid)
    cached = _BUMP_CACHE.get(key)
    if cached is not None:
        return cached
    nl = gs.nonlinearity
    u = build_ansatz(Configuration(np.zeros((1, grid.dim)), 1.0), gs, grid).flat.copy()

    def symmetrize(vec):
        # the bump is even in every axis; projecting out the odd components
        # removes the translation near-kernel that roundoff would otherwise
        # excite through the ill-conditioned Newton solves
        arr = vec.reshape(grid.shape)
        for ax in range(grid.dim):
            arr = 0.5 * (arr + np.flip(arr, axis=ax))
        return arr.ravel()

    u = symmetrize(u)
    # evaluation of Lap_h u alone carries ~eps*|u|/h^2 of roundoff
    tol = max(1e-12, 8.0 * np.finfo(float).eps * float(np.max(np.abs(u)))
              / grid.spacing ** 2)
    best = None
    for _ in range(40):
        mat = schrodinger_matrix(grid, np.zeros_like(u), 0.0, nl.fprime(u))
        res = mat @ u - nl.fprime(u) * u + nl.f(u)
        rn = float(np.max(np.abs(res)))
        if best is None or rn < best[0]:
            best = (rn, u)
        if rn < tol:
            break
        du = spla.spsolve(mat, -res)
        u = symmetrize(u + du)
    else:
        if best[0] > 10.0 * tol:
            raise RuntimeError("discrete bump Newton did not converge "
                               f"(residual {best[0]:.2e})")
        u = best[1]
    out = Field(grid, u)
    _BUMP_CACHE[key] = out
    return out


def lattice_shift(values: np.ndarray, shift_nodes):
    """Translate a row-major array by whole grid steps, filling with zeros."""
    out = values
    for ax, s in enumerate(np.atleast_1d(shift_nodes).astype(int)):
        if s == 0:
            continue
        shifted = np.zeros_like(out)
        src = [slice(None)] * out.ndim
        dst = [slice(None)] * out.ndim
        if s > 0:
            dst[ax], src[ax] = slice(s, None), slice(None, -s)
        else:
            dst[ax], src[ax] = slice(None, s), slice(-s, None)
        shifted[tuple(dst)] = out[tuple(src)]
        out = shifted
    return out


def discrete_ansatz(config: Configuration, gs: GroundState, grid: Grid) -> Field:
    """Sum of lattice translates of the discrete bump (spikes snapped to nodes)."""
    snapped = snap_to_grid(config, grid)
    _check_margin(snapped, grid)
    bump = discrete_bump(gs, grid).values
    h = grid.spacing
    total = np.zeros(grid.shape)
    for q in snapped.points:
        total += lattice_shift(bump, np.round(q / h).astype(int))
    return Field(grid, total)


# ---------------------------------------------------------------------------
# potential presets and hypothesis checks
# ---------------------------------------------------------------------------

PRESET_KINDS = ("algebraic", "sub_exponential", "signed_compact_negative", "zero")


@dataclass(frozen=True)
class Potential:
    """Preset decaying potential.  kinds:

    - algebraic:        amplitude * (1 + |x|^2)^(-m/2)
    - sub_exponential:  amplitude * exp(-rate |x|), rate < eta_bar
    - signed_compact_negative: algebraic plus a compactly supported negative
      bump of depth `depth` on |x - x0| < width
    - zero:             identically 0 (fails the slow-decay hypothesis)
    """

    kind: str
    parameters: dict = dc_field(default_factory=dict)
    eta_bar: float = 0.5

    def __post_init__(self):
        if self.kind not in PRESET_KINDS:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        if not (0 < self.eta_bar < 1):
            raise ValueError("eta_bar must lie in (0, 1)")

    def __call__(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.sqrt(np.sum(x ** 2, axis=1))
        p = self.parameters
        if self.kind == "zero":
            return np.zeros_like(r)
        if self.kind == "sub_exponential":
            return p.get("amplitude", 1.0) * np.exp(-p.get("rate", 0.3) * r)
        base = p.get("amplitude", 1.0) * (1.0 + r ** 2) ** (-p.get("m", 2.0) / 2.0)
        if self.kind == "signed_compact_negative":
            x0 = np.asarray(p.get("x0", np.zeros(x.shape[1])), dtype=float)
            d = np.sqrt(np.sum((x - x0[None, :]) ** 2, axis=1))
            width = p.get("width", 2.0)
            t = np.clip(d / width, 0.0, 1.0)
            base = base - p.get("depth", 1.0) * (1.0 - t * t) ** 2
        return base

    def sample(self, grid: Grid) -> Field:
        return Field(grid, self(grid.coords()))


def algebraic_potential(m=2.0, amplitude=1.0, eta_bar=0.5):
    return Potential("algebraic", {"m": m, "amplitude": amplitude}, eta_bar)


def sub_exponential_potential(rate=0.3, amplitude=1.0, eta_bar=0.5):
    return Potential("sub_exponential", {"rate": rate, "amplitude": amplitude}, eta_bar)


def signed_compact_potential(m=2.0, amplitude=1.0, depth=1.0, width=2.0,
                             x0=None, eta_bar=0.5):
    params = {"m": m, "amplitude": amplitude, "depth": depth, "width": width}
    if x0 is not None:
        params["x0"] = x0
    return Potential("signed_compact_negative", params, eta_bar)


def zero_potential():
    return Potential("zero", {}, 0.5)


@dataclass
class HypothesisReport:
    vanishes_at_infinity: bool
    slow_decay: bool
    growth_switch_radius: float
    first_violation: str | None

    @property
    def passed(self):
        return self.vanishes_at_infinity and self.slow_decay


def check_hypotheses(potential, eta_bar=None, dim=1, r_check=50.0) -> HypothesisReport:
    """Sample V along coordinate rays and diagonals; verify V -> 0 and that
    V * exp(eta_bar |x|) is eventually increasing (switch radius reported,
    required to settle by r_check/2).

    `potential` may be a Potential preset or any callable on (m, dim) arrays."""
    if eta_bar is None:
        eta_bar = getattr(potential, "eta_bar", 0.5)
    rays = []
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = 1.0
        rays.append(e)
        rays.append(-e)
    if dim > 1:
        rays.append(np.ones(dim) / math.sqrt(dim))
    t = np.linspace(0.5, r_check, 1000)
    violation = None
    vanish = True
    slow = True
    switch = 0.0
    for ray in rays:
        v = np.asarray(potential(t[:, None] * ray[None, :]), dtype=float)
        peak = np.max(np.abs(v))
        if abs(v[-1]) > max(1e-10, 0.02 * peak):
            vanish = False
            violation = violation or f"V does not decay along ray {ray}"
        g = v * np.exp(eta_bar * t)
        not_incr = np.nonzero(np.diff(g) <= 0)[0]
        ray_switch = float(t[not_incr[-1] + 1]) if len(not_incr) else float(t[0])
        switch = max(switch, ray_switch)
        if ray_switch > r_check / 2:
            slow = False
            violation = violation or (
                f"V*exp(eta_bar*|x|) still not increasing at r="
                f"{ray_switch:.1f} along ray {ray}")
    return HypothesisReport(vanish, slow, switch, violation)
