"""Coupled cubic Schrodinger system with synchronized spike solutions.

Synchronized states (u, v) = (alpha w, gamma w) built on the scalar cubic
ground state, amplitude algebra and admissibility of the coupling beta,
the coupled linearized spectrum, and the coupled projected-solve /
reduced-energy / maximization pipeline mirroring the scalar modules."""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .ansatz import (Configuration, check_hypotheses, discrete_ansatz,
                     kernel_functions, snap_to_grid, validate_configuration)
from .grid import (ConvergenceError, Field, Grid, dirichlet_form, inner,
                   integrate, laplacian_matrix)
from .groundstate import GroundState, SpectrumError, radial_sector_eigs, \
    _sector_multiplicity
from .maximize import MaximizerRecord, pattern_search


# ---------------------------------------------------------------------------
# amplitude algebra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CouplingParams:
    mu1: float
    mu2: float
    beta: float
    alpha: float
    gamma: float
    admissible: bool


def synchronized_amplitudes(mu1, mu2, beta, beta_star=None) -> CouplingParams:
    """Amplitudes of the synchronized state (alpha w, gamma w):

        alpha = sqrt((mu2 - beta) / (mu1 mu2 - beta^2)),
        gamma = sqrt((mu1 - beta) / (mu1 mu2 - beta^2)).

    Admissible beta: (0, min(mu1, mu2)) or (max(mu1, mu2), inf), or negative
    beta above -beta_star when a numerically estimated beta_star is supplied
    (see estimate_beta_star); without one, negative beta is conservatively
    marked inadmissible."""
    if mu1 <= 0 or mu2 <= 0:
        raise ValueError("mu1 and mu2 must be positive")
    den = mu1 * mu2 - beta * beta
    if den == 0.0:
        raise ValueError(f"singular coupling: beta^2 = mu1*mu2 = {mu1 * mu2}")
    a2 = (mu2 - beta) / den
    g2 = (mu1 - beta) / den
    if a2 <= 0 or g2 <= 0:
        raise ValueError(
            f"no synchronized state: alpha^2={a2:.4g}, gamma^2={g2:.4g}")
    lo, hi = min(mu1, mu2), max(mu1, mu2)
    if 0 < beta < lo or beta > hi:
        admissible = True
    elif beta < 0 and beta_star is not None:
        admissible = beta > -beta_star
    else:
        admissible = False
    return CouplingParams(mu1=mu1, mu2=mu2, beta=beta,
                          alpha=math.sqrt(a2), gamma=math.sqrt(g2),
                          admissible=admissible)


def interaction_strength(params: CouplingParams) -> float:
    """A = mu1 alpha^4 + mu2 gamma^4 + 2 beta alpha^2 gamma^2, the prefactor
    of the two-spike interaction (times gamma_1 w(d))."""
    a2, g2 = params.alpha ** 2, params.gamma ** 2
    return params.mu1 * a2 ** 2 + params.mu2 * g2 ** 2 + \
        2.0 * params.beta * a2 * g2


# ---------------------------------------------------------------------------
# paired fields and the coupled operator
# ---------------------------------------------------------------------------

@dataclass
class PairField:
    u: Field
    v: Field

    def __post_init__(self):
        if self.u.grid is not self.v.grid and self.u.grid != self.v.grid:
            raise ValueError("components live on different grids")

    @property
    def grid(self):
        return self.u.grid

    def stacked(self):
        return np.concatenate([self.u.flat, self.v.flat])

    @classmethod
    def from_stacked(cls, grid, vec):
        n = grid.points_per_axis ** grid.dim
        return cls(Field(grid, vec[:n]), Field(grid, vec[n:]))

    def __add__(self, other):
        return PairField(self.u + other.u, self.v + other.v)

    def __sub__(self, other):
        return PairField(self.u - other.u, self.v - other.v)

    def __mul__(self, s):
        return PairField(self.u * s, self.v * s)

    __rmul__ = __mul__

    def sup_norm(self):
        return max(float(np.max(np.abs(self.u.values))),
                   float(np.max(np.abs(self.v.values))))


def coupled_residual(pair: PairField, a, b, delta, params: CouplingParams) -> PairField:
    """Component-wise residual of the system

        Lap u - (1 + delta a) u + mu1 u^3 + beta v^2 u = 0
        Lap v - (1 + delta b) v + mu2 v^3 + beta u^2 v = 0."""
    from . import kernels

    grid = pair.grid
    u, v = pair.u.values, pair.v.values
    av = a.sample(grid).values if hasattr(a, "sample") else a.values
    bv = b.sample(grid).values if hasattr(b, "sample") else b.values
    r1 = kernels.laplacian(u, grid.spacing) - (1.0 + delta * av) * u \
        + params.mu1 * u ** 3 + params.beta * v ** 2 * u
    r2 = kernels.laplacian(v, grid.spacing) - (1.0 + delta * bv) * v \
        + params.mu2 * v ** 3 + params.beta * u ** 2 * v
    return PairField(Field(grid, r1), Field(grid, r2))


# ---------------------------------------------------------------------------
# coupled linearized spectrum
# ---------------------------------------------------------------------------

@dataclass
class CoupledSpectrumReport:
    eigenvalues: list              # (value, sector, multiplicity, branch)
    positive_count: int
    kernel_dim: int
    nondegenerate: bool
    branch_coefficients: tuple     # (b1, b2) of the 2x2 coupling block


def coupling_block(params: CouplingParams):
    """Constant 2x2 block of the linearization around (alpha w, gamma w):
    the coupled operator is  Lap - 1 + B w^2  with

        B = [[3 mu1 a^2 + beta g^2, 2 beta a g],
             [2 beta a g, 3 mu2 g^2 + beta a^2]]."""
    al, ga, be = params.alpha, params.gamma, params.beta
    return np.array([[3.0 * params.mu1 * al ** 2 + be * ga ** 2,
                      2.0 * be * al * ga],
                     [2.0 * be * al * ga,
                      3.0 * params.mu2 * ga ** 2 + be * al ** 2]])


def coupled_spectrum(params: CouplingParams, gs: GroundState, n_modes=4,
                     kernel_tol=1e-4, h=0.01,
                     max_sector=3) -> CoupledSpectrumReport:
    """Spectrum of the coupled linearized operator around (alpha w, gamma w).

    The 2x2 block B is constant in x, so an orthogonal rotation splits the
    operator exactly into the scalar branches  Lap - 1 + b_i w^2  with b_i
    the eigenvalues of B; each branch is solved per angular sector."""
    if gs.nonlinearity.p != 3.0 or gs.nonlinearity.a != 0.0:
        raise ValueError("coupled system is built on the cubic ground state")
    bmat = coupling_block(params)
    b1, b2 = np.linalg.eigvalsh(bmat)

    entries = []
    kernel_dim = 0
    n_sectors = 2 if gs.dim == 1 else max_sector + 1
    for branch, coef in enumerate((b1, b2)):
        def potential(r, c=coef):
            return c * gs.evaluate(r) ** 2 - 1.0
        for m in range(n_sectors):
            try:
                vals, _, _ = radial_sector_eigs(gs.dim, potential, gs.r_max,
                                                h, m)
            except SpectrumError:
                continue
            mult = _sector_multiplicity(gs.dim, m)
            for lam in vals[:n_modes]:
                entries.append((float(lam), m, mult, branch))
                if abs(lam) < kernel_tol:
                    kernel_dim += mult
    entries.sort(key=lambda t: -t[0])
    positive = sum(mult for lam, _, mult, _ in entries if lam > kernel_tol)
    return CoupledSpectrumReport(eigenvalues=entries,
                                 positive_count=positive,
                                 kernel_dim=kernel_dim,
                                 nondegenerate=(kernel_dim == gs.dim),
                                 branch_coefficients=(float(b1), float(b2)))


def estimate_beta_star(mu1, mu2, gs: GroundState, tol=1e-4) -> float:
    """Numerical estimate of beta* bounding the admissible negative range:
    the infimum |beta| at which the coupled spectrum degenerates
    (kernel_dim > dim at the crossing, detected as a jump in the positive
    eigenvalue count while bisecting over beta in (-sqrt(mu1 mu2), 0))."""
    left = -math.sqrt(mu1 * mu2) * (1.0 - 1e-6)

    def positives(beta):
        params = synchronized_amplitudes(mu1, mu2, beta)
        return coupled_spectrum(params, gs, h=0.02).positive_count

    base = positives(-1e-3)
    lo, hi = left, -1e-3          # positives(lo) > base expected
    if positives(lo) == base:
        raise SpectrumError("no spectral transition found: beta* at or "
                            "beyond the singular coupling")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if positives(mid) == base:
            hi = mid
        else:
            lo = mid
    return -0.5 * (lo + hi)


def weighted_hypothesis_check(a, b, params: CouplingParams, eta_bar=None,
                              dim=1, r_check=50.0):
    """Slow-decay hypothesis for the system: the weighted combination
    alpha^2 a(x) + gamma^2 b(x) must dominate exp(-eta_bar |x|)."""
    if eta_bar is None:
        eta_bar = max(getattr(a, "eta_bar", 0.5), getattr(b, "eta_bar", 0.5))
    a2, g2 = params.alpha ** 2, params.gamma ** 2

    def combined(x):
        return a2 * a(x) + g2 * b(x)

    return check_hypotheses(combined, eta_bar=eta_bar, dim=dim,
                            r_check=r_check)


# ---------------------------------------------------------------------------
# coupled ansatz, projected solve, energy
# ---------------------------------------------------------------------------

def coupled_ansatz(config: Configuration, params: CouplingParams,
                   gs: GroundState, grid: Grid) -> PairField:
    """Synchronized multi-spike ansatz (alpha w_Q, gamma w_Q) on exact
    lattice translates of the discrete bump."""
    base = discrete_ansatz(config, gs, grid)
    return PairField(base * params.alpha, base * params.gamma)


def _coupled_jacobian(grid, u, v, av, bv, delta, params):
    lap = laplacian_matrix(grid)
    d11 = -(1.0 + delta * av) + 3.0 * params.mu1 * u ** 2 + params.beta * v ** 2
    d22 = -(1.0 + delta * bv) + 3.0 * params.mu2 * v ** 2 + params.beta * u ** 2
    cross = 2.0 * params.beta * u * v
    a11 = lap + sp.diags(d11)
    a22 = lap + sp.diags(d22)
    a12 = sp.diags(cross)
    return sp.bmat([[a11, a12], [a12, a22]], format="csc")


@dataclass
class CoupledCorrectionResult:
    phi: PairField
    multipliers: np.ndarray
    newton_iterations: int
    final_residual: float
    config: Configuration
    base: PairField

    def corrected(self) -> PairField:
        return self.base + self.phi


def coupled_solve_projected(config: Configuration, a, b, delta,
                            params: CouplingParams, gs: GroundState,
                            grid: Grid, tol=1e-10,
                            max_iter=30) -> CoupledCorrectionResult:
    """Projected Newton solve of the coupled system: correction pair
    orthogonal to the synchronized kernels (alpha Z_ij, gamma Z_ij)."""
    config = snap_to_grid(config, grid)
    margin = grid.half_width - float(np.max(np.abs(config.points)))
    need = math.log(1.0 / (tol * grid.spacing ** 2))
    if margin < need:
        raise ConvergenceError(
            f"spikes too close to the boundary: margin {margin:.1f} < "
            f"{need:.1f} needed for tol {tol:.1e} at h={grid.spacing}")

    base = coupled_ansatz(config, params, gs, grid)
    zs = kernel_functions(config, gs, grid)
    al, ga = params.alpha, params.gamma
    scale = math.hypot(al, ga)
    # stacked constraint vectors with trapezoid quadrature weights
    tw = grid.trapezoid_weights()
    n = tw.size
    m = len(zs)
    cmat = np.empty((2 * n, m))
    for j, z in enumerate(zs):
        cmat[:n, j] = (al / scale) * z.flat
        cmat[n:, j] = (ga / scale) * z.flat
    wcmat = np.concatenate([tw, tw])[:, None] * cmat

    av = (a.sample(grid) if hasattr(a, "sample") else a).flat
    bv = (b.sample(grid) if hasattr(b, "sample") else b).flat

    pair = PairField(base.u, base.v)
    phi = np.zeros(2 * n)
    mults = np.zeros(m)
    iters = 0
    for iters in range(max_iter + 1):
        res = coupled_residual(pair, a, b, delta, params)
        rvec = res.stacked()
        # residual minus its span along the constraints
        coef = np.linalg.lstsq(cmat, rvec, rcond=None)[0]
        defect = rvec - cmat @ coef
        rn = float(np.max(np.abs(defect)))
        if rn <= tol:
            mults = coef
            break
        if iters == max_iter:
            raise ConvergenceError("coupled projected Newton did not "
                                   "converge", residual=rn)
        jac = _coupled_jacobian(grid, pair.u.flat, pair.v.flat, av, bv,
                                delta, params)
        aug = sp.bmat([[jac, sp.csc_matrix(cmat)],
                       [sp.csc_matrix(wcmat.T), None]], format="csc")
        rhs = np.concatenate([-rvec, -(wcmat.T @ phi)])
        sol = spla.spsolve(aug, rhs)
        step = 1.0
        for _ in range(6):
            cand = phi + step * sol[:2 * n]
            cand_pair = PairField.from_stacked(grid, base.stacked() + cand)
            cr = coupled_residual(cand_pair, a, b, delta, params).stacked()
            cc = np.linalg.lstsq(cmat, cr, rcond=None)[0]
            if np.max(np.abs(cr - cmat @ cc)) < rn:
                break
            step *= 0.5
        phi = cand
        pair = cand_pair
    return CoupledCorrectionResult(
        phi=PairField.from_stacked(grid, phi), multipliers=mults,
        newton_iterations=iters, final_residual=rn, config=config, base=base)


def coupled_energy(pair: PairField, a, b, delta, params: CouplingParams) -> float:
    """J(u, v) = 1/2 int |grad u|^2 + (1 + delta a) u^2
                      + |grad v|^2 + (1 + delta b) v^2
               - 1/4 int mu1 u^4 + mu2 v^4 + 2 beta u^2 v^2."""
    grid = pair.grid
    u, v = pair.u, pair.v
    av = (a.sample(grid) if hasattr(a, "sample") else a).values
    bv = (b.sample(grid) if hasattr(b, "sample") else b).values
    uu, vv = u.values, v.values
    quad = 0.5 * math.fsum([
        dirichlet_form(u), dirichlet_form(v),
        integrate(Field(grid, (1.0 + delta * av) * uu * uu)),
        integrate(Field(grid, (1.0 + delta * bv) * vv * vv))])
    quart = 0.25 * math.fsum([
        params.mu1 * integrate(Field(grid, uu ** 4)),
        params.mu2 * integrate(Field(grid, vv ** 4)),
        2.0 * params.beta * integrate(Field(grid, uu * uu * vv * vv))])
    return quad - quart


def coupled_bump_energy(params: CouplingParams, gs: GroundState,
                        grid: Grid) -> float:
    """I(U, V): coupled energy of a single synchronized bump at the origin,
    grid-consistently (zero potential, delta = 0)."""
    from .ansatz import zero_potential

    cfg = Configuration(np.zeros((1, grid.dim)), 1.0)
    pair = coupled_ansatz(cfg, params, gs, grid)
    z = zero_potential()
    return coupled_energy(pair, z, z, 0.0, params)


def coupled_reduced_energy(config: Configuration, a, b, delta,
                           params: CouplingParams, gs: GroundState,
                           grid: Grid) -> float:
    result = coupled_solve_projected(config, a, b, delta, params, gs, grid)
    return coupled_energy(result.corrected(), a, b, delta, params)


@dataclass
class CoupledInteractionRow:
    d: float
    excess: float
    predicted: float
    ratio: float


def coupled_interaction_study(distances, params: CouplingParams,
                              gs: GroundState, grid: Grid, gamma1: float):
    """J(two synchronized bumps) - 2 I(U,V) against the prediction
    -A gamma_1 w(d), A = mu1 a^4 + mu2 g^4 + 2 beta a^2 g^2."""
    from .ansatz import zero_potential

    z = zero_potential()
    i_uv = coupled_bump_energy(params, gs, grid)
    amp = interaction_strength(params)
    rows = []
    for d in distances:
        half = round(d / 2.0 / grid.spacing) * grid.spacing
        pts = np.zeros((2, grid.dim))
        pts[0, 0], pts[1, 0] = -half, half
        pair = coupled_ansatz(Configuration(pts, min(distances) - 0.5), params,
                              gs, grid)
        excess = coupled_energy(pair, z, z, 0.0, params) - 2.0 * i_uv
        pred = -amp * gamma1 * float(gs.evaluate(2.0 * half))
        rows.append(CoupledInteractionRow(d=2.0 * half, excess=excess,
                                          predicted=pred,
                                          ratio=excess / pred))
    return rows


# ---------------------------------------------------------------------------
# coupled maximization and polish
# ---------------------------------------------------------------------------

@dataclass
class CoupledPolishReport:
    solution: PairField
    residual: float
    symmetry_defect: float         # sup |u - v| (symmetric case diagnostic)


def coupled_polish(config: Configuration, a, b, delta,
                   params: CouplingParams, gs: GroundState, grid: Grid,
                   tol=1e-10, max_iter=30) -> CoupledPolishReport:
    """Unconstrained coupled Newton from the corrected synchronized ansatz."""
    result = coupled_solve_projected(config, a, b, delta, params, gs, grid)
    pair = result.corrected()
    av = (a.sample(grid) if hasattr(a, "sample") else a).flat
    bv = (b.sample(grid) if hasattr(b, "sample") else b).flat
    vec = pair.stacked()
    for _ in range(max_iter):
        res = coupled_residual(PairField.from_stacked(grid, vec), a, b,
                               delta, params).stacked()
        rn = float(np.max(np.abs(res)))
        if rn <= tol:
            break
        jac = _coupled_jacobian(grid, vec[:vec.size // 2],
                                vec[vec.size // 2:], av, bv, delta, params)
        dv = spla.spsolve(jac, -res)
        step = 1.0
        for _ in range(6):
            cand = vec + step * dv
            cr = coupled_residual(PairField.from_stacked(grid, cand), a, b,
                                  delta, params).stacked()
            if np.max(np.abs(cr)) < rn:
                break
            step *= 0.5
        else:
            raise ConvergenceError("coupled polish stalled (no nearby "
                                   "genuine solution)", residual=rn)
        vec = cand
    else:
        raise ConvergenceError("coupled polish did not converge", residual=rn)
    pair = PairField.from_stacked(grid, vec)
    defect = float(np.max(np.abs(pair.u.values - pair.v.values)))
    return CoupledPolishReport(solution=pair, residual=rn,
                               symmetry_defect=defect)


def coupled_reduce_and_maximize(k, a, b, delta, params: CouplingParams,
                                gs: GroundState, grid: Grid,
                                search_radius=None, n_restarts=2, rho=10.0,
                                seed=0):
    """Coupled analogue of the scalar maximization: lattice pattern search
    on the coupled reduced energy, then an unconstrained coupled polish.
    Returns (MaximizerRecord, CoupledPolishReport)."""
    h = grid.spacing
    if search_radius is None:
        need = math.log(1.0 / (1e-10 * h * h))
        search_radius = h * math.floor((grid.half_width - need - 1.0) / h)
        if delta == 0.0:
            search_radius = min(search_radius, 3.0 * rho)

    def objective(points):
        return coupled_reduced_energy(Configuration(points, rho), a, b,
                                      delta, params, gs, grid)

    rng = np.random.default_rng(seed)
    starts = [np.zeros((k, grid.dim))]
    starts[0][:, 0] = (np.arange(k) - (k - 1) / 2.0) * (rho + 1.0)
    while len(starts) < n_restarts:
        for _ in range(200):
            cand = rng.uniform(-search_radius, search_radius,
                               size=(k, grid.dim))
            cand = np.round(cand / h) * h
            if validate_configuration(cand, rho)[0] and \
                    np.max(np.abs(cand)) <= search_radius:
                starts.append(cand)
                break
        else:
            break

    best = None
    last_error = None
    used = 0
    for start in starts:
        try:
            pts, val, _ = pattern_search(objective, start, rho,
                                         search_radius, h)
        except (ConvergenceError, ValueError) as exc:
            last_error = exc
            continue
        used += 1
        if best is None or val > best[1]:
            best = (pts, val)
    if best is None:
        raise RuntimeError(f"coupled maximization failed "
                           f"(last error: {last_error})")
    pts, val = best
    config = snap_to_grid(Configuration(pts, rho), grid)
    result = coupled_solve_projected(config, a, b, delta, params, gs, grid)
    margin = validate_configuration(pts, rho)[1]["margin"]
    boundary = float(search_radius - np.max(np.abs(pts)))
    record = MaximizerRecord(
        config=config, value=val, interior_margin=margin,
        boundary_distance=boundary,
        multiplier_max=float(np.max(np.abs(result.multipliers))),
        restarts_used=used, supremum_flag=boundary < 2.0)
    polish = coupled_polish(config, a, b, delta, params, gs, grid)
    return record, polish
