"""Picard iteration for the mild Navier-Stokes equation ``u = S(t) u0 + B(u, u)``
and an independent integrating-factor RK4 integrator used as an oracle.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .besov import PHYSICAL, BesovIndex, Trajectory, ZNorm, critical_sigma, z_norm
from .errors import (
    BoundViolation,
    ConfigError,
    DivergenceError,
    PreconditionError,
    StepSizeError,
)
from .grid import RealField, divergence, half, rforward, rinverse
from .littlewood_paley import FilterBank, build_filter_bank
from .report import Check
from .stokes import (
    SemigroupParams,
    advection_hat,
    bilinear_trajectory,
    heat_states,
    heat_symbol,
    leray,
    leray_hat,
    relative_divergence,
)

SOLENOIDAL_TOL = 1e-10
NORM_BOUND_SLACK = 1e-6


@dataclass(frozen=True)
class SolverConfig:
    nu: float = 1.0
    T: float = 1.0
    n_t: int = 256
    idx: BesovIndex | None = None
    K_hat: float = 1.0
    theta: float = 0.5
    epsilon: float | None = None
    max_iters: int = 50
    tol_residual: float = 1e-10
    dealias: bool = True

    def __post_init__(self):
        if not self.nu > 0:
            raise ConfigError("viscosity must be positive")
        if not (self.T > 0 and self.n_t >= 1):
            raise ConfigError("need T > 0 and at least one time step")
        if not self.K_hat > 0:
            raise ConfigError("bilinear constant must be positive")
        if not self.tol_residual > 0:
            raise ConfigError("residual tolerance must be positive")
        if not 0 < self.theta < 1:
            raise ConfigError("theta must lie in (0, 1)")
        if self.epsilon is not None and not 0 < self.epsilon < 1.0 / (4.0 * self.K_hat):
            raise ConfigError(f"epsilon must lie in (0, 1/(4K)) = (0, {1 / (4 * self.K_hat):.6g})")

    @property
    def eps(self) -> float:
        """Smallness budget; defaults to ``theta / (4 K)``."""
        return self.epsilon if self.epsilon is not None else self.theta / (4.0 * self.K_hat)

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.T, self.n_t + 1)

    @property
    def params(self) -> SemigroupParams:
        return SemigroupParams(self.nu)

    def index_for(self, d: int) -> BesovIndex:
        if self.idx is not None:
            return self.idx
        p = (2.0,) * d
        return BesovIndex(critical_sigma(p), p, 2.0, PHYSICAL)


@dataclass
class SolverState:
    iterate: Trajectory
    z0: Trajectory
    residual_history: list[float] = field(default_factory=list)
    z_norm_history: list[float] = field(default_factory=list)
    step_history: list[float] = field(default_factory=list)

    def contraction_ratios(self, floor: float = 0.0) -> list[float]:
        """``||u^{n+1} - u^n||_Z / ||u^n - u^{n-1}||_Z`` while the step exceeds ``floor``."""
        s = self.step_history
        return [s[i + 1] / s[i] for i in range(len(s) - 1) if s[i] > floor and s[i + 1] > floor]


@dataclass
class SolveResult:
    solution: Trajectory
    state: SolverState
    converged: bool
    iterations: int
    z0_norm: ZNorm
    u_norm: ZNorm
    within_budget: bool
    seconds: float

    def norm_bound_check(self) -> Check:
        return Check("picard_norm_bound", self.u_norm.total, 2.0 * self.z0_norm.total,
                     NORM_BOUND_SLACK)


def check_solenoidal(u0: RealField, project: bool = False) -> RealField:
    if u0.components != u0.grid.d:
        raise PreconditionError("initial velocity must be a vector field")
    if relative_divergence(u0) > SOLENOIDAL_TOL:
        if not project:
            raise PreconditionError("initial data is not divergence free; pass project=True to apply Leray")
        u0 = leray(u0)
    return u0


def heat_trajectory(u0: RealField, cfg: SolverConfig, project: bool = False) -> Trajectory:
    """``S(t_i) u0`` on the configured time grid."""
    u0 = check_solenoidal(u0, project)
    times = cfg.times
    return Trajectory(u0.grid, times, heat_states(u0, cfg.nu, times), cfg.nu)


def picard_solve(u0: RealField, cfg: SolverConfig, bank: FilterBank | None = None,
                 project: bool = False, track_norms: bool = False) -> SolveResult:
    """Iterate ``u^{n+1} = z0 + B(u^n, u^n)`` from ``u^0 = z0``.

    The residual is ``||u^{n+1} - u^n||_Z / ||z0||_Z``; iteration stops once it
    falls below ``tol_residual``.  Three consecutive increases raise
    :class:`DivergenceError`.  When ``||z0||_Z`` is within the budget, a
    converged solution must satisfy ``||u||_Z <= 2 ||z0||_Z``.
    ``track_norms`` also records ``||u^n||_Z`` for every iterate.
    """
    t0 = time.perf_counter()
    bank = bank or build_filter_bank(u0.grid)
    idx = cfg.index_for(u0.grid.d)
    z0 = heat_trajectory(u0, cfg, project)
    z0n = z_norm(z0, idx, bank)
    state = SolverState(z0, z0)
    u = z0
    converged = False
    rises = 0
    it = 0
    if z0n.total == 0:
        converged, it = True, 1
        state.residual_history.append(0.0)
        state.step_history.append(0.0)
    while not converged and it < cfg.max_iters:
        it += 1
        nxt = z0.with_states(z0.states + bilinear_trajectory(cfg.params, u, u, cfg.dealias).states)
        step = z_norm(nxt - u, idx, bank).total
        res = step / z0n.total
        if state.step_history and step > state.step_history[-1]:
            rises += 1
        else:
            rises = 0
        state.step_history.append(step)
        state.residual_history.append(res)
        if track_norms:
            state.z_norm_history.append(z_norm(nxt, idx, bank).total)
        u = nxt
        state.iterate = u
        if rises >= 3:
            raise DivergenceError(f"Picard step grew for 3 consecutive iterations (residual {res:.3e})")
        converged = res <= cfg.tol_residual
    un = z_norm(u, idx, bank)
    if not track_norms:
        state.z_norm_history.append(un.total)
    within = z0n.total <= cfg.eps * (1 + 1e-9)
    result = SolveResult(u, state, converged, it, z0n, un, within, time.perf_counter() - t0)
    if converged and within and not result.norm_bound_check().holds:
        raise BoundViolation(f"||u||_Z = {un.total:.6g} exceeds 2 ||z0||_Z = {2 * z0n.total:.6g}")
    return result


def trajectory_divergence(traj: Trajectory) -> float:
    """``max_t ||div u(t)||_2 / ||u(t)||_2``."""
    worst = 0.0
    for i in range(len(traj)):
        u = traj.state(i)
        n = u.l2()
        if n > 0:
            worst = max(worst, divergence(u).l2() / n)
    return worst


def continuity_check(u0: RealField, u0_tilde: RealField, cfg: SolverConfig,
                     bank: FilterBank | None = None, tol: float = 1e-3,
                     solved: SolveResult | None = None) -> Check:
    """Lipschitz bound ``||z - z~||_Z <= (1 - 4 K eps)^-1 ||z0 - z~0||_Z``.

    ``eps`` is the larger measured ``||z0||_Z`` of the two data.  ``solved`` may
    carry an existing solve of ``u0`` under the same configuration.
    """
    bank = bank or build_filter_bank(u0.grid)
    idx = cfg.index_for(u0.grid.d)
    a = solved if solved is not None else picard_solve(u0, cfg, bank)
    b = picard_solve(u0_tilde, cfg, bank)
    eps = max(a.z0_norm.total, b.z0_norm.total)
    if not 4 * cfg.K_hat * eps < 1:
        raise PreconditionError(f"measured eps = {eps:.6g} is outside the budget 1/(4K)")
    top = z_norm(a.solution - b.solution, idx, bank).total
    base = z_norm(a.state.z0 - b.state.z0, idx, bank).total
    ratio = top / base if base > 0 else 0.0
    bound = 1.0 / (1.0 - 4.0 * cfg.K_hat * eps)
    return Check("lipschitz", ratio, bound, tol,
                 {"eps": eps, "K_hat": cfg.K_hat, "distance": top, "data_distance": base})


def rk4_oracle(u0: RealField, cfg: SolverConfig, substeps: int = 1, cfl: float = 2.5,
               project: bool = False) -> Trajectory:
    """Integrating-factor RK4 for the spectral velocity equation.

    ``d/dt u^ = -nu |eta|^2 u^ - P (i eta . (u (x) u)^)`` with the viscous part
    absorbed exactly.  Samples are returned on the configured time grid.
    """
    u0 = check_solenoidal(u0, project)
    grid = u0.grid
    times = cfg.times
    h = (times[1] - times[0]) / substeps if times.size > 1 else 0.0
    kmax = max(math.pi * n / L for n, L in zip(grid.n, grid.L))
    half_step = half(heat_symbol(grid, cfg.nu, h / 2), grid)

    def rhs(uh):
        u = rinverse(uh, grid)
        return -leray_hat(advection_hat(u, u, grid, cfg.dealias), grid)

    uh = rforward(u0.data, grid)
    out = np.empty((times.size,) + u0.data.shape)
    out[0] = u0.data
    for i in range(1, times.size):
        for _ in range(substeps):
            umax = float(np.max(np.sqrt(np.sum(rinverse(uh, grid) ** 2, axis=0))))
            if h * umax * kmax > cfl:
                raise StepSizeError(f"step {h:.3g} violates the advective stability bound")
            E = half_step
            k1 = rhs(uh)
            k2 = rhs(E * (uh + 0.5 * h * k1))
            k3 = rhs(E * uh + 0.5 * h * k2)
            k4 = rhs(E * E * uh + h * E * k3)
            uh = E * E * uh + (h / 6.0) * (E * E * k1 + 2 * E * (k2 + k3) + k4)
        out[i] = rinverse(uh, grid)
    return Trajectory(grid, times, out, cfg.nu)


def linf_l2_distance(a: Trajectory, b: Trajectory) -> float:
    """``max_t ||a(t) - b(t)||_2``."""
    g = a.grid
    diff = a.states - b.states
    return float(np.sqrt(np.max(np.sum(diff**2, axis=tuple(range(1, diff.ndim))) * g.cell_volume)))
