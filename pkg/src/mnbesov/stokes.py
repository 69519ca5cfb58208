"""Heat semigroup, Riesz transforms, Leray projector, pressure recovery and
the Duhamel operators ``A`` and ``B``.

Duhamel integrals use the exponential trapezoid rule: on each step the
integrand is linear in time and the kernel ``exp(-nu (t - s) |eta|^2)`` is
integrated exactly, which is second order and stable for any step.

Sign convention: ``B(v, w)(t) = -int_0^t S(t - s) P div(v (x) w)(s) ds`` so that
``u = S(t) u0 + B(u, u)`` is the velocity of the Navier-Stokes flow
``u_t + div(u (x) u) + grad P = nu Lap u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .besov import BesovIndex, Trajectory, block_norms, critical_sigma, z_norm
from .errors import (
    ConsistencyError,
    CorpusError,
    DomainError,
    PreconditionError,
    ShapeError,
    TimeGridError,
)
from .grid import Grid, RealField, divergence, forward, half, inverse, rforward, rinverse
from .littlewood_paley import INNER, FilterBank
from .report import Check

BLOCK_DECAY = INNER**2  # 9/16


@dataclass(frozen=True)
class SemigroupParams:
    nu: float = 1.0
    c_block: float = BLOCK_DECAY

    def __post_init__(self):
        if not (self.nu > 0 and math.isfinite(self.nu)):
            raise ValueError(f"viscosity must be positive, got {self.nu}")


def heat_symbol(grid: Grid, nu: float, t: float) -> np.ndarray:
    return np.exp(-nu * t * grid.eta_sq)


def heat(params: SemigroupParams, f: RealField, t: float) -> RealField:
    """``S(t) f``, the multiplier ``exp(-nu t |eta|^2)``."""
    if t < 0:
        raise DomainError(f"heat semigroup needs t >= 0, got {t}")
    if t == 0:
        return f
    return RealField(f.grid, inverse(forward(f.data, f.grid) * heat_symbol(f.grid, params.nu, t), f.grid))


def heat_block_decay_check(params: SemigroupParams, bank: FilterBank, f: RealField, l: int,
                           times: Sequence[float], p: Sequence, flavor: str = "physical",
                           slack: float = 1e-10) -> list[Check]:
    """``N_l(S(t) f) <= exp(-c nu t 2^{2l}) N_l(f)`` for each ``t``."""
    g = f.grid
    fh = forward(f.data, g) * bank.phi_l(l)
    states = np.stack([inverse(fh * heat_symbol(g, params.nu, t), g) for t in times])
    norms = block_norms(bank, states, p, flavor)[bank.index(l)]
    base = float(block_norms(bank, inverse(fh, g)[None], p, flavor)[bank.index(l), 0])
    out = []
    for t, val in zip(times, norms):
        bound = math.exp(-params.c_block * params.nu * t * 4.0**l) * base
        out.append(Check("heat_block_decay", float(val), bound, slack, {"l": l, "t": float(t)}))
    return out


def riesz_symbol(grid: Grid, j: int) -> np.ndarray:
    safe = np.where(grid.eta_abs > 0, grid.eta_abs, 1.0)
    return np.where(grid.eta_abs > 0, 1j * grid.eta[j] / safe, 0.0) * grid.resolved


def riesz(f: RealField, j: int) -> RealField:
    """``R_j f`` with symbol ``i eta_j / |eta|``; the zero mode and Nyquist modes map to 0."""
    if f.components != 1:
        raise ShapeError("Riesz transform acts on scalar fields")
    if not 0 <= j < f.grid.d:
        raise IndexError(f"axis {j} out of range")
    return RealField(f.grid, inverse(forward(f.data, f.grid) * riesz_symbol(f.grid, j), f.grid))


def leray_hat(uh: np.ndarray, grid: Grid) -> np.ndarray:
    """Apply ``delta_ij - eta_i eta_j / |eta|^2`` to coefficients ``(..., d, *n)``.

    Accepts full-lattice or half-lattice coefficients.  The zero mode passes
    through unchanged.
    """
    eta, eta_sq = grid.eta, grid.eta_sq
    if uh.shape[-1] != grid.n[-1]:
        eta, eta_sq = half(eta, grid), half(eta_sq, grid)
    safe = np.where(eta_sq > 0, eta_sq, 1.0)
    lead = uh.ndim - grid.d - 1
    dot = np.sum(eta * uh, axis=lead, keepdims=True)
    return uh - eta * (dot / safe)


def leray(u: RealField) -> RealField:
    g = u.grid
    if u.components != g.d:
        raise ShapeError(f"Leray projector needs {g.d} components, got {u.components}")
    return RealField(g, inverse(leray_hat(forward(u.data, g), g), g))


def relative_divergence(u: RealField) -> float:
    n = u.l2()
    return divergence(u).l2() / n if n > 0 else 0.0


def advection_hat(v: np.ndarray, w: np.ndarray, grid: Grid, dealias: bool = True) -> np.ndarray:
    """Half-lattice coefficients of ``div(v (x) w)_i = sum_j d_j (v_j w_i)``.

    ``v`` and ``w`` are physical arrays ``(..., d, *n)``.
    """
    lead = v.ndim - grid.d - 1
    eta = half(grid.eta * grid.resolved, grid)
    out = 0
    for j in range(grid.d):
        vj = np.take(v, j, axis=lead)
        out = out + 1j * eta[j] * rforward(np.expand_dims(vj, lead) * w, grid)
    if dealias:
        out = out * half(grid.dealiased, grid)
    return out


def pressure_from_velocity(u: RealField, params: SemigroupParams | None = None,
                           div_tol: float = 1e-8) -> RealField:
    """Mean-free ``P`` with ``grad P = -(I - Leray)[(u . grad) u]``."""
    g = u.grid
    if u.components != g.d:
        raise ShapeError("pressure needs a velocity field")
    if relative_divergence(u) > div_tol:
        raise ConsistencyError("velocity is not divergence free")
    nh = advection_hat(u.data, u.data, g, dealias=False)
    eta, eta_sq = half(g.eta, g), half(g.eta_sq, g)
    safe = np.where(eta_sq > 0, eta_sq, 1.0)
    ph = np.where(eta_sq > 0, 1j * np.sum(eta * nh, axis=0) / safe, 0.0)
    return RealField(g, rinverse(ph[None], g))


# -- exponential-trapezoid Duhamel quadrature --------------------------------

def _phi_weights(z: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For ``z = a h``: ``exp(-z)``, and per-unit-step weights of the left and
    right end values of a linear integrand against ``exp(-a (h - s))``."""
    E = np.exp(-z)
    small = z < 0.05
    zs = np.where(small, z, 0.0)
    # series: left = sum (-1)^k (k+1) z^k / (k+2)!, total = sum (-1)^k z^k / (k+1)!
    left_s = np.zeros_like(z)
    total_s = np.zeros_like(z)
    for k in range(10):
        zk = (-zs) ** k
        left_s += (k + 1) * zk / math.factorial(k + 2)
        total_s += zk / math.factorial(k + 1)
    zb = np.where(small, 1.0, z)
    total_b = -np.expm1(-zb) / zb
    left_b = (1.0 - E - zb * E) / zb**2
    left = np.where(small, left_s, left_b)
    total = np.where(small, total_s, total_b)
    return E, left, total - left


@dataclass(frozen=True, eq=False)
class DuhamelWeights:
    """Per-mode decay and end-point weights for one uniform time step."""

    decay: np.ndarray
    w_left: np.ndarray
    w_right: np.ndarray

    @classmethod
    def build(cls, grid: Grid, nu: float, h: float) -> "DuhamelWeights":
        E, left, right = _phi_weights(nu * h * half(grid.eta_sq, grid))
        return cls(E, h * left, h * right)


def duhamel_trajectory(grid: Grid, times: np.ndarray, nu: float, source_hat,
                       project: bool = True) -> np.ndarray:
    """``X(t_i) = int_0^{t_i} S(t_i - s) F(s) ds`` at every sample.

    ``source_hat(i0, i1)`` returns the half-lattice coefficients of ``F`` at
    samples ``i0..i1-1``.  Returns physical samples.
    """
    nt = times.size
    probe = source_hat(0, 1)
    c = probe.shape[1]
    out = np.zeros((nt, c) + grid.n)
    if nt == 1:
        return out
    wts = DuhamelWeights.build(grid, nu, float(times[1] - times[0]))
    acc = np.zeros(probe.shape[1:], dtype=complex)
    prev = probe[0]
    if project:
        prev = leray_hat(prev, grid)
    chunk = 32
    for start in range(1, nt, chunk):
        stop = min(start + chunk, nt)
        block = source_hat(start, stop)
        if project:
            block = leray_hat(block, grid)
        hats = np.empty((stop - start,) + probe.shape[1:], dtype=complex)
        for k in range(stop - start):
            cur = block[k]
            acc = wts.decay * acc + wts.w_left * prev + wts.w_right * cur
            hats[k] = acc
            prev = cur
        out[start:stop] = rinverse(hats, grid)
    return out


def _time_index(traj: Trajectory, t_eval: float) -> int:
    i = int(np.argmin(np.abs(traj.times - t_eval)))
    if abs(traj.times[i] - t_eval) > 1e-9 * max(1.0, abs(t_eval)):
        raise TimeGridError(f"t={t_eval} is not a sample time")
    return i


def aux_A_trajectory(params: SemigroupParams, g: Trajectory) -> Trajectory:
    """``A(g)(t) = int_0^t S(t - s) P g(s) ds`` at every sample time."""
    grid = g.grid
    if g.states.shape[1] != grid.d:
        raise ShapeError("auxiliary operator acts on vector trajectories")
    states = duhamel_trajectory(grid, g.times, params.nu,
                                lambda a, b: rforward(g.states[a:b], grid))
    return g.with_states(states)


def aux_A(params: SemigroupParams, g: Trajectory, t_eval: float) -> RealField:
    i = _time_index(g, t_eval)
    return aux_A_trajectory(params, g).state(i)


def _same_timeline(v: Trajectory, w: Trajectory):
    if v.grid != w.grid:
        raise ShapeError("trajectories live on different grids")
    if v.times.shape != w.times.shape or np.max(np.abs(v.times - w.times)) > 1e-12:
        raise TimeGridError("trajectories have different sample times")


def bilinear_trajectory(params: SemigroupParams, v: Trajectory, w: Trajectory,
                        dealias: bool = True) -> Trajectory:
    """``B(v, w)`` at every sample time."""
    _same_timeline(v, w)
    grid = v.grid
    states = duhamel_trajectory(
        grid, v.times, params.nu,
        lambda a, b: -advection_hat(v.states[a:b], w.states[a:b], grid, dealias))
    return v.with_states(states)


def bilinear_B(params: SemigroupParams, v: Trajectory, w: Trajectory, t_eval: float,
               dealias: bool = True) -> RealField:
    i = _time_index(v, t_eval)
    return bilinear_trajectory(params, v, w, dealias).state(i)


def heat_states(u0: RealField, nu: float, times: np.ndarray) -> np.ndarray:
    grid = u0.grid
    uh = rforward(u0.data, grid)
    esq = half(grid.eta_sq, grid)
    return np.stack([rinverse(uh * np.exp(-nu * t * esq), grid) for t in times])


@dataclass
class ConstantEstimate:
    K_hat: float
    ratios: list[float]
    descriptor: dict = field(default_factory=dict)

    @property
    def epsilon_threshold(self) -> float:
        return 1.0 / (4.0 * self.K_hat)


def estimate_bilinear_constant(params: SemigroupParams, pairs, idx: BesovIndex,
                               bank: FilterBank, descriptor: dict | None = None) -> ConstantEstimate:
    """``max ||B(v,w)||_Z / (||v||_Z ||w||_Z)`` over ``pairs`` of trajectories.

    Zero-norm pairs and exactly vanishing ``B`` are excluded; at least one
    nonzero ratio is required.
    """
    crit = critical_sigma(idx.p, idx.flavor)
    if abs(idx.sigma - crit) > 1e-12:
        raise PreconditionError(f"bilinear estimate needs the critical index {crit}, got {idx.sigma}")
    ratios = []
    for v, w in pairs:
        nv, nw = z_norm(v, idx, bank).total, z_norm(w, idx, bank).total
        if nv == 0 or nw == 0:
            continue
        nb = z_norm(bilinear_trajectory(params, v, w), idx, bank).total
        r = nb / (nv * nw)
        if r > 1e-12:
            ratios.append(r)
    if not ratios:
        raise CorpusError("corpus produced no nonzero bilinear ratio")
    return ConstantEstimate(max(ratios), ratios, dict(descriptor or {}, size=len(ratios),
                                                      nu=params.nu, **idx.describe()))
