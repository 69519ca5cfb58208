"""Mixed-norm Besov and Fourier-Besov norms, Bernstein and embedding checks,
and Chemin-Lerner time-space norms of trajectories.

Both flavors share one dyadic structure: a per-block size ``N_l`` followed by
``|| 2**(l*sigma) N_l ||_{l^q}``.  The physical flavor measures
``||Delta_l g||_{L^p}`` on samples; the frequency flavor measures
``||phi_l g^||_{L^p}`` on the frequency lattice.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    CriticalityError,
    EmptyTrajectoryError,
    InvalidExponentError,
    PreconditionError,
    ShapeError,
    SupportError,
)
from .grid import Grid, RealField, forward, half, inverse, rforward, rinverse
from .lebesgue import check_exponent, magnitude, mixed_norm_array, reciprocal
from .littlewood_paley import INNER, OUTER, FilterBank
from .report import Check

PHYSICAL = "physical"
FREQUENCY = "frequency"
FLAVORS = (PHYSICAL, FREQUENCY)

# Bernstein constant: calibration.bernstein_sweep on seed 0 (512^2 grid, period
# 32 pi, ball and annulus families) measures 1.336; frozen with margin.
FROZEN_BERNSTEIN_C = 1.5


@dataclass(frozen=True)
class BesovIndex:
    sigma: float
    p: tuple
    q: float = 2.0
    flavor: str = PHYSICAL

    def __post_init__(self):
        object.__setattr__(self, "p", check_exponent(self.p))
        if not self.q >= 1:
            raise InvalidExponentError(f"summability exponent must be >= 1, got {self.q}")
        if self.flavor not in FLAVORS:
            raise ValueError(f"flavor must be one of {FLAVORS}")

    def shifted(self, ds: float) -> "BesovIndex":
        return BesovIndex(self.sigma + ds, self.p, self.q, self.flavor)

    def describe(self) -> dict:
        return {"sigma": self.sigma, "p": ["inf" if math.isinf(v) else v for v in self.p],
                "q": "inf" if math.isinf(self.q) else self.q, "flavor": self.flavor}


def critical_sigma(p: Sequence, flavor: str = PHYSICAL) -> float:
    """Scaling-critical regularity for the given exponent and flavor."""
    r = reciprocal(check_exponent(p))
    total = float(r.sum()) if flavor == PHYSICAL else float(np.sum(1.0 - r))
    if not total > 0:
        what = "sum 1/p_i" if flavor == PHYSICAL else "sum (1 - 1/p_i)"
        raise CriticalityError(f"{what} must be positive, got {total}")
    return -1.0 + total


def lq_norm(seq: np.ndarray, q: float, axis: int = 0) -> np.ndarray:
    seq = np.abs(np.asarray(seq, dtype=float))
    if math.isinf(q):
        return seq.max(axis=axis)
    scale = seq.max(axis=axis, keepdims=True)
    safe = np.where(scale > 0, scale, 1.0)
    return np.sum((seq / safe) ** q, axis=axis) ** (1.0 / q) * np.squeeze(safe * (scale > 0), axis=axis)


def block_norms(bank: FilterBank, data: np.ndarray, p: Sequence, flavor: str) -> np.ndarray:
    """``N_l`` for every level; ``data`` is ``(..., c, *n)``, result ``(nlevels, ...)``."""
    grid = bank.grid
    p = check_exponent(p, grid.d)
    lead = data.ndim - grid.d - 1
    if flavor == FREQUENCY:
        gh = forward(data, grid)
        phi = bank.phi.reshape((bank.phi.shape[0],) + (1,) * lead + grid.n)
        mag = magnitude(gh, axis=lead)
        return mixed_norm_array(phi * mag[None], p, grid.freq_spacing)
    gh = rforward(data, grid)
    out = np.zeros((bank.phi.shape[0],) + data.shape[:lead])
    for i in range(bank.phi.shape[0]):
        filtered = gh * half(bank.phi[i], grid)
        if not filtered.any():
            continue
        blk = rinverse(filtered, grid)
        out[i] = mixed_norm_array(magnitude(blk, axis=lead), p, grid.spacing)
    return out


def weighted_blocks(bank: FilterBank, g: RealField, idx: BesovIndex) -> dict[int, float]:
    """Per-level ``2**(l*sigma) N_l`` (the sequence whose l^q norm is the Besov norm)."""
    n = block_norms(bank, g.data, idx.p, idx.flavor)
    return {l: float(2.0 ** (l * idx.sigma) * n[i]) for i, l in enumerate(bank.levels)}


def _levels(bank: FilterBank) -> np.ndarray:
    return np.arange(bank.l_min, bank.l_max + 1, dtype=float)


def norm(g: RealField, idx: BesovIndex, bank: FilterBank) -> float:
    if g.grid != bank.grid:
        raise ShapeError("field grid differs from filter bank grid")
    n = block_norms(bank, g.data, idx.p, idx.flavor)
    return float(lq_norm(2.0 ** (_levels(bank) * idx.sigma) * n, idx.q))


def besov_norm(g: RealField, idx: BesovIndex, bank: FilterBank) -> float:
    """Homogeneous mixed-norm Besov norm over the resolved band."""
    if idx.flavor != PHYSICAL:
        raise PreconditionError("besov_norm needs a physical-flavor index")
    return norm(g, idx, bank)


def fourier_besov_norm(g: RealField, idx: BesovIndex, bank: FilterBank) -> float:
    """Homogeneous mixed-norm Fourier-Besov norm over the resolved band."""
    if idx.flavor != FREQUENCY:
        raise PreconditionError("fourier_besov_norm needs a frequency-flavor index")
    return norm(g, idx, bank)


# -- Bernstein-type inequalities ---------------------------------------------

def multi_indices(d: int, k: int):
    """All ``alpha`` in N^d with ``|alpha| = k``."""
    for combo in itertools.combinations_with_replacement(range(d), k):
        alpha = [0] * d
        for c in combo:
            alpha[c] += 1
        yield tuple(alpha)


def derivative_norm(u: RealField, k: int, q: Sequence) -> float:
    """``||D^k u||_q = max_{|alpha|=k} ||d^alpha u||_q``."""
    g = u.grid
    uh = forward(u.data, g)
    best = 0.0
    for alpha in multi_indices(g.d, k):
        sym = np.ones(g.n, dtype=complex)
        for j, a in enumerate(alpha):
            if a:
                sym = sym * (1j * g.eta[j]) ** a
        if k:
            sym = sym * g.resolved
        val = float(mixed_norm_array(magnitude(inverse(uh * sym, g)), q, g.spacing))
        best = max(best, val)
    return best


def spectral_support_radii(u: RealField, rel_tol: float = 1e-12) -> tuple[float, float]:
    """Smallest and largest |eta| carrying coefficients above ``rel_tol * max``."""
    uh = magnitude(forward(u.data, u.grid))
    top = float(uh.max())
    if top == 0:
        return 0.0, 0.0
    r = u.grid.eta_abs[uh > rel_tol * top]
    return float(r.min()), float(r.max())


def bernstein_check(u: RealField, lam: float, k: int, p: Sequence, q: Sequence,
                    case: str = "ball", radius: float = 1.0,
                    annulus: tuple[float, float] = (INNER, OUTER),
                    C_B: float = FROZEN_BERNSTEIN_C) -> list[Check]:
    """Bernstein estimates for a field with spectrum in ``lam*B`` or ``lam*A``.

    Reports ``rho = ||D^k u||_q / (lam**k0 ||u||_p)`` with
    ``k0 = k + sum(1/p_i - 1/q_i)`` against ``C_B**(k+1)``.  The annulus case
    also checks the reverse bound ``||D^k u||_p >= C_B**(-k-1) lam**k ||u||_p``.
    """
    d = u.grid.d
    p, q = check_exponent(p, d), check_exponent(q, d)
    if any(a > b for a, b in zip(p, q)):
        raise PreconditionError(f"Bernstein needs p <= q entrywise, got p={p}, q={q}")
    if k < 0:
        raise PreconditionError("derivative order must be nonnegative")
    r_lo, r_hi = spectral_support_radii(u)
    if case == "ball":
        if r_hi > lam * radius * (1 + 1e-12):
            raise SupportError(f"spectrum reaches |eta|={r_hi:.6g}, outside ball of radius {lam * radius:.6g}")
    elif case == "annulus":
        a, b = annulus
        if r_hi > 0 and (r_lo < lam * a * (1 - 1e-12) or r_hi > lam * b * (1 + 1e-12)):
            raise SupportError(f"spectrum in [{r_lo:.6g}, {r_hi:.6g}] escapes annulus "
                               f"[{lam * a:.6g}, {lam * b:.6g}]")
    else:
        raise ValueError("case must be 'ball' or 'annulus'")
    k0 = k + float(np.sum(reciprocal(p) - reciprocal(q)))
    up = float(mixed_norm_array(magnitude(u.data), p, u.grid.spacing))
    top = derivative_norm(u, k, q)
    rho = top / (lam**k0 * up) if up > 0 else 0.0
    checks = [Check("bernstein_upper", rho, C_B ** (k + 1), 1e-12,
                    {"k": k, "k0": k0, "lam": lam, "case": case, "rho": rho})]
    if case == "annulus":
        low = derivative_norm(u, k, p) / (lam**k * up) if up > 0 else 0.0
        checks.append(Check("bernstein_lower", C_B ** (-k - 1), low, 1e-12,
                            {"k": k, "lam": lam, "ratio": low}))
    return checks


def box_holder_constant(grid: Grid, i_vec: Sequence[int], beta: Sequence[int], p, q,
                        A: Sequence[float]) -> float:
    """Certified constant for the Fourier-side Bernstein bound on a lattice box.

    Per axis the box holds lattice mass at most ``2*A_k*2**i_k + delta_k`` and
    ``|xi_k|**beta_k <= (A_k 2**i_k)**beta_k``; Hölder along each axis of the
    iterated norm gives the product below.
    """
    c = 1.0
    for k in range(grid.d):
        scale = 2.0 ** i_vec[k]
        width = (2 * A[k] * scale + grid.freq_spacing[k]) / scale
        expo = reciprocal([p[k]])[0] - reciprocal([q[k]])[0]
        c *= A[k] ** abs(beta[k]) * width**expo
    return c


def fb_bernstein_check(g: RealField, i_vec: Sequence[int], beta: Sequence[int], p: Sequence,
                       q: Sequence, A: Sequence[float] | None = None) -> Check:
    """``||xi^beta g^||_p <= C 2**k0 ||g^||_q`` on the box ``|xi_k| <= A_k 2**i_k``.

    ``k0 = sum i_k (|beta_k| + 1/p_k - 1/q_k)``.  ``C`` is the explicit box
    constant from :func:`box_holder_constant`; the check's lhs is the ratio
    ``||xi^beta g^||_p / (2**k0 ||g^||_q)``.
    """
    grid = g.grid
    d = grid.d
    p, q = check_exponent(p, d), check_exponent(q, d)
    if any(a > b for a, b in zip(p, q)):
        raise PreconditionError(f"needs p <= q entrywise, got p={p}, q={q}")
    A = tuple(1.0 for _ in range(d)) if A is None else tuple(A)
    gh = forward(g.data, grid)
    mag = magnitude(gh)
    top = float(mag.max())
    if top > 0:
        live = mag > 1e-12 * top
        for k in range(d):
            if np.any(np.abs(grid.eta[k][live]) > A[k] * 2.0 ** i_vec[k] * (1 + 1e-12)):
                raise SupportError(f"spectrum escapes the box along axis {k}")
    weight = np.ones(grid.n)
    for k in range(d):
        weight = weight * np.abs(grid.eta[k]) ** abs(beta[k])
    lhs = float(mixed_norm_array(weight * mag, p, grid.freq_spacing))
    rhs = float(mixed_norm_array(mag, q, grid.freq_spacing))
    k0 = float(sum(i_vec[k] * (abs(beta[k]) + reciprocal([p[k]])[0] - reciprocal([q[k]])[0])
                   for k in range(d)))
    ratio = lhs / (2.0**k0 * rhs) if rhs > 0 else 0.0
    C = box_holder_constant(grid, i_vec, beta, p, q, A)
    return Check("fb_bernstein", ratio, C, 1e-12, {"k0": k0, "C": C})


def embedding_check(g: RealField, idx1: BesovIndex, idx2: BesovIndex, bank: FilterBank,
                    C_B: float = FROZEN_BERNSTEIN_C) -> list[Check]:
    """Continuous embedding ``idx1 -> idx2`` split into its two mechanisms.

    (a) blockwise Bernstein/Hölder at fixed l, (b) ``l^{a1} -> l^{a2}`` with
    constant exactly one.  The end-to-end ratio is reported with the blockwise
    constant as its bound.
    """
    if idx1.flavor != idx2.flavor:
        raise PreconditionError("indices must share a flavor")
    r1, r2 = reciprocal(idx1.p), reciprocal(idx2.p)
    if idx1.q > idx2.q:
        raise PreconditionError("summability exponents must satisfy a1 <= a2")
    if idx1.flavor == PHYSICAL:
        ok = all(a <= b for a, b in zip(idx1.p, idx2.p)) and idx2.sigma <= idx1.sigma
        balance = idx1.sigma + r2.sum() - (idx2.sigma + r1.sum())
    else:
        ok = all(b <= a for a, b in zip(idx1.p, idx2.p)) and idx2.sigma <= idx1.sigma
        balance = idx1.sigma + r1.sum() - (idx2.sigma + r2.sum())
    if not ok or abs(balance) > 1e-12:
        raise PreconditionError("exponent and regularity relations for the embedding do not hold")

    levels = _levels(bank)
    n1 = block_norms(bank, g.data, idx1.p, idx1.flavor)
    n2 = block_norms(bank, g.data, idx2.p, idx2.flavor)
    b1 = 2.0 ** (levels * idx1.sigma) * n1
    b2 = 2.0 ** (levels * idx2.sigma) * n2
    # blocks at rounding level carry no information about the inequality
    live = b1 > 1e-12 * b1.max() if b1.size else b1 > 0
    block_ratio = float(np.max(b2[live] / b1[live])) if live.any() else 0.0
    if idx1.flavor == PHYSICAL:
        # a block lives in the ball of radius OUTER * 2**l
        const = C_B * OUTER ** float(np.sum(r1 - r2))
    else:
        grid = bank.grid
        const = 1.0
        for l in levels[live] if live.any() else levels[:1]:
            c = 1.0
            for k in range(grid.d):
                width = 2 * OUTER + grid.freq_spacing[k] * 2.0 ** (-l)
                c *= width ** (r2[k] - r1[k])
            const = max(const, c)
    seq_lhs = float(lq_norm(b2, idx2.q))
    seq_rhs = float(lq_norm(b2, idx1.q))
    total1 = float(lq_norm(b1, idx1.q))
    end = seq_lhs / total1 if total1 > 0 else 0.0
    return [
        Check("embedding_blockwise", block_ratio, const, 1e-12),
        Check("embedding_sequence", seq_lhs, seq_rhs, 1e-12),
        Check("embedding_end_to_end", end, const, 1e-12, {"blockwise_ratio": block_ratio}),
    ]


# -- trajectories and time-space norms ---------------------------------------

@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly time-sampled fields ``states[i]`` at ``times[i]``."""

    grid: Grid
    times: np.ndarray
    states: np.ndarray = field(repr=False)
    nu: float = 1.0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.states, dtype=float)
        if t.ndim != 1 or t.size == 0:
            raise EmptyTrajectoryError("trajectory has no samples")
        if s.shape[0] != t.size or s.shape[2:] != self.grid.n:
            raise ShapeError(f"states shape {s.shape} does not match {t.size} samples on {self.grid.n}")
        if t.size > 1:
            dt = np.diff(t)
            if np.any(dt <= 0):
                raise ValueError("times must be strictly increasing")
            if np.max(np.abs(dt - dt[0])) > 1e-9 * max(dt[0], abs(t[-1])):
                raise ValueError("time samples must be uniformly spaced")
        if not self.nu > 0:
            raise ValueError("viscosity must be positive")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "states", s)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

    def __len__(self) -> int:
        return self.times.size

    def state(self, i: int) -> RealField:
        return RealField(self.grid, self.states[i])

    def with_states(self, states: np.ndarray) -> "Trajectory":
        return Trajectory(self.grid, self.times, states, self.nu)

    def __sub__(self, other: "Trajectory") -> "Trajectory":
        return self.with_states(self.states - other.states)

    def scaled(self, a: float) -> "Trajectory":
        return self.with_states(a * self.states)

    @classmethod
    def uniform(cls, grid: Grid, T: float, nt: int, states: np.ndarray, nu: float = 1.0):
        return cls(grid, np.linspace(0.0, T, nt + 1), states, nu)


def block_time_matrix(traj: Trajectory, bank: FilterBank, p: Sequence, flavor: str,
                      chunk: int = 32) -> np.ndarray:
    """``M[l, i] = N_l(states[i])``; shape ``(nlevels, nsamples)``."""
    if traj.grid != bank.grid:
        raise ShapeError("trajectory grid differs from filter bank grid")
    out = np.empty((len(bank.levels), len(traj)))
    for start in range(0, len(traj), chunk):
        stop = min(start + chunk, len(traj))
        out[:, start:stop] = block_norms(bank, traj.states[start:stop], p, flavor)
    return out


def _time_norm(M: np.ndarray, times: np.ndarray, a: float) -> np.ndarray:
    if math.isinf(a):
        return M.max(axis=1)
    if a == 1:
        if times.size == 1:
            return np.zeros(M.shape[0])
        return np.trapezoid(M, times, axis=1)
    raise ValueError("time exponent must be 1 or inf")


def timespace_from_matrix(M: np.ndarray, times: np.ndarray, bank: FilterBank,
                          idx: BesovIndex, a: float) -> float:
    inner = _time_norm(M, times, a)
    return float(lq_norm(2.0 ** (_levels(bank) * idx.sigma) * inner, idx.q))


def timespace_norm(traj: Trajectory, idx: BesovIndex, a: float, bank: FilterBank) -> float:
    """Chemin-Lerner norm: time norm per block, then dyadic weight, then l^q."""
    if len(traj) == 0:
        raise EmptyTrajectoryError("trajectory has no samples")
    M = block_time_matrix(traj, bank, idx.p, idx.flavor)
    return timespace_from_matrix(M, traj.times, bank, idx, a)


@dataclass(frozen=True)
class ZNorm:
    linf_part: float
    l1_part: float

    @property
    def total(self) -> float:
        return max(self.linf_part, self.l1_part)


def z_norm_from_matrix(M: np.ndarray, times: np.ndarray, bank: FilterBank, idx: BesovIndex) -> ZNorm:
    return ZNorm(timespace_from_matrix(M, times, bank, idx, math.inf),
                 timespace_from_matrix(M, times, bank, idx.shifted(2.0), 1.0))


def z_norm(traj: Trajectory, idx: BesovIndex, bank: FilterBank) -> ZNorm:
    """``max(||u||_{L^inf(B^sigma)}, ||u||_{L^1(B^{sigma+2})})`` in Chemin-Lerner form."""
    M = block_time_matrix(traj, bank, idx.p, idx.flavor)
    return z_norm_from_matrix(M, traj.times, bank, idx)
