"""Dyadic Littlewood-Paley decomposition on the frequency lattice.

The bump ``phi`` is supported in the annulus ``3/4 <= |eta| <= 8/3`` and its
dyadic dilates ``phi_l(eta) = phi(2**-l eta)`` sum to one away from the origin.
The default profile is ``chi(r) = exp(-1/(1 - t**2))`` with ``t`` the affine
image of ``r`` in ``(-1, 1)``, normalized telescopically::

    phi(r) = chi(r) / sum_j chi(2**-j r)

The denominator is invariant under ``r -> 2 r``, so the partition identity
holds to rounding wherever it is positive.  Any other smooth, radial profile
with the same support can be passed as ``profile``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import BandError
from .grid import Grid, RealField, forward, inverse
from .report import Check

INNER = 3.0 / 4.0
OUTER = 8.0 / 3.0


def mollified_profile(r: np.ndarray) -> np.ndarray:
    """``exp(-1/(1 - t^2))`` on ``(INNER, OUTER)``, zero elsewhere."""
    r = np.asarray(r, dtype=float)
    t = (2.0 * r - (INNER + OUTER)) / (OUTER - INNER)
    out = np.zeros_like(r)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


def dyadic_weights(r: np.ndarray, l_values, profile: Callable = mollified_profile) -> np.ndarray:
    """``phi(2**-l r)`` for each ``l``, shape ``(len(l_values),) + r.shape``.

    The normalizing sum runs over every dyadic dilate that can reach ``r``,
    independent of the requested ``l`` range.
    """
    r = np.asarray(r, dtype=float)
    pos = r > 0
    safe = np.where(pos, r, 1.0)
    lo = int(math.floor(math.log2(max(float(safe.min()), 1e-300) / OUTER))) - 1
    hi = int(math.ceil(math.log2(float(safe.max()) / INNER))) + 1
    denom = np.zeros_like(r)
    for j in range(lo, hi + 1):
        denom += profile(safe * 2.0**-j)
    denom = np.where(pos & (denom > 0), denom, 1.0)
    out = np.empty((len(l_values),) + r.shape)
    for i, l in enumerate(l_values):
        out[i] = np.where(pos, profile(safe * 2.0**-l), 0.0) / denom
    return out


def phi_radial(r, profile: Callable = mollified_profile) -> np.ndarray:
    """The base bump ``phi`` evaluated at radii ``r``."""
    return dyadic_weights(np.atleast_1d(r), [0], profile)[0]


@dataclass(frozen=True, eq=False)
class FilterBank:
    """Tabulated dyadic multipliers on one grid.

    ``phi[i]`` is ``phi_l`` for ``l = levels[i]``; ``zeta[i]`` is
    ``sum_{l_min <= l' <= l-1} phi_l'``.  Nyquist lattice points carry zero in
    every multiplier.
    """

    grid: Grid
    l_min: int
    l_max: int
    phi: np.ndarray = field(repr=False)
    zeta: np.ndarray = field(repr=False)

    @property
    def levels(self) -> range:
        return range(self.l_min, self.l_max + 1)

    def index(self, l: int) -> int:
        if not self.l_min <= l <= self.l_max:
            raise BandError(f"dyadic index {l} outside resolved band [{self.l_min}, {self.l_max}]")
        return l - self.l_min

    def phi_l(self, l: int) -> np.ndarray:
        return self.phi[self.index(l)]

    def phi_tilde(self, l: int) -> np.ndarray:
        """``phi_{l-1} + phi_l + phi_{l+1}``, dropping out-of-band neighbours."""
        self.index(l)
        return sum(self.phi[m - self.l_min] for m in (l - 1, l, l + 1) if self.l_min <= m <= self.l_max)

    def zeta_l(self, l: int) -> np.ndarray:
        """Low-pass multiplier ``zeta_l``; zero below the band, full sum above it."""
        if l <= self.l_min:
            return np.zeros(self.grid.n)
        if l > self.l_max:
            return self.zeta[-1] + self.phi[-1]
        return self.zeta[l - self.l_min]

    def covered_band(self) -> tuple[float, float]:
        """Radii where the truncated sum is certified to equal one."""
        return OUTER * 2.0**self.l_min, INNER * 2.0**self.l_max

    def partition_defect(self) -> float:
        """max |sum_l phi_l - 1| over resolved lattice points in the covered band."""
        lo, hi = self.covered_band()
        r = self.grid.eta_abs
        mask = self.grid.resolved & (r >= lo) & (r <= hi)
        if not mask.any():
            return 0.0
        return float(np.max(np.abs(self.phi.sum(axis=0)[mask] - 1.0)))


def build_filter_bank(grid: Grid, profile: Callable = mollified_profile) -> FilterBank:
    """Tabulate every ``phi_l`` whose annulus meets the resolved lattice."""
    r = grid.eta_abs
    live = r[grid.resolved & (r > 0)]
    r_lo, r_hi = float(live.min()), float(live.max())
    # annulus 2^l (INNER, OUTER) meets [r_lo, r_hi]
    l_min = int(math.floor(math.log2(r_lo / OUTER))) + 1
    while OUTER * 2.0 ** (l_min - 1) > r_lo:
        l_min -= 1
    while OUTER * 2.0**l_min <= r_lo:
        l_min += 1
    l_max = int(math.ceil(math.log2(r_hi / INNER))) - 1
    while INNER * 2.0 ** (l_max + 1) < r_hi:
        l_max += 1
    while INNER * 2.0**l_max >= r_hi:
        l_max -= 1
    if OUTER * 2.0**l_min > INNER * 2.0**l_max:
        raise BandError(f"grid {grid.n} with periods {grid.L} cannot hold one full annulus")
    levels = list(range(l_min, l_max + 1))
    phi = dyadic_weights(r, levels, profile) * grid.resolved
    zeta = np.zeros_like(phi)
    np.cumsum(phi[:-1], axis=0, out=zeta[1:])
    for a in (phi, zeta):
        a.flags.writeable = False
    return FilterBank(grid, l_min, l_max, phi, zeta)


def _check_grid(bank: FilterBank, g: RealField):
    if g.grid != bank.grid:
        raise BandError("field grid differs from filter bank grid")


def block(bank: FilterBank, g: RealField, l: int) -> RealField:
    """``Delta_l g = phi_l(D) g``."""
    _check_grid(bank, g)
    return RealField(g.grid, inverse(forward(g.data, g.grid) * bank.phi_l(l), g.grid))


def low_pass(bank: FilterBank, g: RealField, l: int) -> RealField:
    """``S_l g = zeta_l(D) g`` (sum of blocks strictly below l)."""
    _check_grid(bank, g)
    return RealField(g.grid, inverse(forward(g.data, g.grid) * bank.zeta_l(l), g.grid))


def all_blocks(bank: FilterBank, data: np.ndarray) -> np.ndarray:
    """Physical blocks of a raw array: shape ``(nlevels,) + data.shape``."""
    gh = forward(data, bank.grid)
    phi = bank.phi.reshape((bank.phi.shape[0],) + (1,) * (gh.ndim - bank.grid.d) + bank.grid.n)
    return inverse(phi * gh[None], bank.grid)


def decompose(bank: FilterBank, g: RealField) -> dict[int, RealField]:
    blocks = all_blocks(bank, g.data)
    return {l: RealField(g.grid, blocks[i]) for i, l in enumerate(bank.levels)}


def almost_orthogonality_check(bank: FilterBank, g: RealField, f: RealField | None = None,
                               tol_blocks: float = 1e-12, tol_products: float = 1e-10) -> list[Check]:
    """Vanishing of far-apart block interactions.

    ``||Delta_l Delta_l' g||_2 <= tol ||g||_2`` for ``|l - l'| >= 2`` and, when
    ``f`` is given, ``||Delta_l(S_{l'-1} f Delta_l' g)||_2 <= tol ||f||_2 ||g||_2``
    for ``|l - l'| >= 5``.  Neighbouring pairs (``|l - l'| = 1``) are reported
    in ``extra`` without a pass/fail decision.
    """
    _check_grid(bank, g)
    grid = bank.grid
    gh = forward(g.data, grid)
    g2 = g.l2()
    worst, neighbours = 0.0, {}
    for l in bank.levels:
        bl = inverse(gh * bank.phi_l(l), grid)
        blh = forward(bl, grid)
        for lp in bank.levels:
            val = RealField(grid, inverse(blh * bank.phi_l(lp), grid)).l2()
            if abs(l - lp) >= 2:
                worst = max(worst, val)
            elif abs(l - lp) == 1:
                neighbours[f"{l},{lp}"] = val
    checks = [Check("block_pairs", worst, tol_blocks * g2, 0.0, {"neighbour_l2": neighbours})]
    if f is not None:
        _check_grid(bank, f)
        fh = forward(f.data, grid)
        worst_p = 0.0
        for lp in bank.levels:
            low = inverse(fh * bank.zeta_l(lp - 1), grid)
            hi = inverse(gh * bank.phi_l(lp), grid)
            ph = forward(low * hi, grid)
            for l in bank.levels:
                if abs(l - lp) >= 5:
                    worst_p = max(worst_p, RealField(grid, inverse(ph * bank.phi_l(l), grid)).l2())
        checks.append(Check("paraproduct_blocks", worst_p, tol_products * f.l2() * g2, 0.0))
    return checks
