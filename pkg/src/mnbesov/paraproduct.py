"""Bony decomposition ``v w = T_v w + T_w v + R(v, w)``.

``T_v w = sum_l S_{l-1} v * Delta_l w`` collects low-high interactions and
``R(v, w) = sum_l Delta_l v * (Delta_{l-1} + Delta_l + Delta_{l+1}) w`` the
resonant ones.  Products are pointwise on the sample grid.  When the spectra
of ``v`` and ``w`` lie in the band where the truncated partition sums to one,
the three pieces add up to ``v w`` up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandError, BandOverflowError, ShapeError
from .grid import RealField, forward, inverse
from .littlewood_paley import FilterBank, all_blocks
from .report import Check

# S_{l-1} v * Delta_l w lives in 2^l * [3/4 - 2/3, 8/3 + 2/3]
LOCALIZATION_BAND = (1.0 / 12.0, 10.0 / 3.0)


@dataclass(frozen=True)
class BonyPieces:
    t_vw: RealField
    t_wv: RealField
    remainder: RealField

    def total(self) -> RealField:
        return self.t_vw + self.t_wv + self.remainder


def _pair(bank: FilterBank, v: RealField, w: RealField):
    if v.grid != bank.grid or w.grid != bank.grid:
        raise ShapeError("fields and filter bank must share a grid")
    if v.components != w.components and 1 not in (v.components, w.components):
        raise ShapeError(f"cannot multiply {v.components}- and {w.components}-component fields")


def _low_passes(bank: FilterBank, data: np.ndarray) -> np.ndarray:
    """``S_{l-1}`` of ``data`` for every level, shape ``(nlevels,) + data.shape``."""
    gh = forward(data, bank.grid)
    out = np.empty((len(bank.levels),) + data.shape)
    for i, l in enumerate(bank.levels):
        out[i] = inverse(gh * bank.zeta_l(l - 1), bank.grid)
    return out


def paraproduct(bank: FilterBank, v: RealField, w: RealField) -> RealField:
    """``T_v w``; levels outside the band are dropped."""
    _pair(bank, v, w)
    low = _low_passes(bank, v.data)
    high = all_blocks(bank, w.data)
    return RealField(v.grid, np.sum(low * high, axis=0))


def remainder(bank: FilterBank, v: RealField, w: RealField) -> RealField:
    _pair(bank, v, w)
    bv = all_blocks(bank, v.data)
    bw = all_blocks(bank, w.data)
    # neighbour window sum; band edges keep only in-range neighbours
    wide = bw.copy()
    wide[1:] += bw[:-1]
    wide[:-1] += bw[1:]
    return RealField(v.grid, np.sum(bv * wide, axis=0))


def bony_pieces(bank: FilterBank, v: RealField, w: RealField) -> BonyPieces:
    return BonyPieces(paraproduct(bank, v, w), paraproduct(bank, w, v), remainder(bank, v, w))


def band_mass_outside(bank: FilterBank, f: RealField) -> float:
    """Relative energy of ``f`` outside the certified band."""
    lo, hi = bank.covered_band()
    r = bank.grid.eta_abs
    inside = bank.grid.resolved & (r >= lo) & (r <= hi)
    power = np.abs(forward(f.data, f.grid)) ** 2
    total = float(power.sum())
    return float(power[..., ~inside].sum()) / total if total > 0 else 0.0


def _mode_extent(f: RealField, rel_tol: float = 1e-13) -> np.ndarray:
    """Largest |k_i| per axis among coefficients above ``rel_tol * max``."""
    g = f.grid
    mag = np.sqrt(np.sum(np.abs(forward(f.data, g)) ** 2, axis=0))
    top = float(mag.max())
    if top == 0:
        return np.zeros(g.d, dtype=int)
    live = mag > rel_tol * top
    return np.array([int(np.abs(np.broadcast_to(k, g.n)[live]).max())
                     for k in np.meshgrid(*g.integer_modes, indexing="ij")])


def check_product_resolved(v: RealField, w: RealField) -> None:
    """Raise if the product's spectrum would wrap around the lattice."""
    ext = _mode_extent(v) + _mode_extent(w)
    n = np.array(v.grid.n)
    if np.any(ext >= n // 2):
        raise BandOverflowError(f"product reaches integer modes {ext.tolist()}, grid holds < {(n // 2).tolist()}")


def bony_reconstruct_check(bank: FilterBank, v: RealField, w: RealField, tol: float = 1e-8) -> Check:
    """``||T_v w + T_w v + R(v,w) - v w||_2 <= tol ||v||_2 ||w||_2``."""
    _pair(bank, v, w)
    for name, f in (("v", v), ("w", w)):
        if band_mass_outside(bank, f) > 1e-24:
            raise BandError(f"spectrum of {name} leaves the certified band")
    check_product_resolved(v, w)
    pieces = bony_pieces(bank, v, w)
    err = (pieces.total() - v * w).l2()
    return Check("bony_reconstruction", err, tol * v.l2() * w.l2(), 0.0)


def localization_check(bank: FilterBank, v: RealField, w: RealField, l: int,
                       tol: float = 1e-12) -> Check:
    """Energy of ``S_{l-1} v * Delta_l w`` outside ``2^l [1/12, 10/3]``."""
    _pair(bank, v, w)
    g = bank.grid
    low = inverse(forward(v.data, g) * bank.zeta_l(l - 1), g)
    high = inverse(forward(w.data, g) * bank.phi_l(l), g)
    prod = low * high
    lo, hi = LOCALIZATION_BAND
    r = g.eta_abs
    mask = (r >= lo * 2.0**l * (1 - 1e-12)) & (r <= hi * 2.0**l * (1 + 1e-12))
    power = np.abs(forward(prod, g)) ** 2
    total = float(power.sum())
    frac = float(power[..., ~mask].sum()) / total if total > 0 else 0.0
    return Check("paraproduct_localization", frac, tol, 0.0, {"l": l})
