"""Seeded, band-limited random fields and trajectories for the check suites.

Coefficients are drawn from numpy's PCG64 generator on the lattice points of
a spectral shell, so a seed fixes the corpus bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BandError
from .grid import Grid, RealField, inverse
from .stokes import leray_hat


@dataclass(frozen=True)
class FieldSpec:
    """Spectral shell ``r_lo <= |eta| <= r_hi`` and field type."""

    grid: Grid
    r_lo: float
    r_hi: float
    components: int = 1
    solenoidal: bool = False
    spectrum_decay: float = 0.0  # amplitude ~ |eta|**-decay

    def mask(self) -> np.ndarray:
        g = self.grid
        r = g.eta_abs
        if not (0 <= self.r_lo <= self.r_hi):
            raise BandError(f"bad envelope [{self.r_lo}, {self.r_hi}]")
        live = r[g.resolved]
        if self.r_hi > float(live.max()) + 1e-12:
            raise BandError(f"envelope radius {self.r_hi} exceeds the resolved lattice")
        m = g.resolved & (r >= self.r_lo) & (r <= self.r_hi) & (r > 0)
        if not m.any():
            raise BandError("envelope holds no lattice point")
        return m

    def describe(self) -> dict:
        return {"n": list(self.grid.n), "L": list(self.grid.L), "r_lo": self.r_lo,
                "r_hi": self.r_hi, "components": self.components,
                "solenoidal": self.solenoidal, "spectrum_decay": self.spectrum_decay}


def product_safe_radius(grid: Grid) -> float:
    """Radius below which the product of two fields stays free of aliasing."""
    return min(n // 2 - 1 for n in grid.n) * min(2 * math.pi / L for L in grid.L) / 2.0


def random_field(spec: FieldSpec, rng: np.random.Generator) -> RealField:
    g = spec.grid
    c = g.d if spec.solenoidal else spec.components
    m = spec.mask()
    shape = (c,) + g.n
    coeffs = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * m
    if spec.spectrum_decay:
        coeffs = coeffs * np.where(m, np.where(g.eta_abs > 0, g.eta_abs, 1.0) ** -spec.spectrum_decay, 0.0)
    if spec.solenoidal:
        coeffs = leray_hat(coeffs, g)
    # taking the real part symmetrizes; the projector symbol is real and even
    data = inverse(coeffs, g)
    norm = math.sqrt(float(np.sum(data**2)) * g.cell_volume)
    return RealField(g, data / norm if norm > 0 else data)


def generate_corpus(seed: int, spec: FieldSpec, size: int) -> list[RealField]:
    rng = np.random.default_rng(seed)
    return [random_field(spec, rng) for _ in range(size)]


def single_mode(grid: Grid, k: tuple[int, ...], amplitude: float = 1.0, phase: float = 0.0,
                components: int = 1) -> RealField:
    """``amplitude * cos(eta_k . x + phase)`` in every component."""
    eta = [2 * math.pi * ki / L for ki, L in zip(k, grid.L)]
    arg = sum(e * x for e, x in zip(eta, grid.coords)) + phase
    data = np.broadcast_to(amplitude * np.cos(arg), (components,) + grid.n)
    return RealField(grid, np.array(data))


def taylor_green(grid: Grid, amplitude: float = 1.0) -> RealField:
    """``(sin x cos y, -cos x sin y)`` on a 2D grid of period 2 pi."""
    if grid.d != 2:
        raise ValueError("Taylor-Green vortex needs a 2D grid")
    x, y = grid.coords
    return RealField(grid, amplitude * np.stack([np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y)]))
