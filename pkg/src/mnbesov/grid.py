"""Periodic grids, real and spectral fields, and the discrete Fourier transform.

The torus of period ``L`` per axis stands in for R^d.  Sample ``j`` on axis
``i`` sits at ``x = j * L_i / n_i``; the frequency lattice is
``eta = 2*pi*k / L_i`` with ``k`` in ``[-n_i/2, n_i/2)``.

Normalization convention (global, used by every module)::

    dft(f)[k] = (2*pi)**(-d/2) * prod(L_i/n_i) * sum_x f(x) exp(-i eta_k . x)

Physical sums carry the weight ``prod(L_i/n_i)`` and frequency-lattice sums
carry ``prod(2*pi/L_i)``.  With these weights the discrete Parseval identity
is exact and the transform approximates the unitary Fourier transform on R^d.

Arrays are laid out as ``(components, n_1, ..., n_d)``; array axis 1 is x_1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import AsymmetryError, InvalidFieldError, ShapeError

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid in 2 or 3 dimensions."""

    n: tuple[int, ...]
    L: tuple[float, ...] = None  # defaults to 2*pi on every axis

    def __post_init__(self):
        n = tuple(int(v) for v in self.n)
        if len(n) not in (2, 3):
            raise ShapeError(f"grid dimension must be 2 or 3, got {len(n)}")
        for v in n:
            if v < 8 or v & (v - 1):
                raise ShapeError(f"points per axis must be a power of two >= 8, got {v}")
        L = (2 * math.pi,) * len(n) if self.L is None else tuple(float(v) for v in self.L)
        if len(L) != len(n):
            raise ShapeError("period tuple length must match dimension")
        if any(not (v > 0 and math.isfinite(v)) for v in L):
            raise ShapeError(f"periods must be positive and finite, got {L}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "L", L)

    @classmethod
    def cube(cls, d: int, n: int, L: float = 2 * math.pi) -> "Grid":
        return cls((n,) * d, (L,) * d)

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.n

    @property
    def axes(self) -> tuple[int, ...]:
        """Spatial array axes of a component-major field array."""
        return tuple(range(1, self.d + 1))

    @cached_property
    def spacing(self) -> tuple[float, ...]:
        return tuple(L / n for L, n in zip(self.L, self.n))

    @cached_property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    @cached_property
    def freq_spacing(self) -> tuple[float, ...]:
        return tuple(2 * math.pi / L for L in self.L)

    @cached_property
    def freq_volume(self) -> float:
        return float(np.prod(self.freq_spacing))

    @cached_property
    def transform_scale(self) -> float:
        return (2 * math.pi) ** (-self.d / 2) * self.cell_volume

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Per-axis angular frequencies in FFT order."""
        return tuple(2 * math.pi / L * sfft.fftfreq(n, 1.0 / n) for n, L in zip(self.n, self.L))

    @cached_property
    def integer_modes(self) -> tuple[np.ndarray, ...]:
        return tuple(np.rint(sfft.fftfreq(n, 1.0 / n)).astype(int) for n in self.n)

    @cached_property
    def eta(self) -> np.ndarray:
        """Frequency vectors, shape ``(d, n_1, ..., n_d)``."""
        return np.stack(np.meshgrid(*self.wavenumbers, indexing="ij"))

    @cached_property
    def eta_sq(self) -> np.ndarray:
        return np.sum(self.eta**2, axis=0)

    @cached_property
    def eta_abs(self) -> np.ndarray:
        return np.sqrt(self.eta_sq)

    @cached_property
    def resolved(self) -> np.ndarray:
        """False on lattice points whose index is Nyquist along any axis."""
        mask = np.ones(self.n, dtype=bool)
        for i, (n, k) in enumerate(zip(self.n, self.integer_modes)):
            sl = [slice(None)] * self.d
            sl[i] = k == -(n // 2)
            mask[tuple(sl)] = False
        return mask

    @cached_property
    def dealiased(self) -> np.ndarray:
        """Two-thirds band: every integer mode satisfies ``|k_i| < n_i/3``."""
        mask = np.ones(self.n, dtype=bool)
        for i, (n, k) in enumerate(zip(self.n, self.integer_modes)):
            sl = [slice(None)] * self.d
            sl[i] = 3 * np.abs(k) >= n
            mask[tuple(sl)] = False
        return mask

    @cached_property
    def coords(self) -> tuple[np.ndarray, ...]:
        """Sample coordinates broadcast to the grid shape."""
        return tuple(np.meshgrid(*[np.arange(n) * h for n, h in zip(self.n, self.spacing)],
                                 indexing="ij"))

    def centered_coords(self) -> tuple[np.ndarray, ...]:
        """Coordinates shifted to ``[-L/2, L/2)`` for localized test profiles."""
        out = []
        for x, L in zip(self.coords, self.L):
            out.append(np.where(x >= L / 2, x - L, x))
        return tuple(out)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class RealField:
    """Real samples of a scalar (c=1) or vector (c=d) field."""

    grid: Grid
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.shape == self.grid.n:
            data = data[None]
        if data.ndim != self.grid.d + 1 or data.shape[1:] != self.grid.n:
            raise ShapeError(f"field shape {data.shape} does not match grid {self.grid.n}")
        if data.shape[0] not in (1, self.grid.d):
            raise ShapeError(f"component count must be 1 or {self.grid.d}, got {data.shape[0]}")
        if not np.all(np.isfinite(data)):
            raise InvalidFieldError("field contains non-finite samples")
        object.__setattr__(self, "data", _freeze(data))

    @property
    def components(self) -> int:
        return self.data.shape[0]

    @property
    def is_vector(self) -> bool:
        return self.components == self.grid.d and self.grid.d > 1

    def component(self, i: int) -> "RealField":
        return RealField(self.grid, self.data[i : i + 1])

    def _coerce(self, other):
        if isinstance(other, RealField):
            if other.grid != self.grid:
                raise ShapeError("fields live on different grids")
            return other.data
        return other

    def __add__(self, other):
        return RealField(self.grid, self.data + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return RealField(self.grid, self.data - self._coerce(other))

    def __mul__(self, other):
        return RealField(self.grid, self.data * self._coerce(other))

    __rmul__ = __mul__

    def __neg__(self):
        return RealField(self.grid, -self.data)

    def l2(self) -> float:
        """Quadrature L^2 norm of the pointwise Euclidean magnitude."""
        return math.sqrt(float(np.sum(self.data**2)) * self.grid.cell_volume)

    def mean(self) -> np.ndarray:
        return self.data.mean(axis=self.grid.axes)

    @classmethod
    def zeros(cls, grid: Grid, components: int = 1) -> "RealField":
        return cls(grid, np.zeros((components,) + grid.n))

    @classmethod
    def from_function(cls, grid: Grid, func) -> "RealField":
        """Sample ``func(*coords)``; a tuple/list return value builds a vector field."""
        val = func(*grid.coords)
        if isinstance(val, (tuple, list)):
            val = np.stack([np.broadcast_to(v, grid.n) for v in val])
        return cls(grid, np.broadcast_to(val, grid.n) if np.ndim(val) == 0 else val)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients on the full frequency lattice, in FFT order."""

    grid: Grid
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.shape == self.grid.n:
            c = c[None]
        if c.ndim != self.grid.d + 1 or c.shape[1:] != self.grid.n:
            raise ShapeError(f"coefficient shape {c.shape} does not match grid {self.grid.n}")
        object.__setattr__(self, "coeffs", _freeze(c))

    @property
    def components(self) -> int:
        return self.coeffs.shape[0]

    def l2(self) -> float:
        return math.sqrt(float(np.sum(np.abs(self.coeffs) ** 2)) * self.grid.freq_volume)


# Raw array transforms used on hot paths; no validation.

def forward(data: np.ndarray, grid: Grid) -> np.ndarray:
    axes = tuple(range(data.ndim - grid.d, data.ndim))
    return sfft.fftn(data, axes=axes) * grid.transform_scale


def inverse(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    axes = tuple(range(coeffs.ndim - grid.d, coeffs.ndim))
    return sfft.ifftn(coeffs, axes=axes).real / grid.transform_scale


def half(a: np.ndarray, grid: Grid) -> np.ndarray:
    """Restrict a full-lattice array to the half lattice used by real transforms.

    The last retained index along x_d is the Nyquist mode.
    """
    return a[..., : grid.n[-1] // 2 + 1]


def rforward(data: np.ndarray, grid: Grid) -> np.ndarray:
    """Half-lattice coefficients of real samples, same normalization as ``forward``."""
    axes = tuple(range(data.ndim - grid.d, data.ndim))
    return sfft.rfftn(data, axes=axes) * grid.transform_scale


def rinverse(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    axes = tuple(range(coeffs.ndim - grid.d, coeffs.ndim))
    return sfft.irfftn(coeffs, s=grid.n, axes=axes) / grid.transform_scale


def apply_multiplier(data: np.ndarray, grid: Grid, symbol: np.ndarray) -> np.ndarray:
    """Real physical array in, real physical array out."""
    return inverse(forward(data, grid) * symbol, grid)


def reflect(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Coefficients at ``-k`` for every lattice index ``k``."""
    axes = tuple(range(coeffs.ndim - grid.d, coeffs.ndim))
    return np.roll(np.flip(coeffs, axis=axes), 1, axis=axes)


def dft(f: RealField) -> SpectralField:
    return SpectralField(f.grid, forward(f.data, f.grid))


def idft(F: SpectralField) -> RealField:
    """Inverse transform; rejects coefficients that are not conjugate symmetric."""
    c = F.coeffs
    scale = float(np.max(np.abs(c))) if c.size else 0.0
    if scale > 0:
        asym = float(np.max(np.abs(c - np.conj(reflect(c, F.grid))))) / scale
        if asym > SYMMETRY_TOL:
            raise AsymmetryError(f"relative conjugate-symmetry defect {asym:.3e}")
    return RealField(F.grid, inverse(c, F.grid))


def _check_axis(grid: Grid, axis: int):
    if not 0 <= axis < grid.d:
        raise IndexError(f"axis {axis} out of range for d={grid.d}")


def derivative_symbol(grid: Grid, axis: int, order: int) -> np.ndarray:
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    _check_axis(grid, axis)
    if order == 0:
        return np.ones(grid.n)
    return (1j * grid.eta[axis]) ** order * grid.resolved


def derivative(f: RealField, axis: int, order: int = 1) -> RealField:
    """Spectral partial derivative ``d^order / dx_axis^order`` (axis is 0-based)."""
    symbol = derivative_symbol(f.grid, axis, order)
    if order == 0:
        return f
    return RealField(f.grid, apply_multiplier(f.data, f.grid, symbol))


def divergence(u: RealField) -> RealField:
    g = u.grid
    if u.components != g.d:
        raise ShapeError(f"divergence needs {g.d} components, got {u.components}")
    uh = forward(u.data, g)
    div_hat = np.sum(1j * g.eta * g.resolved * uh, axis=0)
    return RealField(g, inverse(div_hat, g))


def gradient(f: RealField) -> RealField:
    g = f.grid
    if f.components != 1:
        raise ShapeError("gradient needs a scalar field")
    fh = forward(f.data, g)[0]
    return RealField(g, inverse(1j * g.eta * g.resolved * fh, g))


def laplacian(f: RealField) -> RealField:
    g = f.grid
    return RealField(g, apply_multiplier(f.data, g, -g.eta_sq * g.resolved))


def spectral_mass_outside(data: np.ndarray, grid: Grid, mask: np.ndarray) -> float:
    """Fraction of L^2 energy carried by lattice points where ``mask`` is False."""
    power = np.abs(forward(data, grid)) ** 2
    total = float(power.sum())
    if total == 0:
        return 0.0
    return float(power[..., ~mask].sum()) / total
