"""Mixed-norm Lebesgue norms L^p on the torus and the classical inequalities.

The iterated norm integrates x_1 first and x_d last; changing the order
changes the value.  ``inf`` entries take the exact maximum along that axis.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import IncompatibleExponentsError, InvalidExponentError, PreconditionError, ShapeError
from .grid import Grid, RealField, forward, inverse
from .report import Check

EXACT_SLACK = 1e-12
QUADRATURE_SLACK = 1e-9

MixedExponent = tuple  # tuple of floats in [1, inf], one per axis


def parse_exponent(text: str | Sequence, d: int | None = None) -> MixedExponent:
    """``"2,inf,2"`` or an iterable of numbers -> validated exponent tuple."""
    if isinstance(text, str):
        items = [s.strip() for s in text.split(",") if s.strip()]
        p = tuple(math.inf if s.lower() in ("inf", "infinity", "oo") else float(s) for s in items)
    else:
        p = tuple(float(v) for v in text)
    return check_exponent(p, d)


def check_exponent(p: Sequence, d: int | None = None) -> MixedExponent:
    p = tuple(float(v) for v in p)
    if d is not None and len(p) != d:
        raise InvalidExponentError(f"exponent {p} has length {len(p)}, grid dimension is {d}")
    for v in p:
        if not v >= 1:
            raise InvalidExponentError(f"Lebesgue exponents must lie in [1, inf], got {v}")
    return p


def format_exponent(p: Sequence) -> str:
    return ",".join("inf" if math.isinf(v) else f"{v:g}" for v in p)


def reciprocal(p: Sequence) -> np.ndarray:
    return np.array([0.0 if math.isinf(v) else 1.0 / v for v in p])


def from_reciprocal(r: Sequence) -> MixedExponent:
    return tuple(math.inf if v == 0 else 1.0 / v for v in r)


def conjugate_exponent(p: Sequence) -> MixedExponent:
    """Entrywise Hölder conjugate; 1 <-> inf."""
    p = check_exponent(p)
    out = []
    for v in p:
        if v == 1:
            out.append(math.inf)
        elif math.isinf(v):
            out.append(1.0)
        else:
            out.append(v / (v - 1.0))
    return tuple(out)


def mixed_norm_array(a: np.ndarray, p: Sequence, weights: Sequence) -> np.ndarray:
    """Iterated norm over the trailing ``len(p)`` axes of a nonnegative array.

    Leading axes are batch axes.  ``weights[i]`` is the quadrature weight of
    axis i.  Each batch entry is scaled by its maximum first, which keeps large
    exponents from overflowing and makes the result exactly homogeneous.
    """
    d = len(p)
    a = np.abs(np.asarray(a, dtype=float))
    spatial = tuple(range(a.ndim - d, a.ndim))
    scale = a.max(axis=spatial, keepdims=True) if a.size else np.zeros(a.shape[: a.ndim - d])
    safe = np.where(scale > 0, scale, 1.0)
    b = a / safe
    for i in range(d):
        axis = -(d - i)
        pi, wi = p[i], weights[i]
        if math.isinf(pi):
            b = b.max(axis=axis)
        elif pi == 1:
            b = b.sum(axis=axis) * wi
        elif pi == 2:
            b = np.sqrt(np.sum(b * b, axis=axis) * wi)
        elif pi == 4:
            b2 = b * b
            b = np.sqrt(np.sqrt(np.sum(b2 * b2, axis=axis) * wi))
        else:
            b = (np.sum(b**pi, axis=axis) * wi) ** (1.0 / pi)
    return b * scale.reshape(b.shape)


def magnitude(data: np.ndarray, axis: int = 0) -> np.ndarray:
    """Pointwise Euclidean magnitude over the component axis.

    Values are rescaled by the global maximum first so tiny fields do not
    underflow when squared.
    """
    a = np.abs(data)
    if a.shape[axis] == 1:
        return np.take(a, 0, axis=axis)
    top = float(a.max()) if a.size else 0.0
    if top == 0 or not math.isfinite(top):
        return np.sqrt(np.sum(a * a, axis=axis))
    b = a / top
    return np.sqrt(np.sum(b * b, axis=axis)) * top


def mixed_norm(f: RealField, p: Sequence) -> float:
    """``||f||_{L^p}`` with x_1 innermost; vector fields use the pointwise magnitude."""
    p = check_exponent(p, f.grid.d)
    return float(mixed_norm_array(magnitude(f.data), p, f.grid.spacing))


def spectral_mixed_norm(coeffs: np.ndarray, grid: Grid, p: Sequence) -> float:
    """Mixed norm of complex lattice values with frequency weights 2*pi/L_i."""
    p = check_exponent(p, grid.d)
    return float(mixed_norm_array(magnitude(coeffs), p, grid.freq_spacing))


def holder_product_check(f: RealField, g: RealField, p1: Sequence, p2: Sequence) -> Check:
    """``||f g||_{p3} <= ||f||_{p1} ||g||_{p2}`` with ``1/p3 = 1/p1 + 1/p2``."""
    if f.grid != g.grid:
        raise ShapeError("fields live on different grids")
    d = f.grid.d
    p1, p2 = check_exponent(p1, d), check_exponent(p2, d)
    r3 = reciprocal(p1) + reciprocal(p2)
    if np.any(r3 > 1 + 1e-15):
        raise IncompatibleExponentsError(f"1/{p1} + 1/{p2} exceeds 1 in some entry")
    p3 = from_reciprocal(np.minimum(r3, 1.0))
    prod = magnitude(f.data) * magnitude(g.data)
    lhs = float(mixed_norm_array(prod, p3, f.grid.spacing))
    rhs = mixed_norm(f, p1) * mixed_norm(g, p2)
    return Check("holder", lhs, rhs, EXACT_SLACK, {"p1": p1, "p2": p2, "p3": p3})


def circular_convolution(phi: RealField, g: RealField) -> RealField:
    """``(phi * g)(x) = sum_y phi(y) g(x - y) * cell_volume``; phi scalar."""
    if phi.grid != g.grid:
        raise ShapeError("fields live on different grids")
    if phi.components != 1:
        raise ShapeError("convolution kernel must be scalar")
    grid = g.grid
    ph = forward(phi.data, grid)
    gh = forward(g.data, grid)
    # forward() carries (2 pi)^{-d/2} per factor; one factor of (2 pi)^{d/2} restores sum * h^d
    conv_hat = ph * gh * (2 * math.pi) ** (grid.d / 2)
    return RealField(grid, inverse(conv_hat, grid))


def young_convolution_check(phi: RealField, g: RealField, p: Sequence) -> Check:
    """``||phi * g||_p <= ||phi||_1 ||g||_p``."""
    p = check_exponent(p, g.grid.d)
    conv = circular_convolution(phi, g)
    lhs = mixed_norm(conv, p)
    rhs = mixed_norm(phi, (1.0,) * g.grid.d) * mixed_norm(g, p)
    return Check("young", lhs, rhs, EXACT_SLACK, {"p": p})


def hausdorff_young_check(f: RealField, p: Sequence) -> Check:
    """``||f^||_{p'} <= ||f||_p`` for ``1 <= p_d <= ... <= p_1 <= 2``."""
    p = check_exponent(p, f.grid.d)
    if any(v > 2 for v in p) or any(p[i] < p[i + 1] for i in range(len(p) - 1)):
        raise PreconditionError(f"Hausdorff-Young needs 1 <= p_d <= ... <= p_1 <= 2, got {p}")
    pc = conjugate_exponent(p)
    lhs = spectral_mixed_norm(forward(f.data, f.grid), f.grid, pc)
    rhs = mixed_norm(f, p)
    return Check("hausdorff_young", lhs, rhs, QUADRATURE_SLACK, {"p": p, "p_conjugate": pc})
