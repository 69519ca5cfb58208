"""Measurement of the Bernstein constant on a seeded dilation corpus.

Each family member is ``u_lam = F^-1[psi(. / lam)]`` for one smooth random
profile ``psi`` supported in the ball of radius ``radius``, so on R^d the
normalized ratio ``rho`` would not depend on ``lam`` at all.  On the torus the
spread across ``lam`` measures periodization and lattice effects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .besov import bernstein_check
from .grid import Grid, RealField, inverse
from .lebesgue import format_exponent
from .littlewood_paley import INNER, OUTER

DEFAULT_PAIRS = (
    ((2.0, 2.0), (2.0, 2.0)),
    ((1.0, 2.0), (2.0, math.inf)),
    ((2.0, 1.0), (math.inf, 2.0)),
    ((1.0, 1.0), (math.inf, math.inf)),
    ((2.0, 4.0 / 3.0), (4.0, 2.0)),
)


def _bump(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = np.exp(-1.0 / (1.0 - t[inside] ** 2))
    return out


@dataclass(frozen=True)
class DilationProfile:
    """Smooth random profile ``psi(xi) = bump * (1 + sum_j a_j cos(b_j . xi + c_j))``."""

    radius: float
    freqs: np.ndarray
    amps: np.ndarray
    phases: np.ndarray
    annulus: bool = False

    @classmethod
    def random(cls, rng: np.random.Generator, d: int, radius: float = 1.0, terms: int = 4,
               annulus: bool = False) -> "DilationProfile":
        return cls(radius, rng.normal(size=(terms, d)) * 2.0, rng.uniform(-0.4, 0.4, terms),
                   rng.uniform(0, 2 * math.pi, terms), annulus)

    def __call__(self, xi: np.ndarray) -> np.ndarray:
        r = np.sqrt(np.sum(xi**2, axis=0))
        if self.annulus:
            # bump on (INNER, OUTER) in radius
            env = _bump((2 * r - (INNER + OUTER)) / (OUTER - INNER))
        else:
            env = _bump(r / self.radius)
        mod = 1.0 + sum(a * np.cos(np.tensordot(b, xi, axes=1) + c)
                        for a, b, c in zip(self.amps, self.freqs, self.phases))
        return env * mod

    def sample(self, grid: Grid, lam: float) -> RealField:
        coeffs = self(grid.eta / lam) * grid.resolved
        data = inverse(coeffs[None], grid)
        return RealField(grid, data / np.max(np.abs(data)))


@dataclass
class SweepResult:
    rows: list[dict] = field(default_factory=list)

    def spread(self) -> dict[str, float]:
        """``max rho / min rho`` across ``lam`` for each (profile, k, p, q)."""
        groups: dict[str, list[float]] = {}
        for r in self.rows:
            key = f"{r['profile']}|k={r['k']}|p={r['p']}|q={r['q']}"
            groups.setdefault(key, []).append(r["rho"])
        return {k: max(v) / min(v) for k, v in groups.items()}

    def measured_constant(self) -> float:
        """Smallest ``C`` with ``rho <= C**(k+1)`` (and the reverse bound) on every row."""
        c = 1.0
        for r in self.rows:
            c = max(c, r["rho"] ** (1.0 / (r["k"] + 1)))
            if "lower" in r and r["lower"] > 0:
                c = max(c, r["lower"] ** (-1.0 / (r["k"] + 1)))
        return c


def bernstein_sweep(grid: Grid, seed: int = 0, lams=(1.0, 2.0, 4.0, 8.0), ks=(0, 1, 2),
                    pairs=DEFAULT_PAIRS, profiles: int = 2, radius: float = 1.0,
                    annulus: bool = False) -> SweepResult:
    """Evaluate ``rho`` on dilation families; ``C_B`` is effectively infinite here."""
    rng = np.random.default_rng(seed)
    out = SweepResult()
    for j in range(profiles):
        prof = DilationProfile.random(rng, grid.d, radius, annulus=annulus)
        for lam in lams:
            u = prof.sample(grid, lam)
            for k in ks:
                for p, q in pairs:
                    checks = bernstein_check(u, lam, k, p, q, case="annulus" if annulus else "ball",
                                             radius=radius, C_B=math.inf)
                    row = {"profile": j, "lam": lam, "k": k, "p": format_exponent(p),
                           "q": format_exponent(q), "rho": checks[0].extra["rho"]}
                    if annulus:
                        row["lower"] = checks[1].extra["ratio"]
                    out.rows.append(row)
    return out
