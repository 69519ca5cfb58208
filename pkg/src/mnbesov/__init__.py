"""Mixed-norm Besov spaces and mild Navier-Stokes solutions on periodic grids."""

from .besov import BesovIndex, Trajectory, besov_norm, critical_sigma, fourier_besov_norm, z_norm
from .grid import Grid, RealField, SpectralField, dft, idft
from .littlewood_paley import FilterBank, build_filter_bank
from .lebesgue import mixed_norm, parse_exponent
from .solver import SolverConfig, picard_solve, rk4_oracle

__version__ = "0.1.0"

__all__ = [
    "BesovIndex", "Trajectory", "besov_norm", "critical_sigma", "fourier_besov_norm", "z_norm",
    "Grid", "RealField", "SpectralField", "dft", "idft", "FilterBank", "build_filter_bank",
    "mixed_norm", "parse_exponent", "SolverConfig", "picard_solve", "rk4_oracle",
]
