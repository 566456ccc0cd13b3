"""Nonlinear Klein-Gordon fields with curvature coupling on flat FRW backgrounds."""

from .geometry import Family, ScaleFactorModel, alpha_from_w, curvature_sample, scale_factor
from .grid import FieldState, Frame, SpatialGrid, bump_initial_data, laplacian, make_grid, sobolev_norm
from .matter import CouplingSpec, PotentialSpec, from_transformed, h_of_tau, rhs_F, to_transformed
from .evolve import PicardTrace, Status, Trajectory, evolve, picard_solve, step_mol
from .diagnostics import decay_monitor, energy_norm, iterate_gap, linear_energy, support_radius
from .regimes import classify

__version__ = "0.1.0"

__all__ = [
    "Family", "ScaleFactorModel", "alpha_from_w", "curvature_sample", "scale_factor",
    "FieldState", "Frame", "SpatialGrid", "bump_initial_data", "laplacian", "make_grid",
    "sobolev_norm", "CouplingSpec", "PotentialSpec", "from_transformed", "h_of_tau", "rhs_F",
    "to_transformed", "PicardTrace", "Status", "Trajectory", "evolve", "picard_solve",
    "step_mol", "decay_monitor", "energy_norm", "iterate_gap", "linear_energy",
    "support_radius", "classify",
]
