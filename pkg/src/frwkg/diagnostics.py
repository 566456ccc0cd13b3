"""Energy functionals, norms and monitors evaluated on field states.

Every Sobolev quantity is computed spectrally, so diagnostics and the solver
share one discretisation of the gradient.

The k-order linear energy uses the isotropic multiplier
M_k = sum_{m<=k} |lambda|^(2m) in place of the multi-index sum
sum_{|alpha|<=k} lambda^(2 alpha). Expanding |lambda|^(2m) with the
multinomial theorem gives, for every mode,

    multi_index <= M_k <= c(k, d) * multi_index,

with c(k, d) the largest multinomial coefficient of order <= k in d
variables (see :func:`energy_equivalence_constants`). In one dimension the
two agree exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import FrameMismatch, LatticeMismatch
from .geometry import ScaleFactorModel, hubble, scale_factor
from .grid import FieldState, Frame, SpatialGrid, l2_norm, periodic_distance, sobolev_norm


@dataclass
class EnergyReport:
    tau: float
    Hk: dict = field(default_factory=dict)
    energy_norm: dict = field(default_factory=dict)
    l2: float = 0.0
    linf: float = 0.0
    decay_product: float = 0.0
    support_radius: float | None = None


def linear_energy(grid: SpatialGrid, state: FieldState, k=0):
    if k < 0:
        raise ValueError("k must be >= 0")
    w = grid.energy_weight(k)
    phi_hat, pi_hat = grid.fft(state.phi), grid.fft(state.pi)
    return 0.5 * float(grid.spectral_sum(w, pi_hat) + grid.spectral_sum(w * grid.k2, phi_hat))


def linear_energy_series(grid: SpatialGrid, phi, pi, k=0):
    """H_k for stacked (time, grid...) arrays."""
    w = grid.energy_weight(k)
    return 0.5 * (grid.spectral_sum(w, grid.fft(pi)) + grid.spectral_sum(w * grid.k2, grid.fft(phi)))


def energy_norm(grid: SpatialGrid, state: FieldState, k=0):
    """||phi||_{H^(k+1)} + ||phi'||_{H^k}."""
    return sobolev_norm(grid, state.phi, k + 1) + sobolev_norm(grid, state.pi, k)


def iterate_gap(grid: SpatialGrid, traj_a, traj_b, k=0):
    """sup over stored times of H_k[a - b]^(1/2) + ||phi_a - phi_b||_L2."""
    ta, tb = traj_a.taus, traj_b.taus
    if ta.shape != tb.shape or not np.array_equal(ta, tb):
        raise LatticeMismatch("trajectories are stored on different time lattices")
    phi_a, pi_a = traj_a.stacked()
    phi_b, pi_b = traj_b.stacked()
    dphi, dpi = phi_a - phi_b, pi_a - pi_b
    h = linear_energy_series(grid, dphi, dpi, k)
    l2 = np.sqrt(np.sum(dphi**2, axis=tuple(range(1, dphi.ndim))) * grid.cell_volume)
    return float(np.max(np.sqrt(h) + l2))


def decay_value(grid: SpatialGrid, state: FieldState, model: ScaleFactorModel, k=0):
    """a^((D-2)/2) * (||phi||_{H^(k+1)} + (D-2)/2 * ||H phi + phi'||_{H^k})."""
    if state.frame is not Frame.ORIGINAL:
        raise FrameMismatch("decay monitor needs an original-frame state")
    D = model.D
    a = float(scale_factor(model, state.tau))
    H, _ = hubble(model, state.tau)
    lhs = (sobolev_norm(grid, state.phi, k + 1)
           + (D - 2) / 2 * sobolev_norm(grid, float(H) * state.phi + state.pi, k))
    return a ** ((D - 2) / 2) * lhs


def decay_monitor(grid: SpatialGrid, traj, model: ScaleFactorModel, k=0):
    if traj.frame is not Frame.ORIGINAL:
        raise FrameMismatch("decay monitor needs an original-frame trajectory")
    return np.array([decay_value(grid, s, model, k) for s in traj.states])


def support_radius(grid: SpatialGrid, state: FieldState, threshold=1e-10, center=None):
    """Radius of the smallest centred ball outside which |phi|, |pi| <= threshold."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    above = (np.abs(state.phi) > threshold) | (np.abs(state.pi) > threshold)
    if not np.any(above):
        return 0.0
    return float(np.max(periodic_distance(grid, center)[above]))


def energy_report(grid: SpatialGrid, state: FieldState, model: ScaleFactorModel, k_max=2,
                  *, threshold=1e-10, center=None) -> EnergyReport:
    if state.frame is not Frame.ORIGINAL:
        raise FrameMismatch("energy reports are taken in the original frame")
    return EnergyReport(
        tau=float(state.tau),
        Hk={k: linear_energy(grid, state, k) for k in range(k_max + 1)},
        energy_norm={k: energy_norm(grid, state, k) for k in range(k_max + 1)},
        l2=l2_norm(grid, state.phi),
        linf=float(np.max(np.abs(state.phi))),
        decay_product=decay_value(grid, state, model, k_max),
        support_radius=support_radius(grid, state, threshold, center),
    )


def energy_equivalence_constants(k, d_sim):
    """(c1, c2) with c1*E_multi <= E_ours <= c2*E_multi for E = H_k^(1/2)."""
    worst = 1
    for m in range(k + 1):
        for alpha in product(range(m + 1), repeat=d_sim):
            if sum(alpha) == m:
                coeff = math.factorial(m) // math.prod(math.factorial(a) for a in alpha)
                worst = max(worst, coeff)
    return 1.0, math.sqrt(worst)
