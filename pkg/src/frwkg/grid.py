"""Periodic spectral grid, field states and compactly supported initial data.

The physical problem lives on R^(D-1); runs here use a periodic box with
``d_sim`` in {1, 2, 3} axes, and the spacetime dimension D enters only
through the background coefficients. The box is a faithful stand-in while
the data's support (growing at unit speed) has not wrapped around.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .errors import InvalidGrid


class Frame(str, enum.Enum):
    ORIGINAL = "original"
    TRANSFORMED = "transformed"


@dataclass(frozen=True)
class FieldState:
    """Field and its conformal-time derivative at one instant."""

    tau: float
    phi: np.ndarray
    pi: np.ndarray
    frame: Frame = Frame.ORIGINAL

    def __post_init__(self):
        object.__setattr__(self, "frame", Frame(self.frame))
        if np.shape(self.phi) != np.shape(self.pi):
            raise ValueError("phi and pi must have the same shape")

    def is_finite(self):
        return bool(np.all(np.isfinite(self.phi)) and np.all(np.isfinite(self.pi)))

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    d_sim: int
    N: int
    L: float

    def __post_init__(self):
        if self.d_sim not in (1, 2, 3):
            raise InvalidGrid(f"d_sim must be 1, 2 or 3, got {self.d_sim!r}")
        if int(self.N) != self.N or self.N < 16 or self.N % 2:
            raise InvalidGrid(f"N must be an even integer >= 16, got {self.N!r}")
        if not self.L > 0:
            raise InvalidGrid(f"L must be positive, got {self.L!r}")

    @property
    def shape(self):
        return (self.N,) * self.d_sim

    @property
    def size(self):
        return self.N**self.d_sim

    @property
    def dx(self):
        return self.L / self.N

    @property
    def cell_volume(self):
        return self.dx**self.d_sim

    @cached_property
    def axis(self):
        return np.arange(self.N) * self.dx

    @cached_property
    def coords(self):
        """Coordinate arrays (one per axis) over the box [0, L)^d_sim."""
        return np.meshgrid(*([self.axis] * self.d_sim), indexing="ij")

    @cached_property
    def wavenumbers(self):
        """Per-axis lattice 2*pi*m/L, m in [-N/2, N/2), in FFT order."""
        return 2 * np.pi * np.fft.fftfreq(self.N, d=self.dx)

    @cached_property
    def k2(self):
        """|lambda|^2 on the full FFT lattice."""
        ks = np.meshgrid(*([self.wavenumbers] * self.d_sim), indexing="ij")
        return sum(k**2 for k in ks)

    @cached_property
    def k2_half(self):
        """|lambda|^2 on the half lattice used by real transforms."""
        kr = 2 * np.pi * np.fft.rfftfreq(self.N, d=self.dx)
        ks = np.meshgrid(*([self.wavenumbers] * (self.d_sim - 1) + [kr]), indexing="ij")
        return sum(k**2 for k in ks)

    @cached_property
    def kabs(self):
        return np.sqrt(self.k2)

    @cached_property
    def dealias_mask(self):
        m = np.fft.fftfreq(self.N, d=1.0 / self.N)
        keep = np.abs(m) < self.N / 3
        masks = np.meshgrid(*([keep] * self.d_sim), indexing="ij")
        return np.logical_and.reduce(masks)

    def sobolev_weight(self, k):
        """(1 + |lambda|^2)^k."""
        return (1.0 + self.k2) ** k

    def energy_weight(self, k):
        """sum_{m<=k} |lambda|^(2m), the isotropic stand-in for a multi-index sum."""
        w = np.ones_like(self.k2)
        term = np.ones_like(self.k2)
        for _ in range(k):
            term = term * self.k2
            w = w + term
        return w

    def fft(self, u):
        return np.fft.fftn(u, axes=self._axes(u))

    def ifft(self, u_hat):
        return np.fft.ifftn(u_hat, axes=self._axes(u_hat)).real

    def spectral_sum(self, weight, *u_hats):
        """cellVolume/N^d * sum weight*|u_hat|^2 summed over the given spectra.

        Trailing ``d_sim`` axes are the grid; leading axes (e.g. time) are kept.
        """
        ax = tuple(range(-self.d_sim, 0))
        total = sum(np.sum(weight * np.abs(uh) ** 2, axis=ax) for uh in u_hats)
        return total * self.cell_volume / self.size

    def _axes(self, u):
        return tuple(range(np.ndim(u) - self.d_sim, np.ndim(u)))


def make_grid(d_sim, N, L) -> SpatialGrid:
    return SpatialGrid(int(d_sim), int(N), float(L))


def laplacian(grid: SpatialGrid, u):
    u_hat = np.fft.rfftn(u, axes=grid._axes(u))
    return np.fft.irfftn(-grid.k2_half * u_hat, s=grid.shape, axes=grid._axes(u))


def sobolev_norm(grid: SpatialGrid, u, k=0):
    """H^k norm with multiplier (1+|lambda|^2)^k; k=0 is the grid L2 norm."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return float(np.sqrt(grid.spectral_sum(grid.sobolev_weight(k), grid.fft(u))))


def l2_norm(grid: SpatialGrid, u):
    return float(np.sqrt(np.sum(np.abs(u) ** 2) * grid.cell_volume))


def periodic_distance(grid: SpatialGrid, center=None):
    """Minimum-image distance of every grid point from ``center`` (default: box centre)."""
    if center is None:
        center = (grid.L / 2,) * grid.d_sim
    center = np.broadcast_to(np.asarray(center, dtype=float), (grid.d_sim,))
    r2 = np.zeros(grid.shape)
    for x, c in zip(grid.coords, center):
        d = (x - c + grid.L / 2) % grid.L - grid.L / 2
        r2 += d**2
    return np.sqrt(r2)


def bump_initial_data(grid: SpatialGrid, amplitude, radius, center=None):
    """Smooth compactly supported profile amplitude*exp(-r^2/(radius^2-r^2)).

    Returns ``(f, g)`` with ``g`` identically zero.
    """
    if not 0 < radius < grid.L / 2:
        raise InvalidGrid(f"bump radius must lie in (0, L/2), got {radius!r}")
    r = periodic_distance(grid, center)
    f = np.zeros(grid.shape)
    inside = r < radius
    ri2 = r[inside] ** 2
    f[inside] = amplitude * np.exp(-ri2 / (radius**2 - ri2))
    return f, np.zeros(grid.shape)


def plane_wave_initial_data(grid: SpatialGrid, amplitude=1.0, mode=1):
    """Data for the right-moving wave amplitude*cos(kappa*(x - tau)) along axis 0."""
    kappa = 2 * np.pi * mode / grid.L
    x = grid.coords[0]
    return amplitude * np.cos(kappa * x), amplitude * kappa * np.sin(kappa * x)
