"""Scalar sector: monomial potential, curvature coupling and the wave-equation sources.

Original frame::

    phi'' - lap(phi) = F(phi, phi')
    F = -(D-2) H phi' - xi (D-1) (2 H' + (D-2) H^2) phi + a^2 dV/dphi

Transformed frame, psi = a^((D-2)/2) phi::

    psi'' - lap(psi) = h(tau) psi + epsilon * P(tau, psi)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FrameMismatch, InvalidParameters, NonIntegerPowerNegativeBase
from .geometry import Family, ScaleFactorModel, curvature_sample, hubble, scale_factor
from .grid import FieldState, Frame


@dataclass(frozen=True)
class PotentialSpec:
    """V(phi) = -epsilon/(p+1) * phi^(p+1)."""

    epsilon: float = 0.0
    p: float = 3.0

    def __post_init__(self):
        if self.epsilon < 0:
            raise InvalidParameters("epsilon must be >= 0")
        if not self.p > 0:
            raise InvalidParameters("p must be > 0")

    @property
    def integer_power(self):
        return float(self.p).is_integer()


@dataclass(frozen=True)
class CouplingSpec:
    xi: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.xi):
            raise InvalidParameters("xi must be finite")


def _power(spec: PotentialSpec, phi, exponent):
    phi = np.asarray(phi, dtype=float)
    if spec.integer_power:
        return phi ** int(round(exponent))
    if np.any(phi < 0):
        raise NonIntegerPowerNegativeBase(
            f"p={spec.p!r} is not an integer and the field has negative values")
    return phi**exponent


def potential(spec: PotentialSpec, phi):
    if spec.epsilon == 0:
        return np.zeros_like(np.asarray(phi, dtype=float))
    return -(spec.epsilon / (spec.p + 1)) * _power(spec, phi, spec.p + 1)


def potential_grad(spec: PotentialSpec, phi):
    if spec.epsilon == 0:
        return np.zeros_like(np.asarray(phi, dtype=float))
    return -spec.epsilon * _power(spec, phi, spec.p)


def rhs_F(model: ScaleFactorModel, xi: CouplingSpec, spec: PotentialSpec, phi, pi, tau,
          *, grad_filter=None):
    """Right-hand side F(phi, phi') of the original-frame wave equation.

    ``grad_filter`` optionally post-processes the potential term (dealiasing).
    """
    c = curvature_sample(model, tau)
    D = model.D
    out = -(D - 2) * c.H * pi - xi.xi * (D - 1) * (2 * c.Hdot + (D - 2) * c.H**2) * phi
    if spec.epsilon:
        vg = c.a**2 * potential_grad(spec, phi)
        out = out + (grad_filter(vg) if grad_filter is not None else vg)
    return out


def coupling_factor(D, xi: CouplingSpec):
    """(D-2)/2 - 2 xi (D-1); h vanishes identically when it does."""
    return (D - 2) / 2 - 2 * xi.xi * (D - 1)


def h_of_tau(model: ScaleFactorModel, xi: CouplingSpec, tau):
    H, Hdot = hubble(model, tau)
    D = model.D
    return coupling_factor(D, xi) * (Hdot + (D - 2) / 2 * H**2)


def h_coefficient(model: ScaleFactorModel, xi: CouplingSpec):
    """Closed-form constant of h.

    Power law: h = c / (tau+tau0)^2 with c = alpha*[(D-2)/2 - 2xi(D-1)]*[-1 + alpha(D-2)/2].
    Exponential: h = c, a constant.
    """
    D, alpha = model.D, float(model.alpha)
    if model.family is Family.POWER_LAW:
        return alpha * coupling_factor(D, xi) * (-1 + alpha * (D - 2) / 2)
    return alpha**2 * (D - 2) / 2 * coupling_factor(D, xi)


def h_of_tau_closed(model: ScaleFactorModel, xi: CouplingSpec, tau):
    c = h_coefficient(model, xi)
    s = np.asarray(tau, dtype=float) + model.tau0
    if model.family is Family.POWER_LAW:
        return c / s**2
    return np.full_like(s, c)


def dh_dtau(model: ScaleFactorModel, xi: CouplingSpec, tau):
    c = h_coefficient(model, xi)
    s = np.asarray(tau, dtype=float) + model.tau0
    if model.family is Family.POWER_LAW:
        return -2 * c / s**3
    return np.zeros_like(s)


def source_exponent(D, p):
    """Power of a multiplying psi^p in the transformed-frame source."""
    return (D + 2 - (D - 2) * p) / 2


def source_P(model: ScaleFactorModel, spec: PotentialSpec, tau, psi):
    """-a^((D+2-(D-2)p)/2) * psi^p, without the epsilon factor."""
    a = scale_factor(model, tau)
    return -(a ** source_exponent(model.D, spec.p)) * _power(spec, psi, spec.p)


def transformed_rhs(model, xi, spec, psi, tau, *, grad_filter=None):
    out = h_of_tau(model, xi, tau) * psi
    if spec.epsilon:
        src = spec.epsilon * source_P(model, spec, tau, psi)
        out = out + (grad_filter(src) if grad_filter is not None else src)
    return out


def frame_weight(model: ScaleFactorModel, tau):
    """a^((D-2)/2) and its tau-derivative."""
    s = (model.D - 2) / 2
    a = scale_factor(model, tau)
    H, _ = hubble(model, tau)
    w = a**s
    return w, s * H * w


def to_transformed(state: FieldState, model: ScaleFactorModel) -> FieldState:
    if state.frame is not Frame.ORIGINAL:
        raise FrameMismatch("state is already in the transformed frame")
    w, wdot = frame_weight(model, state.tau)
    psi = w * state.phi
    dpsi = wdot * state.phi + w * state.pi
    return FieldState(state.tau, psi, dpsi, Frame.TRANSFORMED)


def from_transformed(state: FieldState, model: ScaleFactorModel) -> FieldState:
    if state.frame is not Frame.TRANSFORMED:
        raise FrameMismatch("state is already in the original frame")
    w, wdot = frame_weight(model, state.tau)
    phi = state.phi / w
    pi = (state.pi - wdot * phi) / w
    return FieldState(state.tau, phi, pi, Frame.ORIGINAL)
