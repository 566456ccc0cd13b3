"""Spatially flat FRW backgrounds in conformal time.

Two closed-form families are supported::

    PowerLaw:     a(tau) = (tau + tau0) ** alpha
    Exponential:  a(tau) = exp(alpha * (tau + tau0))

Run time always starts at tau = 0; the offset tau0 is added internally.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real

import numpy as np

from .errors import DegenerateEquationOfState, InvalidParameters, MissingW

DEGENERATE_W_TOL = 1e-12


class Family(str, enum.Enum):
    POWER_LAW = "power"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class ScaleFactorModel:
    family: Family
    alpha: Real
    tau0: float
    D: int
    w: Real | None = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if int(self.D) != self.D or self.D < 4:
            raise InvalidParameters(f"D must be an integer >= 4, got {self.D!r}")
        if not self.tau0 > 0:
            raise InvalidParameters(f"tau0 must be > 0, got {self.tau0!r}")
        if self.family is Family.EXPONENTIAL and not self.alpha > 0:
            raise InvalidParameters("exponential family requires alpha > 0")

    @classmethod
    def power_law(cls, alpha, tau0=1.0, D=4):
        return cls(Family.POWER_LAW, alpha, tau0, D)

    @classmethod
    def exponential(cls, rate, tau0=1.0, D=4):
        return cls(Family.EXPONENTIAL, rate, tau0, D)

    @classmethod
    def from_w(cls, D, w, tau0=1.0, rate=1.0):
        """Build the single-component model for equation of state ``w``.

        On the degenerate line the exponential family is returned with the
        supplied ``rate`` (the equation of state does not fix it).
        """
        try:
            alpha = alpha_from_w(D, w)
        except DegenerateEquationOfState:
            return cls(Family.EXPONENTIAL, rate, tau0, D, w)
        return cls(Family.POWER_LAW, alpha, tau0, D, w)

    @property
    def is_flat(self):
        return self.family is Family.POWER_LAW and self.alpha == 0


@dataclass(frozen=True)
class CurvatureSample:
    tau: float
    a: float
    H: float
    Hdot: float
    R: float


def scale_factor(model: ScaleFactorModel, tau):
    s = np.asarray(tau, dtype=float) + model.tau0
    alpha = float(model.alpha)
    if model.family is Family.POWER_LAW:
        return s**alpha
    return np.exp(alpha * s)


def hubble(model: ScaleFactorModel, tau):
    """Conformal Hubble rate H = a'/a and its derivative, from the closed form."""
    s = np.asarray(tau, dtype=float) + model.tau0
    alpha = float(model.alpha)
    if model.family is Family.POWER_LAW:
        return alpha / s, -alpha / s**2
    return np.full_like(s, alpha), np.zeros_like(s)


def scalar_curvature(D, a, H, Hdot):
    return (D - 1) * a**-2 * (2 * Hdot + (D - 2) * H**2)


def curvature_sample(model: ScaleFactorModel, tau) -> CurvatureSample:
    a = scale_factor(model, tau)
    H, Hdot = hubble(model, tau)
    R = scalar_curvature(model.D, a, H, Hdot)
    return CurvatureSample(tau=tau, a=a, H=H, Hdot=Hdot, R=R)


def alpha_from_w(D, w):
    """Power-law exponent 2 / ((D-1)(w+1) - 2) for equation of state ``w``.

    Exact (a Fraction) for int or :class:`fractions.Fraction` input.
    """
    if D < 4:
        raise InvalidParameters(f"D must be >= 4, got {D!r}")
    if abs(w + Fraction(D - 3, D - 1)) <= DEGENERATE_W_TOL:
        raise DegenerateEquationOfState(
            f"w = -(D-3)/(D-1) = {-(D - 3) / (D - 1):.6g} selects the exponential family")
    two = Fraction(2) if isinstance(w, (int, Fraction)) else 2.0
    return two / ((D - 1) * (w + 1) - 2)


def friedmann_residual(D, w, alpha):
    return abs(2 - alpha * ((D - 1) * (1 + w) - 2))


def friedmann_consistency(model: ScaleFactorModel):
    """Residual of the scaling relation that fixes alpha from w (0 when consistent)."""
    if model.w is None:
        raise MissingW("model was not built from an equation of state")
    if model.family is not Family.POWER_LAW:
        raise InvalidParameters("scaling relation only applies to the power-law family")
    return friedmann_residual(model.D, model.w, model.alpha)


def einstein_de_sitter_curvature(D, s):
    """Closed-form R for matter domination, alpha = 2/(D-3), at s = tau + tau0."""
    return 4 * (D - 1) / ((D - 3) ** 2 * s ** (2 * (D - 1) / (D - 3)))
