"""Admissibility of a background/coupling/potential for the global existence result.

Three conditions are checked:

1. h(tau) <= 0 and h'(tau) >= 0 for all tau >= 0 (non-strict; h == 0 passes).
2. The potential is the monomial -epsilon/(p+1) phi^(p+1) (built into PotentialSpec).
3. A(tau0) = int_0^inf a(tau)^((D+2-(D-2)p)/2) dtau is finite (e = -1 diverges).

``classify`` also reports the tabulated bounds on p and xi for the matching
case. Those inequalities are strict; when every input is an int or
:class:`fractions.Fraction` the bounds come out as exact rationals.

The small-data threshold epsilon_0 depends on proof constants and is not
computed. It scales like 1/A(tau0), so A is reported for comparing regimes.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate

from .errors import InvalidParameters
from .geometry import Family, ScaleFactorModel
from .matter import CouplingSpec, h_coefficient, h_of_tau, source_exponent

CASE_IV_TOL = 1e-12


class Case(str, enum.Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    EXPONENTIAL = "ExponentialCase"
    INADMISSIBLE = "Inadmissible"


@dataclass(frozen=True)
class Bound:
    direction: str  # "<" or ">"
    value: float | Fraction

    def holds(self, x):
        return x < self.value if self.direction == "<" else x > self.value

    def __str__(self):
        return f"{self.direction} {self.value}"


@dataclass(frozen=True)
class Assumption1Result:
    passed: bool
    coefficient: float
    witness_tau: float | None = None


@dataclass(frozen=True)
class AIntegral:
    converges: bool
    value: float


@dataclass(frozen=True)
class RegimeVerdict:
    case_label: Case
    D: int
    alpha: float | Fraction | None
    w: float | Fraction | None
    xi: float
    p: float
    tau0: float
    assumption1: Assumption1Result
    assumption3: AIntegral
    p_bound: Bound
    xi_bound: Bound | None
    admissible: bool

    @property
    def table_conditions_hold(self):
        """Strict tabulated inequalities on p and xi."""
        ok = self.p_bound.holds(self.p)
        if self.xi_bound is not None:
            ok = ok and self.xi_bound.holds(self.xi)
        return ok

    def to_dict(self):
        def conv(v):
            if isinstance(v, Fraction):
                return str(v) if v.denominator != 1 else int(v)
            if isinstance(v, enum.Enum):
                return v.value
            if isinstance(v, float) and math.isinf(v):
                return "inf"
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            return v

        d = asdict(self)
        d["assumption1"] = conv(d["assumption1"])
        d["assumption3"] = conv(d["assumption3"])
        d["p_bound"] = conv(d["p_bound"])
        d["xi_bound"] = "unrestricted" if self.xi_bound is None else conv(d["xi_bound"])
        d["table_conditions_hold"] = self.table_conditions_hold
        return {k: conv(v) for k, v in d.items()}


def check_assumption1(model: ScaleFactorModel, xi: CouplingSpec) -> Assumption1Result:
    """Sign test of h and h' from the closed-form coefficient.

    Both families give h = c * (positive function) with h' of the opposite
    sign (or zero), so the assumption reduces to c <= 0.
    """
    c = float(h_coefficient(model, xi))
    if c <= 0:
        return Assumption1Result(True, c)
    return Assumption1Result(False, c, witness_tau=0.0)


def a_integral(model: ScaleFactorModel, p, *, tau0=None) -> AIntegral:
    """Closed form of A(tau0). ``tau0`` overrides the model's offset (0 allowed)."""
    if not p > 0:
        raise InvalidParameters("p must be > 0")
    t0 = model.tau0 if tau0 is None else tau0
    alpha = float(model.alpha)
    if model.family is Family.POWER_LAW:
        e = alpha * source_exponent(model.D, p)
        if e >= -1 or t0 <= 0:
            return AIntegral(False, math.inf)
        return AIntegral(True, t0 ** (e + 1) / (-e - 1))
    beta = alpha * source_exponent(model.D, p)
    if beta >= 0:
        return AIntegral(False, math.inf)
    return AIntegral(True, math.exp(beta * t0) / -beta)


def a_integral_quadrature(model: ScaleFactorModel, p, *, tau0=None, tail_tol=1e-10,
                          max_doublings=2000):
    """Independent quadrature estimate of A(tau0).

    Integrates piecewise over [U, 2U], doubling U until a piece is below
    ``tail_tol`` relative to the running total. Power laws are integrated in
    the variable u = log(tau + tau0), which turns slow algebraic tails into
    exponential ones. Returns ``math.inf`` when the running total overflows.
    """
    t0 = model.tau0 if tau0 is None else tau0
    alpha = float(model.alpha)
    expo = source_exponent(model.D, p)
    if model.family is Family.POWER_LAW:
        if t0 <= 0:
            return math.inf
        rate = alpha * expo + 1.0
        lo = math.log(t0)
        fn = lambda u: math.exp(rate * u)  # noqa: E731
    else:
        rate = alpha * expo
        lo = 0.0
        fn = lambda s: math.exp(rate * (s + t0))  # noqa: E731
    total, a, width = 0.0, lo, 1.0
    for _ in range(max_doublings):
        b = a + width
        try:
            with warnings.catch_warnings():
                # divergence is detected below from the running total
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                piece, _ = integrate.quad(fn, a, b, epsabs=0.0, epsrel=1e-12, limit=200)
        except OverflowError:
            return math.inf
        if not math.isfinite(piece) or total + piece > 1e300:
            return math.inf
        total += piece
        if piece <= tail_tol * max(total, 1e-300) and piece < total:
            return total
        a, width = b, 2 * width
        if width > 1e12:
            return math.inf
    return math.inf


def _exact(*xs):
    return all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for x in xs)


def case_for_alpha(D, alpha):
    threshold = Fraction(2, D - 2)
    if abs(alpha - threshold) <= CASE_IV_TOL:
        return Case.IV
    if alpha < 0:
        return Case.I
    if alpha == 0:
        return Case.INADMISSIBLE
    return Case.II if alpha < threshold else Case.III


def table_bounds(case: Case, D, alpha):
    """(p_bound, xi_bound) for a case; exact when ``alpha`` is int/Fraction."""
    exact = alpha is None or _exact(alpha)
    num = Fraction if exact else (lambda a, b=1: a / b)
    xi_crit = num(D - 2, 4 * (D - 1))
    if case is Case.I:
        return Bound("<", (D + 2 - 2 / abs(alpha)) / num(D - 2)), Bound(">", xi_crit)
    if case in (Case.II, Case.III):
        pb = Bound(">", (D + 2 + 2 / alpha) / num(D - 2))
        return pb, Bound("<" if case is Case.II else ">", xi_crit)
    if case is Case.IV:
        return Bound(">", num(2 * D, D - 2)), None
    if case is Case.EXPONENTIAL:
        return Bound(">", num(D + 2, D - 2)), Bound(">", xi_crit)
    # a == 1: no power of a can make A finite
    return Bound("<", num(0)), None


def classify(D, *, w=None, alpha=None, xi=0.0, p=1.0, tau0=1.0, rate=1.0,
             family=None) -> RegimeVerdict:
    """Classify a single-component background.

    Give either ``w`` (equation of state) or ``alpha`` (power-law exponent;
    with ``family="exponential"`` it is the rate instead). On the degenerate
    line w = -(D-3)/(D-1) the exponential family is used with ``rate``.
    """
    if int(D) != D or D < 4:
        raise InvalidParameters(f"D must be an integer >= 4, got {D!r}")
    if not p > 0:
        raise InvalidParameters(f"p must be > 0, got {p!r}")
    if not tau0 > 0:
        raise InvalidParameters(f"tau0 must be > 0, got {tau0!r}")
    if (w is None) == (alpha is None):
        raise InvalidParameters("give exactly one of w or alpha")
    D = int(D)
    fam = Family(family) if family is not None else None
    if w is not None:
        model = ScaleFactorModel.from_w(D, w, tau0=tau0, rate=rate)
    elif fam is Family.EXPONENTIAL:
        model = ScaleFactorModel.exponential(alpha, tau0=tau0, D=D)
    else:
        model = ScaleFactorModel.power_law(alpha, tau0=tau0, D=D)
    coupling = CouplingSpec(float(xi))
    alpha_out = model.alpha
    if model.family is Family.EXPONENTIAL:
        case = Case.EXPONENTIAL
        p_bound, xi_bound = table_bounds(case, D, None)
    else:
        case = case_for_alpha(D, alpha_out)
        p_bound, xi_bound = table_bounds(case, D, alpha_out)
    a1 = check_assumption1(model, coupling)
    a3 = a_integral(model, p)
    return RegimeVerdict(
        case_label=case, D=D, alpha=alpha_out, w=w, xi=xi, p=p, tau0=tau0,
        assumption1=a1, assumption3=a3, p_bound=p_bound, xi_bound=xi_bound,
        admissible=a1.passed and a3.converges,
    )


def numerical_assumption1(model: ScaleFactorModel, xi: CouplingSpec, n=1000, tau_max=1e4):
    """Sample h on a log-spaced grid and test h <= 0 and non-decreasing."""
    taus = np.concatenate([[0.0], np.logspace(-6, math.log10(tau_max), n - 1)])
    h = h_of_tau(model, xi, taus)
    scale = max(float(np.max(np.abs(h))), 1e-300)
    tol = 1e-13 * scale
    return bool(np.all(h <= tol) and np.all(np.diff(h) >= -tol))


def standard_models_4d():
    """The three standard four-dimensional models, classified exactly."""
    rows = []
    for name, w in (("Matter Dominated", Fraction(0)), ("Lambda-Dominated", Fraction(-1)),
                    ("Radiation Dominated", Fraction(1, 3))):
        v = classify(4, w=w, xi=Fraction(1, 5), p=Fraction(3), tau0=1)
        rows.append((name, v.w, v.alpha, v.xi_bound, v.p_bound))
    return rows

