import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frwkg.errors import DegenerateEquationOfState, InvalidParameters, MissingW
from frwkg.geometry import (Family, ScaleFactorModel, alpha_from_w, curvature_sample,
                            einstein_de_sitter_curvature, friedmann_consistency, hubble,
                            scale_factor)


def test_scale_factor_examples():
    assert scale_factor(ScaleFactorModel.power_law(2, tau0=1), 0.0) == 1.0
    D = 5
    assert scale_factor(ScaleFactorModel.power_law(Fraction(2, D - 3), 1, D), 0.0) == 1.0
    m = ScaleFactorModel.exponential(0.5, tau0=0.2)
    assert math.isclose(scale_factor(m, 0.0), math.exp(0.1), rel_tol=1e-15)


def test_curvature_examples():
    assert math.isclose(curvature_sample(ScaleFactorModel.power_law(2, 1, 4), 0.0).R, 12.0,
                        rel_tol=1e-14)
    assert math.isclose(curvature_sample(ScaleFactorModel.power_law(1, 2, 6), 0.0).R, 5 / 8,
                        rel_tol=1e-14)
    for rate in (0.1, 1.0, 3.0):
        c = curvature_sample(ScaleFactorModel.exponential(rate, 1.0), np.linspace(0, 5, 7))
        assert np.all(c.Hdot == 0)
        assert np.all(c.H == rate)


def test_power_law_hubble_closed_form():
    m = ScaleFactorModel.power_law(-1.5, tau0=0.7)
    H, Hdot = hubble(m, 1.3)
    assert math.isclose(H, -1.5 / 2.0)
    assert math.isclose(Hdot, 1.5 / 4.0)


def test_alpha_from_w_examples():
    assert alpha_from_w(4, 0) == 2
    assert alpha_from_w(4, Fraction(1, 3)) == 1
    assert alpha_from_w(4, -1) == -1
    with pytest.raises(DegenerateEquationOfState):
        alpha_from_w(4, Fraction(-1, 3))
    with pytest.raises(DegenerateEquationOfState):
        alpha_from_w(4, -1 / 3)


def test_from_w_switches_to_exponential_on_degenerate_line():
    m = ScaleFactorModel.from_w(6, Fraction(-3, 5), rate=0.4)
    assert m.family is Family.EXPONENTIAL
    assert m.alpha == 0.4


def test_friedmann_consistency_examples():
    assert friedmann_consistency(ScaleFactorModel.from_w(4, 0)) == 0
    m = ScaleFactorModel(Family.POWER_LAW, 1.9, 1.0, 4, w=0)
    assert math.isclose(friedmann_consistency(m), 0.1, rel_tol=1e-12)
    m = ScaleFactorModel(Family.POWER_LAW, Fraction(2, 3), 1.0, 5, w=Fraction(1, 4))
    assert friedmann_consistency(m) == 0
    with pytest.raises(MissingW):
        friedmann_consistency(ScaleFactorModel.power_law(2))


@pytest.mark.parametrize("kwargs", [
    dict(family=Family.POWER_LAW, alpha=1, tau0=0.0, D=4),
    dict(family=Family.POWER_LAW, alpha=1, tau0=1.0, D=3),
    dict(family=Family.EXPONENTIAL, alpha=0.0, tau0=1.0, D=4),
    dict(family=Family.EXPONENTIAL, alpha=-1.0, tau0=1.0, D=4),
])
def test_model_invariants_rejected(kwargs):
    with pytest.raises(InvalidParameters):
        ScaleFactorModel(**kwargs)


@pytest.mark.parametrize("D", range(4, 11))
def test_matter_dominated_curvature_closed_form(D):
    m = ScaleFactorModel.power_law(Fraction(2, D - 3), tau0=1.0, D=D)
    taus = np.linspace(0.0, 20.0, 41)
    R = curvature_sample(m, taus).R
    np.testing.assert_allclose(R, einstein_de_sitter_curvature(D, taus + 1.0), rtol=1e-12)


models = st.one_of(
    st.builds(ScaleFactorModel.power_law, st.floats(-3, 3), st.floats(0.1, 5),
              st.integers(4, 10)),
    st.builds(ScaleFactorModel.exponential, st.floats(0.01, 2), st.floats(0.1, 5),
              st.integers(4, 10)),
)


@settings(max_examples=60, deadline=None)
@given(models, st.floats(0.0, 10.0))
def test_hubble_matches_finite_differences(model, tau):
    step = 1e-5
    t = tau + step  # keep both stencil points at tau >= 0
    a = lambda x: float(scale_factor(model, x))  # noqa: E731
    H, Hdot = hubble(model, t)
    H_fd = (a(t + step) - a(t - step)) / (2 * step) / a(t)
    Hdot_fd = (float(hubble(model, t + step)[0]) - float(hubble(model, t - step)[0])) / (2 * step)
    assert math.isclose(H_fd, H, rel_tol=1e-6, abs_tol=1e-9)
    assert math.isclose(Hdot_fd, Hdot, rel_tol=1e-6, abs_tol=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.integers(4, 12), st.floats(-0.99, 2.0))
def test_alpha_from_w_is_friedmann_consistent(D, w):
    degenerate = -(D - 3) / (D - 1)
    if abs(w - degenerate) < 1e-9:
        return
    alpha = alpha_from_w(D, w)
    m = ScaleFactorModel(Family.POWER_LAW, alpha, 1.0, D, w=w)
    assert friedmann_consistency(m) <= 1e-12
