import math

import numpy as np
import pytest

from oracles import multi_index_energy, smooth_random_field
from frwkg.diagnostics import (decay_monitor, energy_equivalence_constants, energy_norm,
                               energy_report, iterate_gap, linear_energy,
                               linear_energy_series, support_radius)
from frwkg.errors import FrameMismatch, LatticeMismatch
from frwkg.evolve import Trajectory, evolve
from frwkg.geometry import ScaleFactorModel
from frwkg.grid import (FieldState, Frame, bump_initial_data, make_grid,
                        plane_wave_initial_data, sobolev_norm)
from frwkg.matter import CouplingSpec, PotentialSpec, rhs_F, to_transformed

FLAT = ScaleFactorModel.power_law(0, 1.0)


def _state(phi, pi, tau=0.0, frame=Frame.ORIGINAL):
    return FieldState(tau, phi, pi, frame)


@pytest.fixture
def g1():
    return make_grid(1, 64, 2 * np.pi)


def test_linear_energy_examples(g1):
    z = np.zeros(g1.shape)
    assert linear_energy(g1, _state(z, z), 3) == 0
    A = 1.7
    s = _state(A * np.sin(g1.axis), z)
    assert math.isclose(linear_energy(g1, s, 0), 0.5 * A**2 * math.pi, rel_tol=1e-13)
    assert math.isclose(linear_energy(g1, s, 1), 0.5 * A**2 * 2 * math.pi, rel_tol=1e-13)


def test_energy_norm_examples(g1):
    z, s = np.zeros(g1.shape), np.sin(g1.axis)
    assert energy_norm(g1, _state(z, z), 0) == 0
    assert math.isclose(energy_norm(g1, _state(s, z), 0), math.sqrt(2 * math.pi), rel_tol=1e-13)
    assert math.isclose(energy_norm(g1, _state(z, s), 0), math.sqrt(math.pi), rel_tol=1e-13)


def test_energy_report_monotone_in_k():
    g = make_grid(2, 32, 6.0)
    rng = np.random.default_rng(3)
    s = _state(smooth_random_field(g, rng), smooth_random_field(g, rng))
    rep = energy_report(g, s, FLAT, k_max=4)
    assert all(rep.Hk[k] <= rep.Hk[k + 1] for k in range(4))
    assert all(rep.energy_norm[k] <= rep.energy_norm[k + 1] for k in range(4))
    assert all(math.isfinite(v) for v in list(rep.Hk.values()) + list(rep.energy_norm.values()))


def _traj(g, phis, pis, taus):
    return Trajectory.from_arrays(np.asarray(taus, float), np.asarray(phis), np.asarray(pis), 0.1)


def test_iterate_gap_examples():
    g = make_grid(1, 32, 5.0)
    rng = np.random.default_rng(0)
    phis, pis = rng.normal(size=(3, 32)), rng.normal(size=(3, 32))
    a = _traj(g, phis, pis, [0, 0.1, 0.2])
    assert iterate_gap(g, a, a, 2) == 0
    c = 0.37
    shifted = phis.copy()
    shifted[1] += c
    b = _traj(g, shifted, pis, [0, 0.1, 0.2])
    assert math.isclose(iterate_gap(g, a, b, 2), c * 5.0**0.5, rel_tol=1e-12)
    with pytest.raises(LatticeMismatch):
        iterate_gap(g, a, _traj(g, phis, pis, [0, 0.1, 0.3]), 1)
    with pytest.raises(LatticeMismatch):
        iterate_gap(g, a, _traj(g, phis[:2], pis[:2], [0, 0.1]), 1)


def test_decay_monitor_flat_and_zero():
    g = make_grid(1, 64, 8.0)
    rng = np.random.default_rng(1)
    phis, pis = rng.normal(size=(4, 64)), rng.normal(size=(4, 64))
    model = ScaleFactorModel.power_law(0, 1.0, D=6)
    traj = _traj(g, phis, pis, [0, 1, 2, 3])
    series = decay_monitor(g, traj, model, 1)
    expect = [sobolev_norm(g, p, 2) + 2.0 * sobolev_norm(g, q, 1) for p, q in zip(phis, pis)]
    np.testing.assert_allclose(series, expect, rtol=1e-13)
    z = _traj(g, 0 * phis, 0 * pis, [0, 1, 2, 3])
    assert np.all(decay_monitor(g, z, ScaleFactorModel.power_law(1, 1.0), 2) == 0)


def test_decay_monitor_rejects_transformed():
    g = make_grid(1, 16, 1.0)
    s = _state(np.zeros(16), np.zeros(16), frame=Frame.TRANSFORMED)
    with pytest.raises(FrameMismatch):
        decay_monitor(g, Trajectory([s], 0.1), FLAT, 0)


def test_support_radius_examples():
    g = make_grid(1, 256, 8.0)
    z = np.zeros(g.shape)
    assert support_radius(g, _state(z, z)) == 0.0
    for r in (0.5, 1.0, 2.3):
        f, v = bump_initial_data(g, 1.0, r)
        sr = support_radius(g, _state(f, v))
        assert r - 2 * g.dx <= sr <= r
    gw = make_grid(1, 64, 2 * np.pi)
    f, v = plane_wave_initial_data(gw)
    assert support_radius(gw, _state(f, v)) == pytest.approx(np.pi)


def test_support_radius_2d_off_centre():
    g = make_grid(2, 64, 8.0)
    f, v = bump_initial_data(g, 1.0, 1.0, center=(1.0, 7.5))
    sr = support_radius(g, _state(f, v), center=(1.0, 7.5))
    assert 1.0 - 2 * g.dx <= sr <= 1.0


@pytest.mark.parametrize("d_sim,N", [(1, 32), (2, 16)])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_energy_sandwich_against_multi_index_oracle(d_sim, N, k):
    g = make_grid(d_sim, N, 2 * np.pi * 1.3)
    c1, c2 = energy_equivalence_constants(k, d_sim)
    rng = np.random.default_rng(100 * k + d_sim)
    for _ in range(25):
        phi, pi = smooth_random_field(g, rng, 5), smooth_random_field(g, rng, 5)
        ours = math.sqrt(linear_energy(g, _state(phi, pi), k))
        exact = math.sqrt(multi_index_energy(g, phi, pi, k))
        assert c1 * exact * (1 - 1e-12) <= ours <= c2 * exact * (1 + 1e-12)
        if d_sim == 1:
            assert math.isclose(ours, exact, rel_tol=1e-10)


def test_equivalence_constants_values():
    assert energy_equivalence_constants(0, 3) == (1.0, 1.0)
    assert energy_equivalence_constants(3, 1) == (1.0, 1.0)
    assert energy_equivalence_constants(2, 2)[1] == pytest.approx(math.sqrt(2))
    assert energy_equivalence_constants(3, 2)[1] == pytest.approx(math.sqrt(3))
    assert energy_equivalence_constants(3, 3)[1] == pytest.approx(math.sqrt(6))


def test_energy_rate_matches_source_work():
    # dH_k/dtau = sum M_k Re(conj(pi_hat) F_hat) for phi'' = lap(phi) + F
    g = make_grid(1, 64, 2 * np.pi)
    model = ScaleFactorModel.power_law(1, 1.0)
    xi, spec = CouplingSpec(0.3), PotentialSpec(1e-2, 3)
    rng = np.random.default_rng(7)
    f = smooth_random_field(g, rng, 4)
    f, v = 0.5 * f / np.max(np.abs(f)), np.zeros(g.shape)
    dt = 0.002
    traj = evolve(_state(f, v), g, model, xi, spec, 1.0, dt)
    phis, pis = traj.stacked()
    for k in (0, 1, 2):
        H = linear_energy_series(g, phis, pis, k)
        # fourth-order central difference
        rate = (H[:-4] - 8 * H[1:-3] + 8 * H[3:-1] - H[4:]) / (12 * dt)
        w = g.energy_weight(k)
        work = np.array([
            g.cell_volume / g.size * np.sum(w * np.real(np.conj(g.fft(q))
                                                        * g.fft(rhs_F(model, xi, spec, p, q, t))))
            for p, q, t in zip(phis, pis, traj.taus)])[2:-2]
        scale = np.max(np.abs(work))
        np.testing.assert_allclose(rate, work, atol=1e-8 * scale)


def test_transformed_energy_norm_bounded_on_admissible_run():
    g = make_grid(1, 128, 24.0)
    model = ScaleFactorModel.power_law(1, 1.0)  # radiation, h == 0
    f, v = bump_initial_data(g, 0.5, 1.0)
    traj = evolve(to_transformed(_state(f, v), model), g, model, CouplingSpec(0.2),
                  PotentialSpec(1e-3, 5), 10.0, 0.05)
    norms = np.array([energy_norm(g, s, 1) for s in traj.states])
    assert np.all(np.isfinite(norms))
    assert norms.max() <= 2 * norms[0]
