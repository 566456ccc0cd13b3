"""Glue between a RunConfig, the solvers and the diagnostics."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .diagnostics import energy_report
from .errors import BlowUp
from .evolve import PicardTrace, Status, Trajectory, evolve, picard_solve
from .geometry import hubble
from .grid import FieldState, Frame, bump_initial_data, periodic_distance, plane_wave_initial_data
from .matter import from_transformed, to_transformed

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    trajectory: Trajectory  # original frame
    trace: PicardTrace | None = None

    @property
    def status(self):
        return self.trajectory.status


def random_bump(grid, amplitude, radius, center, seed, max_mode=6):
    """Smooth random field with random low-mode content, windowed by a bump."""
    rng = np.random.default_rng(seed)
    window, _ = bump_initial_data(grid, 1.0, radius, center)
    r = periodic_distance(grid, center) / radius
    field = np.zeros(grid.shape)
    for m in range(max_mode + 1):
        c, s = rng.normal(size=2) / (1 + m)
        field += c * np.cos(np.pi * m * r) + s * np.sin(np.pi * m * r)
    field *= window
    peak = np.max(np.abs(field))
    return amplitude * field / peak if peak > 0 else field


def initial_state(cfg: RunConfig) -> FieldState:
    """Original-frame data at tau = 0 described by the [initial] section."""
    grid, ini = cfg.spatial_grid(), cfg.initial
    center = ini["center"]
    if ini["profile"] == "bump":
        f, g = bump_initial_data(grid, ini["amplitude"], ini["radius"], center)
    elif ini["profile"] == "random":
        f = random_bump(grid, ini["amplitude"], ini["radius"], center, cfg.seed)
        g = np.zeros(grid.shape)
    elif ini["profile"] == "plane_wave":
        f, g = plane_wave_initial_data(grid, ini["amplitude"], ini["mode"])
    else:
        f, g = np.zeros(grid.shape), np.zeros(grid.shape)
    if ini["velocity"] == "comoving":
        # psi' = 0 at tau = 0 in the transformed frame
        model = cfg.scale_factor_model()
        H, _ = hubble(model, 0.0)
        g = g - (model.D - 2) / 2 * float(H) * f
    return FieldState(0.0, f, g, Frame.ORIGINAL)


def run(cfg: RunConfig, mode=None) -> RunResult:
    mode = mode or cfg.solver["mode"]
    grid, model = cfg.spatial_grid(), cfg.scale_factor_model()
    xi, spec, s = cfg.coupling(), cfg.potential(), cfg.solver
    state0 = initial_state(cfg)
    if cfg.frame is Frame.TRANSFORMED:
        state0 = to_transformed(state0, model)
    common = dict(support_radius=cfg.bump_radius, blowup_threshold=s["blowup_threshold"],
                  dealias=s["dealias"])
    trace = None
    if mode == "mol":
        traj = evolve(state0, grid, model, xi, spec, s["T"], cfg.dt, s["sample_every"],
                      cfl_safety=s["cfl_safety"], **common)
    else:
        try:
            traj, trace = picard_solve(state0.phi, state0.pi, grid, model, xi, spec, s["T"],
                                       cfg.dt, s["l_max"], s["tol"], k=cfg.output["k_max"],
                                       frame=cfg.frame, **common)
        except BlowUp as exc:
            log.warning("%s", exc)
            traj = Trajectory([state0], cfg.dt, Status.BLOWUP, exc.tau)
        else:
            if s["sample_every"] > 1:
                keep = traj.states[::s["sample_every"]]
                if keep[-1] is not traj.states[-1]:
                    keep.append(traj.states[-1])
                traj = Trajectory(keep, traj.dt, traj.status, traj.blowup_tau)
    if cfg.frame is Frame.TRANSFORMED:
        traj = Trajectory([from_transformed(st, model) for st in traj.states], traj.dt,
                          traj.status, traj.blowup_tau)
    return RunResult(traj, trace)


def reports(cfg: RunConfig, traj: Trajectory):
    grid, model = cfg.spatial_grid(), cfg.scale_factor_model()
    o = cfg.output
    return [energy_report(grid, st, model, o["k_max"], threshold=o["support_threshold"],
                          center=cfg.initial["center"])
            for st in traj.states]
