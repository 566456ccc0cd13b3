"""Time evolution of the field.

Two independent solvers:

* ``evolve`` -- method of lines, classical RK4 in time, spectral Laplacian.
* ``picard_solve`` -- successive approximation: each iterate solves the free
  wave equation mode by mode with the previous iterate's nonlinearity as a
  Duhamel source.

Picard keeps every iterate on the full (time x grid) lattice, so memory is
O(N^d_sim * T/dt) complex numbers.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUp, InvalidParameters
from .geometry import ScaleFactorModel
from .grid import FieldState, Frame, SpatialGrid, laplacian
from .matter import CouplingSpec, PotentialSpec, rhs_F, transformed_rhs

log = logging.getLogger(__name__)

DEFAULT_CFL_SAFETY = 0.5
DEFAULT_BLOWUP_THRESHOLD = 1e8


class Status(str, enum.Enum):
    COMPLETED = "completed"
    BLOWUP = "blowup"
    ERROR = "error"


@dataclass
class Trajectory:
    states: list
    dt: float
    status: Status = Status.COMPLETED
    blowup_tau: float | None = None

    @property
    def taus(self):
        return np.array([s.tau for s in self.states])

    @property
    def frame(self):
        return self.states[0].frame if self.states else Frame.ORIGINAL

    @property
    def final(self):
        return self.states[-1]

    def stacked(self):
        """(phi, pi) arrays with time as the leading axis."""
        return (np.stack([s.phi for s in self.states]),
                np.stack([s.pi for s in self.states]))

    @classmethod
    def from_arrays(cls, taus, phi, pi, dt, frame=Frame.ORIGINAL, **kw):
        states = [FieldState(float(t), p, q, frame) for t, p, q in zip(taus, phi, pi)]
        return cls(states, dt, **kw)


@dataclass
class PicardTrace:
    gaps: list = field(default_factory=list)
    k: int = 2
    converged: bool = False
    iterations: int = 0

    def ratios(self):
        g = np.asarray(self.gaps, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return g[1:] / g[:-1]


def max_stable_dt(grid: SpatialGrid, cfl_safety=DEFAULT_CFL_SAFETY):
    return cfl_safety * grid.dx / math.sqrt(grid.d_sim)


def _filter(grid, dealias):
    if not dealias:
        return None
    mask = grid.dealias_mask
    return lambda u: grid.ifft(mask * grid.fft(u))


def acceleration(grid, model, xi, spec, phi, pi, tau, frame, grad_filter=None):
    """phi'' = lap(phi) + source, in either frame."""
    lap = laplacian(grid, phi)
    if frame is Frame.ORIGINAL:
        return lap + rhs_F(model, xi, spec, phi, pi, tau, grad_filter=grad_filter)
    return lap + transformed_rhs(model, xi, spec, phi, tau, grad_filter=grad_filter)


def _check(state: FieldState, blowup_threshold):
    if not state.is_finite():
        raise BlowUp(state.tau, f"non-finite field at tau={state.tau:.6g}")
    peak = max(np.max(np.abs(state.phi)), np.max(np.abs(state.pi)))
    if peak > blowup_threshold:
        raise BlowUp(state.tau, f"|field| = {peak:.3g} exceeds {blowup_threshold:.3g}"
                                f" at tau={state.tau:.6g}")


def step_mol(state: FieldState, grid: SpatialGrid, model: ScaleFactorModel,
             xi: CouplingSpec, spec: PotentialSpec, dt, *,
             cfl_safety=DEFAULT_CFL_SAFETY, blowup_threshold=DEFAULT_BLOWUP_THRESHOLD,
             dealias=False) -> FieldState:
    """One classical RK4 step of (phi' = pi, pi' = lap(phi) + source)."""
    if not dt > 0:
        raise InvalidParameters("dt must be positive")
    if dt > max_stable_dt(grid, cfl_safety) * (1 + 1e-12):
        raise InvalidParameters(
            f"dt={dt:.6g} exceeds the stability guard {max_stable_dt(grid, cfl_safety):.6g}")
    if not state.is_finite():
        raise BlowUp(state.tau, "non-finite input state")
    return _rk4(state, grid, model, xi, spec, dt, _filter(grid, dealias), blowup_threshold)


def _rk4(state, grid, model, xi, spec, dt, grad_filter, blowup_threshold, new_tau=None):
    t, u, v, fr = state.tau, state.phi, state.pi, state.frame

    def acc(p, q, tt):
        return acceleration(grid, model, xi, spec, p, q, tt, fr, grad_filter)

    k1u, k1v = v, acc(u, v, t)
    u2, v2 = u + 0.5 * dt * k1u, v + 0.5 * dt * k1v
    k2u, k2v = v2, acc(u2, v2, t + 0.5 * dt)
    u3, v3 = u + 0.5 * dt * k2u, v + 0.5 * dt * k2v
    k3u, k3v = v3, acc(u3, v3, t + 0.5 * dt)
    u4, v4 = u + dt * k3u, v + dt * k3v
    k4u, k4v = v4, acc(u4, v4, t + dt)

    new = FieldState(
        t + dt if new_tau is None else new_tau,
        u + dt / 6 * (k1u + 2 * k2u + 2 * k3u + k4u),
        v + dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v),
        fr,
    )
    _check(new, blowup_threshold)
    return new


def n_steps_for(T, dt):
    """Number of uniform steps covering [0, T] with step at most ``dt``."""
    return max(1, math.ceil(T / dt - 1e-9))


def check_wraparound(grid: SpatialGrid, support_radius, T):
    if support_radius is not None and support_radius + T >= grid.L / 2:
        raise InvalidParameters(
            f"support radius {support_radius:g} + T {T:g} >= L/2 = {grid.L / 2:g}:"
            " the solution would wrap around the periodic box")


def evolve(initial: FieldState, grid: SpatialGrid, model: ScaleFactorModel,
           xi: CouplingSpec, spec: PotentialSpec, T, dt, sample_every=1, *,
           support_radius=None, cfl_safety=DEFAULT_CFL_SAFETY,
           blowup_threshold=DEFAULT_BLOWUP_THRESHOLD, dealias=False) -> Trajectory:
    """Integrate from ``initial.tau`` over a window of length ``T``.

    ``dt`` is shrunk slightly if needed so that a whole number of steps lands
    exactly on ``initial.tau + T``. A blow-up ends the run early with status
    BLOWUP; the states up to the last finite sample are kept.
    """
    if not T > 0:
        raise InvalidParameters("T must be positive")
    if sample_every < 1:
        raise InvalidParameters("sample_every must be >= 1")
    check_wraparound(grid, support_radius, T)
    n = n_steps_for(T, dt)
    dt = T / n
    if dt > max_stable_dt(grid, cfl_safety) * (1 + 1e-12):
        raise InvalidParameters(
            f"dt={dt:.6g} exceeds the stability guard {max_stable_dt(grid, cfl_safety):.6g}")
    grad_filter = _filter(grid, dealias)
    state = initial
    traj = Trajectory([state], dt)
    try:
        _check(state, blowup_threshold)
    except BlowUp as exc:
        traj.status, traj.blowup_tau = Status.BLOWUP, exc.tau
        return traj
    t0 = initial.tau
    for i in range(1, n + 1):
        try:
            state = _rk4(state, grid, model, xi, spec, dt, grad_filter, blowup_threshold,
                         new_tau=t0 + i * dt)
        except BlowUp as exc:
            log.warning("%s", exc)
            traj.status, traj.blowup_tau = Status.BLOWUP, t0 + i * dt
            return traj
        if i % sample_every == 0 or i == n:
            traj.states.append(state)
    return traj


def _sinc_t(lam, t):
    """sin(lam*t)/lam with the lam -> 0 limit t."""
    lam = np.asarray(lam, dtype=float)
    safe = np.where(lam == 0, 1.0, lam)
    return np.where(lam == 0, t, np.sin(lam * t) / safe)


def _cumtrapz(y, dt):
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * dt * (y[1:] + y[:-1]), axis=0)
    return out


def duhamel_mode_solve(lambda2, f_hat, g_hat, source_samples, dt, *, with_derivative=False):
    """Solve eta'' + lambda2*eta = source per Fourier mode on a uniform time lattice.

    ``source_samples`` has time as its leading axis; ``lambda2``, ``f_hat`` and
    ``g_hat`` broadcast against the remaining axes. The Duhamel integral
    int_0^t sin(lam(t-s))/lam * source(s) ds is evaluated with the trapezoid
    rule on the sample lattice (split as sin(lam t) C(t) - cos(lam t) S(t) so
    all times cost O(n)).
    """
    src = np.asarray(source_samples)
    n = src.shape[0]
    t = (np.arange(n) * dt).reshape((n,) + (1,) * (src.ndim - 1))
    lam = np.sqrt(np.asarray(lambda2, dtype=float))
    cos_t, sin_t = np.cos(lam * t), np.sin(lam * t)
    eta = cos_t * f_hat + _sinc_t(lam, t) * g_hat
    deta = -lam * sin_t * f_hat + cos_t * g_hat
    if np.any(src != 0):
        C = _cumtrapz(np.cos(lam * t) * src, dt)
        S = _cumtrapz(np.sin(lam * t) * src, dt)
        zero = lam == 0
        safe = np.where(zero, 1.0, lam)
        if np.any(zero):
            # lam -> 0: int (t - s) src ds = t*int src - int s*src
            Ts = _cumtrapz(t * src, dt)
            eta_free = t * C - Ts
        else:
            eta_free = 0.0
        eta = eta + np.where(zero, eta_free, (sin_t * C - cos_t * S) / safe)
        deta = deta + cos_t * C + sin_t * S
    if with_derivative:
        return eta, deta
    return eta


def _picard_source(grid, model, xi, spec, phi, pi, taus, frame, grad_filter):
    out = np.empty_like(phi)
    for j, tau in enumerate(taus):
        if frame is Frame.ORIGINAL:
            out[j] = rhs_F(model, xi, spec, phi[j], pi[j], tau, grad_filter=grad_filter)
        else:
            out[j] = transformed_rhs(model, xi, spec, phi[j], tau, grad_filter=grad_filter)
    return out


def picard_solve(f, g, grid: SpatialGrid, model: ScaleFactorModel, xi: CouplingSpec,
                 spec: PotentialSpec, T, dt, l_max=20, tol=1e-12, *, k=2,
                 frame=Frame.ORIGINAL, blowup_threshold=DEFAULT_BLOWUP_THRESHOLD,
                 dealias=False, support_radius=None, raise_on_failure=False):
    """Successive approximation on [0, T] from data (f, g) given in ``frame``.

    Iterate 0 is the free wave; iterate l+1 uses the source evaluated on
    iterate l. The gap E_l between consecutive iterates (see
    :func:`frwkg.diagnostics.iterate_gap`) is recorded after every update and
    the loop stops once it drops to ``tol``.

    Returns ``(trajectory, trace)`` for the last iterate. Non-convergence
    yields ``trace.converged = False`` unless ``raise_on_failure`` is set.
    """
    from .diagnostics import iterate_gap
    from .errors import NoConvergence

    if l_max < 1:
        raise InvalidParameters("l_max must be >= 1")
    if not T > 0:
        raise InvalidParameters("T must be positive")
    frame = Frame(frame)
    check_wraparound(grid, support_radius, T)
    n = n_steps_for(T, dt)
    dt = T / n
    taus = np.arange(n + 1) * dt
    grad_filter = _filter(grid, dealias)

    f_hat, g_hat = grid.fft(f), grid.fft(g)
    zero_src = np.zeros((n + 1,) + grid.shape)

    def solve(source):
        s_hat = grid.fft(source) if source is not None else zero_src
        eta, deta = duhamel_mode_solve(grid.k2, f_hat, g_hat, s_hat, dt, with_derivative=True)
        phi, pi = grid.ifft(eta), grid.ifft(deta)
        traj = Trajectory.from_arrays(taus, phi, pi, dt, frame)
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(pi))):
            raise BlowUp(float("nan"), "non-finite Picard iterate")
        peak = max(np.max(np.abs(phi)), np.max(np.abs(pi)))
        if peak > blowup_threshold:
            bad = np.argmax(np.max(np.abs(phi).reshape(n + 1, -1), axis=1) > blowup_threshold)
            raise BlowUp(float(taus[bad]), f"Picard iterate exceeds {blowup_threshold:.3g}")
        return traj, phi, pi

    trace = PicardTrace(k=k)
    prev, phi, pi = solve(None)
    for l in range(1, l_max + 1):
        src = _picard_source(grid, model, xi, spec, phi, pi, taus, frame, grad_filter)
        cur, phi, pi = solve(src)
        gap = iterate_gap(grid, cur, prev, k)
        trace.gaps.append(gap)
        trace.iterations = l
        log.debug("picard iterate %d: gap %.3e", l, gap)
        prev = cur
        if gap <= tol:
            trace.converged = True
            break
    if not trace.converged and raise_on_failure:
        raise NoConvergence(f"Picard gap {trace.gaps[-1]:.3e} > tol {tol:.3e} "
                            f"after {l_max} iterations")
    return prev, trace

