"""Contour dynamics: advect the patch boundary by its self-induced velocity.

Classical 4th-order Runge-Kutta on the boundary nodes; every stage
re-evaluates the velocity induced by the stage configuration, so all
evaluations stay on the moving curve.  Periodic cubic arclength respacing
keeps the nodes from clustering on long runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import spectral
from .errors import BlowupDetected, InvalidArgument, OutsideUnitDisc, ReparamFailure
from .geometry import (FOURIER, PatchBoundary, arclength_respace, from_vertices,
                       summarize)
from .greens import GreenEval, boundary_ops

MAX_SPACING_RATIO = 50.0


def boundary_velocity(patch: PatchBoundary, cfg: GreenEval | None = None) -> np.ndarray:
    """Self-induced velocity at each boundary node."""
    return boundary_ops(patch, cfg).velocity_nodes


@dataclass
class EvolutionState:
    """A contour-dynamics run: current boundary, clock and diagnostics."""

    patch: PatchBoundary
    time: float
    dt: float
    initial: PatchBoundary
    history: list[dict] = field(default_factory=list)
    snapshots: list[tuple[float, np.ndarray]] = field(default_factory=list)
    steps_taken: int = 0


def _wrap(nodes: np.ndarray, reference: PatchBoundary) -> PatchBoundary:
    if np.hypot(nodes[:, 0], nodes[:, 1]).max() >= 1.0 - reference.eps_wall:
        raise BlowupDetected("boundary node left the unit disc")
    try:
        return from_vertices(nodes, eps_wall=reference.eps_wall, check_simple=False)
    except OutsideUnitDisc as exc:  # pragma: no cover - guarded above
        raise BlowupDetected(str(exc)) from exc


def _velocity(nodes: np.ndarray, reference: PatchBoundary,
              cfg: GreenEval | None) -> np.ndarray:
    return boundary_ops(_wrap(nodes, reference), cfg).velocity_nodes


def step(state: EvolutionState, cfg: GreenEval | None = None) -> EvolutionState:
    """One RK4 step of size state.dt (returns a new state)."""
    x0 = state.patch.nodes
    dt = state.dt
    k1 = boundary_ops(state.patch, cfg).velocity_nodes
    k2 = _velocity(x0 + 0.5 * dt * k1, state.patch, cfg)
    k3 = _velocity(x0 + 0.5 * dt * k2, state.patch, cfg)
    k4 = _velocity(x0 + dt * k3, state.patch, cfg)
    nodes = x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return EvolutionState(patch=_wrap(nodes, state.patch), time=state.time + dt,
                          dt=dt, initial=state.initial, history=state.history,
                          snapshots=state.snapshots,
                          steps_taken=state.steps_taken + 1)


def _reparametrize(patch: PatchBoundary) -> PatchBoundary:
    seg = np.hypot(*np.diff(np.vstack([patch.nodes, patch.nodes[:1]]), axis=0).T)
    if seg.max() / seg.min() > MAX_SPACING_RATIO:
        raise ReparamFailure(
            f"node spacing ratio {seg.max() / seg.min():.1f} exceeds {MAX_SPACING_RATIO}")
    return from_vertices(arclength_respace(patch.nodes, patch.n),
                         eps_wall=patch.eps_wall, check_simple=False)


def _sample(state: EvolutionState, cfg: GreenEval | None) -> None:
    summary = summarize(state.patch)
    energy = boundary_ops(state.patch, cfg).double_energy
    state.history.append({"t": state.time, "area": summary.area,
                          "second_moment": summary.second_moment,
                          "energy": energy})
    state.snapshots.append((state.time, state.patch.nodes.copy()))


def run(patch: PatchBoundary, t_end: float, dt: float, sample_every: int = 10,
        reparam_every: int = 20, cfg: GreenEval | None = None) -> EvolutionState:
    """Advance the patch to t_end, sampling diagnostics every sample_every
    steps.  reparam_every = 0 disables arclength respacing."""
    if dt <= 0.0:
        raise InvalidArgument("dt must be positive")
    if t_end < 0.0:
        raise InvalidArgument("t_end must be nonnegative")
    current = patch if patch.form != FOURIER else from_vertices(
        patch.nodes, eps_wall=patch.eps_wall, check_simple=False)
    state = EvolutionState(patch=current, time=0.0, dt=dt, initial=patch)
    _sample(state, cfg)
    n_steps = int(round(t_end / dt))
    for k in range(1, n_steps + 1):
        state = step(state, cfg)
        if reparam_every and k % reparam_every == 0:
            state.patch = _reparametrize(state.patch)
        if k % max(1, sample_every) == 0 or k == n_steps:
            _sample(state, cfg)
    return state


# -- rigid-rotation scoring -----------------------------------------------------


def _distance_to_fourier(patch: PatchBoundary, pts: np.ndarray) -> np.ndarray:
    """Distance from points to a FOURIER curve, via projection refined in theta."""
    dense = max(4096, 8 * patch.n)
    th = spectral.grid(dense)
    r = patch.radius_of(th)
    curve = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    d2 = ((pts[:, None, :] - curve[None, :, :]) ** 2).sum(axis=2)
    j = d2.argmin(axis=1)
    th0 = th[j]
    span = th[1] - th[0]

    def dist_one(p, t0):
        def f(t):
            rr = patch.radius_of(np.array([t]))[0]
            return (rr * np.cos(t) - p[0]) ** 2 + (rr * np.sin(t) - p[1]) ** 2
        res = minimize_scalar(f, bounds=(t0 - span, t0 + span), method="bounded",
                              options={"xatol": 1e-14})
        return np.sqrt(min(res.fun, f(t0)))

    return np.array([dist_one(p, t0) for p, t0 in zip(pts, th0)])


def _distance_to_polyline(nodes: np.ndarray, pts: np.ndarray) -> np.ndarray:
    a = nodes
    b = np.roll(nodes, -1, axis=0)
    d = b - a
    dd = (d * d).sum(axis=1)
    ap = pts[:, None, :] - a[None, :, :]
    t = np.clip((ap * d[None, :, :]).sum(axis=2) / dd[None, :], 0.0, 1.0)
    closest = a[None, :, :] + t[:, :, None] * d[None, :, :]
    dist = np.hypot(pts[:, None, 0] - closest[:, :, 0],
                    pts[:, None, 1] - closest[:, :, 1])
    return dist.min(axis=1)


def shape_distance(nodes: np.ndarray, reference: PatchBoundary) -> float:
    """Symmetric Hausdorff-type distance between a node loop and a reference
    boundary.  The node loop is refined trigonometrically before the reverse
    direction so the polyline resolution does not floor the measurement."""
    if reference.form == FOURIER:
        fwd = _distance_to_fourier(reference, nodes).max()
    else:
        fwd = _distance_to_polyline(reference.nodes, nodes).max()
    m = max(2048, 4 * len(nodes))
    fine = np.stack([spectral.trig_resample(nodes[:, 0], m),
                     spectral.trig_resample(nodes[:, 1], m)], axis=1)
    ref_pts = reference.resample(min(2048, 8 * reference.n)).nodes \
        if reference.form != FOURIER else None
    if ref_pts is None:
        dense = reference.resample(2048).nodes
        back = _distance_to_polyline(fine, dense).max()
    else:
        back = _distance_to_polyline(fine, ref_pts).max()
    return float(max(fwd, back))


def rigid_rotation_error(state: EvolutionState, omega: float) -> float:
    """Max over samples of the distance between the evolved boundary and the
    initial boundary rotated by omega * t."""
    if len(state.snapshots) < 2:
        raise InvalidArgument("need at least two samples")
    worst = 0.0
    for t, nodes in state.snapshots:
        c, s = np.cos(-omega * t), np.sin(-omega * t)
        unrot = nodes @ np.array([[c, -s], [s, c]]).T
        worst = max(worst, shape_distance(unrot, state.initial))
    return worst
