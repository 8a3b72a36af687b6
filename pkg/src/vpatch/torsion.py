"""Torsion problem on a patch: -lap p = 2 in D, p = 0 on the boundary.

The solve lifts the particular solution -|x|^2/2 and completes the harmonic
remainder phi (boundary data |x|^2/2) through the second-kind boundary
equation in `harmonic`.  Because the completion carries the harmonic
conjugate, the gradient of phi is available as the boundary values of an
analytic function, and interior evaluation stays accurate arbitrarily close
to the boundary.  The deformation field w = x + grad p equals grad phi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import spectral
from .errors import OutOfDomain
from .geometry import PatchBoundary, summarize
from .greens import BoundaryOps, GreenEval, boundary_ops

TWO_PI = spectral.TWO_PI


@dataclass
class TorsionSolution:
    """Solved torsion problem with interior evaluators."""

    patch: PatchBoundary
    mass: float
    talenti_bound: float
    talenti_gap: float
    trace_residual: float
    condition_estimate: float
    _ops: BoundaryOps = field(repr=False)
    _f_nodes: np.ndarray = field(repr=False)
    _fp_nodes: np.ndarray = field(repr=False)

    def value_at(self, points) -> np.ndarray:
        """p at interior points."""
        points = np.atleast_2d(np.asarray(points, float))
        t = points[:, 0] + 1j * points[:, 1]
        phi = self._ops.completion.evaluate(self._f_nodes, t).real
        return phi - 0.5 * (points ** 2).sum(axis=1)

    def _gradient(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, float))
        t = points[:, 0] + 1j * points[:, 1]
        w = self._ops.completion.evaluate(self._fp_nodes, t)
        return np.stack([w.real, -w.imag], axis=1) - points

    def gradient_at(self, points) -> np.ndarray:
        """grad p at points strictly inside D (distance > delta_near)."""
        points = np.atleast_2d(np.asarray(points, float))
        inside = self._ops.patch.contains(points)
        dmin, _ = self._ops._min_node_distance(points)
        bad = ~inside | (dmin <= self._ops.cfg.delta_near)
        if bad.any():
            raise OutOfDomain("gradient_at needs interior points away from the boundary")
        return self._gradient(points)

    def deformation_at(self, points) -> np.ndarray:
        """w = x + grad p = grad phi; divergence-free by construction."""
        points = np.atleast_2d(np.asarray(points, float))
        t = points[:, 0] + 1j * points[:, 1]
        w = self._ops.completion.evaluate(self._fp_nodes, t)
        return np.stack([w.real, -w.imag], axis=1)

    def deformation_nodes(self) -> np.ndarray:
        """w on the boundary nodes themselves."""
        return np.stack([self._fp_nodes.real, -self._fp_nodes.imag], axis=1)


def solve_torsion(patch: PatchBoundary, cfg: GreenEval | None = None) -> TorsionSolution:
    """Solve the torsion problem on a patch."""
    ops = boundary_ops(patch, cfg)
    g = 0.5 * (ops.y ** 2).sum(axis=1)
    comp = ops.completion
    f = comp.boundary_values(g)
    fp = comp.derivative_nodes(f)
    trace = comp.trace_residual(g, f)

    pts, wts = ops.fan()
    t = pts[:, 0] + 1j * pts[:, 1]
    phi = comp.evaluate(f, t).real
    p_vals = phi - 0.5 * (pts ** 2).sum(axis=1)
    mass = float(p_vals @ wts)

    area = patch.area
    bound = area * area / (2.0 * TWO_PI)
    return TorsionSolution(patch=patch, mass=mass, talenti_bound=bound,
                           talenti_gap=bound - mass, trace_residual=trace,
                           condition_estimate=comp.condition_estimate,
                           _ops=ops, _f_nodes=f, _fp_nodes=fp)


def torsion_mass(solution: TorsionSolution) -> float:
    """integral over D of p."""
    return solution.mass


def talenti_gap(solution: TorsionSolution) -> float:
    """|D|^2/(4 pi) - integral of p; nonnegative, zero exactly on discs."""
    return solution.talenti_gap


def torsion_gradient_at(solution: TorsionSolution, x) -> np.ndarray:
    """grad p at a single interior point."""
    out = solution.gradient_at(np.atleast_2d(np.asarray(x, float)))
    return out[0] if np.asarray(x).ndim == 1 else out
