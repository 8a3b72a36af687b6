"""Analytic completion of harmonic boundary data on a smooth closed curve.

Given samples g_j of the trace of a function harmonic inside the curve, the
completion solves a second-kind boundary equation for a real density rho such
that the Cauchy integral of rho is the analytic function F = g + i*conj(g)
inside.  Taking real parts, the equation is the classical double-layer
Dirichlet equation; keeping the imaginary part yields the harmonic conjugate
for free, which is what the interior gradient evaluators run on.

The principal-value Cauchy sums use the subtracted kernel
(rho_j - rho_i) z'_j / (z_j - z_i), whose diagonal limit is rho'(theta_i), so
plain trapezoid sums stay spectrally accurate.  Interior evaluation goes
through the quotient form of the Cauchy integral (`spectral.barycentric_cauchy`),
uniformly accurate up to (and analytically through) the boundary.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import lu_factor, lu_solve, lapack

from . import spectral
from .errors import SolverFailure

COND_LIMIT = 1e12


class AnalyticCompletion:
    """Dirichlet-to-analytic-completion solver bound to one sampled curve."""

    def __init__(self, z: np.ndarray, dz: np.ndarray):
        self.z = np.asarray(z)
        self.dz = np.asarray(dz)
        self.n = len(z)
        self.h = spectral.TWO_PI / self.n
        diff = self.z[None, :] - self.z[:, None]
        np.fill_diagonal(diff, 1.0)
        c = self.dz[None, :] / diff
        np.fill_diagonal(c, 0.0)
        self._cauchy = c
        self._rowsum = c.sum(axis=1)
        m = np.eye(self.n) + (self.h / spectral.TWO_PI) * c.imag
        np.fill_diagonal(m, 1.0 - (self.h / spectral.TWO_PI) * self._rowsum.imag)
        self._matrix = m
        self._lu = lu_factor(m)
        self._cond = None

    @property
    def condition_estimate(self) -> float:
        if self._cond is None:
            gecon = lapack.dgecon
            anorm = np.linalg.norm(self._matrix, 1)
            rcond, _ = gecon(self._lu[0], anorm, norm="1")
            self._cond = float(1.0 / rcond) if rcond > 0 else np.inf
        return self._cond

    def solve_density(self, g: np.ndarray) -> np.ndarray:
        if self.condition_estimate > COND_LIMIT:
            raise SolverFailure(
                f"boundary system condition ~{self.condition_estimate:.3g}")
        return lu_solve(self._lu, np.asarray(g, float))

    def boundary_values(self, g: np.ndarray) -> np.ndarray:
        """Boundary samples of F = g + i*(harmonic conjugate of g)."""
        rho = self.solve_density(g)
        pv = self._cauchy @ rho - rho * self._rowsum + spectral.spectral_derivative(rho)
        return rho + (self.h / (2j * np.pi)) * pv

    def trace_residual(self, g: np.ndarray, f_nodes: np.ndarray) -> float:
        """Max boundary-condition defect at midpoints between nodes.

        Checks the interpolated solution, not just collocation zeros: the
        curve and the data are trigonometrically refined to the half-offset
        grid and Re F is compared with the refined data there.
        """
        z2 = spectral.trig_resample(self.z, 2 * self.n)[1::2]
        g2 = spectral.trig_resample(np.asarray(g, float), 2 * self.n)[1::2]
        vals = spectral.barycentric_cauchy(self.z, self.dz, f_nodes, z2)
        return float(np.abs(vals.real - g2).max())

    def evaluate(self, f_nodes: np.ndarray, targets: np.ndarray) -> np.ndarray:
        """Evaluate the completion at complex targets inside the curve."""
        return spectral.barycentric_cauchy(self.z, self.dz, f_nodes, targets)

    def derivative_nodes(self, f_nodes: np.ndarray) -> np.ndarray:
        """Boundary samples of F' = dF/dz."""
        return spectral.spectral_derivative(f_nodes) / self.dz
