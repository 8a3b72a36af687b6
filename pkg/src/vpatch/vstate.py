"""Rotating patches (V-states) by Newton continuation off concentric discs.

An m-fold branch bifurcates from the disc of radius b at
omega_m = (m - 1 + b^(2m)) / (2m).  Solutions are parameterized by
cosine-only coefficients on the harmonics m, 2m, 3m, ..., which pins the
rotation phase and makes the m-fold symmetry exact by construction.  The
leading coefficient is held at the prescribed amplitude (removing the branch
tangent degeneracy near the bifurcation) and the mean radius is eliminated
through the area normalization |D| = pi b^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, InvalidShape, NoConvergence
from .geometry import PatchBoundary, from_fourier, summarize
from .greens import GreenEval, boundary_ops


def bifurcation_omega(m: int, b: float) -> float:
    """Angular velocity at which the m-fold branch leaves the disc of radius b."""
    if int(m) != m or m < 1:
        raise InvalidArgument("fold m must be a positive integer")
    if not 0.0 < b < 1.0:
        raise InvalidArgument("base radius b must lie in (0, 1)")
    m = int(m)
    return (m - 1 + b ** (2 * m)) / (2.0 * m)


def boundary_residual(patch: PatchBoundary, omega: float,
                      cfg: GreenEval | None = None):
    """Deviation of psi + (omega/2)|x|^2 from constancy on the boundary.

    Returns (mu, residual_max, per_node) with mu the node average.
    """
    ops = boundary_ops(patch, cfg)
    rel = ops.stream_nodes + 0.5 * omega * (ops.y ** 2).sum(axis=1)
    mu = float(rel.mean())
    per_node = rel - mu
    return mu, float(np.abs(per_node).max()), per_node


@dataclass
class VStateSolution:
    """Converged rotating patch with its certification inputs."""

    patch: PatchBoundary
    omega: float
    mu: float
    residual_max: float
    fold: int
    base_radius: float
    amplitude: float
    iterations: int


def _patch_from_coeffs(m, b, amplitude, extra, n, eps_wall=1e-6) -> PatchBoundary:
    """Area-normalized m-fold cosine patch; extra holds a_{2m}, a_{3m}, ..."""
    amps = np.concatenate([[amplitude], extra])
    c0sq = b * b - 0.5 * (amps ** 2).sum()
    if c0sq <= 0.0:
        raise InvalidShape("coefficients exceed the area budget")
    cos_coeffs = np.zeros(m * len(amps))
    cos_coeffs[m - 1 :: m] = amps
    return from_fourier(np.sqrt(c0sq), cos_coeffs, [], n=n, eps_wall=eps_wall)


def solve_vstate(m: int, b: float, amplitude: float, n: int = 256,
                 max_iter: int = 30, tol: float = 1e-10,
                 n_harmonics: int | None = None,
                 warm_start: np.ndarray | None = None,
                 cfg: GreenEval | None = None) -> VStateSolution:
    """Newton (Gauss-Newton) solve for the m-fold V-state at fixed amplitude.

    Unknowns are the higher cosine coefficients a_{2m}..a_{Km} plus omega;
    the residual is the per-node deviation of the relative stream function
    from its mean.  Jacobian columns by forward differences.
    """
    if int(m) != m or m < 2:
        raise InvalidArgument("fold m must be an integer >= 2")
    if not 0.0 < b < 1.0:
        raise InvalidArgument("base radius b must lie in (0, 1)")
    if n < 128 or n % 2:
        raise InvalidArgument("need even n >= 128")
    m = int(m)
    k_max = n_harmonics or max(2, n // 8)
    k_max = min(k_max, (n // 2 - 1) // m)

    if amplitude == 0.0:
        patch = from_fourier(b, [], [], n=n)
        omega = bifurcation_omega(m, b)
        mu, rmax, _ = boundary_residual(patch, omega, cfg)
        return VStateSolution(patch=patch, omega=omega, mu=mu, residual_max=rmax,
                              fold=m, base_radius=b, amplitude=0.0, iterations=0)

    if warm_start is not None:
        u = np.asarray(warm_start, float).copy()
        if len(u) != k_max:
            v = np.zeros(k_max)
            v[-1] = u[-1]
            v[: min(len(u), k_max) - 1] = u[: min(len(u), k_max) - 1]
            u = v
    else:
        u = np.zeros(k_max)
        u[-1] = bifurcation_omega(m, b)

    def residual(uvec):
        patch = _patch_from_coeffs(m, b, amplitude, uvec[:-1], n)
        _, _, per_node = boundary_residual(patch, uvec[-1], cfg)
        return per_node

    res = residual(u)
    rmax = np.abs(res).max()
    last = rmax
    for it in range(1, max_iter + 1):
        if rmax < tol:
            break
        jac = np.empty((n, len(u)))
        for j in range(len(u)):
            step = 1e-7 * (1.0 + abs(u[j]))
            up = u.copy()
            up[j] += step
            jac[:, j] = (residual(up) - res) / step
        du, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        u = u + du
        res = residual(u)
        rmax = np.abs(res).max()
        if not np.isfinite(rmax):
            raise NoConvergence("residual diverged", residual=float(last))
        last = rmax
    else:
        if rmax >= tol:
            raise NoConvergence(
                f"no convergence in {max_iter} iterations (residual {rmax:.3g})",
                residual=float(rmax))

    patch = _patch_from_coeffs(m, b, amplitude, u[:-1], n)
    mu, rmax, _ = boundary_residual(patch, u[-1], cfg)
    return VStateSolution(patch=patch, omega=float(u[-1]), mu=mu,
                          residual_max=rmax, fold=m, base_radius=b,
                          amplitude=amplitude, iterations=it)


@dataclass
class BranchResult:
    """Warm-started continuation along increasing amplitudes."""

    points: list[VStateSolution]
    truncated: bool
    diagnostics: list[dict]


def continue_branch(m: int, b: float, amplitudes, n: int = 256,
                    max_iter: int = 30, tol: float = 1e-10,
                    cfg: GreenEval | None = None) -> BranchResult:
    """Solve along strictly increasing amplitudes, warm-starting each point.

    The first failure truncates the branch; earlier points are returned with
    the truncation flag set.
    """
    amplitudes = list(amplitudes)
    if any(a2 <= a1 for a1, a2 in zip(amplitudes, amplitudes[1:])):
        raise InvalidArgument("amplitudes must be strictly increasing")
    points: list[VStateSolution] = []
    diagnostics: list[dict] = []
    warm = None
    truncated = False
    for amp in amplitudes:
        try:
            sol = solve_vstate(m, b, amp, n=n, max_iter=max_iter, tol=tol,
                               warm_start=warm, cfg=cfg)
        except (NoConvergence, InvalidShape):
            truncated = True
            break
        points.append(sol)
        summary = summarize(sol.patch)
        diagnostics.append({"amplitude": amp, "omega": sol.omega,
                            "max_radius": summary.max_radius,
                            "sym_diff": summary.sym_diff})
        k = len(sol.patch.cos_coeffs) // m
        warm = np.concatenate([sol.patch.cos_coeffs[2 * m - 1 :: m][: k - 1],
                               [sol.omega]])
    return BranchResult(points=points, truncated=truncated, diagnostics=diagnostics)
