"""Green function of the unit disc and the potentials a patch induces.

The kernel splits as G(x, y) = -(1/2pi) ln|x-y| - h(x, y) with the image
term h(x, y) = -(1/2pi) ln| x/|x| - |x| y |.  The image term is evaluated
through 1 - 2 x.y + |x|^2 |y|^2 (log1p), which removes the spurious
singularity at x = 0; equivalently h is the potential of the reflected
point x* = x/|x|^2, which is what the boundary-reduced paths use.

Area integrals of the log kernel are reduced exactly to boundary integrals
by fanning rays from the evaluation point and integrating s*ln(s) in closed
form, so the only genuinely singular quadrature left is the on-boundary
log kernel, handled by the circulant spectral rule in `spectral`.
Interior evaluation of the stream function and its gradient goes through
the analytic completion of psi + |x|^2/4, which is harmonic on the patch.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import spectral
from .errors import InvalidArgument, SingularArgument
from .geometry import PatchBoundary, interior_quadrature
from .harmonic import AnalyticCompletion

TWO_PI = spectral.TWO_PI


def image_part(x, y):
    """h(x, y), finite for all x, y in the open unit disc."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    dot = (x * y).sum(axis=-1)
    q2m1 = (x * x).sum(axis=-1) * (y * y).sum(axis=-1) - 2.0 * dot
    return -np.log1p(q2m1) / (2.0 * TWO_PI)


def green_kernel(x, y):
    """G(x, y) for x != y inside the unit disc."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    d2 = ((x - y) ** 2).sum(axis=-1)
    if np.any(d2 < 1e-28):
        raise SingularArgument("green_kernel needs x != y")
    return -np.log(d2) / (2.0 * TWO_PI) - image_part(x, y)


@dataclass(frozen=True)
class GreenEval:
    """Quadrature knobs for the potential evaluators."""

    n_boundary: int = 256
    n_radial: int = 12
    delta_near: float = 0.05
    near_upsample: int = 8
    center_switch: float = 0.05

    def __post_init__(self):
        if self.n_boundary < 64 or self.n_boundary % 2:
            raise InvalidArgument("n_boundary must be even and >= 64")
        if self.n_radial < 4:
            raise InvalidArgument("n_radial must be >= 4")
        if not 0.0 < self.delta_near < 0.1:
            raise InvalidArgument("delta_near must lie in (0, 0.1)")


_OPS_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def boundary_ops(patch: PatchBoundary, cfg: GreenEval | None = None) -> "BoundaryOps":
    """Shared, cached evaluation machinery for one patch."""
    cfg = cfg or GreenEval()
    per_patch = _OPS_CACHE.setdefault(patch, {})
    ops = per_patch.get(cfg)
    if ops is None:
        ops = BoundaryOps(patch, cfg)
        per_patch[cfg] = ops
    return ops


class BoundaryOps:
    """Potential evaluators bound to one patch boundary.

    Everything is immutable after construction; concurrent reads are safe and
    all reductions are plain numpy (pairwise) sums, so results are
    reproducible run to run.
    """

    def __init__(self, patch: PatchBoundary, cfg: GreenEval | None = None):
        self.patch = patch
        self.cfg = cfg or GreenEval()
        self.n = patch.n
        self.h = TWO_PI / self.n
        self.y = patch.nodes
        self.yp = patch.dnodes
        self.z = patch.z
        self.dz = patch.dz
        self.area = patch.area

    # -- log-kernel area integrals reduced to the boundary -------------------

    @cached_property
    def _cross_matrix(self) -> np.ndarray:
        """cross(y_j - y_i, y'_j); vanishes quadratically on the diagonal."""
        v1 = self.y[None, :, 0] - self.y[:, None, 0]
        v2 = self.y[None, :, 1] - self.y[:, None, 1]
        return v1 * self.yp[None, :, 1] - v2 * self.yp[None, :, 0]

    @cached_property
    def _log_ratio_matrix(self) -> np.ndarray:
        """ln( |y_j - y_i| / (2 |sin((theta_j - theta_i)/2)|) ), smooth."""
        dist = np.abs(self.z[None, :] - self.z[:, None])
        np.fill_diagonal(dist, 1.0)
        th = spectral.grid(self.n)
        sins = 2.0 * np.abs(np.sin(0.5 * (th[None, :] - th[:, None])))
        np.fill_diagonal(sins, 1.0)
        out = np.log(dist / sins)
        np.fill_diagonal(out, np.log(self.patch.speed))
        return out

    def _log_area_targets(self, c: np.ndarray, upsample: int = 1) -> np.ndarray:
        """integral over D of ln|y - c| dy for targets c off the curve."""
        c = np.atleast_2d(c)
        if upsample > 1:
            m = upsample * self.n
            y = np.stack([spectral.trig_resample(self.y[:, 0], m),
                          spectral.trig_resample(self.y[:, 1], m)], axis=1)
            yp = np.stack([spectral.trig_resample(self.yp[:, 0], m),
                           spectral.trig_resample(self.yp[:, 1], m)], axis=1)
            h = TWO_PI / m
        else:
            y, yp, h = self.y, self.yp, self.h
        v1 = y[None, :, 0] - c[:, None, 0]
        v2 = y[None, :, 1] - c[:, None, 1]
        cross = v1 * yp[None, :, 1] - v2 * yp[None, :, 0]
        lnv = 0.5 * np.log(v1 * v1 + v2 * v2)
        return h * (cross * (0.5 * lnv - 0.25)).sum(axis=1)

    def _grad_log_area_targets(self, c: np.ndarray, upsample: int = 1) -> np.ndarray:
        """Gradient in c of the integral above: -contour ln|y-c| nu dsigma."""
        c = np.atleast_2d(c)
        if upsample > 1:
            m = upsample * self.n
            y = np.stack([spectral.trig_resample(self.y[:, 0], m),
                          spectral.trig_resample(self.y[:, 1], m)], axis=1)
            yp = np.stack([spectral.trig_resample(self.yp[:, 0], m),
                           spectral.trig_resample(self.yp[:, 1], m)], axis=1)
            h = TWO_PI / m
        else:
            y, yp, h = self.y, self.yp, self.h
        v1 = y[None, :, 0] - c[:, None, 0]
        v2 = y[None, :, 1] - c[:, None, 1]
        lnv = 0.5 * np.log(v1 * v1 + v2 * v2)
        gx = -h * (lnv * yp[None, :, 1]).sum(axis=1)
        gy = h * (lnv * yp[None, :, 0]).sum(axis=1)
        return np.stack([gx, gy], axis=1)

    @cached_property
    def _log_area_nodes(self) -> np.ndarray:
        """Same integral evaluated at the nodes themselves (singular rule)."""
        cross = self._cross_matrix
        smooth = self.h * (cross * (0.5 * self._log_ratio_matrix - 0.25)).sum(axis=1)
        kress = spectral.log_kernel_matrix(self.n)
        return smooth + 0.25 * (kress * cross).sum(axis=1)

    # -- stream function ------------------------------------------------------

    @cached_property
    def newtonian_nodes(self) -> np.ndarray:
        return -self._log_area_nodes / TWO_PI

    def _image_potential(self, x: np.ndarray, on_nodes_upsample: int = 1) -> np.ndarray:
        """integral over D of h(x, y) dy at arbitrary targets."""
        x = np.atleast_2d(x)
        out = np.empty(len(x))
        r = np.hypot(x[:, 0], x[:, 1])
        far = r >= self.cfg.center_switch
        if far.any():
            xs = x[far] / (r[far] ** 2)[:, None]
            out[far] = -(self.area * np.log(r[far])
                         + self._log_area_targets(xs, on_nodes_upsample)) / TWO_PI
        if (~far).any():
            pts, wts = self.fan()
            xf = x[~far]
            vals = image_part(xf[:, None, :], pts[None, :, :])
            out[~far] = vals @ wts
        return out

    @cached_property
    def image_nodes(self) -> np.ndarray:
        return self._image_potential(self.y)

    @cached_property
    def stream_nodes(self) -> np.ndarray:
        """psi on the boundary nodes."""
        return self.newtonian_nodes - self.image_nodes

    # -- velocity -------------------------------------------------------------

    @cached_property
    def velocity_nodes(self) -> np.ndarray:
        """u = perp-grad psi at the nodes (contour-dynamics form)."""
        lnmat = self._log_ratio_matrix
        kress = spectral.log_kernel_matrix(self.n)
        gx = self.h * (lnmat * self.yp[None, :, 0]).sum(axis=1) \
            + 0.5 * (kress * self.yp[None, :, 0]).sum(axis=1)
        gy = self.h * (lnmat * self.yp[None, :, 1]).sum(axis=1) \
            + 0.5 * (kress * self.yp[None, :, 1]).sum(axis=1)
        u_newton = -np.stack([gx, gy], axis=1) / TWO_PI
        grad_h = self._image_gradient(self.y)
        return u_newton - np.stack([grad_h[:, 1], -grad_h[:, 0]], axis=1)

    def _image_gradient(self, x: np.ndarray) -> np.ndarray:
        """grad_x of the image potential integral."""
        x = np.atleast_2d(x)
        out = np.empty_like(x)
        r2 = (x * x).sum(axis=1)
        far = np.sqrt(r2) >= self.cfg.center_switch
        if far.any():
            xf = x[far]
            rf2 = r2[far]
            xs = xf / rf2[:, None]
            ga = self._grad_log_area_targets(xs)
            # Jacobian of x -> x/|x|^2 is (I |x|^2 - 2 x x^T)/|x|^4 (symmetric)
            dot = (xf * ga).sum(axis=1)
            jga = (ga * rf2[:, None] - 2.0 * xf * dot[:, None]) / (rf2 ** 2)[:, None]
            out[far] = -(self.area * xf / rf2[:, None] + jga) / TWO_PI
        if (~far).any():
            pts, wts = self.fan()
            xn = x[~far]
            d = 1.0 + ((xn ** 2).sum(1)[:, None] * (pts ** 2).sum(1)[None, :]
                       - 2.0 * (xn @ pts.T))
            gx = (pts[None, :, 0] - (pts ** 2).sum(1)[None, :] * xn[:, 0:1]) / d
            gy = (pts[None, :, 1] - (pts ** 2).sum(1)[None, :] * xn[:, 1:2]) / d
            out[~far] = np.stack([gx @ wts, gy @ wts], axis=1) / TWO_PI
        return out

    # -- interior evaluation through the analytic completion ------------------

    @cached_property
    def completion(self) -> AnalyticCompletion:
        return AnalyticCompletion(self.z, self.dz)

    @cached_property
    def _chi(self) -> tuple[np.ndarray, np.ndarray]:
        """Boundary values of F and F' for chi = psi + |x|^2/4 (harmonic)."""
        chi = self.stream_nodes + 0.25 * (self.y ** 2).sum(axis=1)
        f = self.completion.boundary_values(chi)
        return f, self.completion.derivative_nodes(f)

    def stream_inside(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        t = points[:, 0] + 1j * points[:, 1]
        f, _ = self._chi
        vals = self.completion.evaluate(f, t).real
        return vals - 0.25 * (points ** 2).sum(axis=1)

    def stream_gradient_inside(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        t = points[:, 0] + 1j * points[:, 1]
        _, fp = self._chi
        w = self.completion.evaluate(fp, t)
        return np.stack([w.real, -w.imag], axis=1) - 0.5 * points

    def velocity_inside(self, points: np.ndarray) -> np.ndarray:
        g = self.stream_gradient_inside(points)
        return np.stack([g[:, 1], -g[:, 0]], axis=1)

    # -- dispatchers -----------------------------------------------------------

    def _min_node_distance(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = np.hypot(x[:, None, 0] - self.y[None, :, 0],
                     x[:, None, 1] - self.y[None, :, 1])
        return d.min(axis=1), d.argmin(axis=1)

    def stream_at(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, float))
        out = np.empty(len(points))
        dmin, jmin = self._min_node_distance(points)
        on_node = dmin < 1e-12
        out[on_node] = self.stream_nodes[jmin[on_node]]
        rest = ~on_node
        if rest.any():
            pts = points[rest]
            inside = self.patch.contains(pts)
            sub = np.empty(len(pts))
            if inside.any():
                sub[inside] = self.stream_inside(pts[inside])
            outside = ~inside
            if outside.any():
                po = pts[outside]
                near = dmin[rest][outside] < self.cfg.delta_near
                vals = np.empty(len(po))
                for mask, ups in ((near, self.cfg.near_upsample), (~near, 1)):
                    if mask.any():
                        newt = -self._log_area_targets(po[mask], ups) / TWO_PI
                        vals[mask] = newt - self._image_potential(po[mask])
                sub[outside] = vals
            out[rest] = sub
        return out

    def velocity_at(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, float))
        out = np.empty_like(points)
        dmin, jmin = self._min_node_distance(points)
        on_node = dmin < 1e-12
        out[on_node] = self.velocity_nodes[jmin[on_node]]
        rest = ~on_node
        if rest.any():
            pts = points[rest]
            inside = self.patch.contains(pts)
            sub = np.empty_like(pts)
            if inside.any():
                sub[inside] = self.velocity_inside(pts[inside])
            outside = ~inside
            if outside.any():
                po = pts[outside]
                near = dmin[rest][outside] < self.cfg.delta_near
                g = np.empty_like(po)
                for mask, ups in ((near, self.cfg.near_upsample), (~near, 1)):
                    if mask.any():
                        g[mask] = -self._grad_log_area_targets(po[mask], ups) / TWO_PI
                g -= self._image_gradient(po)
                sub[outside] = np.stack([g[:, 1], -g[:, 0]], axis=1)
            out[rest] = sub
        return out

    # -- quadratures ------------------------------------------------------------

    _fan_cache = None

    def fan(self, n_radial: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        n_radial = n_radial or self.cfg.n_radial
        if self._fan_cache is None:
            self._fan_cache = {}
        if n_radial not in self._fan_cache:
            self._fan_cache[n_radial] = interior_quadrature(self.patch, n_radial)
        return self._fan_cache[n_radial]

    @cached_property
    def double_energy(self) -> float:
        """(1/2) integral over D of psi, the interaction part of the energy."""
        pts, wts = self.fan()
        return 0.5 * float(self.stream_inside(pts) @ wts)


# -- functional wrappers --------------------------------------------------------


def stream_function(patch: PatchBoundary, x, cfg: GreenEval | None = None):
    """psi(x) = integral over D of G(x, y) dy, for x anywhere in the disc."""
    vals = boundary_ops(patch, cfg).stream_at(np.atleast_2d(np.asarray(x, float)))
    return float(vals[0]) if np.asarray(x).ndim == 1 else vals


def velocity(patch: PatchBoundary, x, cfg: GreenEval | None = None):
    """u(x) = perp-grad psi(x)."""
    vals = boundary_ops(patch, cfg).velocity_at(np.atleast_2d(np.asarray(x, float)))
    return vals[0] if np.asarray(x).ndim == 1 else vals


def double_energy(patch: PatchBoundary, cfg: GreenEval | None = None) -> float:
    """(1/2) double integral of G over D x D via the stream function."""
    return boundary_ops(patch, cfg).double_energy
