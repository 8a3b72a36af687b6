"""Patch domains and the geometric quantities feeding every functional.

A patch is a simply-connected open set strictly inside the unit disc,
described either by a star-shaped Fourier radius r(theta) or by vertices
sampling a smooth closed curve counterclockwise.  RadialSet collects
finite unions of concentric rings used as exact oracles for the radial
geometry inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq, minimize_scalar

from . import spectral
from .errors import InvalidArgument, InvalidResolution, InvalidShape, OutsideUnitDisc

FOURIER = "FOURIER"
VERTICES = "VERTICES"
DEFAULT_EPS_WALL = 1e-6
MIN_NODES = 16


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


class PatchBoundary:
    """Closed boundary of a simply-connected patch inside the unit disc.

    FOURIER form: r(theta) = c0 + sum_k (a_k cos k theta + b_k sin k theta),
    star-shaped about the origin, discretized at n uniform angles with exact
    tangents from the trigonometric series.

    VERTICES form: n counterclockwise points understood as samples of a
    smooth closed curve at uniform values of the underlying parameter;
    tangents come from FFT differentiation.  Genuinely cornered polygons are
    still accepted (file I/O, clipping) but the boundary-integral machinery
    assumes smoothness.
    """

    def __init__(self, form, *, n=None, c0=None, cos_coeffs=None, sin_coeffs=None,
                 points=None, eps_wall=DEFAULT_EPS_WALL, check_simple=True,
                 container_radius=1.0):
        if form not in (FOURIER, VERTICES):
            raise InvalidArgument(f"unknown boundary form {form!r}")
        if container_radius <= 0.0:
            raise InvalidArgument("container radius must be positive")
        self.form = form
        self.eps_wall = float(eps_wall)
        self.container_radius = float(container_radius)
        if form == FOURIER:
            if n is None:
                n = 256
            n = int(n)
            if n < MIN_NODES or n % 2:
                raise InvalidResolution(f"need even n >= {MIN_NODES}, got {n}")
            self.n = n
            self.c0 = float(c0)
            a = np.atleast_1d(np.asarray(cos_coeffs if cos_coeffs is not None else [], float))
            b = np.atleast_1d(np.asarray(sin_coeffs if sin_coeffs is not None else [], float))
            k = max(len(a), len(b))
            self.cos_coeffs = np.zeros(k)
            self.sin_coeffs = np.zeros(k)
            self.cos_coeffs[:len(a)] = a
            self.sin_coeffs[:len(b)] = b
            self.points = None
            if self.c0 <= 0.0:
                raise InvalidShape("mean radius c0 must be positive")
            rr = self.radius_of(spectral.grid(max(4096, 8 * n)))
            if rr.min() <= 0.0:
                raise InvalidShape("radius r(theta) must stay positive")
        else:
            pts = np.asarray(points, float)
            if pts.ndim != 2 or pts.shape[1] != 2:
                raise InvalidShape("vertices must be an (n, 2) array")
            n = len(pts)
            if n < MIN_NODES or n % 2:
                raise InvalidResolution(f"need even n >= {MIN_NODES}, got {n}")
            self.n = n
            area2 = _cross(pts, np.roll(pts, -1, axis=0)).sum()
            if area2 == 0.0:
                raise InvalidShape("degenerate polygon")
            if area2 < 0.0:
                pts = pts[::-1].copy()  # normalize to counterclockwise
            self.points = pts
            self.c0 = None
            self.cos_coeffs = None
            self.sin_coeffs = None
            if check_simple and _self_intersects(pts):
                raise InvalidShape("polygon is self-intersecting")
        if self.max_radius >= self.container_radius * (1.0 - self.eps_wall):
            raise OutsideUnitDisc(
                f"max radius {self.max_radius:.6g} reaches the container circle")

    # -- sampled curve data ------------------------------------------------

    @cached_property
    def theta(self) -> np.ndarray:
        return spectral.grid(self.n)

    def radius_of(self, theta) -> np.ndarray:
        """Radius r(theta) of a FOURIER boundary."""
        if self.form != FOURIER:
            raise InvalidArgument("radius_of is only defined for FOURIER patches")
        theta = np.asarray(theta, float)
        r = np.full(theta.shape, self.c0)
        for k, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            if a:
                r += a * np.cos(k * theta)
            if b:
                r += b * np.sin(k * theta)
        return r

    def _radius_deriv(self, theta, order=1) -> np.ndarray:
        theta = np.asarray(theta, float)
        out = np.zeros(theta.shape)
        for k, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            ka, kb = a * float(k) ** order, b * float(k) ** order
            phase = order % 4
            c, s = np.cos(k * theta), np.sin(k * theta)
            if phase == 1:
                out += -ka * s + kb * c
            elif phase == 2:
                out += -ka * c - kb * s
            elif phase == 3:
                out += ka * s - kb * c
            else:
                out += ka * c + kb * s
        return out

    @cached_property
    def nodes(self) -> np.ndarray:
        if self.form == FOURIER:
            r = self.radius_of(self.theta)
            return np.stack([r * np.cos(self.theta), r * np.sin(self.theta)], axis=1)
        return self.points

    @cached_property
    def dnodes(self) -> np.ndarray:
        """d(nodes)/dtheta along the parameterization."""
        if self.form == FOURIER:
            th = self.theta
            r = self.radius_of(th)
            rp = self._radius_deriv(th, 1)
            c, s = np.cos(th), np.sin(th)
            return np.stack([rp * c - r * s, rp * s + r * c], axis=1)
        return np.stack([spectral.spectral_derivative(self.points[:, 0]),
                         spectral.spectral_derivative(self.points[:, 1])], axis=1)

    @cached_property
    def speed(self) -> np.ndarray:
        return np.hypot(self.dnodes[:, 0], self.dnodes[:, 1])

    @cached_property
    def tangent(self) -> np.ndarray:
        return self.dnodes / self.speed[:, None]

    @cached_property
    def normal(self) -> np.ndarray:
        """Outward unit normal (counterclockwise orientation)."""
        t = self.tangent
        return np.stack([t[:, 1], -t[:, 0]], axis=1)

    @cached_property
    def z(self) -> np.ndarray:
        return self.nodes[:, 0] + 1j * self.nodes[:, 1]

    @cached_property
    def dz(self) -> np.ndarray:
        return self.dnodes[:, 0] + 1j * self.dnodes[:, 1]

    @cached_property
    def area(self) -> float:
        h = spectral.TWO_PI / self.n
        a = 0.5 * h * _cross(self.nodes, self.dnodes).sum()
        if a <= 0.0:
            raise InvalidShape("non-positive signed area")
        return float(a)

    @cached_property
    def centroid(self) -> np.ndarray:
        h = spectral.TWO_PI / self.n
        w = _cross(self.nodes, self.dnodes)
        return (h / 3.0) * (self.nodes * w[:, None]).sum(axis=0) / self.area

    @cached_property
    def max_radius(self) -> float:
        if self.form == VERTICES:
            return float(np.hypot(self.points[:, 0], self.points[:, 1]).max())
        if not self.cos_coeffs.any() and not self.sin_coeffs.any():
            return float(self.c0)
        th = spectral.grid(max(8192, 8 * self.n))
        r = self.radius_of(th)
        j = int(np.argmax(r))
        span = th[1] - th[0]
        try:
            res = minimize_scalar(lambda t: -self.radius_of(np.array([t]))[0],
                                  bracket=(th[j] - span, th[j], th[j] + span),
                                  method="brent", options={"xtol": 1e-14})
            return float(max(r[j], -res.fun))
        except ValueError:
            return float(r[j])

    # -- transforms ----------------------------------------------------------

    def rotate(self, phi: float) -> "PatchBoundary":
        """Rotate the patch by angle phi about the origin."""
        phi = float(phi)
        if self.form == FOURIER:
            k = np.arange(1, len(self.cos_coeffs) + 1)
            c, s = np.cos(k * phi), np.sin(k * phi)
            a = self.cos_coeffs * c - self.sin_coeffs * s
            b = self.cos_coeffs * s + self.sin_coeffs * c
            return PatchBoundary(FOURIER, n=self.n, c0=self.c0, cos_coeffs=a,
                                 sin_coeffs=b, eps_wall=self.eps_wall)
        rot = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
        return PatchBoundary(VERTICES, points=self.points @ rot.T,
                             eps_wall=self.eps_wall, check_simple=False)

    def scale(self, factor: float) -> "PatchBoundary":
        """Dilate about the origin (used by the container-radius reduction)."""
        if factor <= 0.0:
            raise InvalidArgument("scale factor must be positive")
        if self.form == FOURIER:
            return PatchBoundary(FOURIER, n=self.n, c0=self.c0 * factor,
                                 cos_coeffs=self.cos_coeffs * factor,
                                 sin_coeffs=self.sin_coeffs * factor,
                                 eps_wall=self.eps_wall)
        return PatchBoundary(VERTICES, points=self.points * factor,
                             eps_wall=self.eps_wall, check_simple=False)

    def resample(self, m: int) -> "PatchBoundary":
        """Re-discretize with m nodes (trigonometric for FOURIER, arclength
        respacing for VERTICES)."""
        m = int(m)
        if m < MIN_NODES or m % 2:
            raise InvalidResolution(f"need even m >= {MIN_NODES}, got {m}")
        if self.form == FOURIER:
            return PatchBoundary(FOURIER, n=m, c0=self.c0,
                                 cos_coeffs=self.cos_coeffs,
                                 sin_coeffs=self.sin_coeffs,
                                 eps_wall=self.eps_wall)
        pts = arclength_respace(self.points, m)
        return PatchBoundary(VERTICES, points=pts, eps_wall=self.eps_wall,
                             check_simple=False)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean membership test (winding based for VERTICES)."""
        pts = np.atleast_2d(np.asarray(points, float))
        if self.form == FOURIER:
            ang = np.arctan2(pts[:, 1], pts[:, 0])
            return np.hypot(pts[:, 0], pts[:, 1]) < self.radius_of(ang)
        w = spectral.winding_fraction(self.z, self.dz, pts[:, 0] + 1j * pts[:, 1])
        return w > 0.5


def from_fourier(c0, cos_coeffs=None, sin_coeffs=None, n=256,
                 eps_wall=DEFAULT_EPS_WALL) -> PatchBoundary:
    """Build a star-shaped boundary from its radius Fourier coefficients."""
    return PatchBoundary(FOURIER, n=n, c0=c0, cos_coeffs=cos_coeffs,
                         sin_coeffs=sin_coeffs, eps_wall=eps_wall)


def from_vertices(points, eps_wall=DEFAULT_EPS_WALL, check_simple=True) -> PatchBoundary:
    """Build a boundary from counterclockwise vertex samples."""
    return PatchBoundary(VERTICES, points=points, eps_wall=eps_wall,
                         check_simple=check_simple)


def disc(b: float, n: int = 256, eps_wall=DEFAULT_EPS_WALL) -> PatchBoundary:
    """Centered disc of radius b in FOURIER form."""
    return from_fourier(b, [], [], n=n, eps_wall=eps_wall)


def flower(m: int, c0: float, amplitude: float, n: int = 256,
           eps_wall=DEFAULT_EPS_WALL) -> PatchBoundary:
    """m-fold cosine perturbation of a disc: r = c0 + amplitude cos(m theta)."""
    a = np.zeros(m)
    a[m - 1] = amplitude
    return from_fourier(c0, a, [], n=n, eps_wall=eps_wall)


def ellipse(a: float, b: float, n: int = 256, eps_wall=DEFAULT_EPS_WALL) -> PatchBoundary:
    """Axis-aligned centered ellipse sampled smoothly as VERTICES."""
    t = spectral.grid(n)
    return from_vertices(np.stack([a * np.cos(t), b * np.sin(t)], axis=1),
                         eps_wall=eps_wall, check_simple=False)


def _self_intersects(pts: np.ndarray) -> bool:
    """Crude O(n^2) segment-pair test for non-adjacent edge crossings."""
    n = len(pts)
    p = pts
    q = np.roll(pts, -1, axis=0)
    d = q - p
    for i in range(n - 2):
        j = np.arange(i + 2, n if i > 0 else n - 1)
        r = p[j] - p[i]
        denom = _cross(np.broadcast_to(d[i], d[j].shape), d[j])
        t_num = _cross(r, d[j])
        u_num = _cross(r, np.broadcast_to(d[i], d[j].shape))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = t_num / denom
            u = u_num / denom
        ok = (denom != 0) & (t > 1e-12) & (t < 1 - 1e-12) & (u > 1e-12) & (u < 1 - 1e-12)
        if ok.any():
            return True
    return False


def arclength_respace(points: np.ndarray, m: int) -> np.ndarray:
    """Respace smooth-curve samples to m points equispaced in arclength
    using periodic cubic interpolation."""
    dense = max(8 * len(points), 8 * m)
    xy = np.stack([spectral.trig_resample(points[:, 0], dense),
                   spectral.trig_resample(points[:, 1], dense)], axis=1)
    closed = np.vstack([xy, xy[:1]])
    seg = np.hypot(*np.diff(closed, axis=0).T)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    spl = CubicSpline(s, closed, bc_type="periodic")
    return spl(np.linspace(0.0, s[-1], m, endpoint=False))


# -- summaries ----------------------------------------------------------------


@dataclass(frozen=True)
class PatchSummary:
    """Geometric inputs of the variational terms."""

    area: float
    max_radius: float
    second_moment: float
    equal_area_radius: float
    sym_diff: float


def summarize(patch: PatchBoundary) -> PatchSummary:
    """Area, outer radius, second moment and the symmetric-difference area
    against the equal-area centered disc."""
    h = spectral.TWO_PI / patch.n
    w = _cross(patch.nodes, patch.dnodes)
    area = patch.area
    r2 = (patch.nodes ** 2).sum(axis=1)
    second = 0.25 * h * (r2 * w).sum()
    req = float(np.sqrt(area / np.pi))
    if patch.form == FOURIER:
        sym = _fourier_outside_area(patch, req)
    else:
        inter = polygon_circle_intersection_area(patch.points, req)
        sym = max(0.0, polygon_area(patch.points) - inter)
    return PatchSummary(area=float(area), max_radius=patch.max_radius,
                        second_moment=float(second), equal_area_radius=req,
                        sym_diff=float(sym))


def _fourier_outside_area(patch: PatchBoundary, req: float) -> float:
    """|D \\ B| for a star-shaped patch: (1/2) integral of max(r^2-R^2, 0)."""
    dense = max(4096, 8 * patch.n)
    th = np.linspace(0.0, spectral.TWO_PI, dense + 1)
    f = patch.radius_of(th) - req
    scale = abs(patch.c0) + np.abs(patch.cos_coeffs).sum() + np.abs(patch.sin_coeffs).sum()
    if np.abs(f).max() <= 1e-12 * scale:
        return 0.0
    sign = np.sign(f)
    crossings = []
    for j in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        crossings.append(brentq(lambda t: patch.radius_of(np.array([t]))[0] - req,
                                th[j], th[j + 1], xtol=1e-15))
    if not crossings:
        if f[0] <= 0.0:
            return 0.0
        lo, hi = np.array([0.0]), np.array([spectral.TWO_PI])
    else:
        cr = np.asarray(crossings)
        lo = cr
        hi = np.roll(cr, -1).copy()
        hi[-1] += spectral.TWO_PI
    total = 0.0
    gx, gw = spectral.gauss01(48)
    for a, b in zip(np.atleast_1d(lo), np.atleast_1d(hi)):
        mid = patch.radius_of(np.array([0.5 * (a + b)]))[0]
        if mid <= req:
            continue
        t = a + (b - a) * gx
        total += (b - a) * (gw * 0.5 * (patch.radius_of(t) ** 2 - req ** 2)).sum()
    return max(0.0, total)


# -- polygon / circle clipping -------------------------------------------------


def polygon_area(pts: np.ndarray) -> float:
    return 0.5 * float(_cross(pts, np.roll(pts, -1, axis=0)).sum())


def polygon_second_moment(pts: np.ndarray) -> float:
    """Exact integral of |x|^2 over a simple polygon."""
    q = np.roll(pts, -1, axis=0)
    c = _cross(pts, q)
    return float((c * ((pts * pts).sum(1) + (pts * q).sum(1) + (q * q).sum(1))).sum() / 12.0)


def polygon_circle_intersection_area(pts: np.ndarray, radius: float) -> float:
    """Area of polygon ∩ disc(0, radius), exact circular segments.

    Each edge contributes the signed area of the circle-clipped triangle
    (origin, p, q): straight pieces inside the circle give triangle areas,
    pieces outside give circular sectors.
    """
    if radius <= 0.0:
        return 0.0
    total = 0.0
    p = pts
    q = np.roll(pts, -1, axis=0)
    r2 = radius * radius
    for a, b in zip(p, q):
        ts = [0.0]
        d = b - a
        aa = d @ d
        if aa > 0.0:
            bb = 2.0 * (a @ d)
            cc = a @ a - r2
            disc_ = bb * bb - 4.0 * aa * cc
            if disc_ > 0.0:
                sq = np.sqrt(disc_)
                for t in ((-bb - sq) / (2 * aa), (-bb + sq) / (2 * aa)):
                    if 1e-14 < t < 1.0 - 1e-14:
                        ts.append(float(t))
        ts.append(1.0)
        ts.sort()
        for t0, t1 in zip(ts[:-1], ts[1:]):
            if t1 - t0 < 1e-15:
                continue
            pa = a + t0 * d
            pb = a + t1 * d
            mid = a + 0.5 * (t0 + t1) * d
            if mid @ mid <= r2:
                total += 0.5 * (pa[0] * pb[1] - pa[1] * pb[0])
            else:
                ang = np.arctan2(pb[1], pb[0]) - np.arctan2(pa[1], pa[0])
                if ang > np.pi:
                    ang -= spectral.TWO_PI
                elif ang < -np.pi:
                    ang += spectral.TWO_PI
                total += 0.5 * r2 * ang
    return float(total)


# -- radial sets ---------------------------------------------------------------


@dataclass(frozen=True)
class RadialSet:
    """Finite union of disjoint concentric rings [r_in, r_out)."""

    rings: tuple[tuple[float, float], ...]

    def __post_init__(self):
        rings = tuple((float(a), float(b)) for a, b in self.rings)
        if not rings:
            raise InvalidShape("radial set needs at least one ring")
        rings = tuple(sorted(rings))
        prev = 0.0
        first = True
        for a, b in rings:
            if not (0.0 <= a < b <= 1.0):
                raise InvalidShape(f"ring [{a}, {b}) outside [0, 1]")
            if not first and a < prev - 1e-15:
                raise InvalidShape("rings overlap")
            prev, first = b, False
        object.__setattr__(self, "rings", rings)


def radial_moments(rs: RadialSet) -> PatchSummary:
    """Closed-form summary of a radial set (exact oracle path)."""
    area = sum(np.pi * (b * b - a * a) for a, b in rs.rings)
    second = sum(0.5 * np.pi * (b**4 - a**4) for a, b in rs.rings)
    req = float(np.sqrt(area / np.pi))
    sym = 0.0
    for a, b in rs.rings:
        if req <= a:
            sym += np.pi * (b * b - a * a)
        elif req < b:
            sym += np.pi * (b * b - req * req)
    return PatchSummary(area=float(area), max_radius=max(b for _, b in rs.rings),
                        second_moment=float(second), equal_area_radius=req,
                        sym_diff=float(sym))


def interior_quadrature(patch: PatchBoundary, n_radial: int) -> tuple[np.ndarray, np.ndarray]:
    """Area quadrature by fanning curved sectors from the centroid.

    Maps (s, theta) in [0,1] x [0,2pi) to c + s (y(theta) - c); the signed
    Jacobian s * cross(y - c, y') makes the rule exact even when the patch is
    not star-shaped about its centroid.  Gauss in s, trapezoid in theta.
    """
    if n_radial < 4:
        raise InvalidArgument("need at least 4 radial nodes")
    s, gw = spectral.gauss01(n_radial)
    c = patch.centroid
    v = patch.nodes - c
    jac = _cross(v, patch.dnodes)  # theta-dependent part of the Jacobian
    h = spectral.TWO_PI / patch.n
    pts = c[None, None, :] + s[:, None, None] * v[None, :, :]
    wts = (s[:, None] * gw[:, None]) * jac[None, :] * h
    return pts.reshape(-1, 2), wts.reshape(-1)
