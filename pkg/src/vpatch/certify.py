"""Certification pipeline: does the rigidity theorem exclude a non-radial
rotating patch at this angular velocity?

The certificate keeps two independent facts separate: whether the supplied
configuration is numerically a rotating patch (boundary residual), and
whether the thresholds exclude non-radial rotating patches at that angular
velocity.  Exclusion never claims a counterexample; a nonzero first
variation for a claimed rotating patch is reported as a residual.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument
from .functionals import (EXCLUDED_NONRADIAL, INCONCLUSIVE, RADIAL,
                          RADIAL_SYMDIFF_TOL, L_SAFETY, FunctionalReport,
                          decompose, image_term_bound, rigidity_thresholds,
                          complement_omega)
from .geometry import PatchBoundary
from .greens import GreenEval
from .torsion import solve_torsion
from .vstate import boundary_residual

NONE = "NONE"
SCALED_DISC_R = "SCALED_DISC_R"
COMPLEMENT = "COMPLEMENT"

VSTATE_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class Certificate:
    """Full certification record for one (patch, omega) configuration."""

    report: FunctionalReport
    corollary: str
    verdict: str
    omega_input: float
    strength: float
    container_radius: float
    omega_reduced: float
    lower_exclude: float
    upper_exclude: float
    mu: float
    residual_max: float
    is_vstate: bool

    @property
    def text(self) -> str:
        return render_certificate(self)


def _certificate(report, corollary, verdict, omega_input, strength, radius,
                 omega_reduced, lower, upper, mu, rmax) -> Certificate:
    return Certificate(report=report, corollary=corollary, verdict=verdict,
                       omega_input=omega_input, strength=strength,
                       container_radius=radius, omega_reduced=omega_reduced,
                       lower_exclude=lower, upper_exclude=upper, mu=mu,
                       residual_max=rmax,
                       is_vstate=rmax < VSTATE_RESIDUAL_TOL)


def certify_patch(patch: PatchBoundary, omega: float, strength: float = 1.0,
                  radius: float = 1.0, cfg: GreenEval | None = None) -> Certificate:
    """Certify a simply-connected patch, reducing (strength, radius) to the
    unit problem first.  Patch coordinates are interpreted in the disc of the
    given container radius."""
    if strength == 0.0:
        raise InvalidArgument("vorticity strength must be nonzero")
    if radius <= 0.0:
        raise InvalidArgument("container radius must be positive")
    reduced_patch = patch if radius == 1.0 else patch.scale(1.0 / radius)
    omega_reduced = omega / strength
    torsion = solve_torsion(reduced_patch, cfg)
    report = decompose(reduced_patch, omega_reduced, torsion, cfg)
    mu, rmax, _ = boundary_residual(reduced_patch, omega_reduced, cfg)
    corollary = NONE if (strength == 1.0 and radius == 1.0) else SCALED_DISC_R
    return _certificate(report, corollary, report.verdict, omega, strength,
                        radius, omega_reduced, report.omega_minus,
                        report.omega_plus, mu, rmax)


def certify_complement(patch: PatchBoundary, omega: float,
                       cfg: GreenEval | None = None) -> Certificate:
    """Certify the complement configuration: the rotating region is the unit
    disc minus the given simply-connected patch, spinning at omega.

    The complement rotates at omega exactly when the inner patch rotates at
    1/2 - omega, so the theorem applied to the inner patch excludes the
    configuration outside a band around 1/2.  When exclusion bites, the
    region must be an annulus; "RADIAL" therefore means annular here.
    """
    omega_inner = complement_omega(omega)
    torsion = solve_torsion(patch, cfg)
    report = decompose(patch, omega_inner, torsion, cfg)
    l_infl = min(report.summary.max_radius * (1.0 + L_SAFETY), 1.0 - 1e-12)
    omega_plus, omega_minus = rigidity_thresholds(l_infl)
    # inner exclusion at 1/2 - omega maps to omega <= min{0, 1/2 - g} or
    # omega >= 1/2 + g with g = 2 l^2/(1-l^2)^2
    lower = min(0.0, complement_omega(omega_plus))
    upper = complement_omega(omega_minus)
    if report.summary.sym_diff < RADIAL_SYMDIFF_TOL:
        verdict = RADIAL
    elif omega <= lower or omega >= upper:
        verdict = EXCLUDED_NONRADIAL
    else:
        verdict = INCONCLUSIVE
    mu, rmax, _ = boundary_residual(patch, omega_inner, cfg)
    return _certificate(report, COMPLEMENT, verdict, omega, 1.0, 1.0,
                        omega_inner, lower, upper, mu, rmax)


def render_certificate(cert: Certificate) -> str:
    """Text report: VERDICT line, key=value block, then a term,value CSV."""
    rep = cert.report
    out = io.StringIO()
    out.write(f"VERDICT {cert.verdict}\n")
    kv = [
        ("corollary", cert.corollary),
        ("omega_input", cert.omega_input),
        ("strength", cert.strength),
        ("container_radius", cert.container_radius),
        ("omega_reduced", cert.omega_reduced),
        ("omega", rep.omega),
        ("energy", rep.energy),
        ("torsion_term", rep.torsion_term),
        ("moment_term", rep.moment_term),
        ("image_term", rep.image_term),
        ("total_variation", rep.total_variation),
        ("area", rep.summary.area),
        ("max_radius", rep.summary.max_radius),
        ("second_moment", rep.summary.second_moment),
        ("equal_area_radius", rep.summary.equal_area_radius),
        ("sym_diff", rep.summary.sym_diff),
        ("omega_plus", rep.omega_plus),
        ("omega_minus", rep.omega_minus),
        ("image_bound", rep.image_bound),
        ("lower_exclude", cert.lower_exclude),
        ("upper_exclude", cert.upper_exclude),
        ("mu", cert.mu),
        ("residual_max", cert.residual_max),
        ("is_vstate", str(cert.is_vstate).lower()),
        ("proof_margin_plus", rep.torsion_term + rep.moment_term - rep.image_bound),
        ("proof_margin_minus", rep.torsion_term + rep.moment_term + rep.image_bound),
        ("boundary_smoothness_assumed", "true"),
    ]
    for key, val in kv:
        if isinstance(val, str):
            out.write(f"{key}={val}\n")
        else:
            out.write(f"{key}={val:.17g}\n")
    out.write("term,value\n")
    for label, val in (("J", rep.torsion_term), ("K", rep.moment_term),
                       ("L", rep.image_term), ("I", rep.total_variation),
                       ("LBound", rep.image_bound), ("OmegaPlus", rep.omega_plus),
                       ("OmegaMinus", rep.omega_minus)):
        out.write(f"{label},{val:.17g}\n")
    return out.getvalue()


def render_report(report: FunctionalReport) -> str:
    """key=value plus CSV rendering of a bare functional report."""
    out = io.StringIO()
    kv = [
        ("omega", report.omega),
        ("energy", report.energy),
        ("torsion_term", report.torsion_term),
        ("moment_term", report.moment_term),
        ("image_term", report.image_term),
        ("total_variation", report.total_variation),
        ("area", report.summary.area),
        ("max_radius", report.summary.max_radius),
        ("second_moment", report.summary.second_moment),
        ("equal_area_radius", report.summary.equal_area_radius),
        ("sym_diff", report.summary.sym_diff),
        ("omega_plus", report.omega_plus),
        ("omega_minus", report.omega_minus),
        ("image_bound", report.image_bound),
        ("verdict", report.verdict),
    ]
    for key, val in kv:
        if isinstance(val, str):
            out.write(f"{key}={val}\n")
        else:
            out.write(f"{key}={val:.17g}\n")
    out.write("term,value\n")
    for label, val in (("J", report.torsion_term), ("K", report.moment_term),
                       ("L", report.image_term), ("I", report.total_variation),
                       ("LBound", report.image_bound),
                       ("OmegaPlus", report.omega_plus),
                       ("OmegaMinus", report.omega_minus)):
        out.write(f"{label},{val:.17g}\n")
    return out.getvalue()
