"""Plain-text file formats.

Patch files::

    VPATCH 1 FOURIER          VPATCH 1 VERTICES
    C0 <c0>                   N <count>
    <k> <a_k> <b_k>           <x> <y>        (count lines)
    ...                       END
    END

Numbers carry 17 significant digits so that write/parse round-trips float64
exactly.  Lines starting with '#' are comments (evolution snapshots store the
sample time as "# T <time>").  V-state solutions get a sidecar text block in
"<path>.vstate".
"""

from __future__ import annotations

import io
import numpy as np

from .errors import ParseError
from .geometry import FOURIER, VERTICES, PatchBoundary, from_fourier, from_vertices

_FMT = "%.17g"


def _fmt(x: float) -> str:
    return _FMT % float(x)


def render_patch(patch: PatchBoundary, comment: str | None = None) -> str:
    out = io.StringIO()
    if comment is not None:
        out.write(f"# {comment}\n")
    if patch.form == FOURIER:
        out.write("VPATCH 1 FOURIER\n")
        out.write(f"C0 {_fmt(patch.c0)}\n")
        for k, (a, b) in enumerate(zip(patch.cos_coeffs, patch.sin_coeffs), start=1):
            out.write(f"{k} {_fmt(a)} {_fmt(b)}\n")
    else:
        out.write("VPATCH 1 VERTICES\n")
        out.write(f"N {patch.n}\n")
        for x, y in patch.points:
            out.write(f"{_fmt(x)} {_fmt(y)}\n")
    out.write("END\n")
    return out.getvalue()


def write_patch(patch: PatchBoundary, path, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(render_patch(patch, comment))


def parse_patch(text_or_path, n: int = 256) -> PatchBoundary:
    """Parse a VPATCH document (path or literal text).

    FOURIER files carry no node count, so the quadrature resolution is taken
    from the n argument.
    """
    if isinstance(text_or_path, str) and "\n" not in text_or_path:
        with open(text_or_path) as fh:
            text = fh.read()
    else:
        text = text_or_path
    lines = text.splitlines()
    rows = [(i + 1, ln.strip()) for i, ln in enumerate(lines)
            if ln.strip() and not ln.strip().startswith("#")]
    if not rows:
        raise ParseError("empty patch file", line=1)
    lineno, header = rows[0]
    parts = header.split()
    if len(parts) != 3 or parts[0] != "VPATCH" or parts[1] != "1":
        raise ParseError(f"bad header {header!r}", line=lineno)
    form = parts[2]
    body = rows[1:]
    if not body or body[-1][1] != "END":
        raise ParseError("missing END terminator", line=rows[-1][0])
    body = body[:-1]
    if form == FOURIER:
        if not body or not body[0][1].startswith("C0"):
            raise ParseError("FOURIER patch must start with a C0 line",
                             line=body[0][0] if body else lineno)
        try:
            c0 = float(body[0][1].split()[1])
        except (IndexError, ValueError):
            raise ParseError("malformed C0 line", line=body[0][0]) from None
        kmax = 0
        coeffs = {}
        for ln_no, ln in body[1:]:
            bits = ln.split()
            try:
                k = int(bits[0])
                a, b = float(bits[1]), float(bits[2])
            except (IndexError, ValueError):
                raise ParseError(f"malformed coefficient line {ln!r}", line=ln_no) from None
            if k < 1:
                raise ParseError("harmonic index must be >= 1", line=ln_no)
            coeffs[k] = (a, b)
            kmax = max(kmax, k)
        a = np.zeros(kmax)
        b = np.zeros(kmax)
        for k, (ak, bk) in coeffs.items():
            a[k - 1], b[k - 1] = ak, bk
        return from_fourier(c0, a, b, n=n)
    if form == VERTICES:
        if not body or not body[0][1].startswith("N"):
            raise ParseError("VERTICES patch must start with an N line",
                             line=body[0][0] if body else lineno)
        try:
            count = int(body[0][1].split()[1])
        except (IndexError, ValueError):
            raise ParseError("malformed N line", line=body[0][0]) from None
        pts = []
        for ln_no, ln in body[1:]:
            bits = ln.split()
            try:
                pts.append((float(bits[0]), float(bits[1])))
            except (IndexError, ValueError):
                raise ParseError(f"malformed vertex line {ln!r}", line=ln_no) from None
        if len(pts) != count:
            raise ParseError(f"expected {count} vertices, found {len(pts)}",
                             line=body[-1][0] if len(body) > 1 else body[0][0])
        return from_vertices(np.asarray(pts))
    raise ParseError(f"unknown form {form!r}", line=lineno)


def render_vstate_sidecar(omega, mu, residual, m, b) -> str:
    return ("VSTATE 1\n"
            f"OMEGA {_fmt(omega)}\n"
            f"MU {_fmt(mu)}\n"
            f"RESIDUAL {_fmt(residual)}\n"
            f"M {int(m)}\n"
            f"B {_fmt(b)}\n"
            "END\n")


def write_vstate(solution, path) -> None:
    """Write a converged V-state as VPATCH file plus .vstate sidecar."""
    write_patch(solution.patch, path)
    with open(str(path) + ".vstate", "w") as fh:
        fh.write(render_vstate_sidecar(solution.omega, solution.mu,
                                       solution.residual_max, solution.fold,
                                       solution.base_radius))
