"""Dimension brackets by root finding on certified log-radius curves.

The spectral radius of the assembled matrices is strictly decreasing and
log-convex in s, so log r(s) has a single root found by a secant
iteration safeguarded with bisection.  The lower matrix roots give a
certified lower dimension bound (r(A_s) >= 1), the upper matrix roots a
certified upper bound (r(B_s) <= 1); a nudge pass moves each endpoint
outward in steps of root_tol until the enclosure endpoint itself
certifies the inequality.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .discretize import MatrixTriple, assemble, make_mesh
from .errors import BadParams, NoSignChange, PowerDivergence
from .ifs import MapFamily
from .spectral import SpectralEnclosure, power_enclosure

_EPS = float(np.finfo(float).eps)

_TRIPLE_CACHE_LIMIT = 16
_triple_cache: OrderedDict[tuple, MatrixTriple] = OrderedDict()
_radius_cache: dict[tuple, tuple[float, float, int, bool]] = {}
_assembly_count = 0


def clear_cache() -> None:
    _triple_cache.clear()
    _radius_cache.clear()


def assembly_count() -> int:
    """Total matrix assemblies since import (cache misses)."""
    return _assembly_count


def cached_triple(fam: MapFamily, mesh, s: float) -> MatrixTriple:
    """Assemble (A, M, B) at s, reusing a small LRU of recent triples."""
    global _assembly_count
    key = (fam.key(), mesh.key(), s)
    hit = _triple_cache.get(key)
    if hit is not None:
        _triple_cache.move_to_end(key)
        return hit
    triple = assemble(fam, mesh, s)
    _assembly_count += 1
    _triple_cache[key] = triple
    if len(_triple_cache) > _TRIPLE_CACHE_LIMIT:
        _triple_cache.popitem(last=False)
    return triple


def enclosure_at(fam: MapFamily, mesh, s: float, which: str,
                 radius_tol: float = 1e-13) -> SpectralEnclosure:
    """Spectral enclosure of the requested matrix (fresh iteration)."""
    if which not in ("A", "M", "B"):
        raise BadParams(f"which must be A, M or B, got {which!r}")
    triple = cached_triple(fam, mesh, s)
    return power_enclosure(getattr(triple, which), tol=radius_tol)


def _radius_scalars(fam: MapFamily, mesh, s: float, which: str,
                    radius_tol: float) -> tuple[float, float, int, bool]:
    key = (fam.key(), mesh.key(), s, which, radius_tol)
    hit = _radius_cache.get(key)
    if hit is not None:
        return hit
    enc = enclosure_at(fam, mesh, s, which, radius_tol)
    out = (enc.r_lo, enc.r_hi, enc.iterations, enc.converged)
    _radius_cache[key] = out
    return out


def log_radius(fam: MapFamily, mesh, s: float, which: str = "B",
               radius_tol: float = 1e-13) -> float:
    """log of the enclosure midpoint of r(A_s|M_s|B_s); cached."""
    r_lo, r_hi, _, converged = _radius_scalars(fam, mesh, s, which, radius_tol)
    if not converged:
        raise PowerDivergence(
            f"enclosure gap stalled at {(r_hi - r_lo) / r_hi:.3g} (tol {radius_tol})"
        )
    return math.log(0.5 * (r_lo + r_hi))


def radius(fam: MapFamily, mesh, s: float, which: str = "M",
           radius_tol: float = 1e-13) -> float:
    """Enclosure midpoint of the spectral radius (convenience)."""
    return math.exp(log_radius(fam, mesh, s, which, radius_tol))


# ---------------------------------------------------------------------------
# root solving


def solve_root(f, bracket: tuple[float, float], root_tol: float = 1e-12,
               *, max_evals: int = 40, expand: float = 2.0,
               limits: tuple[float, float] = (1e-6, 64.0)) -> tuple[float, int]:
    """Root of a decreasing function by secant steps inside a sign bracket.

    The bracket is expanded geometrically until f changes sign, then each
    secant candidate is accepted only inside the current bracket
    (bisection otherwise).  Returns (root, evaluations); NoSignChange if
    no sign change exists within the expansion limits.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not (0.0 < lo < hi):
        raise BadParams(f"bad bracket {bracket}")
    evals = 0

    def ev(x: float) -> float:
        nonlocal evals
        evals += 1
        return float(f(x))

    flo = ev(lo)
    fhi = ev(hi)
    while flo < 0.0:
        if lo <= limits[0] or evals >= max_evals:
            raise NoSignChange(f"no positive value down to s = {lo}")
        hi, fhi = lo, flo
        lo = max(limits[0], lo / expand)
        flo = ev(lo)
    while fhi > 0.0:
        if hi >= limits[1] or evals >= max_evals:
            raise NoSignChange(f"no negative value up to s = {hi}")
        lo, flo = hi, fhi
        hi = min(limits[1], hi * expand)
        fhi = ev(hi)
    if abs(flo) <= root_tol:
        return lo, evals
    if abs(fhi) <= root_tol:
        return hi, evals
    a, fa = lo, flo
    b, fb = hi, fhi
    x0, f0, x1, f1 = a, fa, b, fb
    while evals < max_evals:
        denom = f1 - f0
        if denom != 0.0 and math.isfinite(denom):
            x = x1 - f1 * (x1 - x0) / denom
        else:
            x = 0.5 * (a + b)
        if not a < x < b:
            x = 0.5 * (a + b)
        fx = ev(x)
        x0, f0, x1, f1 = x1, f1, x, fx
        if abs(fx) <= root_tol:
            return x, evals
        if fx > 0.0:
            a, fa = x, fx
        else:
            b, fb = x, fx
        if b - a <= 4.0 * _EPS * max(1.0, abs(b)):
            break
    return (a if abs(fa) <= abs(fb) else b), evals


# ---------------------------------------------------------------------------
# certified dimension brackets


@dataclass(frozen=True)
class DimensionBracket:
    """Certified enclosure [s_lower, s_upper] of the dimension."""

    s_lower: float
    s_upper: float
    mesh_h: float
    family_id: str
    radius_tol: float
    root_tol: float
    evals: int
    certified: bool

    @property
    def width(self) -> float:
        return self.s_upper - self.s_lower


_NUDGE_STEPS = 64


def bracket_dimension(fam: MapFamily, mesh, *, root_tol: float = 1e-12,
                      radius_tol: float = 1e-13,
                      initial: tuple[float, float] = (0.01, 1.5)
                      ) -> DimensionBracket:
    """Bracket the dimension with certified enclosure endpoints.

    s_upper comes from the root of log r(B_s) nudged upward until the
    enclosure satisfies r_hi(B) <= 1; s_lower from the root of
    log r(A_s) nudged downward until r_lo(A) >= 1.  If 64 nudge steps do
    not certify an endpoint the bracket is returned with certified=False.
    """
    before = assembly_count()

    def f_upper(s: float) -> float:
        return log_radius(fam, mesh, s, "B", radius_tol)

    def f_lower(s: float) -> float:
        return log_radius(fam, mesh, s, "A", radius_tol)

    s_up, _ = solve_root(f_upper, initial, root_tol)
    cert_up = False
    for _ in range(_NUDGE_STEPS + 1):
        _, r_hi, _, _ = _radius_scalars(fam, mesh, s_up, "B", radius_tol)
        if r_hi <= 1.0:
            cert_up = True
            break
        s_up += root_tol
    s_lo, _ = solve_root(f_lower, initial, root_tol)
    cert_lo = False
    for _ in range(_NUDGE_STEPS + 1):
        r_lo, _, _, _ = _radius_scalars(fam, mesh, s_lo, "A", radius_tol)
        if r_lo >= 1.0:
            cert_lo = True
            break
        s_lo -= root_tol
    return DimensionBracket(
        s_lower=s_lo, s_upper=s_up, mesh_h=mesh.h, family_id=fam.family_id,
        radius_tol=radius_tol, root_tol=root_tol,
        evals=assembly_count() - before, certified=cert_up and cert_lo,
    )


@dataclass(frozen=True)
class ConvergenceStudy:
    """Bracket widths across a mesh ladder with the fitted order."""

    rows: tuple[tuple[float, float, float, float], ...]  # (h, lo, up, width)
    fitted_order: float


def convergence_study(fam: MapFamily, hs, intervals=None,
                      **kwargs) -> ConvergenceStudy:
    """Brackets on a ladder of mesh widths; order fit on log width vs log h."""
    hs = sorted(float(h) for h in hs)
    if len(hs) < 2:
        raise BadParams("mesh ladder needs at least two widths")
    if intervals is None:
        intervals = [fam.domain]
    rows = []
    for h in hs:
        mesh = make_mesh(intervals, h=h)
        br = bracket_dimension(fam, mesh, **kwargs)
        rows.append((mesh.h, br.s_lower, br.s_upper, br.width))
    slope = float(np.polyfit(np.log([r[0] for r in rows]),
                             np.log([max(r[3], 1e-300) for r in rows]), 1)[0])
    return ConvergenceStudy(rows=tuple(rows), fitted_order=slope)
