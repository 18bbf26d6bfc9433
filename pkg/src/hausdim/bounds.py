"""Certified bounds on eigenfunction derivative ratios.

The transfer operator's positive eigenfunction v satisfies bounds of the
form R_lo <= v''/v <= R_hi and |v'|/v <= osc, with constants built from
suprema of the map and weight derivatives over words of the contraction
length mu.  Three routes are implemented:

* sharp digit-family bounds from continuant estimates (any ratio order p),
* a generic three-stage chain M1, M2, M3 valid for any C^3 family,
* a refined one-sided bound available when all maps and weights satisfy
  the sign conditions (theta', theta'', g', g'' >= 0 and
  g'' g - (1-s) g'^2 >= 0), giving 0 <= v''/v <= R_hi.

The perturbed Cantor family has closed forms for its constants; those are
cross-checked against the brute-force suprema in the test suite.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BadParams, MissingDerivatives, SignNotCertified
from .ifs import CANTOR, CUSTOM, MOBIUS, MapFamily, contraction_data


@dataclass(frozen=True)
class RatioBoundPair:
    """Two-sided bound on (-1)^p v^(p) / v at derivative order p."""

    lo: float
    hi: float
    order: int


@dataclass(frozen=True)
class BoundConstants:
    """Constants controlling the eigenfunction of one family at one s.

    kappa/mu: words of length mu contract by kappa.  C1..C3 bound
    |g_w^(k)|/g_w, E2/E3 bound |theta_w^(k)|, K2/K3 the mixed quotients
    entering the chain, G2 the signed second-quotient maximum.  M1..M3
    bound |v'|/v, |v''|/v, |v'''|/v.  (R_lo, R_hi) enclose v''/v.
    """

    s: float
    kappa: float
    mu: int
    C1: float
    C2: float
    C3: float
    E2: float
    E3: float
    K2: float
    K3: float
    G2: float
    M1: float
    M2: float
    M3: float
    R_lo: float
    R_hi: float
    sign_cert: bool
    safety: float = 1.0
    kappa_grid: float | None = None


# ---------------------------------------------------------------------------
# formula layer


def bound_M1(s: float, C1: float, kappa: float) -> float:
    """First ratio bound |v'|/v <= s*C1/(1-kappa)."""
    if not 0.0 < kappa < 1.0:
        raise BadParams(f"kappa must lie in (0,1), got {kappa}")
    if s <= 0.0 or C1 < 0.0:
        raise BadParams("need s > 0 and C1 >= 0")
    return s * C1 / (1.0 - kappa)


def bound_M2(s: float, *, K2: float, C1: float, M1: float, E2: float,
             kappa: float) -> float:
    """Second ratio bound |v''|/v <= (s K2 + 2 s C1 M1 kappa + M1 E2)/(1-kappa^2)."""
    if not 0.0 < kappa < 1.0:
        raise BadParams(f"kappa must lie in (0,1), got {kappa}")
    return (s * K2 + 2.0 * s * C1 * M1 * kappa + M1 * E2) / (1.0 - kappa**2)


def bound_M3(s: float, *, K3: float, K2: float, C1: float, M1: float,
             M2: float, E2: float, E3: float, kappa: float) -> float:
    """Third ratio bound from the chained estimate.

    |v'''|/v <= (s K3 + 3 s K2 M1 kappa + 3 s C1 (M2 kappa^2 + M1 E2)
                 + 3 M2 kappa E2 + M1 E3) / (1 - kappa^3).
    """
    if not 0.0 < kappa < 1.0:
        raise BadParams(f"kappa must lie in (0,1), got {kappa}")
    num = (s * K3 + 3.0 * s * K2 * M1 * kappa
           + 3.0 * s * C1 * (M2 * kappa**2 + M1 * E2)
           + 3.0 * M2 * kappa * E2 + M1 * E3)
    return num / (1.0 - kappa**3)


def refined_M2_upper(s: float, *, G2: float, C1: float, E2: float,
                     kappa: float, sign_cert: bool) -> float:
    """One-sided bound v''/v <= ... valid only under the sign certificate."""
    if not sign_cert:
        raise SignNotCertified("refined second-ratio bound needs the sign conditions")
    if not 0.0 < kappa < 1.0:
        raise BadParams(f"kappa must lie in (0,1), got {kappa}")
    num = (s * G2 + 2.0 * s**2 * C1**2 * kappa / (1.0 - kappa)
           + s * C1 * E2 / (1.0 - kappa))
    return num / (1.0 - kappa**2)


def mobius_ratio_bounds(gamma: float, Gamma: float, A_right: float,
                        s: float, p: int) -> RatioBoundPair:
    """Sharp digit-family bounds on (-1)^p v^(p)/v at order p.

    prod(2s..2s+p-1) * (K + A_right)^-p <= (-1)^p v^(p)/v <= prod * gamma^-p
    with K = 1/gamma + Gamma.
    """
    if not (0 < gamma <= Gamma):
        raise BadParams(f"need 0 < gamma <= Gamma, got {gamma}, {Gamma}")
    if s <= 0.0 or p < 1 or A_right < 0.0:
        raise BadParams("need s > 0, p >= 1, A_right >= 0")
    prod = 1.0
    for i in range(p):
        prod *= 2.0 * s + i
    K = 1.0 / gamma + Gamma
    return RatioBoundPair(prod * (K + A_right) ** -p, prod * gamma ** -p, p)


# ---------------------------------------------------------------------------
# golden-section maximization (1-D, seeded)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo: float, hi: float, seeds: int = 64,
               tol: float = 1e-12) -> float:
    """Maximum of f on [lo, hi]: seeded bracketing plus golden-section."""
    xs = np.linspace(lo, hi, seeds + 1)
    vals = np.asarray(f(xs), dtype=float)
    i = int(np.argmax(vals))
    best = float(vals[i])
    a = xs[max(i - 1, 0)]
    b = xs[min(i + 1, seeds)]
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc = float(f(c))
    fd = float(f(d))
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = float(f(c))
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = float(f(d))
    return max(best, fc, fd)


# ---------------------------------------------------------------------------
# perturbed Cantor closed forms


def cantor_sign_threshold(a: float) -> float:
    """Smallest s for which the Cantor sign certificate holds (a > 0)."""
    return 0.4 * (1.0 - 3.0 / (7.0 * a))


def cantor_g2_quotient(a: float, s: float):
    """Signed quotient (g'' g - (1-s) g'^2)/g^2 for the Cantor weight."""
    c = 3.5 * a

    def q(x):
        x = np.asarray(x, dtype=float)
        u = c * x**2.5
        return 2.5 * c * np.sqrt(x) * (1.5 + u * (2.5 * s - 1.0)) / (1.0 + u) ** 2

    return q


def cantor_constants(a: float, s: float, *, direct_k2: bool = True) -> BoundConstants:
    """Closed-form constants for the perturbed Cantor family.

    C1, C2, E2 and kappa come from the exact formulas (with the branch
    points a = 3/7 and a = 1/14 for C1 and C2); G2 and K2 come from a
    seeded golden-section maximization of the explicit quotient.  The
    weight's third derivative is unbounded at 0 for a > 0, so C3, K3 and
    M3 are infinite; E3 stays finite.
    """
    if not 0.0 <= a <= 1.0:
        raise BadParams(f"perturbation must lie in [0, 1], got {a}")
    if s <= 0.0:
        raise BadParams(f"need s > 0, got {s}")
    kappa = (2.0 + 7.0 * a) / (6.0 + 4.0 * a)
    if a == 0.0:
        # affine pair: constant weight, eigenfunction constant
        return BoundConstants(
            s=s, kappa=kappa, mu=1, C1=0.0, C2=0.0, C3=0.0, E2=0.0, E3=0.0,
            K2=0.0, K3=0.0, G2=0.0, M1=0.0, M2=0.0, M3=0.0,
            R_lo=0.0, R_hi=0.0, sign_cert=True,
        )
    c = 3.5 * a
    if a <= 3.0 / 7.0:
        C1 = c * 2.5 / (1.0 + c)
    else:
        C1 = c * (3.0 / (7.0 * a)) ** 0.6
    if a <= 1.0 / 14.0:
        C2 = 3.75 * c / (1.0 + c)
    else:
        C2 = 3.0 * 0.25**0.2 * c**0.8
    E2 = c * 5.0 / (6.0 + 4.0 * a)
    E3 = 13.125 * a / (3.0 + 2.0 * a)
    q = cantor_g2_quotient(a, s)
    G2 = golden_max(q, 0.0, 1.0)
    if direct_k2:
        K2 = golden_max(lambda x: np.abs(q(x)), 0.0, 1.0)
    else:
        K2 = C2 + abs(1.0 - s) * C1**2
    M1 = bound_M1(s, C1, kappa)
    M2 = bound_M2(s, K2=K2, C1=C1, M1=M1, E2=E2, kappa=kappa)
    sign_cert = s > cantor_sign_threshold(a)
    if sign_cert:
        R_lo = 0.0
        R_hi = refined_M2_upper(s, G2=G2, C1=C1, E2=E2, kappa=kappa,
                                sign_cert=True)
    else:
        R_lo, R_hi = -M2, M2
    return BoundConstants(
        s=s, kappa=kappa, mu=1, C1=C1, C2=C2, C3=math.inf, E2=E2, E3=E3,
        K2=K2, K3=math.inf, G2=G2, M1=M1, M2=M2, M3=math.inf,
        R_lo=R_lo, R_hi=R_hi, sign_cert=sign_cert,
    )


# ---------------------------------------------------------------------------
# brute-force suprema for arbitrary families


def _word_chain(fam: MapFamily, word: tuple[int, ...], xs: np.ndarray) -> dict:
    """Derivatives of theta_w and log-derivative ratios of g_w on a grid.

    Applies the word left to right (word[0] acts first).  Returns the
    first three derivatives of the composition and the ratios
    g_w'/g_w, g_w''/g_w, g_w'''/g_w via the chain rule on log g_w.
    """
    x = np.asarray(xs, dtype=float)
    xi = x
    d1 = np.ones_like(x)
    d2 = np.zeros_like(x)
    d3 = np.zeros_like(x)
    F1 = np.zeros_like(x)
    F2 = np.zeros_like(x)
    F3 = np.zeros_like(x)
    for j in word:
        spec = fam.maps[j]
        if None in (spec.d2, spec.d3, spec.weight_r1, spec.weight_r2,
                    spec.weight_r3):
            raise MissingDerivatives(
                f"map {spec.label!r} lacks order-3 derivative data"
            )
        r1 = np.asarray(spec.weight_r1(xi), dtype=float)
        r2 = np.asarray(spec.weight_r2(xi), dtype=float)
        r3 = np.asarray(spec.weight_r3(xi), dtype=float)
        u = r2 - r1**2
        # update logarithmic sums before advancing the chain (they use
        # the derivatives of the current inner composition)
        F3 = F3 + (r3 - 3.0 * r2 * r1 + 2.0 * r1**3) * d1**3 \
            + 3.0 * u * d1 * d2 + r1 * d3
        F2 = F2 + u * d1**2 + r1 * d2
        F1 = F1 + r1 * d1
        t1 = np.asarray(spec.d1(xi), dtype=float)
        t2 = np.asarray(spec.d2(xi), dtype=float)
        t3 = np.asarray(spec.d3(xi), dtype=float)
        d3 = t3 * d1**3 + 3.0 * t2 * d1 * d2 + t1 * d3
        d2 = t2 * d1**2 + t1 * d2
        d1 = t1 * d1
        xi = np.asarray(spec.eval(xi), dtype=float)
    return {
        "d1": d1, "d2": d2, "d3": d3,
        "gw1": F1, "gw2": F2 + F1**2, "gw3": F3 + 3.0 * F1 * F2 + F1**3,
    }


def _quantities(chain: dict, s: float) -> dict:
    gw1, gw2, gw3 = chain["gw1"], chain["gw2"], chain["gw3"]
    return {
        "C1": np.abs(gw1),
        "C2": np.abs(gw2),
        "C3": np.abs(gw3),
        "E2": np.abs(chain["d2"]),
        "E3": np.abs(chain["d3"]),
        "K2": np.abs(gw2 - (1.0 - s) * gw1**2),
        "K3": np.abs((s - 1.0) * (s - 2.0) * gw1**3
                     + 3.0 * (s - 1.0) * gw1 * gw2 + gw3),
        "G2": gw2 - (1.0 - s) * gw1**2,
        "KAP": np.abs(chain["d1"]),
    }


def _refine_max(fam: MapFamily, word: tuple[int, ...], s: float, key: str,
                lo: float, hi: float, rounds: int = 5, pts: int = 257) -> float:
    best = -math.inf
    for _ in range(rounds):
        xs = np.linspace(lo, hi, pts)
        vals = _quantities(_word_chain(fam, word, xs), s)[key]
        i = int(np.argmax(vals))
        best = max(best, float(vals[i]))
        if not math.isfinite(best):
            return best
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, pts - 1)]
    return best


def general_constants(fam: MapFamily, s: float, *, grid: int = 2049,
                      safety: float = 1.01, refine: bool = True,
                      direct_k: bool = True) -> BoundConstants:
    """Brute-force constants for any family with order-3 derivative data.

    Maximizes each quantity over all words of the contraction length mu
    on a dense grid, then refines around the argmax.  The returned
    suprema are inflated by the configurable safety factor (recorded in
    the result); consistency tests against closed forms use safety=1.
    When direct_k is false, K2/K3 come from the closed-form fallbacks
    K2 = C2 + |1-s| C1^2 and K3 = |s-1||s-2| C1^3 + 3|s-1| C1 C2 + C3.
    """
    if s <= 0.0:
        raise BadParams(f"need s > 0, got {s}")
    if safety < 1.0:
        raise BadParams(f"safety factor must be >= 1, got {safety}")
    kappa, mu = contraction_data(fam)
    a, b = fam.domain
    xs = np.linspace(a, b, grid)
    keys = ["C1", "C2", "C3", "E2", "E3", "K2", "K3", "G2", "KAP"]
    sup = {k: -math.inf for k in keys}
    arg = {k: (None, 0.0, 0.0) for k in keys}
    step = (b - a) / (grid - 1)
    with np.errstate(invalid="ignore"):
        for word in itertools.product(range(fam.n_maps), repeat=mu):
            q = _quantities(_word_chain(fam, word, xs), s)
            for k in keys:
                i = int(np.argmax(q[k]))
                v = float(q[k][i])
                if v > sup[k]:
                    sup[k] = v
                    arg[k] = (word, max(a, xs[i] - step), min(b, xs[i] + step))
        if refine:
            for k in keys:
                word, lo, hi = arg[k]
                if word is not None and math.isfinite(sup[k]):
                    sup[k] = max(sup[k], _refine_max(fam, word, s, k, lo, hi))
    for k in keys:
        sup[k] *= safety
    C1, C2, C3 = sup["C1"], sup["C2"], sup["C3"]
    E2, E3 = sup["E2"], sup["E3"]
    if direct_k:
        K2, K3 = sup["K2"], sup["K3"]
    else:
        K2 = C2 + abs(1.0 - s) * C1**2
        K3 = abs(s - 1.0) * abs(s - 2.0) * C1**3 + 3.0 * abs(s - 1.0) * C1 * C2 + C3
    M1 = bound_M1(s, C1, kappa) if C1 > 0.0 else 0.0
    M2 = bound_M2(s, K2=K2, C1=C1, M1=M1, E2=E2, kappa=kappa)
    M3 = bound_M3(s, K3=K3, K2=K2, C1=C1, M1=M1, M2=M2, E2=E2, E3=E3,
                  kappa=kappa)
    return BoundConstants(
        s=s, kappa=kappa, mu=mu, C1=C1, C2=C2, C3=C3, E2=E2, E3=E3,
        K2=K2, K3=K3, G2=sup["G2"], M1=M1, M2=M2, M3=M3,
        R_lo=-M2, R_hi=M2, sign_cert=sign_certificate(fam, s),
        safety=safety, kappa_grid=sup["KAP"],
    )


# ---------------------------------------------------------------------------
# family-kind dispatch


def sign_certificate(fam: MapFamily, s: float) -> bool:
    """Whether the one-sided convexity hypotheses hold for this family.

    MobiusDigits: false (weights decrease).  PerturbedCantor: the exact
    criterion s > (2/5)(1 - 3/(7a)), always true at a = 0.  Custom: a
    heuristic dense grid check of all five sign conditions.
    """
    if s <= 0.0:
        raise BadParams(f"need s > 0, got {s}")
    if fam.kind == MOBIUS:
        return False
    if fam.kind == CANTOR:
        a = fam.cantor_a
        return True if a == 0.0 else s > cantor_sign_threshold(a)
    lo, hi = fam.domain
    xs = np.linspace(lo, hi, 1002)
    for spec in fam.maps:
        if None in (spec.d2, spec.weight_r1, spec.weight_r2):
            raise MissingDerivatives(
                f"map {spec.label!r} lacks the derivatives for the sign check"
            )
        r1 = np.asarray(spec.weight_r1(xs), dtype=float)
        r2 = np.asarray(spec.weight_r2(xs), dtype=float)
        ok = (np.all(np.asarray(spec.d1(xs)) >= 0.0)
              and np.all(np.asarray(spec.d2(xs)) >= 0.0)
              and np.all(r1 >= 0.0)
              and np.all(r2 >= 0.0)
              and np.all(r2 - (1.0 - s) * r1**2 >= 0.0))
        if not ok:
            return False
    return True


def second_ratio_bounds(fam: MapFamily, s: float,
                        constants: BoundConstants | None = None
                        ) -> tuple[float, float]:
    """Enclosure (R_lo, R_hi) of v''/v for the family's eigenfunction.

    MobiusDigits uses the sharp order-2 digit bounds with right endpoint
    1/gamma; PerturbedCantor uses (0, refined) under its sign certificate
    and the symmetric generic pair (-M2, M2) otherwise; Custom always
    uses the symmetric generic pair.
    """
    if fam.kind == MOBIUS:
        gamma = float(fam.digits[0])
        Gamma = float(fam.digits[-1])
        pair = mobius_ratio_bounds(gamma, Gamma, 1.0 / gamma, s, 2)
        return pair.lo, pair.hi
    if fam.kind == CANTOR:
        if constants is None or constants.s != s:
            constants = cantor_constants(fam.cantor_a, s)
        return constants.R_lo, constants.R_hi
    if constants is None or constants.s != s:
        constants = general_constants(fam, s)
    return -constants.M2, constants.M2


def osc_rate(fam: MapFamily, s: float,
             constants: BoundConstants | None = None) -> float:
    """Bound on |v'|/v: 2s/gamma for digit families, M1 otherwise."""
    if fam.kind == MOBIUS:
        return 2.0 * s / float(fam.digits[0])
    if fam.kind == CANTOR:
        if constants is None or constants.s != s:
            constants = cantor_constants(fam.cantor_a, s)
        return constants.M1
    if constants is None or constants.s != s:
        constants = general_constants(fam, s)
    return constants.M1
