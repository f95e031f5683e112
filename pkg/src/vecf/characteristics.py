"""Characteristic factors of the fluid symbol: closed forms, roots, hyperbolicity.

The determinant of the 5x5 fluid symbol factors into four families of
hyperbolic polynomials; each family is tracked here both as the full factor
appearing in the determinant and as its underlying base polynomial (the
thing whose real-root structure defines hyperbolicity):

    family   base polynomial                          base deg  power in det
    flow     u.xi                                        1          4
    shear    (a2-1)(u.xi)^2 - xi.xi                      2          2
    sound    -6[(a2+5)a2 + (a2^2+7a2-8) u.u](u.xi)^2
             + 6(a2+2)(1 + 5 u.u) xi.xi                  2          1
    light    xi.xi                                       2         10

The flow factor enters the determinant as eta^4/(12 eps) (u.xi)^4 and the
light factor (gravitational block) as (xi.xi)^10.  u.u is kept explicit in
the sound factor; it is not replaced by -1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constitutive import TransportModel
from .symbol import StatePoint, _as_covector
from .tensor import Metric4

__all__ = [
    "FAMILIES",
    "FactorEntry",
    "FactorSet",
    "FLUID_FACTORS",
    "COUPLED_FACTORS",
    "RootPair",
    "RootScan",
    "HyperbolicityReport",
    "eval_factor",
    "eval_factor_base",
    "base_degree",
    "factor_power",
    "sound_quartic_general",
    "quartic_coefficients",
    "shear_cone_roots",
    "sound_cone_roots",
    "bisection_roots",
    "is_hyperbolic",
    "gevrey_index",
]

FAMILIES = ("flow", "shear", "sound", "light")

_BASE_DEGREE = {"flow": 1, "shear": 2, "sound": 2, "light": 2}
_POWER = {"flow": 4, "shear": 2, "sound": 1, "light": 10}

DISTINCTNESS_GAP = 1e-8  # absolute, for unit-sphere spatial directions


@dataclass(frozen=True)
class FactorEntry:
    family: str
    degree: int
    multiplicity: int


@dataclass(frozen=True)
class FactorSet:
    """Bookkeeping of hyperbolic factors; drives the Gevrey-index arithmetic."""

    entries: tuple

    @property
    def total_degree(self) -> int:
        return sum(e.degree * e.multiplicity for e in self.entries)

    @property
    def factor_count(self) -> int:
        return sum(e.multiplicity for e in self.entries)


FLUID_FACTORS = FactorSet(entries=(
    FactorEntry("flow", 1, 4),
    FactorEntry("shear", 2, 2),
    FactorEntry("sound", 2, 1),
))

COUPLED_FACTORS = FactorSet(entries=FLUID_FACTORS.entries + (
    FactorEntry("light", 2, 10),
))


def base_degree(family: str) -> int:
    if family not in _BASE_DEGREE:
        raise ValueError(f"unknown factor family {family!r}")
    return _BASE_DEGREE[family]


def factor_power(family: str) -> int:
    if family not in _POWER:
        raise ValueError(f"unknown factor family {family!r}")
    return _POWER[family]


def _contractions(s: StatePoint, xi):
    xi = _as_covector(xi)
    uxi = float(s.u @ xi)
    xixi = float(xi @ s.g.inverse @ xi)
    uu = float(s.u @ s.g.components @ s.u)
    return uxi, xixi, uu


def eval_factor_base(family: str, s: StatePoint, xi) -> float:
    """The underlying hyperbolic polynomial of a family at (state, covector)."""
    uxi, xixi, uu = _contractions(s, xi)
    a2 = s.transport.a2
    if family == "flow":
        return uxi
    if family == "shear":
        return (a2 - 1.0) * uxi ** 2 - xixi
    if family == "sound":
        return (-6.0 * ((a2 + 5.0) * a2 + (a2 ** 2 + 7.0 * a2 - 8.0) * uu) * uxi ** 2
                + 6.0 * (a2 + 2.0) * (1.0 + 5.0 * uu) * xixi)
    if family == "light":
        return xixi
    raise ValueError(f"unknown factor family {family!r}")


def eval_factor(family: str, s: StatePoint, xi) -> float:
    """The factor as it appears in the characteristic determinant."""
    base = eval_factor_base(family, s, xi)
    if family == "flow":
        eta, _, _ = s.coefficients()
        return float(eta) ** 4 / (12.0 * s.eps) * base ** 4
    if family == "shear":
        return base ** 2
    if family == "sound":
        return base
    if family == "light":
        return base ** 10
    raise ValueError(f"unknown factor family {family!r}")


def sound_quartic_general(s: StatePoint, xi, a1: float, a2: float) -> float:
    """Degree-4 sound-sector polynomial for arbitrary (a1, a2).

    Transcribed term by term from the computer-algebra expansion of the
    symbol determinant, with no algebraic simplification: the eleven term
    groups below keep their per-component u_mu u^mu / u_mu xi^mu products
    exactly as generated.  For a1 = 4 the (xi.xi)^2 group vanishes and the
    whole expression collapses to (u.xi)^2 times the sound factor.
    """
    xi = _as_covector(xi)
    u = s.u
    u_dn = s.g.components @ u
    xi_up = s.g.inverse @ xi
    uxi = float(u[0] * xi[0] + u[1] * xi[1] + u[2] * xi[2] + u[3] * xi[3])
    xixi = float(xi[0] * xi_up[0] + xi[1] * xi_up[1] + xi[2] * xi_up[2] + xi[3] * xi_up[3])

    total = 0.0
    # group 1: quartic in u.xi, coefficient summed over u_mu u^mu components
    g1 = 0.0
    for mu in range(4):
        g1 += ((-2.0 * a1 - a2 + 2.0 * a1 * a2 + a2 ** 2) * u_dn[mu] * u[mu])
    total += -6.0 * g1 * uxi ** 4
    # groups 2-5: cubic in u.xi times u_mu xi^mu, one group per component
    for mu in range(4):
        total += (-2.0 * (-a2 + 4.0 * a1 * a2 + 3.0 * a2 ** 2) * u_dn[mu]
                  * uxi ** 3 * xi_up[mu])
    # group 6: quadratic in u.xi times xi.xi, coefficient summed over components
    g6 = 0.0
    for mu in range(4):
        g6 += (3.0 * a1 + 2.0 * a2 + a1 * a2) * u_dn[mu] * u[mu]
    total += 5.0 * g6 * uxi ** 2 * xixi
    # groups 7-10: linear in u.xi times u_mu xi^mu times xi.xi
    for mu in range(4):
        total += ((3.0 * a1 + 2.0 * a2 + a1 * a2) * u_dn[mu]
                  * uxi * xi_up[mu] * xixi)
    # group 11: (xi.xi)^2, the group that vanishes identically at a1 = 4
    g11 = 0.0
    for mu in range(4):
        g11 += (4.0 * a2 - a1 * a2) * u_dn[mu] * u[mu]
    total += g11 * xixi ** 2
    return float(total)


@dataclass(frozen=True)
class QuarticCoefficients:
    A: float
    B: float
    C: float
    residual: float


def quartic_coefficients(a1: float, a2: float, u, g, seed: int = 0,
                         retries: int = 5) -> QuarticCoefficients:
    """Coefficients (A, B, C) of the quartic in X = (u.xi)^2, Y = xi.xi.

    The general sound-sector polynomial has the form A X^2 + B X Y + C Y^2.
    The coefficients are recovered numerically: evaluate at three sampled
    covectors, solve the 3x3 Vandermonde-like system, and validate on a
    held-out fourth sample (relative residual <= 1e-8 required).  Sampling
    retries on an ill-conditioned draw; u must be non-null so that X and Y
    are independent.
    """
    if isinstance(g, Metric4):
        metric = g
    else:
        metric = Metric4.from_components(np.asarray(g, dtype=float))
    gmat, ginv = metric.components, metric.inverse
    u = np.asarray(u, dtype=float).reshape(4)
    uu = float(u @ gmat @ u)
    if abs(uu) < 1e-12:
        raise ValueError("u must be non-null for coefficient extraction")
    probe = StatePoint(eps=1.0, u=u, g=metric,
                       transport=TransportModel(a1=a1, a2=a2))
    rng = np.random.default_rng(seed)
    last_err = None
    for _ in range(retries):
        xis = rng.uniform(-1.0, 1.0, size=(4, 4))
        rows = []
        vals = []
        for xi in xis:
            X = float(u @ xi) ** 2
            Y = float(xi @ ginv @ xi)
            rows.append([X ** 2, X * Y, Y ** 2])
            vals.append(sound_quartic_general(probe, xi, a1, a2))
        M3 = np.array(rows[:3])
        if np.linalg.cond(M3) > 1e10:
            last_err = "ill-conditioned sample system"
            continue
        A, B, C = np.linalg.solve(M3, np.array(vals[:3]))
        recon = A * rows[3][0] + B * rows[3][1] + C * rows[3][2]
        scale = max(1.0, abs(vals[3]), abs(A * rows[3][0]), abs(B * rows[3][1]),
                    abs(C * rows[3][2]))
        resid = abs(recon - vals[3]) / scale
        if resid <= 1e-8:
            return QuarticCoefficients(A=float(A), B=float(B), C=float(C),
                                       residual=float(resid))
        last_err = f"held-out residual {resid:.2e}"
    raise RuntimeError(f"quartic coefficient extraction failed after {retries} "
                       f"attempts: {last_err}")


@dataclass(frozen=True)
class RootPair:
    """Real roots of a quadratic-in-xi0 factor at fixed spatial direction."""

    plus: float
    minus: float
    discriminant: float

    def as_set(self):
        return (self.plus, self.minus)


def _check_closed_form_domain(xibar, u, a2):
    xibar = np.asarray(xibar, dtype=float).reshape(3)
    u = np.asarray(u, dtype=float).reshape(4)
    uu = -u[0] ** 2 + u[1] ** 2 + u[2] ** 2 + u[3] ** 2
    if abs(uu + 1.0) > 1e-10:
        raise ValueError(f"closed-form roots need normalized u; u.u = {uu}")
    if not np.any(xibar != 0.0):
        raise ValueError("spatial covector must be nonzero")
    w = u[1:]
    return xibar, w, float(w @ w), float(w @ xibar), float(xibar @ xibar)


def shear_cone_roots(xibar, u, a2: float) -> RootPair:
    """Closed-form xi0 roots of the shear factor (Minkowski, normalized u)."""
    xibar, w, w2, wxi, xb2 = _check_closed_form_domain(xibar, u, a2)
    denom = 1.0 + (a2 - 1.0) * (1.0 + w2)
    radicand = (a2 + (a2 - 1.0) * w2) * xb2 - (a2 - 1.0) * wxi ** 2
    if radicand < 0.0:
        raise ValueError(f"negative radicand {radicand:.3e}; no real closed-form roots")
    root = np.sqrt(radicand)
    drift = (a2 - 1.0) * wxi * np.sqrt(1.0 + w2)
    return RootPair(plus=float(-(drift + root) / denom),
                    minus=float(-(drift - root) / denom),
                    discriminant=float(radicand))


def sound_cone_roots(xibar, u, a2: float) -> RootPair:
    """Closed-form xi0 roots of the sound factor (Minkowski, normalized u)."""
    xibar, w, w2, wxi, xb2 = _check_closed_form_domain(xibar, u, a2)
    denom = -2.0 * (2.0 + a2) - (a2 - 4.0) * (1.0 + w2)
    q = a2 ** 2 - 2.0 * a2 - 8.0
    radicand = (3.0 * a2 * (2.0 + a2) + q * w2) * xb2 - q * wxi ** 2
    if radicand < 0.0:
        raise ValueError(f"negative radicand {radicand:.3e}; no real closed-form roots")
    root = np.sqrt(2.0) * np.sqrt(radicand)
    drift = (a2 - 4.0) * wxi * np.sqrt(1.0 + w2)
    return RootPair(plus=float((drift + root) / denom),
                    minus=float((drift - root) / denom),
                    discriminant=float(radicand))


@dataclass(frozen=True)
class RootScan:
    """Outcome of numeric root isolation in the time component."""

    roots: tuple
    expected_count: int
    factor_multiplicity: int
    min_gap: float

    @property
    def found_count(self) -> int:
        return len(self.roots)

    @property
    def complete(self) -> bool:
        return self.found_count == self.expected_count

    @property
    def degenerate(self) -> bool:
        return self.found_count > 1 and self.min_gap < DISTINCTNESS_GAP


def bisection_roots(s: StatePoint, xibar, family: str,
                    grid: int = 1024, tol: float = 1e-12) -> RootScan:
    """Roots of t -> base(family, s, (t, xibar)) by sign bracketing + bisection.

    The base polynomial is affine or quadratic in t, so its coefficients are
    recovered from three evaluations and give a Cauchy bound for the scan
    interval.  Sign changes on a uniform grid are refined by bisection to
    absolute tolerance `tol`.  A count mismatch against the base degree is
    reported through the returned scan, never dropped.
    """
    xibar = np.asarray(xibar, dtype=float).reshape(3)
    if not np.any(xibar != 0.0):
        raise ValueError("spatial covector must be nonzero")

    def p(t: float) -> float:
        return eval_factor_base(family, s, np.array([t, *xibar]))

    pm1, p0, pp1 = p(-1.0), p(0.0), p(1.0)
    c2 = 0.5 * (pp1 + pm1) - p0
    c1 = 0.5 * (pp1 - pm1)
    c0 = p0
    deg = base_degree(family)
    if deg == 2 and abs(c2) < 1e-14 * max(1.0, abs(c1), abs(c0)):
        bound = 2.0 * (1.0 + abs(c0) / max(abs(c1), 1e-300))
    elif deg == 2:
        bound = 2.0 * (1.0 + max(abs(c1), abs(c0)) / abs(c2))
    else:
        bound = 2.0 * (1.0 + abs(c0) / max(abs(c1), 1e-300))

    ts = np.linspace(-bound, bound, grid + 1)
    vals = np.array([p(t) for t in ts])
    roots = []
    for i in range(grid):
        a, b = ts[i], ts[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(float(a))
            continue
        if fa * fb < 0.0:
            lo, hi, flo = a, b, fa
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                fm = p(mid)
                if fm == 0.0:
                    lo = hi = mid
                    break
                if flo * fm < 0.0:
                    hi = mid
                else:
                    lo, flo = mid, fm
            roots.append(0.5 * (lo + hi))
    if vals[-1] == 0.0:
        roots.append(float(ts[-1]))
    roots = sorted(roots)
    merged = []
    for r in roots:
        if not merged or r - merged[-1] > tol * 10.0:
            merged.append(r)
    gaps = [merged[i + 1] - merged[i] for i in range(len(merged) - 1)]
    return RootScan(roots=tuple(merged), expected_count=deg,
                    factor_multiplicity=factor_power(family),
                    min_gap=float(min(gaps)) if gaps else np.inf)


@dataclass(frozen=True)
class HyperbolicityReport:
    is_hyperbolic: bool
    witness: np.ndarray | None
    min_gap: float
    samples: int
    light_cone_tangent: bool


def is_hyperbolic(s: StatePoint, family: str, samples: int = 64,
                  seed: int = 0) -> HyperbolicityReport:
    """Sample unit spatial directions and demand full real distinct roots.

    True iff every sampled direction yields base_degree(family) real roots
    pairwise separated by at least DISTINCTNESS_GAP.  The first failing
    direction is returned as a witness.  Directions whose roots sit on the
    light cone (|xi0| = |xibar|) are flagged; tangency alone is not a
    failure as long as the roots stay distinct from each other.
    """
    rng = np.random.default_rng(seed)
    min_gap = np.inf
    tangent = samples > 0
    deg = base_degree(family)
    for _ in range(samples):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        scan = bisection_roots(s, v, family)
        if not scan.complete:
            return HyperbolicityReport(False, v, float(min_gap), samples, False)
        if deg > 1:
            if scan.min_gap < DISTINCTNESS_GAP:
                return HyperbolicityReport(False, v, float(scan.min_gap), samples, False)
            min_gap = min(min_gap, scan.min_gap)
        if not all(abs(abs(r) - 1.0) < 1e-6 for r in scan.roots):
            tangent = False
    return HyperbolicityReport(True, None, float(min_gap), samples, tangent)


def gevrey_index(f: FactorSet) -> Fraction:
    """Q/(Q-1) as an exact rational, Q = number of hyperbolic factors."""
    q = f.factor_count
    if q < 2:
        raise ValueError(f"Gevrey index needs at least 2 factors, got {q}")
    return Fraction(q, q - 1)
