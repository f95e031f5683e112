"""Cone slopes, light-cone containment verdicts, and parameter-space scans.

Containment is checked in the cotangent formulation: the characteristic
root surfaces xi0 = s(u, theta) |xibar| of each wave family must satisfy
|s| <= 1 for the family cone to contain the light cone's interior.  theta
is the angle between the spatial velocity and the spatial covector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .characteristics import quartic_coefficients
from .constitutive import TransportModel
from .symbol import StatePoint
from .tensor import minkowski

__all__ = [
    "BOUNDARY_TOL",
    "FamilyCone",
    "ConeReport",
    "shear_slopes",
    "sound_slopes",
    "shear_axis_slopes",
    "flow_slope",
    "critical_angle_check",
    "cone_containment",
    "causality_scan",
    "hyperbolicity_region_map",
    "max_characteristic_speed",
]

BOUNDARY_TOL = 1e-12


def shear_slopes(u2: float, theta, a2: float):
    """Slopes s+-(u, theta) of the shear-family cone halves.

    u2 is the squared spatial velocity |w|^2 of a normalized u; theta the
    angle between w and the spatial covector.  Valid for the Minkowski
    metric.
    """
    if u2 < 0.0:
        raise ValueError("u2 must be non-negative")
    theta = np.asarray(theta, dtype=float)
    denom = 1.0 + (a2 - 1.0) * (1.0 + u2)
    cos = np.cos(theta)
    radicand = a2 + (a2 - 1.0) * u2 - (a2 - 1.0) * u2 * cos ** 2
    if np.any(radicand < 0.0):
        raise ValueError("negative radicand in shear slope")
    drift = (a2 - 1.0) * np.sqrt(u2) * cos * np.sqrt(1.0 + u2)
    root = np.sqrt(radicand)
    return -(drift + root) / denom, -(drift - root) / denom


def sound_slopes(u2: float, theta, a2: float):
    """Slopes of the sound-family cone halves, same variables as shear_slopes."""
    if u2 < 0.0:
        raise ValueError("u2 must be non-negative")
    theta = np.asarray(theta, dtype=float)
    denom = -2.0 * (2.0 + a2) - (a2 - 4.0) * (1.0 + u2)
    q = a2 ** 2 - 2.0 * a2 - 8.0
    cos = np.cos(theta)
    radicand = 3.0 * a2 * (2.0 + a2) + q * u2 - q * u2 * cos ** 2
    if np.any(radicand < 0.0):
        raise ValueError("negative radicand in sound slope")
    drift = (a2 - 4.0) * np.sqrt(u2) * cos * np.sqrt(1.0 + u2)
    root = np.sqrt(2.0) * np.sqrt(radicand)
    return (drift + root) / denom, (drift - root) / denom


def shear_axis_slopes(u2: float, a2: float):
    """Shear slopes at theta = 0 (equivalently 2 pi) in closed form."""
    denom = 1.0 + (a2 - 1.0) * (1.0 + u2)
    drift = (a2 - 1.0) * np.sqrt(u2 * (1.0 + u2))
    return (-(np.sqrt(a2) + drift) / denom, -(-np.sqrt(a2) + drift) / denom)


def flow_slope(u2: float, theta) -> float:
    """Slope of the flow-line cone u.xi = 0: always strictly inside the light cone."""
    return float(-np.sqrt(u2) * np.cos(theta) / np.sqrt(1.0 + u2))


@dataclass(frozen=True)
class CriticalAngleReport:
    family: str
    u2: float
    a2: float
    theta_max: float
    slope_at_max: float
    flat_profile: bool
    on_axis: bool


def _max_abs_slope(slope_fn, u2, a2, n_theta=720):
    thetas = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    sp, sm = slope_fn(u2, thetas, a2)
    vals = np.maximum(np.abs(sp), np.abs(sm))
    j = int(np.argmax(vals))
    return thetas, vals, j


def critical_angle_check(u2: float, a2: float, family: str = "shear",
                         n_theta: int = 720, refine_tol: float = 1e-10) -> CriticalAngleReport:
    """Locate the theta maximizing |s+-| by dense grid plus golden-section.

    For u2 = 0 the slopes are theta-independent and a flat profile is
    reported.  Otherwise the maximizer must land within 1e-6 of
    {0, pi, 2 pi}: the angular extrema sit on the axis sin(theta) = 0.
    """
    slope_fn = {"shear": shear_slopes, "sound": sound_slopes}[family]

    def score(th):
        sp, sm = slope_fn(u2, th, a2)
        return max(abs(float(sp)), abs(float(sm)))

    if u2 == 0.0:
        return CriticalAngleReport(family, u2, a2, theta_max=0.0,
                                   slope_at_max=score(0.0),
                                   flat_profile=True, on_axis=True)
    thetas, vals, j = _max_abs_slope(slope_fn, u2, a2, n_theta)
    lo = thetas[j] - 2.0 * np.pi / n_theta
    hi = thetas[j] + 2.0 * np.pi / n_theta
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = score(c), score(d)
    while b - a > refine_tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = score(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = score(d)
    theta_star = 0.5 * (a + b)
    dist = min(abs(theta_star), abs(theta_star - np.pi), abs(theta_star - 2.0 * np.pi))
    return CriticalAngleReport(family, u2, a2, theta_max=float(theta_star),
                               slope_at_max=score(theta_star),
                               flat_profile=False, on_axis=bool(dist < 1e-6))


@dataclass(frozen=True)
class FamilyCone:
    family: str
    max_abs_slope: float
    verdict: str           # "strict" | "boundary" | "violated"
    witness_theta: float


@dataclass(frozen=True)
class ConeReport:
    a2: float
    u2: float
    families: dict = field(default_factory=dict)
    verdict: str = "causal (strict)"
    v_max_fluid: float = 0.0
    v_max_coupled: float = 1.0


def _verdict(smax: float) -> str:
    if smax < 1.0 - BOUNDARY_TOL:
        return "strict"
    if abs(smax - 1.0) <= BOUNDARY_TOL:
        return "boundary"
    return "violated"


def cone_containment(s: StatePoint, n_theta: int = 720) -> ConeReport:
    """Family-by-family light-cone containment for one state.

    u is re-normalized through its spatial part (u^0 recomputed as
    sqrt(1 + w^2)); the slope formulas assume normalization.  The flow
    family and the gravitational light cone are always reported, the
    latter as a boundary touch by convention.
    """
    w = np.asarray(s.u[1:], dtype=float)
    u2 = float(w @ w)
    a2 = s.transport.a2
    thetas = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)

    fams = {}
    smax_flow = float(np.sqrt(u2 / (1.0 + u2)))
    fams["flow"] = FamilyCone("flow", smax_flow, _verdict(smax_flow),
                              0.0 if u2 == 0 else np.pi)
    for name, fn in (("shear", shear_slopes), ("sound", sound_slopes)):
        try:
            sp, sm = fn(u2, thetas, a2)
        except ValueError:
            fams[name] = FamilyCone(name, np.inf, "violated", np.nan)
            continue
        vals = np.maximum(np.abs(sp), np.abs(sm))
        j = int(np.argmax(vals))
        fams[name] = FamilyCone(name, float(vals[j]), _verdict(float(vals[j])),
                                float(thetas[j]))
    fams["light"] = FamilyCone("light", 1.0, "boundary", 0.0)

    fluid = [fams[k] for k in ("flow", "shear", "sound")]
    if any(f.verdict == "violated" for f in fluid):
        overall = "violated"
    elif any(f.verdict == "boundary" for f in fluid):
        overall = "causal (boundary)"
    else:
        overall = "causal (strict)"
    v_fluid = max(f.max_abs_slope for f in fluid)
    return ConeReport(a2=a2, u2=u2, families=fams, verdict=overall,
                      v_max_fluid=v_fluid, v_max_coupled=max(v_fluid, 1.0))


def max_characteristic_speed(s: StatePoint, include_gravity: bool = False) -> float:
    """Largest |slope| over the wave families; feeds the solver CFL bound."""
    report = cone_containment(s)
    if report.verdict == "violated":
        raise ValueError(f"state is not causal: {report.families}")
    return report.v_max_coupled if include_gravity else report.v_max_fluid


@dataclass(frozen=True)
class ScanRow:
    a1: float
    a2: float
    u2: float
    theta_max_p2: float
    smax_p2: float
    smax_p3: float
    verdict: str


def causality_scan(a2_list, u_max: float, n_u: int = 33, n_theta: int = 720,
                   a1: float = 4.0) -> list:
    """Deterministic grid scan over |w| in [0, u_max] for each a2.

    One row per (a2, |w|) cell with the theta-maximized shear and sound
    slopes; column names match the CSV contract of the command-line scan.
    """
    rows = []
    speeds = np.linspace(0.0, u_max, n_u)
    g = minkowski()
    for a2 in a2_list:
        model = TransportModel(a1=a1, a2=a2)
        for w in speeds:
            u = np.array([np.sqrt(1.0 + w * w), w, 0.0, 0.0])
            s = StatePoint(eps=1.0, u=u, g=g, transport=model)
            rep = cone_containment(s, n_theta=n_theta)
            rows.append(ScanRow(
                a1=a1, a2=float(a2), u2=float(w * w),
                theta_max_p2=rep.families["shear"].witness_theta,
                smax_p2=rep.families["shear"].max_abs_slope,
                smax_p3=rep.families["sound"].max_abs_slope,
                verdict=rep.verdict,
            ))
    return rows


@dataclass(frozen=True)
class RegionCell:
    a1: float
    a2: float
    label: str        # causal-strict | causal-boundary | hyperbolic-acausal | non-hyperbolic
    max_abs_slope: float


def _quadratic_factor_slopes(r: float, u2_samples, n_theta: int):
    """Root slopes of (u.xi)^2 - r (xi.xi) over sampled boosts and angles.

    Returns (hyperbolic, max_abs_slope): the factor is hyperbolic iff every
    sampled direction yields two real roots separated beyond the
    distinctness gap.
    """
    thetas = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
    cos = np.cos(thetas)
    smax = 0.0
    for u2 in u2_samples:
        u0sq = 1.0 + u2
        A = u0sq + r
        Bq = 2.0 * np.sqrt(u0sq * u2) * cos
        Cq = u2 * cos ** 2 - r
        disc = Bq ** 2 - 4.0 * A * Cq
        if abs(A) < 1e-14:
            return False, np.inf
        if np.any(disc < 0.0):
            return False, np.inf
        root = np.sqrt(disc)
        s1 = (-Bq + root) / (2.0 * A)
        s2 = (-Bq - root) / (2.0 * A)
        if np.any(np.abs(s1 - s2) < 1e-8):
            return False, np.inf
        smax = max(smax, float(np.abs(s1).max()), float(np.abs(s2).max()))
    return True, smax


def hyperbolicity_region_map(a1_grid, a2_grid, u_samples=None, n_theta: int = 64,
                             seed: int = 0) -> list:
    """Classify the sound-sector quartic over an (a1, a2) grid.

    Per cell: extract the quartic coefficients (A, B, C) in
    X = (u.xi)^2, Y = xi.xi; demand a non-negative discriminant
    (B^2 - 4AC >= 0, real quadratic factors), hyperbolicity of each factor
    over sampled boosts and directions, and slopes <= 1.  The degenerate
    leading coefficients (A ~ 0 or C ~ 0) reduce to light-cone or
    flow-cone factors and are classified accordingly.
    """
    if u_samples is None:
        u_samples = [0.0, 0.25, 1.0, 4.0]
    g = minkowski()
    rest = np.array([1.0, 0.0, 0.0, 0.0])
    cells = []
    for a1 in a1_grid:
        for a2 in a2_grid:
            co = quartic_coefficients(float(a1), float(a2), rest, g, seed=seed)
            A, B, C = co.A, co.B, co.C
            scale = max(1.0, abs(A), abs(B), abs(C))
            factors = []       # list of r values: factor X - r Y
            light_cone_factors = 0
            degenerate = False
            if abs(A) > 1e-9 * scale:
                disc = B * B - 4.0 * A * C
                if disc < 0.0:
                    cells.append(RegionCell(float(a1), float(a2), "non-hyperbolic", np.inf))
                    continue
                rd = np.sqrt(disc)
                factors = [(-B + rd) / (2.0 * A), (-B - rd) / (2.0 * A)]
            elif abs(B) > 1e-9 * scale:
                # A ~ 0: quartic = Y (B X + C Y); one light-cone factor
                light_cone_factors = 1
                factors = [-C / B]
            elif abs(C) > 1e-9 * scale:
                light_cone_factors = 2
            else:
                degenerate = True
            if degenerate:
                cells.append(RegionCell(float(a1), float(a2), "non-hyperbolic", np.inf))
                continue
            hyperbolic = True
            smax = 1.0 if light_cone_factors else 0.0
            for r in factors:
                # factor (u.xi)^2 - r xi.xi; r = 0 is the flow cone, always causal
                if abs(r) < 1e-12:
                    smax = max(smax, np.sqrt(max(u_samples) / (1.0 + max(u_samples))))
                    continue
                ok, fmax = _quadratic_factor_slopes(float(r), u_samples, n_theta)
                if not ok:
                    hyperbolic = False
                    break
                smax = max(smax, fmax)
            if not hyperbolic:
                label = "non-hyperbolic"
                smax = np.inf
            elif smax > 1.0 + BOUNDARY_TOL:
                label = "hyperbolic-acausal"
            elif smax >= 1.0 - BOUNDARY_TOL:
                label = "causal-boundary"
            else:
                label = "causal-strict"
            cells.append(RegionCell(float(a1), float(a2), label, float(smax)))
    return cells
