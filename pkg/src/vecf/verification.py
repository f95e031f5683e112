"""Seeded verification suites: the facts the package exists to check.

Every suite draws its samples from per-index seeded generators, so results
are bit-identical regardless of chunking or worker count, and every report
carries the tolerances it used.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .characteristics import (bisection_roots, eval_factor, eval_factor_base,
                              quartic_coefficients, shear_cone_roots,
                              sound_cone_roots, sound_quartic_general)
from .constitutive import TransportModel
from .symbol import (StatePoint, det_by_elimination, det_time_matrix_formula,
                     fluid_symbol, time_matrix)
from .tensor import minkowski, random_lorentzian_near_minkowski

__all__ = [
    "FactorizationReport",
    "factorization_suite",
    "CollapseReport",
    "collapse_suite",
    "RootsReport",
    "roots_suite",
    "TimeMatrixReport",
    "time_matrix_suite",
]

DET_TOL = 1e-9
COLLAPSE_TOL = 1e-9
COEFF_ZERO_TOL = 1e-12
ROOT_TOL = 1e-9
GAP_TOL = 1e-8
TIME_MATRIX_TOL = 1e-10


def _sample_state(idx: int, seed: int, a2_range, delta: float):
    """Deterministic per-index sample; independent of chunking."""
    rng = np.random.default_rng((seed, idx))
    a2 = rng.uniform(*a2_range)
    eps = rng.uniform(0.5, 2.0)
    model = TransportModel(a1=4.0, a2=a2, eta_form="power", eta0=1.0, p_exp=0.75)
    if idx % 2 == 0:
        g = minkowski()
    else:
        g = random_lorentzian_near_minkowski(delta, int(rng.integers(0, 2 ** 31)))
    w = rng.uniform(-3.0, 3.0, 3)
    if idx % 3 == 0:
        # normalized with respect to g: solve the quadratic for u^0
        g00 = g.components[0, 0]
        g0i = g.components[0, 1:]
        gij = g.components[1:, 1:]
        b = 2.0 * float(g0i @ w)
        c = float(w @ gij @ w) + 1.0
        disc = b * b - 4.0 * g00 * c
        u0 = (-b - np.sqrt(disc)) / (2.0 * g00)
        u = np.array([u0, *w])
    else:
        u = np.array([rng.uniform(0.5, 3.0), *w])
    xi = rng.uniform(-2.0, 2.0, 4)
    return StatePoint(eps=eps, u=u, g=g, transport=model), xi


def _magnitude_scale(m: np.ndarray) -> float:
    """Error scale for a 5x5 determinant comparison.

    max(1, E^5) with E the largest entry magnitude: a five-fold product of
    entries bounds every elimination intermediate, so 1e-9 of this scale
    sits far above the achievable cancellation noise while still scaling
    like |xi|^10 times the state-dependent coefficients.
    """
    e = float(np.abs(m).max())
    return max(1.0, e ** 5)


def _factorization_chunk(args):
    seed, indices, a2_range, delta = args
    worst = 0.0
    worst_idx = -1
    for idx in indices:
        s, xi = _sample_state(idx, seed, a2_range, delta)
        m = fluid_symbol(s, xi)
        det = det_by_elimination(m)
        prod = (eval_factor("flow", s, xi) * eval_factor("shear", s, xi)
                * eval_factor("sound", s, xi))
        err = abs(det - prod) / max(_magnitude_scale(m), abs(det), abs(prod))
        if err > worst:
            worst, worst_idx = err, idx
    return worst, worst_idx


@dataclass(frozen=True)
class FactorizationReport:
    samples: int
    seed: int
    tolerance: float
    max_scaled_error: float
    worst_index: int
    runtime_seconds: float
    a2_range: tuple
    metric_delta: float

    @property
    def passed(self) -> bool:
        return self.max_scaled_error <= self.tolerance

    def to_json(self) -> dict:
        return {
            "check": "determinant-factorization",
            "parameters": {"a1": 4.0, "a2_range": list(self.a2_range),
                           "metric_delta": self.metric_delta},
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": {"scaled_error": self.tolerance},
            "max_scaled_error": self.max_scaled_error,
            "worst_index": self.worst_index,
            "runtime_seconds": self.runtime_seconds,
            "passed": self.passed,
        }


def factorization_suite(samples: int = 10000, seed: int = 7,
                        a2_range=(4.0, 12.0), delta: float = 0.05,
                        threads: int = 1) -> FactorizationReport:
    """det(symbol) == flow * shear * sound over seeded random states.

    States mix Minkowski with perturbed metrics and normalized with
    unnormalized u; errors are scaled by max(1, E^5, |det|, |product|)
    with E the largest symbol entry.
    """
    t0 = time.perf_counter()
    indices = np.arange(samples)
    if threads <= 1:
        worst, worst_idx = _factorization_chunk((seed, indices, a2_range, delta))
    else:
        chunks = np.array_split(indices, threads * 4)
        args = [(seed, c, a2_range, delta) for c in chunks if len(c)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_factorization_chunk, args))
        worst, worst_idx = max(results)
    return FactorizationReport(
        samples=samples, seed=seed, tolerance=DET_TOL,
        max_scaled_error=float(worst), worst_index=int(worst_idx),
        runtime_seconds=time.perf_counter() - t0,
        a2_range=tuple(a2_range), metric_delta=delta,
    )


@dataclass(frozen=True)
class CollapseReport:
    samples: int
    seed: int
    tolerance: float
    max_relative_error: float
    c_at_a1_4: float
    c_zero_tolerance: float
    c_off_values: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return (self.max_relative_error <= self.tolerance
                and abs(self.c_at_a1_4) <= self.c_zero_tolerance
                and all(abs(v) > 1e-6 for v in self.c_off_values.values()))

    def to_json(self) -> dict:
        return {
            "check": "general-quartic-collapse",
            "parameters": {"a1": 4.0},
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": {"relative": self.tolerance,
                           "coefficient_zero": self.c_zero_tolerance},
            "max_relative_error": self.max_relative_error,
            "c_at_a1_4": self.c_at_a1_4,
            "c_off_values": self.c_off_values,
            "passed": self.passed,
        }


def collapse_suite(samples: int = 1000, seed: int = 11) -> CollapseReport:
    """General quartic at a1=4 equals (u.xi)^2 times the sound factor.

    Also extracts the (xi.xi)^2 coefficient C: zero at a1 = 4 to 1e-12,
    nonzero at the off-regime points a1 in {1, 2, 6}.
    """
    worst = 0.0
    for idx in range(samples):
        rng = np.random.default_rng((seed, idx))
        a2 = rng.uniform(4.0, 12.0)
        model = TransportModel(a1=4.0, a2=a2)
        g = minkowski() if idx % 2 == 0 else random_lorentzian_near_minkowski(
            0.05, int(rng.integers(0, 2 ** 31)))
        u = np.array([rng.uniform(0.5, 3.0), *rng.uniform(-3.0, 3.0, 3)])
        s = StatePoint(eps=1.0, u=u, g=g, transport=model)
        xi = rng.uniform(-2.0, 2.0, 4)
        general = sound_quartic_general(s, xi, 4.0, a2)
        uxi = float(u @ xi)
        collapsed = uxi ** 2 * eval_factor_base("sound", s, xi)
        err = abs(general - collapsed) / max(1.0, abs(general), abs(collapsed))
        worst = max(worst, err)

    g = minkowski()
    u_rest = np.array([1.0, 0.0, 0.0, 0.0])
    c4 = quartic_coefficients(4.0, 6.0, u_rest, g, seed=seed).C
    c_off = {}
    for a1 in (1.0, 2.0, 6.0):
        c_off[f"a1={a1:g}"] = quartic_coefficients(a1, 6.0, u_rest, g, seed=seed).C
    return CollapseReport(samples=samples, seed=seed, tolerance=COLLAPSE_TOL,
                          max_relative_error=float(worst), c_at_a1_4=float(c4),
                          c_zero_tolerance=COEFF_ZERO_TOL, c_off_values=c_off)


@dataclass(frozen=True)
class RootsReport:
    samples: int
    seed: int
    tolerance: float
    gap_tolerance: float
    max_root_error: dict
    min_gap: dict
    failures: int

    @property
    def passed(self) -> bool:
        return (self.failures == 0
                and all(v <= self.tolerance for v in self.max_root_error.values())
                and all(v >= self.gap_tolerance for v in self.min_gap.values()))

    def to_json(self) -> dict:
        return {
            "check": "closed-form-roots",
            "parameters": {"a1": 4.0, "a2_range": [4.0, 12.0]},
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": {"absolute_root": self.tolerance, "distinctness": self.gap_tolerance},
            "max_root_error": self.max_root_error,
            "min_gap": self.min_gap,
            "failures": self.failures,
            "passed": self.passed,
        }


def roots_suite(samples: int = 1000, seed: int = 13) -> RootsReport:
    """Closed-form shear/sound roots vs the bisection oracle on unit directions.

    Unit-sphere spatial covectors, normalized boosts with |w| <= 3,
    a2 in [4, 12]: roots agree to 1e-9 absolutely, are real, and are
    separated by at least the distinctness gap.
    """
    max_err = {"shear": 0.0, "sound": 0.0}
    min_gap = {"shear": np.inf, "sound": np.inf}
    failures = 0
    g = minkowski()
    for idx in range(samples):
        rng = np.random.default_rng((seed, idx))
        a2 = rng.uniform(4.0, 12.0)
        model = TransportModel(a1=4.0, a2=a2)
        w = rng.uniform(-3.0, 3.0, 3) * rng.uniform(0.0, 1.0)
        u = np.array([np.sqrt(1.0 + w @ w), *w])
        s = StatePoint(eps=rng.uniform(0.5, 2.0), u=u, g=g, transport=model)
        xibar = rng.normal(size=3)
        xibar /= np.linalg.norm(xibar)
        for family, closed in (("shear", shear_cone_roots), ("sound", sound_cone_roots)):
            pair = closed(xibar, u, a2)
            scan = bisection_roots(s, xibar, family)
            if not scan.complete:
                failures += 1
                continue
            exact = sorted(pair.as_set())
            err = max(abs(exact[0] - scan.roots[0]), abs(exact[1] - scan.roots[1]))
            max_err[family] = max(max_err[family], err)
            min_gap[family] = min(min_gap[family], exact[1] - exact[0])
    return RootsReport(samples=samples, seed=seed, tolerance=ROOT_TOL,
                       gap_tolerance=GAP_TOL,
                       max_root_error={k: float(v) for k, v in max_err.items()},
                       min_gap={k: float(v) for k, v in min_gap.items()},
                       failures=failures)


@dataclass(frozen=True)
class TimeMatrixReport:
    samples: int
    seed: int
    tolerance: float
    max_relative_error: float
    min_closed_form: float

    @property
    def passed(self) -> bool:
        return self.max_relative_error <= self.tolerance and self.min_closed_form > 0.0

    def to_json(self) -> dict:
        return {
            "check": "time-matrix-determinant",
            "parameters": {"a1": 4.0, "a2_range": [4.0, 12.0]},
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": {"relative": self.tolerance},
            "max_relative_error": self.max_relative_error,
            "min_closed_form": self.min_closed_form,
            "passed": self.passed,
        }


def time_matrix_suite(samples: int = 1000, seed: int = 17) -> TimeMatrixReport:
    """Closed-form time-matrix determinant vs pivoted elimination.

    Domain of the closed form: Minkowski metric, normalized u, a1 = 4.
    Positivity over the sampled a2 >= 4 regime is asserted as well.
    """
    worst = 0.0
    min_cf = np.inf
    g = minkowski()
    for idx in range(samples):
        rng = np.random.default_rng((seed, idx))
        a2 = rng.uniform(4.0, 12.0)
        eta_form = "power" if idx % 2 == 0 else "constant"
        model = TransportModel(a1=4.0, a2=a2, eta_form=eta_form,
                               eta0=rng.uniform(0.5, 2.0))
        w = rng.uniform(-3.0, 3.0, 3)
        u = np.array([np.sqrt(1.0 + w @ w), *w])
        s = StatePoint(eps=rng.uniform(0.5, 2.0), u=u, g=g, transport=model)
        closed = det_time_matrix_formula(s)
        numeric = det_by_elimination(time_matrix(s))
        worst = max(worst, abs(closed - numeric) / abs(closed))
        min_cf = min(min_cf, closed)
    return TimeMatrixReport(samples=samples, seed=seed, tolerance=TIME_MATRIX_TOL,
                            max_relative_error=float(worst),
                            min_closed_form=float(min_cf))
