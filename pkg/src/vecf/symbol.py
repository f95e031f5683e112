"""The 5x5 fluid principal symbol, its determinant, and the time-coefficient matrix.

Row/column order is (u^0, u^1, u^2, u^3, eps).  Rows 0-3 carry the
second-order coefficients of the four momentum-balance equations with each
d^2_{alpha mu} replaced by xi_alpha xi_mu; row 4 is the normalization
constraint row u_nu (u.xi)^2.  Every entry is homogeneous of degree 2 in xi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constitutive import TransportModel, transport
from .tensor import Covec4, Metric4, minkowski

__all__ = [
    "StatePoint",
    "fluid_symbol",
    "fluid_char_det",
    "coupled_char_det",
    "time_matrix",
    "det_time_matrix_formula",
    "det_by_elimination",
    "symbol_components",
]


@dataclass(frozen=True)
class StatePoint:
    """Frozen-coefficient state for symbol and characteristic evaluations."""

    eps: float
    u: np.ndarray
    g: Metric4
    transport: TransportModel

    def __post_init__(self):
        if self.eps <= 0.0:
            raise ValueError("energy density must be positive")
        u = np.asarray(self.u, dtype=float).reshape(4)
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @classmethod
    def rest(cls, eps: float = 1.0, a2: float = 4.0, a1: float = 4.0,
             eta0: float = 1.0, eta_form: str = "constant",
             g: Metric4 | None = None) -> "StatePoint":
        model = TransportModel(a1=a1, a2=a2, eta_form=eta_form, eta0=eta0)
        return cls(eps=eps, u=np.array([1.0, 0.0, 0.0, 0.0]),
                   g=g if g is not None else minkowski(), transport=model)

    def boosted(self, spatial_u) -> "StatePoint":
        """Same parameters with u = (sqrt(1+|w|^2), w); normalized for flat g."""
        w = np.asarray(spatial_u, dtype=float).reshape(3)
        u = np.array([np.sqrt(1.0 + w @ w), *w])
        return StatePoint(eps=self.eps, u=u, g=self.g, transport=self.transport)

    def coefficients(self):
        return transport(self.eps, self.transport)

    def normalization_residual(self) -> float:
        return float(abs(self.u @ self.g.components @ self.u + 1.0))


def _as_covector(xi) -> np.ndarray:
    if isinstance(xi, Covec4):
        return xi.components
    return np.asarray(xi, dtype=float).reshape(4)


def symbol_components(u, eps, eta, lam, chi, g: np.ndarray, ginv: np.ndarray,
                      xi: np.ndarray) -> np.ndarray:
    """Assemble the symbol for batched states; plain-array core.

    u (4, ...), eps/eta/lam/chi (...), g and ginv fixed (4, 4), xi (4,).
    Returns (..., 5, 5).  For row b <= 3 and column n <= 3 the entry is

        delta_bn * [-eta xi.xi + (lam - eta)(u.xi)^2]
        + [(lam + chi) u^b (u.xi) + (chi - eta)/3 (xi^b + u^b (u.xi))] xi_n

    which reproduces the divergence-equation coefficients of d^2 u^n; the
    first bracket collects the wave-operator part, the second the
    gradient-of-divergence part (no-sum diagonal convention included).
    """
    u = np.asarray(u, dtype=float)
    eps = np.asarray(eps, dtype=float)
    shape = eps.shape
    xiup = ginv @ xi
    uxi = np.einsum('a,a...->...', xi, u)
    xixi = float(xi @ xiup)
    u_dn = np.einsum('ab,b...->a...', g, u)

    Q = -eta * xixi + (lam - eta) * uxi ** 2
    m = np.zeros(shape + (5, 5))
    for b in range(4):
        row_c = (lam + chi) * u[b] * uxi + (chi - eta) / 3.0 * (xiup[b] + u[b] * uxi)
        for n in range(4):
            m[..., b, n] = row_c * xi[n]
        m[..., b, b] += Q
        m[..., b, 4] = (u[b] * (lam * xixi + (lam + 3.0 * chi) * uxi ** 2)
                        + (lam + chi) * (uxi * xiup[b] + u[b] * uxi ** 2)) / (4.0 * eps)
    uxi2 = uxi ** 2
    for n in range(4):
        m[..., 4, n] = u_dn[n] * uxi2
    return m


def fluid_symbol(s: StatePoint, xi) -> np.ndarray:
    """5x5 principal symbol m(U, xi) at a state point."""
    xi = _as_covector(xi)
    eta, lam, chi = s.coefficients()
    return symbol_components(s.u, np.asarray(s.eps), float(eta), float(lam),
                             float(chi), s.g.components, s.g.inverse, xi)


def det_by_elimination(m: np.ndarray) -> float:
    """Determinant by partial-pivoted Gaussian elimination.

    Pivot choice is the largest magnitude with the lowest index on ties,
    which makes the result deterministic for identical inputs.
    """
    a = np.array(m, dtype=float)
    n = a.shape[0]
    det = 1.0
    for col in range(n):
        piv = col + int(np.argmax(np.abs(a[col:, col])))
        if a[piv, col] == 0.0:
            return 0.0
        if piv != col:
            a[[col, piv]] = a[[piv, col]]
            det = -det
        det *= a[col, col]
        for row in range(col + 1, n):
            factor = a[row, col] / a[col, col]
            a[row, col:] -= factor * a[col, col:]
    return float(det)


def fluid_char_det(s: StatePoint, xi) -> float:
    """det m(U, xi), the brute-force side of the factorization identity."""
    return det_by_elimination(fluid_symbol(s, xi))


def coupled_char_det(s: StatePoint, xi) -> float:
    """Determinant of the full 15x15 gravity-coupled symbol.

    The coupled matrix is block triangular: the metric block is
    (xi.xi) times the 10x10 identity and the coupling block never enters
    the determinant, so it is det m(U, xi) * (xi.xi)^10 without
    materializing the big matrix.
    """
    xi = _as_covector(xi)
    xixi = float(xi @ s.g.inverse @ xi)
    return fluid_char_det(s, xi) * xixi ** 10


def time_matrix(s: StatePoint) -> np.ndarray:
    """Coefficient matrix of the second time derivatives: the symbol at e0."""
    return fluid_symbol(s, np.array([1.0, 0.0, 0.0, 0.0]))


def det_time_matrix_formula(s: StatePoint) -> float:
    """Closed-form determinant of the time matrix.

        (eta^4 / eps) (1 + w^2)^2 (3 a2 + (a2 - 4) w^2) (a2 + (a2 - 1) w^2)^2

    with w^2 = (u^1)^2 + (u^2)^2 + (u^3)^2.  Valid on the formula's domain:
    Minkowski metric, normalized u, and a1 = 4.  Positive throughout
    a2 >= 4, eps > 0, so the time matrix is invertible in the whole
    admissible regime.
    """
    if not s.g.is_minkowski:
        raise ValueError("closed form requires the Minkowski metric")
    if s.normalization_residual() > 1e-10:
        raise ValueError("closed form requires normalized u")
    if abs(s.transport.a1 - 4.0) > 1e-12:
        raise ValueError("closed form requires a1 = 4")
    eta, _, _ = s.coefficients()
    a2 = s.transport.a2
    w2 = float(s.u[1] ** 2 + s.u[2] ** 2 + s.u[3] ** 2)
    return float(eta ** 4 / s.eps * (1.0 + w2) ** 2
                 * (3.0 * a2 + (a2 - 4.0) * w2)
                 * (a2 + (a2 - 1.0) * w2) ** 2)
