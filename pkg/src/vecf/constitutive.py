"""Transport coefficients, the viscous stress tensor, and initial-data completion.

The fluid is pure radiation (p = eps/3) with shear viscosity eta(eps) and the
two relaxation-type coefficients tied to it by constant ratios:
chi = a1 * eta and lam = a2 * eta.  The stress tensor is assembled in flat
Cartesian coordinates only; that is all the symbol modules and the 1+1D
solver ever need.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import Metric4, minkowski

__all__ = [
    "TransportModel",
    "StateJet1",
    "transport",
    "stress_tensor",
    "stress_tensor_fields",
    "complete_initial_data",
]

SGN = np.array([-1.0, 1.0, 1.0, 1.0])  # diagonal of the flat metric, -+++


@dataclass(frozen=True)
class TransportModel:
    """Shear viscosity model plus the two proportionality constants.

    eta_form "constant" gives eta(eps) = eta0; "power" gives
    eta(eps) = eta0 * eps**p_exp.  Both are positive and analytic on
    eps > 0, which is all the theory requires of eta.
    """

    a1: float = 4.0
    a2: float = 4.0
    eta_form: str = "power"
    eta0: float = 1.0
    p_exp: float = 0.75

    def __post_init__(self):
        if self.eta_form not in ("constant", "power"):
            raise ValueError(f"unknown eta_form {self.eta_form!r}")
        if self.eta0 < 0.0:
            raise ValueError("eta0 must be non-negative")

    def eta(self, eps):
        if self.eta_form == "constant":
            return self.eta0 * np.ones_like(np.asarray(eps, dtype=float))
        return self.eta0 * np.asarray(eps, dtype=float) ** self.p_exp

    def eta_prime(self, eps):
        """d eta / d eps, needed by the first-order equation terms."""
        if self.eta_form == "constant":
            return np.zeros_like(np.asarray(eps, dtype=float))
        return self.eta0 * self.p_exp * np.asarray(eps, dtype=float) ** (self.p_exp - 1.0)


def transport(eps, model: TransportModel):
    """Return (eta, lam, chi) at energy density eps > 0."""
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0.0):
        raise ValueError("energy density must be positive")
    eta = model.eta(eps)
    return eta, model.a2 * eta, model.a1 * eta


@dataclass(frozen=True)
class StateJet1:
    """Pointwise first-derivative data (eps, d eps, u, d u) on a flat metric.

    du[alpha, beta] = d_alpha u^beta.  The metric is stored for interface
    symmetry but must be Minkowski; curved assembly is out of scope.
    """

    eps: float
    deps: np.ndarray      # (4,) covariant gradient d_alpha eps
    u: np.ndarray         # (4,) contravariant
    du: np.ndarray        # (4,4)
    g: Metric4 = None

    def __post_init__(self):
        if self.eps <= 0.0:
            raise ValueError("energy density must be positive")
        g = self.g if self.g is not None else minkowski()
        if not g.is_minkowski:
            raise ValueError("StateJet1 supports the flat Cartesian metric only")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "deps", np.asarray(self.deps, dtype=float).reshape(4))
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float).reshape(4))
        object.__setattr__(self, "du", np.asarray(self.du, dtype=float).reshape(4, 4))

    def normalization_residual(self) -> float:
        return float(abs(np.sum(SGN * self.u * self.u) + 1.0))


def stress_tensor_fields(u, du, eps, deps, model: TransportModel) -> np.ndarray:
    """T_{alpha beta} on batched states; trailing axes broadcast.

    u (4, ...), du (4, 4, ...) with du[a, b] = d_a u^b, eps (...),
    deps (4, ...).  Returns (4, 4, ...).  All nine constitutive terms are
    assembled symmetrically in (alpha, beta).
    """
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    eps = np.asarray(eps, dtype=float)
    deps = np.asarray(deps, dtype=float)
    if np.any(eps <= 0.0):
        raise ValueError("energy density must be positive")
    eta, lam, chi = transport(eps, model)

    g = np.diag(SGN)
    shape = eps.shape
    gd = g.reshape((4, 4) + (1,) * len(shape))
    u_dn = SGN.reshape((4,) + (1,) * len(shape)) * u
    du_dn = du * SGN.reshape((1, 4) + (1,) * len(shape))
    theta = np.einsum('aa...->...', du)
    acc_dn = SGN.reshape((4,) + (1,) * len(shape)) * np.einsum('a...,ab...->b...', u, du)
    udeps = np.einsum('a...,a...->...', u, deps)

    uu = u_dn[:, None] * u_dn[None, :]
    pi_dn = gd + uu
    pi_mix = np.eye(4).reshape((4, 4) + (1,) * len(shape)) + u[:, None] * u_dn[None, :]

    T = (4.0 / 3.0) * uu * eps + (1.0 / 3.0) * gd * eps
    shear = du_dn + np.swapaxes(du_dn, 0, 1) - (2.0 / 3.0) * gd * theta
    visc = np.einsum('ma...,vb...,mv...->ab...', pi_mix, pi_mix, shear)
    # the projected contraction is symmetric in exact arithmetic; averaging
    # with its transpose keeps it bitwise symmetric in floating point too
    T = T - eta * 0.5 * (visc + np.swapaxes(visc, 0, 1))
    T = T + lam * (u_dn[:, None] * acc_dn[None, :] + u_dn[None, :] * acc_dn[:, None])
    T = T + (chi / 3.0) * pi_dn * theta + chi * uu * theta
    pdeps = np.einsum('ma...,m...->a...', pi_mix, deps)
    T = T + (lam / (4.0 * eps)) * (u_dn[:, None] * pdeps[None, :]
                                   + u_dn[None, :] * pdeps[:, None])
    T = T + (3.0 * chi / (4.0 * eps)) * uu * udeps
    T = T + (chi / (4.0 * eps)) * pi_dn * udeps
    return T


def stress_tensor(jet: StateJet1, model: TransportModel) -> np.ndarray:
    """Pointwise T_{alpha beta} (4, 4) for a flat-space first-derivative jet."""
    return stress_tensor_fields(jet.u, jet.du, jet.eps, jet.deps, model)


def complete_initial_data(eps0, eps1, v0, v1):
    """Complete reduced flat-space data to full (u, d_t u, eps, d_t eps) at t=0.

    v0, v1 hold the spatial velocity components and their time derivatives,
    shape (3,) or (3, ...) for fields.  The time components follow from the
    normalization u.u = -1 with the flat spatial metric:

        u^0      = sqrt(1 + |v0|^2)
        d_t u^0  = (v0 . v1) / sqrt(1 + |v0|^2)

    which also forces d_t(u.u) = 0 at t = 0.
    """
    eps0 = np.asarray(eps0, dtype=float)
    eps1 = np.asarray(eps1, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    v1 = np.asarray(v1, dtype=float)
    if v0.shape[0] != 3 or v1.shape[0] != 3:
        raise ValueError("v0 and v1 must have leading dimension 3")
    if np.any(eps0 <= 0.0):
        raise ValueError("initial energy density must be positive")
    v0sq = np.einsum('i...,i...->...', v0, v0)
    u0 = np.sqrt(1.0 + v0sq)
    du0 = np.einsum('i...,i...->...', v0, v1) / u0
    u = np.concatenate([u0[None], v0], axis=0)
    dtu = np.concatenate([du0[None], v1], axis=0)
    return u, dtu, eps0, eps1
