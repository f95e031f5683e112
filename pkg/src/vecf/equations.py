"""Flat-space equation assembly: principal coefficients, first-order terms, oracle.

The five evolution rows are the four components of the stress-tensor
divergence (indices raised) plus the normalization-constraint row.  Each row
splits into a principal part (second derivatives, coefficients read off the
fluid symbol by polarization) and a first-order remainder B assembled here
term by term from the constitutive tensor's divergence.

The divergence oracle pins all of it at once: the assembled rows must agree
with a finite-difference divergence of the stress tensor on manufactured
fields, and the discrepancy must vanish at the stencil's order.

Sign convention: one derivation step rewrites u^nu d(du_nu) through
d(u.u)/2; the first-order piece it leaves behind enters B with a minus
sign (the u_beta pi grad(eta pi pi) group below).  The oracle is the
arbiter for that sign and for every other coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constitutive import SGN, TransportModel, stress_tensor_fields
from .symbol import symbol_components

__all__ = [
    "MUTATION_KEYS",
    "FieldJet1",
    "principal_blocks",
    "principal_pair_coefficients",
    "assemble_lower_order",
    "apply_principal",
    "equation_rows",
    "SinusoidalField",
    "divergence_residual",
    "DivergenceReport",
]

_GDIAG = np.diag(SGN)

MUTATION_KEYS = (
    "shear",                  # grad(eta pi pi) . shear-rate group
    "momentum_relax",         # lam u u acceleration transport
    "expansion_iso",          # (chi/3) pi theta
    "expansion_uu",           # chi u u theta
    "energy_gradient_mixed",  # (lam/4eps)(u pi + pi u) grad eps
    "energy_gradient_uu",     # (3chi/4eps) u u u grad eps
    "energy_gradient_iso",    # (chi/4eps) pi u grad eps
    "ideal",                  # divergence of the ideal part
)

_E0 = np.array([1.0, 0.0, 0.0, 0.0])
_E1 = np.array([0.0, 1.0, 0.0, 0.0])


@dataclass
class FieldJet1:
    """First-order jet of the five fields on a batch of points.

    u (4, N), du (4, 4, N) with du[a, b] = d_a u^b, eps (N,), deps (4, N).
    """

    u: np.ndarray
    du: np.ndarray
    eps: np.ndarray
    deps: np.ndarray


def _flat_symbol(u, eps, model: TransportModel, xi):
    eta = model.eta(eps)
    return symbol_components(u, eps, eta, model.a2 * eta, model.a1 * eta,
                             _GDIAG, _GDIAG, xi)


def principal_blocks(u, eps, model: TransportModel):
    """(a, m01, m11): coefficients of dtt, dt dx, dxx for 1+1D fields.

    a is the time-coefficient matrix (the symbol at e0); the mixed block is
    the polarization remainder symbol(e0+e1) - a - symbol(e1), i.e. exactly
    the summed coefficient of xi_0 xi_1.  The three symbol evaluations share
    one set of transport coefficients; this is the stepper's hot path.
    """
    eta = model.eta(eps)
    lam, chi = model.a2 * eta, model.a1 * eta
    a = symbol_components(u, eps, eta, lam, chi, _GDIAG, _GDIAG, _E0)
    m11 = symbol_components(u, eps, eta, lam, chi, _GDIAG, _GDIAG, _E1)
    m01 = symbol_components(u, eps, eta, lam, chi, _GDIAG, _GDIAG, _E0 + _E1) - a - m11
    return a, m01, m11


def principal_pair_coefficients(u, eps, model: TransportModel) -> dict:
    """Coefficient matrices for all ten unordered derivative pairs.

    C[(a, a)] multiplies d^2_{aa}; C[(a, m)] with a < m multiplies
    d^2_{am} once (it already contains both cross terms).
    """
    basis = np.eye(4)
    diag = {a: _flat_symbol(u, eps, model, basis[a]) for a in range(4)}
    coeffs = {(a, a): diag[a] for a in range(4)}
    for a in range(4):
        for m in range(a + 1, 4):
            coeffs[(a, m)] = (_flat_symbol(u, eps, model, basis[a] + basis[m])
                              - diag[a] - diag[m])
    return coeffs


def apply_principal(coeffs: dict, d2u: np.ndarray, d2eps: np.ndarray) -> np.ndarray:
    """Contract pair coefficients with exact second derivatives.

    d2u (4, 4, 4, N) symmetric in the first two axes, d2eps (4, 4, N).
    Returns the principal content of the five rows, (5, N).
    """
    n = d2eps.shape[-1]
    out = np.zeros((5, n))
    for (a, m), blk in coeffs.items():
        v2 = np.concatenate([d2u[a, m], d2eps[a, m][None]], axis=0)
        out += np.einsum('nrc,cn->rn', blk, v2)
    return out


def assemble_lower_order(jet: FieldJet1, model: TransportModel,
                         mutation: tuple | None = None) -> np.ndarray:
    """First-order (non-principal) content of the five equation rows, (5, N).

    Rows 0-3 are the raised first-order remainder of the divergence
    equations; row 4 is the constraint row's u^a u^m d_a u_l d_m u^l.
    `mutation` = (key, factor) scales one named term group, for the
    oracle's sensitivity test only.
    """
    u, du, eps, deps = jet.u, jet.du, jet.eps, jet.deps
    if np.any(eps <= 0.0):
        raise ValueError("energy density must be positive")
    scale = dict.fromkeys(MUTATION_KEYS, 1.0)
    if mutation is not None:
        key, factor = mutation
        if key not in scale:
            raise KeyError(f"unknown mutation key {key!r}; use one of {MUTATION_KEYS}")
        scale[key] = factor

    eta = model.eta(eps)
    etap = model.eta_prime(eps)
    lam, chi = model.a2 * eta, model.a1 * eta
    deta = etap * deps
    dlam, dchi = model.a2 * deta, model.a1 * deta

    u_dn = SGN[:, None] * u
    du_dn = du * SGN[None, :, None]
    theta = np.einsum('aan->n', du)
    acc = np.einsum('an,abn->bn', u, du)
    acc_dn = SGN[:, None] * acc
    udeps = np.einsum('an,an->n', u, deps)
    pi_up = _GDIAG[:, :, None] + u[:, None, :] * u[None, :, :]
    pi_mix = np.eye(4)[:, :, None] + u[:, None, :] * u_dn[None, :, :]
    shear_rate = du_dn + du_dn.transpose(1, 0, 2) - (2.0 / 3.0) * _GDIAG[:, :, None] * theta

    # shear term: two gradient-square groups plus the product-rule group,
    # the latter with the minus sign fixed by the divergence oracle;
    # multi-factor contractions are chained pairwise to keep the work
    # linear in the batch size (a plain einsum loops over all free indices)
    dudu = np.einsum('avn,mvn->amn', du_dn, du)
    quad_a = np.einsum('amn,amn->n', pi_up, dudu)
    quad_b = np.einsum('mn,vmn->vn', acc, du_dn)
    pi_s = np.einsum('amn,mvn->avn', pi_up, shear_rate)        # pi^{am} S_{m nu}
    g_iso = (np.einsum('an,avn->vn', deta, pi_s)
             + eta * np.einsum('mn,mvn->vn', theta * u + acc, shear_rate))
    # d_a pi^v_b expands to du[a,v] u_b + u^v du_dn[a,b]; both pieces contract
    # against pi^{am} S_{mv}
    pis_du = np.einsum('avn,avn->n', pi_s, du)
    pis_u = np.einsum('avn,vn->an', pi_s, u)
    grad_group = (np.einsum('vn,vbn->bn', g_iso, pi_mix)
                  + eta * (u_dn * pis_du
                           + np.einsum('an,abn->bn', pis_u, du_dn)))
    b_shear = scale["shear"] * (eta * u_dn * quad_a
                                + eta * np.einsum('vbn,vn->bn', pi_mix, quad_b)
                                - grad_group)

    dlu = np.einsum('an,an->n', dlam, u)
    flux = dlu * u + lam * theta * u + lam * acc
    b_relax = scale["momentum_relax"] * (
        np.einsum('mn,mbn->bn', flux, du_dn)
        + u_dn * np.einsum('an,mn,man->n', dlam, u, du)
        + lam * np.einsum('abn,mn,man->bn', du_dn, u, du)
        + lam * u_dn * np.einsum('amn,man->n', du, du))

    dcu = np.einsum('an,an->n', dchi, u)
    b_exp_iso = scale["expansion_iso"] * (theta / 3.0) * (
        dchi + dcu * u_dn + chi * (theta * u_dn + acc_dn))
    b_exp_uu = scale["expansion_uu"] * theta * (
        dcu * u_dn + chi * theta * u_dn + chi * acc_dn)

    fc = lam / (4.0 * eps)
    dfc = dlam / (4.0 * eps) - lam * deps / (4.0 * eps ** 2)
    dfu = np.einsum('an,an->n', dfc, u)
    dfc_up = SGN[:, None] * dfc
    mixed = (dfu * pi_mix
             + u_dn[None, :, :] * (dfc_up + dfu * u)[:, None, :]
             + fc * (theta * pi_mix
                     + acc[:, None, :] * u_dn[None, :, :]
                     + u[:, None, :] * acc_dn[None, :, :]
                     + np.einsum('abn,amn->mbn', du_dn, pi_up)
                     + u_dn[None, :, :] * (theta * u + acc)[:, None, :]))
    b_en_mixed = scale["energy_gradient_mixed"] * np.einsum('mbn,mn->bn', mixed, deps)

    hc = 3.0 * chi / (4.0 * eps)
    dhc = 3.0 * dchi / (4.0 * eps) - 3.0 * chi * deps / (4.0 * eps ** 2)
    dhu = np.einsum('an,an->n', dhc, u)
    uu_flux = (dhu * (u_dn[None, :, :] * u[:, None, :])
               + hc * (theta * u_dn[None, :, :] * u[:, None, :]
                       + acc_dn[None, :, :] * u[:, None, :]
                       + u_dn[None, :, :] * acc[:, None, :]))
    b_en_uu = scale["energy_gradient_uu"] * np.einsum('mbn,mn->bn', uu_flux, deps)

    kc = chi / (4.0 * eps)
    dkc = dchi / (4.0 * eps) - chi * deps / (4.0 * eps ** 2)
    dku = np.einsum('an,an->n', dkc, u)
    iso_flux = ((dkc + dku * u_dn)[None, :, :] * u[:, None, :]
                + kc * ((theta * u_dn + acc_dn)[None, :, :] * u[:, None, :]
                        + du.transpose(1, 0, 2)
                        + u_dn[None, :, :] * acc[:, None, :]))
    b_en_iso = scale["energy_gradient_iso"] * np.einsum('mbn,mn->bn', iso_flux, deps)

    b_ideal = scale["ideal"] * (
        (4.0 / 3.0) * (theta * u_dn * eps + acc_dn * eps + u_dn * udeps)
        + deps / 3.0)

    b_low = (b_shear + b_relax + b_exp_iso + b_exp_uu
             + b_en_mixed + b_en_uu + b_en_iso + b_ideal)
    constraint = np.einsum('ln,ln->n', acc_dn, acc)
    return np.concatenate([SGN[:, None] * b_low, constraint[None, :]], axis=0)


def equation_rows(jet2, model: TransportModel, mutation=None) -> np.ndarray:
    """Full rows principal + B for a second-order jet (u, du, d2u, eps, deps, d2eps)."""
    u, du, d2u, eps, deps, d2eps = jet2
    coeffs = principal_pair_coefficients(u, eps, model)
    principal = apply_principal(coeffs, d2u, d2eps)
    lower = assemble_lower_order(FieldJet1(u=u, du=du, eps=eps, deps=deps),
                                 model, mutation=mutation)
    return principal + lower


class SinusoidalField:
    """Smooth periodic manufactured fields with analytic derivatives.

    eps = eps0 + eps_amp sin(k_eps x + w_eps t); the spatial velocity
    components are independent sinusoids and the time component is lifted
    pointwise to sqrt(1 + |w|^2), so u.u = -1 holds identically and all
    its derivatives vanish analytically.  That normalization is a domain
    requirement of the assembled equations, not a convenience: the
    first-order remainder was derived using d(u.u) = 0.
    """

    def __init__(self, length: float, eps0: float = 1.0, eps_amp: float = 0.1,
                 eps_waves: int = 1, eps_speed: float = -1.0,
                 u_amps=(0.3, 0.15, 0.1), u_waves=(1, 2, 1),
                 u_speeds=(0.7, -0.4, 0.9), u_phases=(0.3, 1.1, 2.0)):
        if eps_amp >= eps0:
            raise ValueError("eps must stay positive")
        self.length = length
        ke = 2.0 * np.pi / length
        self.eps0, self.eps_amp = eps0, eps_amp
        self.keps, self.weps = eps_waves * ke, eps_speed
        self.amp = np.asarray(u_amps, dtype=float)
        self.k = np.asarray(u_waves, dtype=float) * ke
        self.w = np.asarray(u_speeds, dtype=float)
        self.ph = np.asarray(u_phases, dtype=float)

    def eps_jet(self, t: float, x: np.ndarray):
        arg = self.keps * x + self.weps * t
        s, c = np.sin(arg), np.cos(arg)
        eps = self.eps0 + self.eps_amp * s
        d = np.zeros((4,) + x.shape)
        d[0] = self.eps_amp * c * self.weps
        d[1] = self.eps_amp * c * self.keps
        d2 = np.zeros((4, 4) + x.shape)
        d2[0, 0] = -self.eps_amp * s * self.weps ** 2
        d2[0, 1] = d2[1, 0] = -self.eps_amp * s * self.weps * self.keps
        d2[1, 1] = -self.eps_amp * s * self.keps ** 2
        return eps, d, d2

    def u_jet(self, t: float, x: np.ndarray):
        shp = x.shape
        ui = np.zeros((3,) + shp)
        dui = np.zeros((4, 3) + shp)
        d2ui = np.zeros((4, 4, 3) + shp)
        for i in range(3):
            arg = self.k[i] * x + self.w[i] * t + self.ph[i]
            s, c = np.sin(arg), np.cos(arg)
            ui[i] = self.amp[i] * s
            dui[0, i] = self.amp[i] * c * self.w[i]
            dui[1, i] = self.amp[i] * c * self.k[i]
            d2ui[0, 0, i] = -self.amp[i] * s * self.w[i] ** 2
            d2ui[0, 1, i] = d2ui[1, 0, i] = -self.amp[i] * s * self.w[i] * self.k[i]
            d2ui[1, 1, i] = -self.amp[i] * s * self.k[i] ** 2
        ssum = np.einsum('i...,i...->...', ui, ui)
        dssum = 2.0 * np.einsum('i...,ai...->a...', ui, dui)
        d2ssum = 2.0 * (np.einsum('ai...,mi...->am...', dui, dui)
                        + np.einsum('i...,ami...->am...', ui, d2ui))
        u0 = np.sqrt(1.0 + ssum)
        du0 = dssum / (2.0 * u0)
        d2u0 = d2ssum / (2.0 * u0) - dssum[:, None] * dssum[None, :] / (4.0 * u0 ** 3)
        u = np.concatenate([u0[None], ui], axis=0)
        du = np.concatenate([du0[:, None], dui], axis=1)
        d2u = np.concatenate([d2u0[:, :, None], d2ui], axis=2)
        return u, du, d2u

    def jet2(self, t: float, x: np.ndarray):
        u, du, d2u = self.u_jet(t, x)
        eps, deps, d2eps = self.eps_jet(t, x)
        return u, du, d2u, eps, deps, d2eps


def _dx4(f: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(f, 2, -1) - 8.0 * np.roll(f, 1, -1)
            + 8.0 * np.roll(f, -1, -1) - np.roll(f, -2, -1)) / (12.0 * h)


@dataclass(frozen=True)
class DivergenceReport:
    resolution: int
    spacing: float
    max_discrepancy: float     # assembled rows 0-3 vs finite-difference divergence
    constraint_row_max: float  # assembled row 4; identically zero for normalized fields


def divergence_residual(fields: SinusoidalField, resolution: int,
                        model: TransportModel, t0: float = 0.37,
                        mutation=None) -> DivergenceReport:
    """Max discrepancy between assembled equations and the FD stress divergence.

    The stress tensor is evaluated from the constitutive relation on a
    five-level time stencil and differentiated with 4th-order centered
    differences (periodic in x); the assembled side uses the exact analytic
    jet.  The discrepancy is pure stencil error and must shrink at 4th
    order; a corrupted coefficient (via `mutation`) breaks that.
    """
    n = int(resolution)
    h = fields.length / n
    x = np.arange(n) * h
    levels = []
    for j in range(-2, 3):
        t = t0 + j * h
        u, du, _ = fields.u_jet(t, x)
        eps, deps, _ = fields.eps_jet(t, x)
        levels.append(SGN[:, None, None] * stress_tensor_fields(u, du, eps, deps, model))
    dt_t = (levels[0] - 8.0 * levels[1] + 8.0 * levels[3] - levels[4]) / (12.0 * h)
    mid = levels[2]
    dx_t = _dx4(mid, h)
    div = dt_t[0] + dx_t[1]                       # (4, N): d_a T^a_beta, beta low

    jet2 = fields.jet2(t0, x)
    rows = equation_rows(jet2, model, mutation=mutation)
    assembled_low = SGN[:, None] * rows[:4]
    return DivergenceReport(
        resolution=n,
        spacing=h,
        max_discrepancy=float(np.abs(assembled_low - div).max()),
        constraint_row_max=float(np.abs(rows[4]).max()),
    )
