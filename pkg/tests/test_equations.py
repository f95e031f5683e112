import numpy as np
import pytest

from vecf.constitutive import SGN, TransportModel
from vecf.equations import (MUTATION_KEYS, FieldJet1, SinusoidalField,
                            assemble_lower_order, divergence_residual,
                            equation_rows, principal_blocks,
                            principal_pair_coefficients)
from vecf.symbol import StatePoint, fluid_symbol
from vecf.tensor import minkowski

MODEL = TransportModel(a1=4.0, a2=6.0)


def test_constant_state_has_zero_lower_order():
    n = 8
    jet = FieldJet1(u=np.tile(np.array([1.0, 0, 0, 0])[:, None], n),
                    du=np.zeros((4, 4, n)), eps=np.ones(n),
                    deps=np.zeros((4, n)))
    assert np.abs(assemble_lower_order(jet, MODEL)).max() == 0.0


def test_ideal_limit_reduces_to_ideal_divergence():
    # eta0 = 0 leaves the ideal-part divergence plus the constraint term
    rng = np.random.default_rng(3)
    n = 16
    jet = FieldJet1(u=rng.uniform(-1, 1, (4, n)) + np.array([2.0, 0, 0, 0])[:, None],
                    du=rng.uniform(-1, 1, (4, 4, n)), eps=rng.uniform(0.5, 2, n),
                    deps=rng.uniform(-1, 1, (4, n)))
    ideal_model = TransportModel(eta_form="constant", eta0=0.0)
    rows = assemble_lower_order(jet, ideal_model)
    u_dn = SGN[:, None] * jet.u
    theta = np.einsum('aan->n', jet.du)
    acc_dn = SGN[:, None] * np.einsum('an,abn->bn', jet.u, jet.du)
    udeps = np.einsum('an,an->n', jet.u, jet.deps)
    ideal_low = (4.0 / 3.0) * (theta * u_dn * jet.eps + acc_dn * jet.eps
                               + u_dn * udeps) + jet.deps / 3.0
    assert np.allclose(rows[:4], SGN[:, None] * ideal_low, atol=1e-14)


def test_unknown_mutation_key():
    jet = FieldJet1(u=np.tile(np.array([1.0, 0, 0, 0])[:, None], 4),
                    du=np.zeros((4, 4, 4)), eps=np.ones(4), deps=np.zeros((4, 4)))
    with pytest.raises(KeyError):
        assemble_lower_order(jet, MODEL, mutation=("bogus", 1.01))


def test_principal_blocks_match_pointwise_symbol():
    rng = np.random.default_rng(11)
    n = 8
    u = np.concatenate([rng.uniform(0.9, 1.8, (1, n)), rng.uniform(-1, 1, (3, n))])
    eps = rng.uniform(0.5, 2.0, n)
    a, m01, m11 = principal_blocks(u, eps, MODEL)
    g = minkowski()
    for j in range(n):
        s = StatePoint(eps=float(eps[j]), u=u[:, j], g=g, transport=MODEL)
        e0 = np.array([1.0, 0, 0, 0])
        e1 = np.array([0.0, 1, 0, 0])
        assert np.allclose(a[j], fluid_symbol(s, e0), atol=1e-14)
        assert np.allclose(m11[j], fluid_symbol(s, e1), atol=1e-14)
        assert np.allclose(m01[j], fluid_symbol(s, e0 + e1)
                           - fluid_symbol(s, e0) - fluid_symbol(s, e1), atol=1e-13)


def test_pair_coefficients_reassemble_symbol():
    # sum C[(a,m)] xi_a xi_m over unordered pairs reproduces the symbol
    rng = np.random.default_rng(13)
    n = 4
    u = np.concatenate([rng.uniform(0.9, 1.8, (1, n)), rng.uniform(-1, 1, (3, n))])
    eps = rng.uniform(0.5, 2.0, n)
    coeffs = principal_pair_coefficients(u, eps, MODEL)
    xi = rng.uniform(-2, 2, 4)
    total = np.zeros((n, 5, 5))
    for (a, m), blk in coeffs.items():
        total += blk * xi[a] * xi[m]
    g = minkowski()
    for j in range(n):
        s = StatePoint(eps=float(eps[j]), u=u[:, j], g=g, transport=MODEL)
        assert np.allclose(total[j], fluid_symbol(s, xi), rtol=1e-12, atol=1e-12)


def test_divergence_oracle_converges_fourth_order():
    fields = SinusoidalField(length=2 * np.pi)
    reports = [divergence_residual(fields, n, MODEL) for n in (64, 128, 256)]
    orders = [np.log2(a.max_discrepancy / b.max_discrepancy)
              for a, b in zip(reports, reports[1:])]
    assert all(3.7 <= o <= 4.3 for o in orders)


def test_divergence_oracle_constraint_row_vanishes():
    # normalized manufactured fields: the constraint row is analytically zero
    fields = SinusoidalField(length=2 * np.pi)
    rep = divergence_residual(fields, 128, MODEL)
    assert rep.constraint_row_max < 1e-13


@pytest.mark.parametrize("key", ["shear", "momentum_relax", "energy_gradient_mixed",
                                 "energy_gradient_iso", "ideal"])
def test_divergence_oracle_mutation_sensitivity(key):
    # the mutated discrepancy plateaus while the clean one refines away,
    # so the separation is clearest at the finer resolution
    fields = SinusoidalField(length=2 * np.pi)
    clean = divergence_residual(fields, 256, MODEL)
    broken = divergence_residual(fields, 256, MODEL, mutation=(key, 1.01))
    assert broken.max_discrepancy > 100.0 * clean.max_discrepancy


def test_divergence_oracle_mutation_breaks_convergence():
    fields = SinusoidalField(length=2 * np.pi)
    r1 = divergence_residual(fields, 128, MODEL, mutation=("expansion_iso", 1.01))
    r2 = divergence_residual(fields, 256, MODEL, mutation=("expansion_iso", 1.01))
    assert r1.max_discrepancy / r2.max_discrepancy < 2.0   # plateau, not 16


def test_all_mutation_keys_are_live():
    # every named term group changes the assembly somewhere
    rng = np.random.default_rng(7)
    n = 16
    w = rng.uniform(-1, 1, (3, n))
    u = np.concatenate([np.sqrt(1.0 + np.einsum('in,in->n', w, w))[None], w])
    du = rng.uniform(-1, 1, (4, 4, n))
    jet = FieldJet1(u=u, du=du, eps=rng.uniform(0.5, 2, n),
                    deps=rng.uniform(-1, 1, (4, n)))
    base = assemble_lower_order(jet, MODEL)
    for key in MUTATION_KEYS:
        mutated = assemble_lower_order(jet, MODEL, mutation=(key, 2.0))
        assert np.abs(mutated - base).max() > 0.0


def test_manufactured_field_normalization():
    fields = SinusoidalField(length=2.0)
    x = np.linspace(0, 2.0, 64, endpoint=False)
    u, du, _ = fields.u_jet(0.3, x)
    uu = np.einsum('a,a...,a...->...', SGN, u, u)
    assert np.abs(uu + 1.0).max() < 1e-14
    # gradients of u.u vanish analytically
    grad = 2.0 * np.einsum('a,a...,ma...->m...', SGN, u, du)
    assert np.abs(grad).max() < 1e-13


def test_equation_rows_shapes():
    fields = SinusoidalField(length=2.0)
    x = np.linspace(0, 2.0, 32, endpoint=False)
    rows = equation_rows(fields.jet2(0.1, x), MODEL)
    assert rows.shape == (5, 32)
    assert np.all(np.isfinite(rows))
