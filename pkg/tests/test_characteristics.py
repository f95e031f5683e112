from fractions import Fraction

import numpy as np
import pytest

from vecf.characteristics import (COUPLED_FACTORS, FLUID_FACTORS,
                                  bisection_roots, eval_factor,
                                  eval_factor_base, gevrey_index,
                                  is_hyperbolic, quartic_coefficients,
                                  shear_cone_roots, sound_cone_roots,
                                  sound_quartic_general)
from vecf.constitutive import TransportModel
from vecf.symbol import StatePoint, det_by_elimination, fluid_symbol
from vecf.tensor import minkowski, random_lorentzian_near_minkowski

E0 = np.array([1.0, 0.0, 0.0, 0.0])
E1 = np.array([0.0, 1.0, 0.0, 0.0])


def rest(a2=4.0):
    return StatePoint.rest(a2=a2)


def random_state(seed, a2=None, normalized=True, mink=True):
    rng = np.random.default_rng(seed)
    if a2 is None:
        a2 = rng.uniform(4.0, 12.0)
    g = minkowski() if mink else random_lorentzian_near_minkowski(0.05, seed)
    w = rng.uniform(-2.0, 2.0, 3)
    u = np.array([np.sqrt(1.0 + w @ w), *w]) if normalized \
        else np.array([rng.uniform(0.5, 2.0), *w])
    return StatePoint(eps=rng.uniform(0.5, 2.0), u=u, g=g,
                      transport=TransportModel(a1=4.0, a2=a2))


def test_flow_factor_rest():
    assert eval_factor("flow", rest(), E0) == pytest.approx(1.0 / 12.0, rel=1e-14)


def test_shear_factor_rest():
    s = rest(a2=4.0)
    assert eval_factor("shear", s, E0) == pytest.approx(16.0)
    assert eval_factor("shear", s, E1) == pytest.approx(1.0)


def test_sound_factor_rest():
    s = rest(a2=4.0)
    assert eval_factor("sound", s, E0) == pytest.approx(144.0)    # 36 a2
    assert eval_factor("sound", s, E1) == pytest.approx(-144.0)   # -24 (a2+2)


def test_light_factor():
    s = rest()
    assert eval_factor("light", s, E1) == pytest.approx(1.0)
    assert eval_factor("light", s, np.array([1.0, 1.0, 0, 0])) == 0.0


def test_unknown_family_rejected():
    with pytest.raises(ValueError):
        eval_factor("entropy", rest(), E0)


@pytest.mark.parametrize("family,degree", [("flow", 4), ("shear", 4),
                                           ("sound", 2), ("light", 20)])
def test_factor_homogeneity(family, degree):
    s = random_state(1)
    xi = np.array([0.7, -0.9, 0.4, 1.1])
    v1 = eval_factor(family, s, xi)
    v2 = eval_factor(family, s, 2.0 * xi)
    assert v2 == pytest.approx(2.0 ** degree * v1, rel=1e-12)


def test_factor_product_equals_determinant():
    for seed in range(50):
        s = random_state(seed, normalized=(seed % 3 == 0), mink=(seed % 2 == 0))
        xi = np.random.default_rng(seed + 500).uniform(-2, 2, 4)
        det = det_by_elimination(fluid_symbol(s, xi))
        prod = (eval_factor("flow", s, xi) * eval_factor("shear", s, xi)
                * eval_factor("sound", s, xi))
        scale = max(1.0, abs(det), abs(prod))
        assert abs(det - prod) <= 1e-10 * scale


def test_general_quartic_zero_covector():
    assert sound_quartic_general(random_state(2), np.zeros(4), 3.0, 5.0) == 0.0


def test_general_quartic_collapse_at_a1_4():
    for seed in range(200):
        s = random_state(seed, mink=(seed % 2 == 0))
        a2 = s.transport.a2
        xi = np.random.default_rng(seed + 900).uniform(-2, 2, 4)
        general = sound_quartic_general(s, xi, 4.0, a2)
        collapsed = float(s.u @ xi) ** 2 * eval_factor_base("sound", s, xi)
        assert abs(general - collapsed) <= 1e-9 * max(1.0, abs(general), abs(collapsed))


def test_quartic_coefficients_c_vanishes_at_a1_4():
    co = quartic_coefficients(4.0, 6.0, np.array([1.0, 0, 0, 0]), minkowski())
    assert abs(co.C) <= 1e-10


def test_quartic_coefficients_c_sign_off_regime():
    # C = a2 (4 - a1) u.u; negative for a1 < 4 with normalized u
    co = quartic_coefficients(1.0, 6.0, np.array([1.0, 0, 0, 0]), minkowski())
    assert co.C == pytest.approx(-18.0, rel=1e-8)
    co = quartic_coefficients(6.0, 6.0, np.array([1.0, 0, 0, 0]), minkowski())
    assert co.C == pytest.approx(12.0, rel=1e-8)


def test_quartic_reconstruction_matches_direct():
    rng = np.random.default_rng(8)
    for a1 in (1.0, 2.5, 4.0, 6.0):
        u = np.array([np.sqrt(1.0 + 1.25), 0.5, -1.0, 0.0])
        co = quartic_coefficients(a1, 7.0, u, minkowski(), seed=3)
        s = StatePoint(eps=1.0, u=u, g=minkowski(),
                       transport=TransportModel(a1=a1, a2=7.0))
        for _ in range(20):
            xi = rng.uniform(-1.5, 1.5, 4)
            X = float(u @ xi) ** 2
            Y = float(xi @ np.diag([-1.0, 1, 1, 1]) @ xi)
            direct = sound_quartic_general(s, xi, a1, 7.0)
            recon = co.A * X * X + co.B * X * Y + co.C * Y * Y
            assert recon == pytest.approx(direct, rel=1e-8, abs=1e-8)


def test_quartic_needs_non_null_u():
    with pytest.raises(ValueError):
        quartic_coefficients(4.0, 6.0, np.array([1.0, 1.0, 0, 0]), minkowski())


def test_shear_roots_rest():
    pair = shear_cone_roots(np.array([1.0, 0, 0]), np.array([1.0, 0, 0, 0]), 4.0)
    assert sorted(pair.as_set()) == pytest.approx([-0.5, 0.5], abs=1e-14)


def test_sound_roots_rest_a2_6():
    pair = sound_cone_roots(np.array([1.0, 0, 0]), np.array([1.0, 0, 0, 0]), 6.0)
    expect = np.sqrt(2.0 * (2.0 + 6.0) / (3.0 * 6.0))
    assert sorted(pair.as_set()) == pytest.approx([-expect, expect], abs=1e-14)
    assert expect == pytest.approx(0.94280904, abs=1e-8)


def test_sound_roots_rest_a2_4_on_light_cone():
    pair = sound_cone_roots(np.array([1.0, 0, 0]), np.array([1.0, 0, 0, 0]), 4.0)
    assert sorted(pair.as_set()) == pytest.approx([-1.0, 1.0], abs=1e-15)


def test_closed_form_roots_zero_their_factor():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        a2 = rng.uniform(4.0, 12.0)
        w = rng.uniform(-2, 2, 3)
        u = np.array([np.sqrt(1.0 + w @ w), *w])
        s = StatePoint(eps=1.0, u=u, g=minkowski(),
                       transport=TransportModel(a2=a2))
        xibar = rng.normal(size=3)
        xibar /= np.linalg.norm(xibar)
        for family, closed in (("shear", shear_cone_roots),
                               ("sound", sound_cone_roots)):
            pair = closed(xibar, u, a2)
            for root in pair.as_set():
                val = eval_factor_base(family, s, np.array([root, *xibar]))
                assert abs(val) <= 1e-9 * max(1.0, abs(
                    eval_factor_base(family, s, np.array([1.0, *xibar]))))


def test_roots_real_distinct_in_regime():
    rng = np.random.default_rng(4)
    for _ in range(200):
        a2 = rng.uniform(4.0, 12.0)
        w = rng.uniform(-3, 3, 3)
        u = np.array([np.sqrt(1.0 + w @ w), *w])
        xibar = rng.normal(size=3)
        xibar /= np.linalg.norm(xibar)
        for closed in (shear_cone_roots, sound_cone_roots):
            pair = closed(xibar, u, a2)
            assert pair.discriminant >= 0.0          # Cauchy-Schwarz guard
            assert abs(pair.plus - pair.minus) >= 1e-8


def test_closed_form_domain_rejections():
    with pytest.raises(ValueError):
        shear_cone_roots(np.zeros(3), np.array([1.0, 0, 0, 0]), 4.0)
    with pytest.raises(ValueError):
        shear_cone_roots(np.array([1.0, 0, 0]), np.array([2.0, 0, 0, 0]), 4.0)


def test_bisection_matches_closed_forms():
    rng = np.random.default_rng(6)
    for _ in range(60):
        a2 = rng.uniform(4.0, 12.0)
        w = rng.uniform(-2, 2, 3)
        u = np.array([np.sqrt(1.0 + w @ w), *w])
        s = StatePoint(eps=1.0, u=u, g=minkowski(),
                       transport=TransportModel(a2=a2))
        xibar = rng.normal(size=3)
        xibar /= np.linalg.norm(xibar)
        for family, closed in (("shear", shear_cone_roots),
                               ("sound", sound_cone_roots)):
            scan = bisection_roots(s, xibar, family)
            assert scan.complete
            exact = sorted(closed(xibar, u, a2).as_set())
            assert np.abs(np.array(scan.roots) - exact).max() < 1e-9


def test_bisection_light_cone_roots():
    s = rest()
    scan = bisection_roots(s, np.array([1.0, 0.0, 0.0]), "light")
    assert scan.complete
    assert np.abs(np.array(scan.roots) - [-1.0, 1.0]).max() < 1e-11


def test_bisection_flow_root_degenerate_multiplicity():
    s = rest()
    scan = bisection_roots(s, np.array([1.0, 0.0, 0.0]), "flow")
    assert scan.roots == pytest.approx([0.0], abs=1e-12)
    assert scan.expected_count == 1
    assert scan.factor_multiplicity == 4


def test_is_hyperbolic_in_regime():
    s = rest(a2=5.0)
    for family in ("shear", "sound"):
        rep = is_hyperbolic(s, family, samples=32, seed=1)
        assert rep.is_hyperbolic
        assert rep.witness is None


def test_is_hyperbolic_sound_boundary_flagged():
    rep = is_hyperbolic(rest(a2=4.0), "sound", samples=16, seed=2)
    assert rep.is_hyperbolic            # roots distinct from each other
    assert rep.light_cone_tangent       # but they sit on the light cone


def test_is_hyperbolic_fails_off_regime():
    s = StatePoint(eps=1.0, u=np.array([np.sqrt(2.0), 1.0, 0, 0]),
                   g=minkowski(), transport=TransportModel(a2=0.5))
    rep = is_hyperbolic(s, "sound", samples=64, seed=3)
    assert not rep.is_hyperbolic
    assert rep.witness is not None


def test_gevrey_indices():
    assert gevrey_index(FLUID_FACTORS) == Fraction(7, 6)
    assert gevrey_index(COUPLED_FACTORS) == Fraction(17, 16)


def test_gevrey_small_counts():
    from vecf.characteristics import FactorEntry, FactorSet
    two = FactorSet(entries=(FactorEntry("light", 2, 2),))
    assert gevrey_index(two) == Fraction(2, 1)
    with pytest.raises(ValueError):
        gevrey_index(FactorSet(entries=(FactorEntry("flow", 1, 1),)))


def test_factor_set_degrees():
    assert FLUID_FACTORS.total_degree == 10
    assert FLUID_FACTORS.factor_count == 7
    assert COUPLED_FACTORS.total_degree == 30
    assert COUPLED_FACTORS.factor_count == 17


def test_all_families_hyperbolic_above_boundary():
    # a2 > 4, Minkowski, normalized u: every factor family passes the
    # 64-direction hyperbolicity test
    s = StatePoint(eps=1.2, u=np.array([np.sqrt(1.0 + 1.25), 1.0, -0.5, 0.0]),
                   g=minkowski(), transport=TransportModel(a2=5.0))
    for family in ("flow", "shear", "sound", "light"):
        rep = is_hyperbolic(s, family, samples=64, seed=7)
        assert rep.is_hyperbolic, family
