from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plgroupoid.groupoid import NotComposable
from plgroupoid.groups import DualGroupPoint, GroupPoint, param_distance
from plgroupoid.reduction import CoisotropicSubgroupData, LevelSetViolation
from plgroupoid.algebra import SubspaceData

seeds = st.integers(0, 2**32 - 1)


def model():
    from plgroupoid.models import get_model

    return get_model("su11")


def level_element(m, g1, N):
    return m.omega.make_from_target(g1, DualGroupPoint(1.0, N))


def test_momentum_map_examples(su11):
    R = su11.reduction
    x = level_element(su11, su11.double.identity_g, 3 + 1j)
    assert R.J_H(x) == pytest.approx([1.0])
    assert R.level_set_contains(x)
    y = su11.omega.make_from_target(su11.double.identity_g, DualGroupPoint(2.0, 3 + 1j))
    assert R.level_defect(y) == pytest.approx(1.0)
    assert not R.level_set_contains(y)
    with pytest.raises(LevelSetViolation):
        R.canonicalize(y)


def test_quarter_turn_negates_anchor(su11):
    R = su11.reduction
    h = GroupPoint(1j, 0)  # diag(i, -i)
    x = level_element(su11, su11.double.identity_g, 3 + 1j)
    y = R.h_act(h, x)
    assert abs(y.gamma2.N - (-(3 + 1j))) < 1e-13
    assert y.gamma2.A == pytest.approx(1.0, abs=1e-14)
    assert param_distance(y.g1, h) < 1e-14


def test_section_and_quotient(su11):
    hk = su11.hooks
    for z in (0, 0.5, -0.3 + 0.6j):
        g = hk.section([z.real, z.imag] if isinstance(z, complex) else [z, 0.0])
        assert g.alpha.imag == 0 and g.alpha.real > 0
        q = hk.quotient(g)
        assert complex(q[0], q[1]) == pytest.approx(z, abs=1e-15)
        # H acts on the left, so the quotient is blind to it
        hg = su11.double.g_mul(hk.h_point([0.7]), g)
        assert np.allclose(hk.quotient(hg), q, atol=1e-15)
    with pytest.raises(ValueError):
        hk.section([1.0, 0.0])


def test_canonical_representative(su11, rng):
    R = su11.reduction
    for _ in range(10):
        a = R.random_reduced(rng)
        assert abs(a.rep.g1.alpha.imag) < 1e-12 and a.rep.g1.alpha.real > 0
        assert a.residuals["level"] < 1e-12
        assert np.allclose(a.base, R.hooks.quotient(a.rep.g1))


def test_reduced_json(su11):
    R = su11.reduction
    a = R.canonicalize(level_element(su11, su11.double.identity_g, 0.5j))
    doc = a.to_json()
    assert doc["z"] == [0.0, 0.0]
    assert set(doc) == {"z", "gamma1", "gamma2", "residuals"}
    assert doc["gamma2"]["N"] == [0.0, 0.5]


def test_reduced_composability_guard(su11, rng):
    R = su11.reduction
    a = R.reduced_unit(np.array([0.1, 0.2]))
    b = R.random_reduced(rng, np.array([-0.4, 0.0]))
    with pytest.raises(NotComposable):
        R.reduced_mult(a, b)


def test_cotangent_chart_at_origin(su11):
    R = su11.reduction
    e = su11.double.identity_g
    for xi in ([0.0, 0.3, -1.2], [0.0, 2.0, 0.5]):
        x = su11.omega.make_from_target(e, su11.hooks.hperp_exp(np.array(xi)))
        assert R.cotangent_chart(x) == pytest.approx(xi[1:], abs=1e-14)
    unit = su11.omega.unit_G(e)
    assert np.array_equal(R.cotangent_chart(unit), [0.0, 0.0])


def test_cotangent_chart_is_section_independent(su11, rng):
    R = su11.reduction
    for _ in range(10):
        a = R.random_reduced(rng)
        h = R.hooks.h_point(R.hooks.random_theta(rng))
        assert R.cotangent_section_defect(a, h) < 1e-10
        assert R.cotangent_descent_defect(a) < 1e-10
        assert R.intertwining_defect(h, R.hooks.hperp_log(a.rep.gamma2)) < 1e-12


def test_hperp_log_exp(su11):
    hk = su11.hooks
    p = DualGroupPoint(1.0, 2 - 1j)
    assert np.allclose(hk.hperp_log(p), [0.0, -1.0, -2.0])
    assert param_distance(hk.hperp_exp(hk.hperp_log(p)), p) == 0
    with pytest.raises(ValueError):
        hk.hperp_log(DualGroupPoint(1.5, 0))
    with pytest.raises(ValueError):
        hk.hperp_exp(np.array([0.1, 0.0, 0.0]))


def test_coinduced_bivector_vanishes_at_origin_and_is_orbit_independent(su11, rng):
    R = su11.reduction
    assert np.max(np.abs(R.coinduced_bivector(np.zeros(2)))) < 1e-15
    for _ in range(5):
        q = R.hooks.random_q(rng)
        g = R.hooks.section(q)
        ref = R.coinduced_bivector(q)
        h = R.hooks.h_point(R.hooks.random_theta(rng))
        assert np.max(np.abs(R.coinduced_bivector(q, su11.double.g_mul(h, g)) - ref)) < 1e-10
        assert R.quotient_pushforward_defect(g) < 1e-7


def test_coisotropy_and_negative_control(su11, rng):
    R = su11.reduction
    x = R.random_level_element(rng)
    parts = R.coisotropy_defect(x)
    assert set(parts) == {"tangency", "fundamental", "membership"}
    assert R.coisotropy_total(x) < 1e-6
    off = R.off_level_element(x, 0.1)
    assert R.coisotropy_total(off) > 1e-2


def test_reduced_bivector_is_chart_bump_invariant(su11, rng):
    R = su11.reduction
    x = R.random_level_element(rng)
    a = R.reduced_bivector(x)
    b = R.reduced_bivector(x, bump=0.7)
    assert np.max(np.abs(a - b)) < 1e-6 * max(1.0, np.max(np.abs(a)))
    assert abs(np.linalg.det(a)) > 1e-8


def test_base_maps(su11, rng):
    R = su11.reduction
    x = R.random_level_element(rng)
    assert R.base_map_defect(x, "source") < 1e-6
    assert R.base_map_defect(x, "target") < 1e-6


def test_coisotropic_subgroup_data_rejects_bad_h(su11):
    b = su11.bialgebra
    with pytest.raises(ValueError):
        CoisotropicSubgroupData.build(b.g, b.g_star, SubspaceData.coordinate(3, [0, 1]), True)


@given(seeds)
def test_reduced_groupoid_axioms(seed):
    m = model()
    R = m.reduction
    rng = np.random.default_rng(seed)
    a = R.random_reduced(rng)
    b = R.random_reduced_after(rng, a)
    c = R.random_reduced_after(rng, b)
    scale = max(1.0, *(np.max(np.abs(e.rep.params())) for e in (a, b, c))) ** 4
    ab = R.reduced_mult(a, b)
    assert np.max(np.abs(R.reduced_source(ab) - R.reduced_source(a))) <= 1e-9 * scale
    assert np.max(np.abs(R.reduced_target(ab) - R.reduced_target(b))) <= 1e-9 * scale
    assert R.class_distance(R.reduced_mult(ab, c), R.reduced_mult(a, R.reduced_mult(b, c))) <= 1e-8 * scale
    ua = R.reduced_unit(R.reduced_source(a))
    assert R.class_distance(R.reduced_mult(ua, a), a) <= 1e-8 * scale
    assert R.class_distance(R.reduced_mult(a, R.reduced_inverse(a)), ua) <= 1e-8 * scale
    # independent of the representative chosen for a
    h = R.hooks.h_point(R.hooks.random_theta(rng))
    assert R.class_distance(R.reduced_mult(a, b, h_shift=h), ab) <= 1e-8 * scale


@given(seeds, st.floats(-math.pi, math.pi))
def test_h_action_preserves_level_set_and_class(seed, theta):
    m = model()
    R = m.reduction
    rng = np.random.default_rng(seed)
    x = R.random_level_element(rng)
    y = R.h_act(R.hooks.h_point([theta]), x)
    assert R.level_defect(y) <= 1e-12
    assert np.allclose(R.hooks.quotient(y.g1), R.hooks.quotient(x.g1), atol=1e-12)
    scale = max(1.0, np.max(np.abs(x.params()))) ** 4
    assert R.class_distance(R.canonicalize(x), R.canonicalize(y)) <= 1e-9 * scale


def test_trivial_reduction(trivial):
    R, d = trivial.reduction, trivial.double
    x = trivial.omega.make(d.g_point([1.0, 2.0, 3.0]), d.gstar_point([0.0, 0.5, -1.0]))
    assert R.level_set_contains(x)
    a = R.canonicalize(x)
    assert np.array_equal(a.base, [2.0, 3.0])
    assert np.array_equal(R.cotangent_chart(a), [0.5, -1.0])
    assert np.max(np.abs(R.coinduced_bivector(a.base))) == 0
    off = trivial.omega.make(d.g_point([1.0, 2.0, 3.0]), d.gstar_point([0.25, 0.5, -1.0]))
    assert not R.level_set_contains(off)
