from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plgroupoid import groupoid as gp
from plgroupoid.groupoid import AnchorMismatch, NotComposable, OmegaViolation, element_distance
from plgroupoid.groups import DualGroupPoint, GroupPoint, param_distance
from plgroupoid.tensors import FD_STEP

seeds = st.integers(0, 2**32 - 1)


def omega():
    from plgroupoid.models import get_model

    return get_model("su11").omega


def quad_residual(x):
    return np.max(np.abs(x.g1.matrix() @ x.gamma1.matrix() - x.gamma2.matrix() @ x.g2.matrix()))


def test_units_by_hand(su11):
    om, d = su11.omega, su11.double
    g = GroupPoint(math.sqrt(2), 1j)
    u = om.unit_G(g)
    assert (u.g1, u.gamma1, u.gamma2, u.g2) == (g, d.identity_gstar, d.identity_gstar, g)
    gam = DualGroupPoint(2.0, 1 - 1j)
    v = om.unit_Gstar(gam)
    assert (v.g1, v.gamma1, v.gamma2, v.g2) == (d.identity_g, gam, gam, d.identity_g)


def test_make_solves_the_quadruple_equation(su11):
    om = su11.omega
    g1, gam1 = GroupPoint(math.sqrt(2), 1), DualGroupPoint(0.5, 0.5j)
    x = om.make(g1, gam1)
    assert quad_residual(x) < 1e-14
    assert x.residual < 1e-14
    y = om.make_from_target(g1, x.gamma2)
    assert element_distance(x, y) < 1e-12


def test_rejects_non_quadruples(su11):
    om, d = su11.omega, su11.double
    g = GroupPoint(math.sqrt(2), 1)
    with pytest.raises(OmegaViolation):
        om.element(g, DualGroupPoint(2.0, 0), d.identity_gstar, g)


def test_composability_guards(su11, rng):
    om = su11.omega
    x, y = om.random_element(rng), om.random_element(rng)
    with pytest.raises(NotComposable):
        om.mult_G(x, y)
    with pytest.raises(NotComposable):
        om.mult_Gstar(x, y)
    with pytest.raises(AnchorMismatch):
        om.act(x, y)


def test_json_layout(su11):
    om = su11.omega
    x = om.make(GroupPoint(math.sqrt(2), 1j), DualGroupPoint(0.5, 1.0))
    doc = json.loads(json.dumps(x.to_json()))
    assert list(doc) == ["g1", "gamma1", "gamma2", "g2", "omega_residual"]
    assert doc["g1"] == {"alpha": [math.sqrt(2), 0.0], "beta": [0.0, 1.0]}
    assert doc["gamma1"] == {"A": 0.5, "N": [1.0, 0.0]}
    assert doc["omega_residual"] == x.residual


def test_double_roundtrip(su11, rng):
    om = su11.omega
    for _ in range(10):
        x = om.random_element(rng)
        y = om.from_double(om.double_point(x))
        assert element_distance(x, y) < 1e-9 * max(1, np.max(np.abs(x.params()))) ** 2


def test_chart_is_centred(su11, rng):
    om = su11.omega
    x = om.random_element(rng)
    assert element_distance(om.chart(x)(np.zeros(6)), x) < 1e-12
    assert np.max(np.abs(om.mixed_coords(x)(x))) < 1e-12
    u = 1e-4 * rng.standard_normal(6)
    assert np.max(np.abs(om.mixed_coords(x)(om.chart(x)(u)) - u)) < 1e-7


def test_abelian_quadruples_are_diagonal(trivial):
    om, d = trivial.omega, trivial.double
    g, gam = d.g_point([1.0, -2.0, 0.5]), d.gstar_point([0.25, 3.0, -1.0])
    x = om.make(g, gam)
    assert x.g2 == g and x.gamma2 == gam and x.residual == 0.0


@given(seeds)
def test_G_groupoid_axioms(seed):
    om = omega()
    rng = np.random.default_rng(seed)
    x = om.random_element(rng)
    y = om.random_after_G(rng, x)
    z = om.random_after_G(rng, y)
    xy = om.mult_G(x, y)
    assert param_distance(om.source_G(xy), om.source_G(x)) == 0
    assert param_distance(om.target_G(xy), om.target_G(y)) == 0
    scale = max(1.0, *(np.max(np.abs(e.params())) for e in (x, y, z))) ** 4
    assert element_distance(om.mult_G(xy, z), om.mult_G(x, om.mult_G(y, z))) <= 1e-9 * scale
    assert element_distance(om.mult_G(om.unit_G(x.g1), x), x) <= 1e-12 * scale
    assert element_distance(om.mult_G(x, om.unit_G(x.g2)), x) <= 1e-12 * scale
    assert element_distance(om.mult_G(x, om.inverse_G(x)), om.unit_G(x.g1)) <= 1e-9 * scale
    assert quad_residual(xy) <= 1e-9 * scale


@given(seeds)
def test_Gstar_groupoid_axioms(seed):
    om = omega()
    rng = np.random.default_rng(seed)
    x = om.random_element(rng)
    y = om.random_after_Gstar(rng, x)
    z = om.random_after_Gstar(rng, y)
    xy = om.mult_Gstar(x, y)
    assert param_distance(om.source_Gstar(xy), om.source_Gstar(x)) == 0
    assert param_distance(om.target_Gstar(xy), om.target_Gstar(y)) == 0
    scale = max(1.0, *(np.max(np.abs(e.params())) for e in (x, y, z))) ** 4
    assert element_distance(om.mult_Gstar(xy, z), om.mult_Gstar(x, om.mult_Gstar(y, z))) <= 1e-9 * scale
    assert element_distance(om.mult_Gstar(om.unit_Gstar(x.gamma2), x), x) <= 1e-12 * scale
    assert element_distance(om.mult_Gstar(x, om.unit_Gstar(x.gamma1)), x) <= 1e-12 * scale
    assert element_distance(om.mult_Gstar(x, om.inverse_Gstar(x)), om.unit_Gstar(x.gamma2)) <= 1e-9 * scale


@given(seeds)
def test_action_along_anchor(seed):
    om = omega()
    rng = np.random.default_rng(seed)
    y = om.random_element(rng)
    # an element whose G*-target is the anchor J(y)
    x = om.inverse_Gstar(om.random_after_Gstar(rng, om.inverse_Gstar(y)))
    moved = om.act(x, y)
    assert param_distance(om.J(moved), x.gamma2) == 0
    assert element_distance(om.act(om.unit_Gstar(om.J(y)), y), y) <= 1e-12 * max(1, np.max(np.abs(y.params())))


def test_poisson_maps(su11, rng):
    om = su11.omega
    for _ in range(5):
        x = om.random_element(rng)
        scale = max(1.0, np.max(np.abs(om.pi_plus(x).mat)))
        assert gp.source_poisson_defect(om, x) < 1e-6 * scale
        assert gp.target_anti_poisson_defect(om, x) < 1e-6 * scale
        assert gp.anchor_anti_poisson_defect(om, x) < 1e-6 * scale
        assert gp.gstar_target_poisson_defect(om, x) < 1e-6 * scale


def test_poisson_map_signs_are_not_interchangeable(su11, rng):
    om, d = su11.omega, su11.double
    x = om.make(GroupPoint(math.sqrt(1.5), 0.5 + 0.5j), DualGroupPoint(1.5, 1 - 1j))
    from plgroupoid.tensors import pi_G, pi_Gstar

    assert gp._pushforward(om, x, "g2", pi_G(d, x.g2), +1, FD_STEP) > 1e-3
    assert gp._pushforward(om, x, "gamma2", pi_Gstar(d, x.gamma2), +1, FD_STEP) > 1e-3
    assert gp._pushforward(om, x, "g1", pi_G(d, x.g1), -1, FD_STEP) > 1e-3


def test_momentum_identity(su11, rng):
    om = su11.omega
    for _ in range(5):
        x = om.random_element(rng)
        X = rng.standard_normal(3)
        field = gp.momentum_field(om, x, X)
        assert gp.momentum_defect(om, x, X) < 1e-5 * max(1.0, np.max(np.abs(field)))


def test_nondegenerate_at_units(su11, rng):
    om = su11.omega
    assert gp.nondegeneracy(om, om.unit_G(su11.double.identity_g)) == pytest.approx(1.0)
    for _ in range(5):
        assert gp.nondegeneracy(om, om.random_element(rng)) > 0
