from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from plgroupoid import tensors as tn
from plgroupoid.groups import DualGroupPoint, Frame, FrameVector, GroupPoint

angle = st.floats(0, 2 * math.pi)
small = st.floats(-1.5, 1.5, allow_nan=False)
g_points = st.builds(
    lambda r, a, b: GroupPoint.unchecked(math.sqrt(1 + r * r) * np.exp(1j * a), r * np.exp(1j * b)),
    st.floats(0, 1.5), angle, angle,
)
gs_points = st.builds(lambda a, x, y: DualGroupPoint(math.exp(a), complex(x, y)), st.floats(-0.7, 0.7), small, small)


def double():
    from plgroupoid.models import get_model

    return get_model("su11").double


def entry_functions(m):
    """Real and imaginary parts of the four matrix entries."""
    flat = np.asarray(m).reshape(-1)
    return np.concatenate([flat.real, flat.imag])


def bracket_table(d, point_matrix, pi_mat, part):
    """{u_a, u_b} for the linear entry functions u_a, from the right-trivialized bivector."""
    off = 0 if part == "g" else d.n
    du = np.stack([entry_functions(d.basis[off + i] @ point_matrix) for i in range(d.n)])
    return du.T @ pi_mat @ du, du


def jacobiator(d, point, pi_fn, part, exp_fn, h=1e-5):
    p = point.matrix()
    table, du = bracket_table(d, p, pi_fn(d, point).mat, part)
    # derivative of {u_b, u_c} along right translations exp(t e_j) p
    grads = []
    for j in range(d.n):
        e = np.eye(d.n)[j]

        def f(t, e=e):
            q = _mul(d, exp_fn(t * e), point, part)
            return bracket_table(d, d.embed(q), pi_fn(d, q).mat, part)[0]

        grads.append((f(h) - f(-h)) / (2 * h))
    grads = np.stack(grads)  # j, b, c
    pim = pi_fn(d, point).mat
    # {u_a, F} = sum_ij du_a(e_i) Pi_ij dF(e_j)
    t = np.einsum("ia,ij,jbc->abc", du, pim, grads)
    return t + t.transpose(1, 2, 0) + t.transpose(2, 0, 1), float(np.max(np.abs(table)))


def _mul(d, a, b, part):
    return d.g_mul(a, b) if part == "g" else d.gstar_mul(a, b)


def test_identity_vanishing(su11):
    d = su11.double
    assert np.max(np.abs(tn.pi_G(d, d.identity_g).mat)) == 0
    assert np.max(np.abs(tn.pi_Gstar(d, d.identity_gstar).mat)) == 0


def test_pi_G_vanishes_on_the_torus(su11):
    d = su11.double
    for theta in (0.2, 1.3, 3.0):
        assert np.max(np.abs(tn.pi_G(d, GroupPoint(np.exp(1j * theta), 0)).mat)) < 1e-15


def test_linearization_is_the_dual_bracket(su11):
    d, b = su11.double, su11.bialgebra
    for k in range(3):
        e = np.eye(3)[k]
        lin_gs = tn.fd_derivative(lambda t: tn.pi_Gstar(d, d.exp_gstar(t * e)).mat)
        lin_g = tn.fd_derivative(lambda t: tn.pi_G(d, d.exp_g(t * e)).mat)
        assert np.allclose(lin_gs, b.g.c[:, :, k], atol=1e-8)
        assert np.allclose(lin_g, b.g_star.c[:, :, k], atol=1e-8)


@pytest.mark.parametrize("part", ["g", "gstar"])
def test_jacobi_identity_by_finite_differences(su11, rng, part):
    d = su11.double
    pi_fn = tn.pi_G if part == "g" else tn.pi_Gstar
    exp_fn = d.exp_g if part == "g" else d.exp_gstar
    for _ in range(5):
        point = d.random_g(rng, 1.0) if part == "g" else d.random_gstar(rng, 1.0)
        jac, scale = jacobiator(d, point, pi_fn, part, exp_fn)
        assert np.max(np.abs(jac)) < 1e-6 * max(1.0, scale) ** 2


def test_jacobi_oracle_detects_a_non_poisson_tensor(su11, rng):
    d = su11.double

    def bent(dd, p):
        # pi_G* plus a position-dependent rescaling breaks Jacobi
        m = tn.pi_Gstar(dd, p).mat
        return tn.BivectorMatrix(m * (1 + p.N.real ** 2) + np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]]), Frame.RIGHT)

    point = DualGroupPoint(1.3, 0.4 - 0.8j)
    jac, scale = jacobiator(d, point, bent, "gstar", d.exp_gstar)
    assert np.max(np.abs(jac)) > 1e-2


def test_sharp_and_transport(su11):
    d = su11.double
    g = GroupPoint(math.sqrt(2), 1j)
    b = tn.pi_G(d, g)
    v = tn.sharp(b, FrameVector(np.array([1.0, 0.0, 0.0]), Frame.RIGHT))
    assert v.frame is Frame.RIGHT
    assert np.allclose(v.coords, b.mat[:, 0])
    left = tn.right_to_left_g(d, g, b)
    assert left.frame is Frame.LEFT
    with pytest.raises(tn.FrameMismatch):
        tn.right_to_left_g(d, g, left)
    with pytest.raises(tn.FrameMismatch):
        tn.sharp(b, FrameVector(np.ones(2), Frame.RIGHT))


def test_bivector_rejects_symmetric_part():
    with pytest.raises(ValueError):
        tn.BivectorMatrix(np.eye(2), Frame.RIGHT)
    with pytest.raises(ValueError):
        tn.BivectorMatrix(np.zeros((2, 3)), Frame.RIGHT)


def test_pi_plus_at_identity(su11):
    d = su11.double
    b = tn.pi_plus(d, d.identity_g, d.identity_gstar)
    assert b.frame is Frame.MIXED
    expected = np.block([[np.zeros((3, 3)), -np.eye(3)], [np.eye(3), np.zeros((3, 3))]])
    assert np.array_equal(b.mat, expected)


def test_pi_plus_expansions_agree_and_refuse(su11, rng):
    d = su11.double
    for _ in range(20):
        g, gam = d.random_g(rng), d.random_gstar(rng)
        assert tn.pi_plus_expansion_defect(d, g, gam) < 1e-10
        assert abs(np.linalg.det(tn.pi_plus(d, g, gam).mat)) > 0
    with pytest.raises(ArithmeticError):
        tn.pi_plus(d, g, gam, tol=-1.0)


def test_fd_derivative_is_exact_on_dyadic_affine_curves():
    a, b = np.array([0.5, -3.25]), np.array([1.0, 0.125])
    assert np.array_equal(tn.fd_derivative(lambda t: a + t * b), b)
    # fourth order: exact on cubics up to rounding
    assert tn.fd_derivative(lambda t: np.array([t**3 + 2 * t])) == pytest.approx([2.0], abs=1e-9)


def test_pushforward_of_identity_chart(su11):
    d = su11.double
    b = tn.pi_Gstar(d, DualGroupPoint(1.2, 1 + 1j))
    assert tn.pushforward_defect(lambda x: x, b, b) == 0.0
    assert tn.pushforward_defect(lambda x: x, b, b, sign=-1) > 0
    with pytest.raises(ValueError):
        tn.pushforward_defect(lambda x: x, b, b, sign=2)


def test_dressing_sign_report(su11, rng):
    d = su11.double
    rep = tn.dressing_sign_report(d, d.random_g(rng), np.array([0.3, -1.0, 0.6]))
    assert rep["minus"] < 1e-10 < 1e-3 < rep["plus"]


def test_trivial_tensors_are_zero(trivial):
    d = trivial.double
    p = d.g_point([1.0, 2.0, -0.5])
    assert np.max(np.abs(tn.pi_G(d, p).mat)) == 0
    assert np.max(np.abs(tn.pi_Gstar(d, d.gstar_point([0.25, 0, 1])).mat)) == 0


@given(g_points, g_points)
def test_multiplicativity_G(a, b):
    d = double()
    scale = max(1.0, np.max(np.abs(a.params())), np.max(np.abs(b.params())))
    assert tn.multiplicativity_defect(d, a, b, "G") <= 1e-9 * scale**6


@given(gs_points, gs_points)
def test_multiplicativity_Gstar(a, b):
    d = double()
    assert tn.multiplicativity_defect(d, a, b, "G*") <= 1e-9 * max(1.0, abs(a.N), abs(b.N)) ** 6


def test_multiplicativity_unknown_side(su11):
    d = su11.double
    with pytest.raises(ValueError):
        tn.multiplicativity_defect(d, d.identity_g, d.identity_g, "H")
