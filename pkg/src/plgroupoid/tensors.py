"""Pointwise Poisson tensors and defect functionals.

Every bivector is a :class:`BivectorMatrix` whose entries are its values on
the covector basis dual to the tangent frame.  The frames are:

* G, right-trivialized: tangent Y gbar with Y in g (e-basis), covectors in g*.
* G*, right-trivialized: tangent eta gammabar with eta in g* (f-basis).
* the double at d = gbar gammabar, mixed: tangent gbar u gammabar with u in
  the double in the order (e_1..e_n, f^1..f^n).  The dual covectors are
  (f^1..f^n, e_1..e_n), i.e. xi-covectors first and X-covectors second.

The sharp map follows <pi^sharp(w), v> = pi(v, w).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .groups import Frame, FrameVector, MatrixDouble, Point

FD_STEP = 2.0**-17
ANTISYM_TOL = 1e-12


class FrameMismatch(ValueError):
    pass


@dataclass(frozen=True)
class BivectorMatrix:
    mat: np.ndarray
    frame: Frame
    base_point: str = ""

    def __post_init__(self) -> None:
        m = np.asarray(self.mat, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("bivector matrix must be square")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        if m.size and np.max(np.abs(m + m.T)) > ANTISYM_TOL * scale:
            raise ValueError(f"bivector matrix is not antisymmetric ({np.max(np.abs(m + m.T)):.2e})")
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "frame", Frame(self.frame))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


def sharp(b: BivectorMatrix, covector: FrameVector) -> FrameVector:
    if covector.frame is not b.frame:
        raise FrameMismatch(f"covector in {covector.frame.value}, bivector in {b.frame.value}")
    if covector.coords.shape != (b.dim,):
        raise FrameMismatch("covector dimension does not match bivector")
    return FrameVector(b.mat @ covector.coords, b.frame)


# --- adjoint blocks and frame conversions ----------------------------------


def g_adjoint(double: MatrixDouble, g: Point) -> np.ndarray:
    """Ad_g restricted to g, as an n x n matrix on e-coordinates."""
    n = double.n
    return double.ad_matrix(double.embed(g))[:n, :n]


def gstar_adjoint(double: MatrixDouble, gamma: Point) -> np.ndarray:
    n = double.n
    return double.ad_matrix(double.embed(gamma))[n:, n:]


def transport(b: BivectorMatrix, m: np.ndarray, frame: Frame, base_point: str = "") -> BivectorMatrix:
    """Push a bivector through the linear map ``m`` of its tangent frame."""
    return BivectorMatrix(m @ b.mat @ m.T, frame, base_point or b.base_point)


def right_to_left_g(double: MatrixDouble, g: Point, b: BivectorMatrix) -> BivectorMatrix:
    if b.frame is not Frame.RIGHT:
        raise FrameMismatch("expected a right-trivialized bivector")
    return transport(b, g_adjoint(double, double.g_inv(g)), Frame.LEFT)


def left_to_right_gstar(double: MatrixDouble, gamma: Point, v: np.ndarray) -> np.ndarray:
    """Convert a left-trivialized tangent vector of G* to the right-trivialized frame."""
    return gstar_adjoint(double, gamma) @ np.asarray(v, float)


def left_covector_to_right_g(double: MatrixDouble, g: Point, xi: np.ndarray) -> np.ndarray:
    """Right-trivialized coordinates of the covector l*_{g^-1} xi at g."""
    return g_adjoint(double, double.g_inv(g)).T @ np.asarray(xi, float)


# --- Poisson tensors -------------------------------------------------------


def _blocks(double: MatrixDouble, d_inv: np.ndarray) -> np.ndarray:
    return double.ad_matrix(d_inv)


def pi_G(double: MatrixDouble, g: Point) -> BivectorMatrix:
    """r_{g^-1} pi_G(g): entry (i,j) = -<p_g Ad_{g^-1} f^i, p_g* Ad_{g^-1} f^j>."""
    n = double.n
    ad = _blocks(double, np.linalg.inv(double.embed(g)))
    gpart, gspart = ad[:n, n:], ad[n:, n:]
    return BivectorMatrix(-gpart.T @ gspart, Frame.RIGHT, "G")


def pi_Gstar(double: MatrixDouble, gamma: Point) -> BivectorMatrix:
    """r_{gamma^-1} pi_G*(gamma): entry (i,j) = <p_g Ad_{gamma^-1} e_i, p_g* Ad_{gamma^-1} e_j>."""
    n = double.n
    ad = _blocks(double, np.linalg.inv(double.embed(gamma)))
    gpart, gspart = ad[:n, :n], ad[n:, :n]
    return BivectorMatrix(gpart.T @ gspart, Frame.RIGHT, "G*")


def pi_plus_expansions(double: MatrixDouble, g: Point, gamma: Point) -> tuple[np.ndarray, np.ndarray]:
    """The mixed-frame matrix of pi_+ at g gamma, computed two ways.

    First: canonical part plus l_{g^-1} pi_G and r_{gamma^-1} pi_G*.
    Second: directly from the projected adjoint actions.
    """
    n = double.n
    eye = np.eye(n)
    pl = right_to_left_g(double, g, pi_G(double, g)).mat
    ps = pi_Gstar(double, gamma).mat
    first = np.block([[pl, -eye], [eye, ps]])

    pg = np.diag([1.0] * n + [0.0] * n)
    pgs = np.eye(2 * n) - pg
    R = double.ad_matrix(double.embed(g))
    S = double.ad_matrix(double.embed(gamma))
    m_xi = np.linalg.solve(R, pg @ R)  # Ad_{g^-1} p_g Ad_g
    m_x = S @ pgs @ np.linalg.inv(S)  # Ad_gamma p_g* Ad_{gamma^-1}
    xixi = -m_xi[:n, n:]
    xx = m_x[n:, :n]
    second = np.block([[xixi, -eye], [eye, xx]])
    return first, second


def pi_plus(double: MatrixDouble, g: Point, gamma: Point, tol: float = 1e-10) -> BivectorMatrix:
    first, second = pi_plus_expansions(double, g, gamma)
    diff = float(np.max(np.abs(first - second)))
    if diff > tol * max(1.0, float(np.max(np.abs(first)))):
        raise ArithmeticError(f"pi_+ expansions disagree by {diff:.2e}: inconsistent frames")
    return BivectorMatrix(first, Frame.MIXED, "D")


def pi_plus_expansion_defect(double: MatrixDouble, g: Point, gamma: Point) -> float:
    first, second = pi_plus_expansions(double, g, gamma)
    return float(np.max(np.abs(first - second)))


# --- defects ---------------------------------------------------------------


def multiplicativity_defect(double: MatrixDouble, a: Point, b: Point, side: str = "G") -> float:
    """max |Pi(ab) - Pi(a) - Ad_a Pi(b) Ad_a^T| in right-trivialized frames.

    Right-trivializing pi(ab) = l_a pi(b) + r_b pi(a) gives exactly this
    transport law.
    """
    if side == "G":
        pi, mul, adj = pi_G, double.g_mul, g_adjoint
    elif side in ("G*", "Gstar"):
        pi, mul, adj = pi_Gstar, double.gstar_mul, gstar_adjoint
    else:
        raise ValueError(f"unknown side {side!r}")
    m = adj(double, a)
    r = pi(double, mul(a, b)).mat - pi(double, a).mat - m @ pi(double, b).mat @ m.T
    return float(np.max(np.abs(r)))


def fd_derivative(curve: Callable[[float], np.ndarray], step: float = FD_STEP) -> np.ndarray:
    """Five-point central difference of ``curve`` at 0.

    The fourth-order stencil keeps the truncation error small near the
    incompleteness locus, where the tensors grow like inverse powers of the
    margin.  It is exact on affine curves with dyadic data.
    """
    f = lambda s: np.asarray(curve(s * step), dtype=float)
    return (8.0 * (f(1) - f(-1)) - (f(2) - f(-2))) / (12.0 * step)


def fd_jacobian(chart: Callable[[np.ndarray], np.ndarray], k: int, step: float = FD_STEP) -> np.ndarray:
    """Finite-difference Jacobian of ``chart`` at 0 in R^k."""
    eye = np.eye(k)
    return np.stack([fd_derivative(lambda t: chart(t * eye[a]), step) for a in range(k)], axis=1)


def pushforward_defect(
    chart: Callable[[np.ndarray], np.ndarray],
    source: BivectorMatrix,
    target: BivectorMatrix,
    sign: int = 1,
    step: float = FD_STEP,
) -> float:
    """|J pi_P J^T - sign pi_Q| with J the finite-difference Jacobian of ``chart``.

    ``chart`` maps a displacement in the source frame coordinates to target
    frame coordinates, both centred at the evaluation point.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    jac = fd_jacobian(chart, source.dim, step)
    if jac.shape[0] != target.dim:
        raise FrameMismatch("chart target dimension does not match target bivector")
    r = jac @ source.mat @ jac.T - sign * target.mat
    return float(np.max(np.abs(r)))


def right_coords(double: MatrixDouble, ref: np.ndarray, part: str) -> Callable[[np.ndarray], np.ndarray]:
    """Local coordinates near ``ref`` whose differential is the right-trivialization."""
    ref_inv = np.linalg.inv(ref)
    n = double.n
    block = slice(0, n) if part == "g" else slice(n, 2 * n)

    def coords(m: np.ndarray) -> np.ndarray:
        return double.expand_array(m @ ref_inv - np.eye(double.size), check=False)[block]

    return coords


def right_chart_g(double: MatrixDouble, g: Point) -> Callable[[np.ndarray], Point]:
    """Displacement x in g -> exp(x) g."""
    gm = double.embed(g)
    return lambda x: double.g_from_matrix(double.exp_d(np.concatenate([x, np.zeros(double.n)])) @ gm, True)


def dressing_sign_report(double: MatrixDouble, g: Point, xi: np.ndarray) -> dict[str, float]:
    """Defects of S_xi(g) = s pi_G^sharp(l*_{g^-1} xi) for both signs s."""
    from .dressing import sharp_form_check_G

    return {"minus": sharp_form_check_G(double, xi, g, -1.0), "plus": sharp_form_check_G(double, xi, g, 1.0)}
