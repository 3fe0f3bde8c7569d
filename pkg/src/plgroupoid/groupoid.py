"""The manifold Omega of quadruples and its two groupoid structures.

A point of Omega is (g1, gamma1, gamma2, g2) with g1 gamma1 = gamma2 g2 in
the double.  Over G it composes along g2 = g1'; over G* along gamma1 = gamma2'.
The left action of the G*-groupoid on Omega uses the anchor J = gamma2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .groups import MatrixDouble, NotFactorizable, Order, Point, param_distance
from .tensors import FD_STEP, BivectorMatrix, Frame, fd_derivative, fd_jacobian, pi_G, pi_Gstar, pi_plus, right_coords

OMEGA_TOL = 1e-10
COMPOSE_TOL = 1e-9
COMPONENTS = ("g1", "gamma1", "gamma2", "g2")


class NotComposable(ValueError):
    pass


class AnchorMismatch(ValueError):
    pass


class OmegaViolation(ArithmeticError):
    pass


@dataclass(frozen=True)
class GroupoidElement:
    g1: Point
    gamma1: Point
    gamma2: Point
    g2: Point
    residual: float = 0.0

    def components(self) -> tuple[Point, Point, Point, Point]:
        return self.g1, self.gamma1, self.gamma2, self.g2

    def params(self) -> np.ndarray:
        return np.concatenate([p.params() for p in self.components()])

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {k: p.to_json() for k, p in zip(COMPONENTS, self.components())}
        out["omega_residual"] = self.residual
        return out


def element_distance(x: GroupoidElement, y: GroupoidElement) -> float:
    return max(param_distance(a, b) for a, b in zip(x.components(), y.components()))


class Omega:
    """Omega over a fixed double, with both groupoid structures."""

    def __init__(self, double: MatrixDouble) -> None:
        self.double = double

    # construction
    def omega_residual(self, g1: Point, gamma1: Point, gamma2: Point, g2: Point) -> float:
        e = self.double.embed
        lhs = e(g1) @ e(gamma1)
        r = float(np.max(np.abs(lhs - e(gamma2) @ e(g2))))
        return r / max(1.0, float(np.max(np.abs(lhs))))

    def element(self, g1: Point, gamma1: Point, gamma2: Point, g2: Point, tol: float = OMEGA_TOL) -> GroupoidElement:
        r = self.omega_residual(g1, gamma1, gamma2, g2)
        if not r <= tol:
            raise OmegaViolation(f"Omega residual {r:.2e} exceeds {tol:.0e}")
        return GroupoidElement(g1, gamma1, gamma2, g2, r)

    def make(self, g1: Point, gamma1: Point) -> GroupoidElement:
        """Complete (g1, gamma1) by refactoring g1 gamma1 = gamma2 g2."""
        d = self.double
        f = d.factorize(d.embed(g1) @ d.embed(gamma1), Order.GSTAR_G)
        return self.element(g1, gamma1, f.gamma, f.g)

    def make_from_target(self, g1: Point, gamma2: Point) -> GroupoidElement:
        """Element with prescribed g1 and anchor gamma2: factor g1^-1 gamma2 = gamma1 g2^-1."""
        d = self.double
        f = d.factorize(np.linalg.inv(d.embed(g1)) @ d.embed(gamma2), Order.GSTAR_G)
        return self.element(g1, f.gamma, gamma2, d.g_inv(f.g))

    def from_double(self, m: np.ndarray) -> GroupoidElement:
        """The point of Omega over m in the factorization chart."""
        d = self.double
        a = d.factorize(m, Order.G_GSTAR)
        b = d.factorize(m, Order.GSTAR_G)
        return self.element(a.g, a.gamma, b.gamma, b.g)

    def double_point(self, x: GroupoidElement) -> np.ndarray:
        return self.double.embed(x.g1) @ self.double.embed(x.gamma1)

    # groupoid over G
    @staticmethod
    def source_G(x: GroupoidElement) -> Point:
        return x.g1

    @staticmethod
    def target_G(x: GroupoidElement) -> Point:
        return x.g2

    def unit_G(self, g: Point) -> GroupoidElement:
        e = self.double.identity_gstar
        return self.element(g, e, e, g)

    def inverse_G(self, x: GroupoidElement) -> GroupoidElement:
        d = self.double
        return self.element(x.g2, d.gstar_inv(x.gamma1), d.gstar_inv(x.gamma2), x.g1)

    def mult_G(self, x: GroupoidElement, y: GroupoidElement) -> GroupoidElement:
        gap = param_distance(x.g2, y.g1)
        if not gap <= COMPOSE_TOL:
            raise NotComposable(f"target of x and source of y differ by {gap:.2e}")
        d = self.double
        return self.element(x.g1, d.gstar_mul(x.gamma1, y.gamma1), d.gstar_mul(x.gamma2, y.gamma2), y.g2)

    # groupoid over G*
    @staticmethod
    def source_Gstar(x: GroupoidElement) -> Point:
        return x.gamma2

    @staticmethod
    def target_Gstar(x: GroupoidElement) -> Point:
        return x.gamma1

    def unit_Gstar(self, gamma: Point) -> GroupoidElement:
        e = self.double.identity_g
        return self.element(e, gamma, gamma, e)

    def inverse_Gstar(self, x: GroupoidElement) -> GroupoidElement:
        d = self.double
        return self.element(d.g_inv(x.g1), x.gamma2, x.gamma1, d.g_inv(x.g2))

    def mult_Gstar(self, x: GroupoidElement, y: GroupoidElement) -> GroupoidElement:
        gap = param_distance(x.gamma1, y.gamma2)
        if not gap <= COMPOSE_TOL:
            raise NotComposable(f"target of x and source of y differ by {gap:.2e}")
        d = self.double
        return self.element(d.g_mul(x.g1, y.g1), y.gamma1, x.gamma2, d.g_mul(x.g2, y.g2))

    # action of the G*-groupoid on Omega along J
    @staticmethod
    def J(x: GroupoidElement) -> Point:
        return x.gamma2

    def act(self, x: GroupoidElement, y: GroupoidElement) -> GroupoidElement:
        gap = param_distance(x.gamma1, y.gamma2)
        if not gap <= COMPOSE_TOL:
            raise AnchorMismatch(f"anchor J(y) differs from the target of x by {gap:.2e}")
        d = self.double
        return self.element(d.g_mul(x.g1, y.g1), y.gamma1, x.gamma2, d.g_mul(x.g2, y.g2))

    # sampling
    def random_element(self, rng: np.random.Generator, tries: int = 1000) -> GroupoidElement:
        d = self.double
        for _ in range(tries):
            try:
                return self.make(d.random_g(rng), d.random_gstar(rng))
            except NotFactorizable:
                continue
        raise RuntimeError("could not sample a factorizable pair")

    def random_after_G(self, rng: np.random.Generator, x: GroupoidElement, tries: int = 1000) -> GroupoidElement:
        """Random y with source_G(y) = target_G(x)."""
        for _ in range(tries):
            try:
                return self.make(x.g2, self.double.random_gstar(rng))
            except NotFactorizable:
                continue
        raise RuntimeError("could not sample a composable element")

    def random_after_Gstar(self, rng: np.random.Generator, x: GroupoidElement, tries: int = 1000) -> GroupoidElement:
        """Random y with source_Gstar(y) = target_Gstar(x)."""
        for _ in range(tries):
            try:
                return self.make_from_target(self.double.random_g(rng), x.gamma1)
            except NotFactorizable:
                continue
        raise RuntimeError("could not sample a composable element")

    # mixed-frame chart: u -> point over g1 exp(u) gamma1
    def chart(self, x: GroupoidElement) -> Callable[[np.ndarray], GroupoidElement]:
        d = self.double
        left, right = d.embed(x.g1), d.embed(x.gamma1)
        return lambda u: self.from_double(left @ d.exp_d(u) @ right)

    def mixed_coords(self, x: GroupoidElement) -> Callable[[GroupoidElement], np.ndarray]:
        """First-order inverse of the chart; its differential at x is the mixed trivialization."""
        d = self.double
        li, ri = np.linalg.inv(d.embed(x.g1)), np.linalg.inv(d.embed(x.gamma1))
        eye = np.eye(d.size)
        return lambda y: d.expand_array(li @ self.double_point(y) @ ri - eye, check=False)

    def pi_plus(self, x: GroupoidElement) -> BivectorMatrix:
        return pi_plus(self.double, x.g1, x.gamma1)

    def map_jacobian(self, x: GroupoidElement, f: Callable[[GroupoidElement], np.ndarray], step: float = FD_STEP) -> np.ndarray:
        """Finite-difference Jacobian of f along the mixed frame at x."""
        ch = self.chart(x)
        return fd_jacobian(lambda u: f(ch(u)), 2 * self.double.n, step)

    def J_jacobian(self, x: GroupoidElement, step: float = FD_STEP) -> np.ndarray:
        coords = right_coords(self.double, self.double.embed(x.gamma2), "g*")
        return self.map_jacobian(x, lambda y: coords(self.double.embed(y.gamma2)), step)


# --- Poisson-map and momentum checks ----------------------------------------


def _pushforward(om: Omega, x: GroupoidElement, comp: str, target: BivectorMatrix, sign: int, step: float) -> float:
    d = om.double
    ref = d.embed(getattr(x, comp))
    coords = right_coords(d, ref, "g*" if comp.startswith("gamma") else "g")
    jac = om.map_jacobian(x, lambda y: coords(d.embed(getattr(y, comp))), step)
    q = om.pi_plus(x).mat
    return float(np.max(np.abs(jac @ q @ jac.T - sign * target.mat)))


def source_poisson_defect(om: Omega, x: GroupoidElement, step: float = FD_STEP) -> float:
    """alpha_G is Poisson from (Omega, pi_+) to (G, pi_G)."""
    return _pushforward(om, x, "g1", pi_G(om.double, x.g1), +1, step)


def target_anti_poisson_defect(om: Omega, x: GroupoidElement, step: float = FD_STEP) -> float:
    """beta_G is anti-Poisson."""
    return _pushforward(om, x, "g2", pi_G(om.double, x.g2), -1, step)


def anchor_anti_poisson_defect(om: Omega, x: GroupoidElement, step: float = FD_STEP) -> float:
    """J = gamma2 is anti-Poisson to (G*, pi_G*)."""
    return _pushforward(om, x, "gamma2", pi_Gstar(om.double, x.gamma2), -1, step)


def gstar_target_poisson_defect(om: Omega, x: GroupoidElement, step: float = FD_STEP) -> float:
    """The G*-groupoid target gamma1 is Poisson to (G*, pi_G*)."""
    return _pushforward(om, x, "gamma1", pi_Gstar(om.double, x.gamma1), +1, step)


def left_translation_field(om: Omega, x: GroupoidElement, X: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """Mixed-frame derivative of t -> make(exp(tX) g1, gamma1)."""
    d = om.double
    coords = om.mixed_coords(x)

    def curve(t: float) -> np.ndarray:
        g = d.g_mul(d.exp_g(t * np.asarray(X, float)), x.g1)
        return coords(om.make(g, x.gamma1))

    return fd_derivative(curve, step)


def momentum_field(om: Omega, x: GroupoidElement, X: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """-pi_+^sharp of the pullback by J of the right-invariant form X."""
    tj = om.J_jacobian(x, step)
    return -om.pi_plus(x).mat @ (tj.T @ np.asarray(X, float))


def momentum_defect(om: Omega, x: GroupoidElement, X: np.ndarray, step: float = FD_STEP) -> float:
    return float(np.max(np.abs(left_translation_field(om, x, X, step) - momentum_field(om, x, X, step))))


def nondegeneracy(om: Omega, x: GroupoidElement) -> float:
    return abs(float(np.linalg.det(om.pi_plus(x).mat)))


__all__ = [
    "AnchorMismatch",
    "Frame",
    "GroupoidElement",
    "NotComposable",
    "Omega",
    "OmegaViolation",
    "anchor_anti_poisson_defect",
    "element_distance",
    "gstar_target_poisson_defect",
    "left_translation_field",
    "momentum_defect",
    "momentum_field",
    "nondegeneracy",
    "source_poisson_defect",
    "target_anti_poisson_defect",
]
