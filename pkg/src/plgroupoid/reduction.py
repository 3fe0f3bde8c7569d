"""Reduction of Omega by a coisotropic subgroup H.

The level set of J_H (anchor in the subgroup H^perp of G*) is acted on by H
through h.(g1, gamma1, gamma2, g2) = (h g1, gamma1, ^h gamma2, h^gamma2 g2).
Orbits are represented canonically, which turns the quotient into a chart:
a reduced element is fixed by its base point q in H\\G and its anchor.

Model specifics (labels of G*/H^perp, the canonical phase, the quotient
chart on H\\G and the exponential of h^perp) are supplied by a
:class:`ReductionHooks` implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .algebra import LieAlgebraData, SubspaceData, annihilator, is_subalgebra
from .dressing import dress
from .groupoid import GroupoidElement, NotComposable, Omega, element_distance
from .groups import (
    DualGroupPoint,
    GroupPoint,
    MatrixDouble,
    NotFactorizable,
    Point,
    SU11Double,
    VectorPoint,
    param_distance,
)
from .tensors import FD_STEP, fd_derivative, fd_jacobian, g_adjoint, pi_G, right_chart_g

LEVEL_TOL = 1e-9
REDUCED_TOL = 1e-8

_SU11_G_BASIS = SU11Double().basis[:3]


class LevelSetViolation(ValueError):
    pass


@dataclass(frozen=True)
class CoisotropicSubgroupData:
    h: SubspaceData
    h_perp: SubspaceData
    is_poisson_subgroup: bool

    @classmethod
    def build(cls, g: LieAlgebraData, g_star: LieAlgebraData, h: SubspaceData, poisson: bool) -> CoisotropicSubgroupData:
        hp = annihilator(h)
        ok_h, dh = is_subalgebra(g, h)
        ok_p, dp = is_subalgebra(g_star, hp)
        if not ok_h:
            raise ValueError(f"h is not a subalgebra (defect {dh:.2e})")
        if not ok_p:
            raise ValueError(f"h^perp is not a subalgebra, so H is not coisotropic (defect {dp:.2e})")
        return cls(h, hp, poisson)


# --- model hooks -------------------------------------------------------------


class ReductionHooks:
    """Model-specific pieces of the reduction."""

    h_dim: int
    q_dim: int

    def coset(self, gamma: Point) -> np.ndarray:
        """Label of the class of gamma in G*/H^perp."""
        raise NotImplementedError

    def label(self, gamma: Point) -> np.ndarray:
        """Coordinates of the class of gamma, vanishing exactly on H^perp."""
        raise NotImplementedError

    def h_point(self, theta: np.ndarray) -> Point:
        raise NotImplementedError

    def canonical_h(self, g: Point) -> Point:
        """The h in H that moves g onto the canonical section."""
        raise NotImplementedError

    def quotient(self, g: Point) -> np.ndarray:
        raise NotImplementedError

    def quotient_jacobian(self, g: Point) -> np.ndarray:
        """Derivative of ``quotient`` in the right-trivialized frame of G."""
        raise NotImplementedError

    def section(self, q: np.ndarray) -> Point:
        raise NotImplementedError

    def align_h(self, g_from: Point, g_to: Point) -> Point:
        """h with h g_from = g_to, for points over the same base point."""
        raise NotImplementedError

    def hperp_log(self, gamma: Point) -> np.ndarray:
        """s_H^-1: H^perp -> h^perp, in g* coordinates."""
        raise NotImplementedError

    def hperp_exp(self, xi: np.ndarray) -> Point:
        raise NotImplementedError

    def random_q(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def random_theta(self, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def random_hperp(self, rng: np.random.Generator) -> Point:
        raise NotImplementedError

    def off_level(self, gamma: Point, shift: float) -> Point:
        """A point of G* with label moved by ``shift`` (for negative controls)."""
        raise NotImplementedError


class U1Hooks(ReductionHooks):
    """H = diagonal U(1) in SU(1,1); H^perp = {A = 1}; H\\G = open unit disc, z = beta/alpha."""

    h_dim = 1
    q_dim = 2

    def coset(self, gamma: DualGroupPoint) -> np.ndarray:
        return np.array([gamma.A])

    def label(self, gamma: DualGroupPoint) -> np.ndarray:
        return np.array([gamma.A - 1.0])

    def h_point(self, theta: np.ndarray) -> GroupPoint:
        t = float(np.asarray(theta).reshape(-1)[0])
        return GroupPoint(complex(math.cos(t), math.sin(t)), 0.0)

    def canonical_h(self, g: GroupPoint) -> GroupPoint:
        u = g.alpha.conjugate() / abs(g.alpha)
        return GroupPoint.unchecked(u, 0.0)

    def quotient(self, g: GroupPoint) -> np.ndarray:
        z = g.beta / g.alpha
        return np.array([z.real, z.imag])

    def quotient_jacobian(self, g: GroupPoint) -> np.ndarray:
        # z = beta/alpha along Y g: d alpha = (Y g)_11, d beta = (Y g)_12
        a, b = g.alpha, g.beta
        cols = []
        for y in _SU11_G_BASIS:
            yg = y @ g.matrix()
            dz = (yg[0, 1] * a - b * yg[0, 0]) / (a * a)
            cols.append([dz.real, dz.imag])
        return np.array(cols).T

    def section(self, q: np.ndarray) -> GroupPoint:
        z = complex(q[0], q[1])
        r = abs(z) ** 2
        if not r < 1:
            raise ValueError("disc point must satisfy |z| < 1")
        s = 1.0 / math.sqrt(1.0 - r)
        return GroupPoint(s, s * z)

    def align_h(self, g_from: GroupPoint, g_to: GroupPoint) -> GroupPoint:
        u = g_to.alpha / g_from.alpha
        return GroupPoint.unchecked(u / abs(u), 0.0)

    def hperp_log(self, gamma: DualGroupPoint) -> np.ndarray:
        if abs(gamma.A - 1.0) > LEVEL_TOL:
            raise ValueError("point is not in H^perp")
        return np.array([0.0, gamma.N.imag, -gamma.N.real])

    def hperp_exp(self, xi: np.ndarray) -> DualGroupPoint:
        if abs(xi[0]) > 1e-12:
            raise ValueError("covector is not in h^perp")
        return DualGroupPoint(1.0, 1j * xi[1] - xi[2])

    def random_q(self, rng: np.random.Generator) -> np.ndarray:
        z = 0.9 * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        return np.array([z.real, z.imag])

    def random_theta(self, rng: np.random.Generator) -> np.ndarray:
        return np.array([rng.uniform(-np.pi, np.pi)])

    def random_hperp(self, rng: np.random.Generator) -> DualGroupPoint:
        return DualGroupPoint(1.0, 1.5 * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * np.pi)))

    def off_level(self, gamma: DualGroupPoint, shift: float) -> DualGroupPoint:
        return DualGroupPoint(gamma.A * math.exp(shift), gamma.N)


class CoordinateHooks(ReductionHooks):
    """Abelian model with H = first k coordinates of R^n; H\\G = R^(n-k)."""

    def __init__(self, n: int, k: int) -> None:
        if not 0 < k < n:
            raise ValueError("need 0 < k < n")
        self.n, self.k = n, k
        self.h_dim, self.q_dim = k, n - k

    def _g(self, p: VectorPoint) -> np.ndarray:
        return p.params()[: self.n]

    def _gs(self, p: VectorPoint) -> np.ndarray:
        return p.params()[self.n :]

    def _gpt(self, v: np.ndarray) -> VectorPoint:
        return VectorPoint(tuple(np.concatenate([v, np.zeros(self.n)])))

    def _gspt(self, v: np.ndarray) -> VectorPoint:
        return VectorPoint(tuple(np.concatenate([np.zeros(self.n), v])))

    def coset(self, gamma: VectorPoint) -> np.ndarray:
        return self._gs(gamma)[: self.k]

    def label(self, gamma: VectorPoint) -> np.ndarray:
        return self._gs(gamma)[: self.k]

    def h_point(self, theta: np.ndarray) -> VectorPoint:
        return self._gpt(np.concatenate([np.asarray(theta, float), np.zeros(self.n - self.k)]))

    def canonical_h(self, g: VectorPoint) -> VectorPoint:
        return self.h_point(-self._g(g)[: self.k])

    def quotient(self, g: VectorPoint) -> np.ndarray:
        return self._g(g)[self.k :]

    def quotient_jacobian(self, g: VectorPoint) -> np.ndarray:
        return np.eye(self.n)[self.k :]

    def section(self, q: np.ndarray) -> VectorPoint:
        return self._gpt(np.concatenate([np.zeros(self.k), np.asarray(q, float)]))

    def align_h(self, g_from: VectorPoint, g_to: VectorPoint) -> VectorPoint:
        return self.h_point((self._g(g_to) - self._g(g_from))[: self.k])

    def hperp_log(self, gamma: VectorPoint) -> np.ndarray:
        v = self._gs(gamma)
        if np.any(np.abs(v[: self.k]) > LEVEL_TOL):
            raise ValueError("point is not in H^perp")
        return v

    def hperp_exp(self, xi: np.ndarray) -> VectorPoint:
        return self._gspt(np.asarray(xi, float))

    def random_q(self, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(-16, 17, self.n - self.k) / 8.0

    def random_theta(self, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(-16, 17, self.k) / 8.0

    def random_hperp(self, rng: np.random.Generator) -> VectorPoint:
        return self._gspt(np.concatenate([np.zeros(self.k), rng.integers(-16, 17, self.n - self.k) / 8.0]))

    def off_level(self, gamma: VectorPoint, shift: float) -> VectorPoint:
        v = self._gs(gamma).copy()
        v[0] += shift
        return self._gspt(v)


# --- reduced elements --------------------------------------------------------


@dataclass(frozen=True)
class ReducedElement:
    rep: GroupoidElement
    base: np.ndarray  # quotient coordinates of g1
    residuals: dict[str, float] = field(default_factory=dict)

    @property
    def z(self) -> complex:
        return complex(self.base[0], self.base[1]) if len(self.base) == 2 else complex("nan")

    def to_json(self) -> dict[str, Any]:
        g1 = self.rep.gamma1
        out: dict[str, Any] = {"z": [float(v) for v in self.base]}
        if isinstance(g1, DualGroupPoint):
            out["gamma1"] = {"A": g1.A, "N": [g1.N.real, g1.N.imag]}
            out["gamma2"] = {"N": [self.rep.gamma2.N.real, self.rep.gamma2.N.imag]}
        else:
            out["gamma1"] = {"coords": [float(v) for v in g1.params()]}
            out["gamma2"] = {"coords": [float(v) for v in self.rep.gamma2.params()]}
        out["residuals"] = dict(self.residuals)
        return out


class Reduction:
    def __init__(self, omega: Omega, hooks: ReductionHooks, subgroup: CoisotropicSubgroupData) -> None:
        self.omega = omega
        self.double: MatrixDouble = omega.double
        self.hooks = hooks
        self.subgroup = subgroup

    # momentum map and level set
    def J_H(self, x: GroupoidElement) -> np.ndarray:
        return self.hooks.coset(x.gamma2)

    def level_defect(self, x: GroupoidElement) -> float:
        return float(np.max(np.abs(self.hooks.label(x.gamma2))))

    def level_set_contains(self, x: GroupoidElement, tol: float = LEVEL_TOL) -> bool:
        return self.level_defect(x) <= tol

    def _require_level(self, x: GroupoidElement) -> None:
        if not self.level_set_contains(x):
            raise LevelSetViolation(f"element is off the level set by {self.level_defect(x):.2e}")

    # H-action
    def h_act(self, h: Point, x: GroupoidElement, check: bool = True) -> GroupoidElement:
        if check:
            self._require_level(x)
        d = self.double
        left, right = dress(d, h, x.gamma2)
        return self.omega.element(d.g_mul(h, x.g1), x.gamma1, left, d.g_mul(right, x.g2))

    def canonicalize(self, x: GroupoidElement) -> ReducedElement:
        self._require_level(x)
        rep = self.h_act(self.hooks.canonical_h(x.g1), x)
        return ReducedElement(rep, self.hooks.quotient(rep.g1), {"omega": rep.residual, "level": self.level_defect(rep)})

    def class_distance(self, a: ReducedElement, b: ReducedElement) -> float:
        return element_distance(a.rep, b.rep)

    # reduced groupoid
    def reduced_source(self, a: ReducedElement) -> np.ndarray:
        return self.hooks.quotient(a.rep.g1)

    def reduced_target(self, a: ReducedElement) -> np.ndarray:
        return self.hooks.quotient(a.rep.g2)

    def reduced_unit(self, q: np.ndarray) -> ReducedElement:
        return self.canonicalize(self.omega.unit_G(self.hooks.section(q)))

    def reduced_inverse(self, a: ReducedElement) -> ReducedElement:
        return self.canonicalize(self.omega.inverse_G(a.rep))

    def reduced_mult(self, a: ReducedElement, b: ReducedElement, h_shift: Point | None = None) -> ReducedElement:
        """Compose classes: shift b's representative by H so it starts where a ends.

        ``h_shift`` optionally moves a's representative first (the result must not
        depend on it).
        """
        ta, sb = self.reduced_target(a), self.reduced_source(b)
        gap = float(np.max(np.abs(ta - sb)))
        if not gap <= REDUCED_TOL:
            raise NotComposable(f"reduced target and source differ by {gap:.2e}")
        x = a.rep if h_shift is None else self.h_act(h_shift, a.rep)
        y = self.h_act(self.hooks.align_h(b.rep.g1, x.g2), b.rep)
        # same base point up to REDUCED_TOL: rebuild y exactly over x.g2
        y = self.omega.make_from_target(x.g2, y.gamma2)
        return self.canonicalize(self.omega.mult_G(x, y))

    # sampling
    def random_level_element(self, rng: np.random.Generator, q: np.ndarray | None = None, tries: int = 1000) -> GroupoidElement:
        hk = self.hooks
        for _ in range(tries):
            qq = hk.random_q(rng) if q is None else q
            g1 = self.double.g_mul(hk.h_point(hk.random_theta(rng)), hk.section(qq))
            try:
                return self.omega.make_from_target(g1, hk.random_hperp(rng))
            except NotFactorizable:
                continue
        raise RuntimeError("could not sample a level-set element")

    def random_reduced(self, rng: np.random.Generator, q: np.ndarray | None = None) -> ReducedElement:
        return self.canonicalize(self.random_level_element(rng, q))

    def random_reduced_after(self, rng: np.random.Generator, a: ReducedElement) -> ReducedElement:
        return self.random_reduced(rng, self.reduced_target(a))

    def off_level_element(self, x: GroupoidElement, shift: float = 0.1) -> GroupoidElement:
        return self.omega.make_from_target(x.g1, self.hooks.off_level(x.gamma2, shift))

    # coisotropy
    def coisotropy_defect(self, x: GroupoidElement, step: float = FD_STEP) -> dict[str, float]:
        """Residuals of the conormal/characteristic identities at x.

        ``tangency``: pi_+^sharp of each conormal covector [TJ]^* X, X in h, is
        annihilated by dJ_H.  ``fundamental``: it equals minus the H-action
        fundamental field.  ``membership``: distance of x to the level set.
        """
        om, d, hk = self.omega, self.double, self.hooks
        q = om.pi_plus(x).mat
        tj = om.J_jacobian(x, step)
        lab = om.map_jacobian(x, lambda y: hk.label(y.gamma2), step)
        coords = om.mixed_coords(x)
        basis = self.subgroup.h.basis_vectors
        tang = fund = 0.0
        for X in basis:
            v = q @ (tj.T @ X)
            tang = max(tang, float(np.max(np.abs(lab @ v))))

            def curve(t: float) -> np.ndarray:
                return coords(self.h_act(d.exp_g(t * X), x, check=False))

            sigma = fd_derivative(curve, step)
            fund = max(fund, float(np.max(np.abs(sigma + v))))
        return {"tangency": tang, "fundamental": fund, "membership": self.level_defect(x)}

    def coisotropy_total(self, x: GroupoidElement, step: float = FD_STEP) -> float:
        return max(self.coisotropy_defect(x, step).values())

    # Poisson structure on the base
    def coinduced_bivector(self, q: np.ndarray, g: Point | None = None) -> np.ndarray:
        """Push pi_G forward through the quotient map, from g (default: the section point)."""
        g = self.hooks.section(q) if g is None else g
        t = self.hooks.quotient_jacobian(g)
        return t @ pi_G(self.double, g).mat @ t.T

    def quotient_pushforward_defect(self, g: Point, step: float = FD_STEP) -> float:
        """Finite-difference pushforward of pi_G through the quotient, against the coinduced bivector."""
        chart = right_chart_g(self.double, g)
        jac = fd_jacobian(lambda x: self.hooks.quotient(chart(x)), self.double.n, step)
        pushed = jac @ pi_G(self.double, g).mat @ jac.T
        return float(np.max(np.abs(pushed - self.coinduced_bivector(self.hooks.quotient(g)))))

    def base_map_defect(self, x: GroupoidElement, which: str = "source", step: float = FD_STEP) -> float:
        """pi_+ pushed through the reduced source (or target) against the coinduced bivector."""
        hk = self.hooks
        comp, sign = ("g1", 1) if which == "source" else ("g2", -1)
        jac = self.omega.map_jacobian(x, lambda y: hk.quotient(getattr(y, comp)), step)
        pushed = jac @ self.omega.pi_plus(x).mat @ jac.T
        target = self.coinduced_bivector(hk.quotient(getattr(x, comp)))
        return float(np.max(np.abs(pushed - sign * target)))

    def invariant_coords(self, y: GroupoidElement) -> np.ndarray:
        """H-invariant functions on Omega restricting to a chart of the quotient: (q(g1), log of canonical gamma2)."""
        hk = self.hooks
        h = hk.canonical_h(y.g1)
        left, _ = dress(self.double, h, y.gamma2)
        return np.concatenate([hk.quotient(y.g1), self._hperp_coords(left)])

    def _hperp_coords(self, gamma: Point) -> np.ndarray:
        # linear coordinates of gamma - 1 on h^perp: equal to log on H^perp, smooth off it
        d = self.double
        raw = d.expand_array(d.embed(gamma) - np.eye(d.size), check=False)[d.n :]
        return self.subgroup.h_perp.basis_vectors @ raw

    def reduced_bivector(self, x: GroupoidElement, step: float = FD_STEP, bump: float = 0.0) -> np.ndarray:
        """Reduced Poisson bivector in the invariant chart at the class of x.

        ``bump`` adds a multiple of J_H to the chart functions; on the level set
        the result must not change.
        """
        def f(y: GroupoidElement) -> np.ndarray:
            c = self.invariant_coords(y)
            return c + bump * float(np.sum(self.hooks.label(y.gamma2))) * np.arange(1, len(c) + 1)

        jac = self.omega.map_jacobian(x, f, step)
        return jac @ self.omega.pi_plus(x).mat @ jac.T

    # cotangent chart
    def cotangent_chart(self, a: ReducedElement | GroupoidElement) -> np.ndarray:
        """The covector Ad*_{g^-1} log(^g gamma1) at the base point, in quotient coordinates.

        Works from any representative (g1 need not be on the canonical section).
        """
        x = a.rep if isinstance(a, ReducedElement) else a
        self._require_level(x)
        xi = self.hooks.hperp_log(x.gamma2)
        mu = g_adjoint(self.double, x.g1).T @ xi  # left-trivialized covector at g1
        t_left = self.hooks.quotient_jacobian(x.g1) @ g_adjoint(self.double, x.g1)
        omega, *_ = np.linalg.lstsq(t_left.T, mu, rcond=None)
        return omega

    def cotangent_section_defect(self, a: ReducedElement, h: Point) -> float:
        """Change the section by an H-valued phase: the covector must not move."""
        return float(np.max(np.abs(self.cotangent_chart(a) - self.cotangent_chart(self.h_act(h, a.rep)))))

    def cotangent_descent_defect(self, a: ReducedElement) -> float:
        """How far mu is from vanishing on the H-orbit direction (it must vanish)."""
        x = a.rep
        xi = self.hooks.hperp_log(x.gamma2)
        mu = g_adjoint(self.double, x.g1).T @ xi
        t_left = self.hooks.quotient_jacobian(x.g1) @ g_adjoint(self.double, x.g1)
        omega = self.cotangent_chart(a)
        return float(np.max(np.abs(t_left.T @ omega - mu)))

    def intertwining_defect(self, h: Point, xi: np.ndarray) -> float:
        """s_H(Ad*_h xi) against ^h s_H(xi) for xi in h^perp."""
        d = self.double
        n = d.n
        ad = d.ad_matrix(d.embed(h))
        co = ad[n:, n:] @ np.asarray(xi, float)  # g*-block of Ad_h on g*
        lhs = self.hooks.hperp_exp(co)
        rhs, _ = dress(d, h, self.hooks.hperp_exp(xi))
        return param_distance(lhs, rhs)


def reduced_distance(a: ReducedElement, b: ReducedElement) -> float:
    return element_distance(a.rep, b.rep)
