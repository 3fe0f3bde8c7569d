"""Registered model instances.

Structure constants are always extracted from the explicit matrices of the
double at build time; the duality of the two bases and the bialgebra
identities are checked before a model is handed out.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .algebra import (
    LieAlgebraData,
    LieBialgebraData,
    SubspaceData,
    cocycle_defect,
    double_jacobi_defect,
    jacobi_defect,
    pairing_invariance_defect,
)
from .groupoid import Omega
from .groups import AbelianDouble, MatrixDouble, SU11Double
from .reduction import CoisotropicSubgroupData, CoordinateHooks, Reduction, ReductionHooks, U1Hooks

REGISTRATION_TOL = 1e-12


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Model:
    name: str
    bialgebra: LieBialgebraData
    double: MatrixDouble
    subgroup: CoisotropicSubgroupData
    hooks: ReductionHooks
    omega: Omega
    reduction: Reduction
    registration_defects: dict[str, float]


def structure_constants_from_matrices(double: MatrixDouble) -> tuple[np.ndarray, np.ndarray]:
    """Structure constants of g and g* from matrix commutators, expanded in the double basis."""
    n = double.n
    b = double.basis
    c = np.zeros((n, n, n))
    cs = np.zeros((n, n, n))
    for i in range(n):
        for j in range(n):
            u = double.expand_array(b[i] @ b[j] - b[j] @ b[i])
            w = double.expand_array(b[n + i] @ b[n + j] - b[n + j] @ b[n + i])
            if np.max(np.abs(u[n:])) > REGISTRATION_TOL or np.max(np.abs(w[:n])) > REGISTRATION_TOL:
                raise ModelError("a basis half does not close under the commutator")
            c[i, j], cs[i, j] = u[:n], w[n:]
    return c, cs


def _assemble(name: str, double: MatrixDouble, labels: tuple[list[str], list[str]], h: SubspaceData, hooks: ReductionHooks, poisson: bool) -> Model:
    dual = double.duality_defect()
    if dual > REGISTRATION_TOL:
        raise ModelError(f"bases are not dual under the pairing (defect {dual:.2e})")
    c, cs = structure_constants_from_matrices(double)
    g = LieAlgebraData(c, labels[0])
    gs = LieAlgebraData(cs, labels[1])
    bi = LieBialgebraData(g, gs)
    defects = {
        "jacobi_g": jacobi_defect(g),
        "jacobi_gstar": jacobi_defect(gs),
        "cocycle": cocycle_defect(bi),
        "pairing_invariance": pairing_invariance_defect(bi),
        "double_jacobi": double_jacobi_defect(bi),
        "duality": dual,
    }
    bad = {k: v for k, v in defects.items() if v > REGISTRATION_TOL}
    if bad:
        raise ModelError(f"registration defects too large: {bad}")
    sub = CoisotropicSubgroupData.build(g, gs, h, poisson)
    omega = Omega(double)
    return Model(name, bi, double, sub, hooks, omega, Reduction(omega, hooks, sub), defects)


def build_su11() -> Model:
    """sl(2,C) = su(1,1) + sb(2,C) with <A,B> = Im Tr(AB); H = exp(span e0)."""
    double = SU11Double()
    h = SubspaceData.span(3, [[1.0, 0.0, 0.0]])
    return _assemble("su11", double, (["e0", "e1", "e2"], ["f0", "f1", "f2"]), h, U1Hooks(), True)


def build_trivial(n: int = 3, k: int = 1) -> Model:
    """Abelian R^n x R^n with zero Poisson structures; H = first k coordinates."""
    if n < 1:
        raise ModelError("n must be >= 1")
    double = AbelianDouble(n)
    labels = ([f"e{i}" for i in range(n)], [f"f{i}" for i in range(n)])
    h = SubspaceData.coordinate(n, range(k))
    return _assemble("trivial", double, labels, h, CoordinateHooks(n, k), True)


REGISTRY: dict[str, Callable[[], Model]] = {"su11": build_su11, "trivial": build_trivial}


@lru_cache(maxsize=None)
def get_model(name: str) -> Model:
    try:
        return REGISTRY[name]()
    except KeyError:
        raise ModelError(f"unknown model {name!r}; choose from {sorted(REGISTRY)}") from None
