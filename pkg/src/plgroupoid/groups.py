"""Matrix models of G, G* and the double D.

A double is any object implementing the :class:`MatrixDouble` contract:
embedding of group points as matrices, re-expansion of algebra matrices in
the basis ``(e_1..e_n, f^1..f^n)``, exponentials and the two factorization
orders.  Two are provided: SU(1,1) x SB(2,C) inside SL(2,C), and the abelian
double R^n x R^n realized by unipotent translation matrices.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .algebra import DoubleVector, pairing_matrix

MEMBERSHIP_TOL = 1e-10
EXPANSION_TOL = 1e-9


class NotFactorizable(ArithmeticError):
    """Raised when a double element has no factorization in the requested order.

    This marks the incompleteness locus and is expected behaviour.
    """

    def __init__(self, margin: float, order: "Order"):
        super().__init__(f"no {order.value} factorization (margin={margin:.3e})")
        self.margin = margin
        self.order = order


class Order(enum.Enum):
    G_GSTAR = "G_Gstar"
    GSTAR_G = "Gstar_G"


class Frame(enum.Enum):
    LEFT = "left_trivialized"
    RIGHT = "right_trivialized"
    MIXED = "mixed_lg_rgamma"


@dataclass(frozen=True)
class FrameVector:
    coords: np.ndarray
    frame: Frame

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", np.asarray(self.coords, dtype=float).reshape(-1))
        object.__setattr__(self, "frame", Frame(self.frame))


# --- point types -----------------------------------------------------------


@dataclass(frozen=True)
class GroupPoint:
    """Element [[alpha, beta], [conj beta, conj alpha]] of SU(1,1)."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        a, b = complex(self.alpha), complex(self.beta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        if abs(self.det() - 1.0) > MEMBERSHIP_TOL * max(1.0, abs(a) ** 2):
            raise ValueError(f"|alpha|^2 - |beta|^2 = {self.det()!r}, not 1")

    def det(self) -> float:
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2

    def matrix(self) -> np.ndarray:
        a, b = self.alpha, self.beta
        return np.array([[a, b], [b.conjugate(), a.conjugate()]])

    def params(self) -> np.ndarray:
        return np.array([self.alpha.real, self.alpha.imag, self.beta.real, self.beta.imag])

    def renormalized(self) -> GroupPoint:
        s = 1.0 / math.sqrt(self.det())
        return GroupPoint(self.alpha * s, self.beta * s)

    def to_json(self) -> dict[str, Any]:
        return {"alpha": [self.alpha.real, self.alpha.imag], "beta": [self.beta.real, self.beta.imag]}

    @classmethod
    def unchecked(cls, alpha: complex, beta: complex) -> GroupPoint:
        """Build from raw (alpha, beta) and renormalize onto the hyperboloid."""
        d = abs(alpha) ** 2 - abs(beta) ** 2
        if not d > 0:
            raise ValueError("parameters are not close to SU(1,1)")
        s = 1.0 / math.sqrt(d)
        return cls(alpha * s, beta * s)


@dataclass(frozen=True)
class DualGroupPoint:
    """Element [[A, N], [0, 1/A]] of SB(2,C)."""

    A: float
    N: complex

    def __post_init__(self) -> None:
        A = float(self.A)
        if not (A > 0 and math.isfinite(A)):
            raise ValueError(f"A must be positive, got {A}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "N", complex(self.N))

    def matrix(self) -> np.ndarray:
        return np.array([[self.A, self.N], [0.0, 1.0 / self.A]], dtype=complex)

    def params(self) -> np.ndarray:
        return np.array([self.A, self.N.real, self.N.imag])

    def to_json(self) -> dict[str, Any]:
        return {"A": self.A, "N": [self.N.real, self.N.imag]}


@dataclass(frozen=True)
class VectorPoint:
    """Point of the abelian group R^n."""

    coords: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))

    def params(self) -> np.ndarray:
        return np.array(self.coords)

    def to_json(self) -> dict[str, Any]:
        return {"coords": list(self.coords)}


Point = Union[GroupPoint, DualGroupPoint, VectorPoint]


def param_distance(p: Point, q: Point) -> float:
    return float(np.max(np.abs(p.params() - q.params())))


@dataclass(frozen=True)
class Factorization:
    g: Point
    gamma: Point
    order: Order
    margin: float


# --- the double contract ---------------------------------------------------


class MatrixDouble:
    """Shared machinery; subclasses supply the model-specific hooks."""

    name: str = "abstract"
    n: int
    basis: np.ndarray  # (2n, m, m) complex, order e_1..e_n, f^1..f^n

    # hooks
    def embed(self, p: Point) -> np.ndarray:
        raise NotImplementedError

    def g_from_matrix(self, m: np.ndarray, renormalize: bool = False) -> Point:
        raise NotImplementedError

    def gstar_from_matrix(self, m: np.ndarray, renormalize: bool = False) -> Point:
        raise NotImplementedError

    def margin(self, d: np.ndarray, order: Order) -> float:
        raise NotImplementedError

    def factorize(self, d: np.ndarray, order: Order) -> Factorization:
        raise NotImplementedError

    def matrix_pairing(self, a: np.ndarray, b: np.ndarray) -> float:
        raise NotImplementedError

    def expm(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    # generic operations
    @property
    def size(self) -> int:
        return self.basis.shape[1]

    @property
    def identity_g(self) -> Point:
        return self.g_from_matrix(np.eye(self.size, dtype=complex))

    @property
    def identity_gstar(self) -> Point:
        return self.gstar_from_matrix(np.eye(self.size, dtype=complex))

    def realize(self, u: DoubleVector | np.ndarray) -> np.ndarray:
        v = u.as_array() if isinstance(u, DoubleVector) else np.asarray(u, dtype=float)
        return np.einsum("a,aij->ij", v, self.basis)

    def expand_array(self, m: np.ndarray, check: bool = True) -> np.ndarray:
        """Coordinates of an algebra matrix in the (e, f) basis."""
        flat = np.concatenate([m.real.ravel(), m.imag.ravel()])
        coords = self._pinv @ flat
        if check:
            res = np.max(np.abs(self.realize(coords) - m))
            if res > EXPANSION_TOL * max(1.0, float(np.max(np.abs(m)))):
                raise ValueError(f"matrix is not in the double algebra (residual {res:.2e})")
        return coords

    def expand(self, m: np.ndarray, check: bool = True) -> DoubleVector:
        return DoubleVector.from_array(self.expand_array(m, check))

    @property
    def _pinv(self) -> np.ndarray:
        cached = self.__dict__.get("_pinv_cache")
        if cached is None:
            cols = np.stack([np.concatenate([b.real.ravel(), b.imag.ravel()]) for b in self.basis], 1)
            cached = np.linalg.pinv(cols)
            self.__dict__["_pinv_cache"] = cached
        return cached

    def pairing_gram(self) -> np.ndarray:
        b = self.basis
        return np.array([[self.matrix_pairing(x, y) for y in b] for x in b])

    def duality_defect(self) -> float:
        return float(np.max(np.abs(self.pairing_gram() - pairing_matrix(self.n))))

    def ad_double(self, d: np.ndarray, u: DoubleVector | np.ndarray) -> DoubleVector:
        return DoubleVector.from_array(self.ad_array(d, u))

    def ad_array(self, d: np.ndarray, u: DoubleVector | np.ndarray) -> np.ndarray:
        return self.expand_array(d @ self.realize(u) @ np.linalg.inv(d))

    def ad_matrix(self, d: np.ndarray) -> np.ndarray:
        """Matrix of Ad_d on the double, columns = images of basis vectors."""
        dinv = np.linalg.inv(d)
        return np.stack([self.expand_array(d @ b @ dinv) for b in self.basis], 1)

    def g_mul(self, a: Point, b: Point) -> Point:
        return self.g_from_matrix(self.embed(a) @ self.embed(b))

    def g_inv(self, a: Point) -> Point:
        return self.g_from_matrix(np.linalg.inv(self.embed(a)))

    def gstar_mul(self, a: Point, b: Point) -> Point:
        return self.gstar_from_matrix(self.embed(a) @ self.embed(b))

    def gstar_inv(self, a: Point) -> Point:
        return self.gstar_from_matrix(np.linalg.inv(self.embed(a)))

    def exp_d(self, u: DoubleVector | np.ndarray) -> np.ndarray:
        return self.expm(self.realize(u))

    def exp_g(self, x: np.ndarray) -> Point:
        n = self.n
        return self.g_from_matrix(self.exp_d(np.concatenate([x, np.zeros(n)])), renormalize=True)

    def exp_gstar(self, xi: np.ndarray) -> Point:
        n = self.n
        return self.gstar_from_matrix(self.exp_d(np.concatenate([np.zeros(n), xi])), renormalize=True)

    def algebra_pairing(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.asarray(u) @ pairing_matrix(self.n) @ np.asarray(v))


def project(u: DoubleVector, part: str) -> DoubleVector:
    """Natural projection onto the ``"g"`` or ``"g*"`` block."""
    z = np.zeros(u.n)
    if part == "g":
        return DoubleVector(u.x, z)
    if part in ("g*", "gstar"):
        return DoubleVector(z, u.xi)
    raise ValueError(f"unknown part {part!r}")


# --- SU(1,1) inside SL(2,C) ------------------------------------------------


def expm_traceless2(x: np.ndarray) -> np.ndarray:
    """Exact exponential of a traceless 2x2 complex matrix.

    Uses X^2 = -det(X) I, so exp(X) = cosh(s) I + sinh(s)/s X with s^2 = -det X.
    """
    q = -(x[0, 0] * x[1, 1] - x[0, 1] * x[1, 0])
    if abs(q) < 1e-6:
        c = 1 + q / 2 + q * q / 24 + q**3 / 720
        s = 1 + q / 6 + q * q / 120 + q**3 / 5040
    else:
        r = np.sqrt(complex(q))
        c = np.cosh(r)
        s = np.sinh(r) / r
    return c * np.eye(2) + s * x


class SU11Double(MatrixDouble):
    """SL(2,C) = SU(1,1) . SB(2,C) with pairing <A, B> = Im Tr(AB)."""

    name = "su11"
    n = 3

    def __init__(self) -> None:
        e0 = np.array([[1j, 0], [0, -1j]])
        e1 = np.array([[0, 1], [1, 0]], dtype=complex)
        e2 = np.array([[0, 1j], [-1j, 0]])
        f0 = np.array([[0.5, 0], [0, -0.5]], dtype=complex)
        f1 = np.array([[0, 1j], [0, 0]])
        f2 = np.array([[0, -1], [0, 0]], dtype=complex)
        self.basis = np.array([e0, e1, e2, f0, f1, f2])

    def matrix_pairing(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.trace(a @ b).imag)

    def expand_array(self, m: np.ndarray, check: bool = True) -> np.ndarray:
        # dual basis of (e, f) under Im Tr is (f, e)
        b = self.basis
        x = [np.trace(m @ b[3 + i]).imag for i in range(3)]
        xi = [np.trace(m @ b[i]).imag for i in range(3)]
        coords = np.array(x + xi)
        if check:
            res = np.max(np.abs(self.realize(coords) - m))
            if res > EXPANSION_TOL * max(1.0, float(np.max(np.abs(m)))):
                raise ValueError(f"matrix is not in sl(2,C) (residual {res:.2e})")
        return coords

    def expm(self, x: np.ndarray) -> np.ndarray:
        return expm_traceless2(x)

    def embed(self, p: Point) -> np.ndarray:
        if isinstance(p, (GroupPoint, DualGroupPoint)):
            return p.matrix()
        raise TypeError(f"cannot embed {type(p).__name__} in SL(2,C)")

    def g_from_matrix(self, m: np.ndarray, renormalize: bool = False) -> GroupPoint:
        a, b = complex(m[0, 0]), complex(m[0, 1])
        scale = max(1.0, abs(a))
        if abs(m[1, 0] - b.conjugate()) > 1e-9 * scale or abs(m[1, 1] - a.conjugate()) > 1e-9 * scale:
            raise ValueError("matrix is not in SU(1,1)")
        if renormalize:
            return GroupPoint.unchecked(a, b)
        return GroupPoint(a, b)

    def gstar_from_matrix(self, m: np.ndarray, renormalize: bool = False) -> DualGroupPoint:
        A = m[0, 0]
        scale = max(1.0, abs(A), abs(m[1, 1]))
        if abs(m[1, 0]) > 1e-9 * scale or abs(A.imag) > 1e-9 * scale or not A.real > 0:
            raise ValueError("matrix is not in SB(2,C)")
        if abs(m[1, 1] * A - 1) > 1e-9 * scale and not renormalize:
            raise ValueError("matrix is not in SB(2,C)")
        return DualGroupPoint(A.real, complex(m[0, 1]))

    def margin(self, d: np.ndarray, order: Order) -> float:
        if order is Order.G_GSTAR:
            return float(abs(d[0, 0]) ** 2 - abs(d[1, 0]) ** 2)
        return float(abs(d[1, 1]) ** 2 - abs(d[1, 0]) ** 2)

    def factorize(self, d: np.ndarray, order: Order) -> Factorization:
        order = Order(order)
        m = self.margin(d, order)
        if not m > 0:
            raise NotFactorizable(m, order)
        if order is Order.G_GSTAR:
            # d = g gamma: d11 = alpha A, d21 = conj(beta) A, d12 = alpha N + beta / A
            A = math.sqrt(m)
            alpha = d[0, 0] / A
            beta = (d[1, 0] / A).conjugate()
            assert abs(alpha) >= abs(beta)
            N = (d[0, 1] - beta / A) / alpha
            g, gamma = GroupPoint.unchecked(alpha, beta), DualGroupPoint(A, N)
            rec = g.matrix() @ gamma.matrix()
        else:
            # d = gamma g: d22 = conj(alpha) / A, d21 = conj(beta) / A, d12 = A beta + N conj(alpha)
            A = 1.0 / math.sqrt(m)
            alpha = (d[1, 1] * A).conjugate()
            beta = (d[1, 0] * A).conjugate()
            assert abs(alpha) >= abs(beta)
            N = (d[0, 1] - A * beta) / alpha.conjugate()
            g, gamma = GroupPoint.unchecked(alpha, beta), DualGroupPoint(A, N)
            rec = gamma.matrix() @ g.matrix()
        res = float(np.max(np.abs(rec - d)))
        if res > 1e-10 * max(1.0, float(np.max(np.abs(d)))):
            raise ArithmeticError(f"factorization residual {res:.2e}")
        return Factorization(g, gamma, order, m)

    # exact exponentials on the two subgroups
    def exp_g(self, x: np.ndarray) -> GroupPoint:
        e = expm_traceless2(self.realize(np.concatenate([x, np.zeros(3)])))
        return GroupPoint.unchecked(e[0, 0], e[0, 1])

    def exp_gstar(self, xi: np.ndarray) -> DualGroupPoint:
        # [[lam, n], [0, -lam]] -> [[e^lam, n sinh(lam)/lam], [0, e^-lam]]
        lam = xi[0] / 2
        n = 1j * xi[1] - xi[2]
        s = 1.0 if abs(lam) < 1e-12 else math.sinh(lam) / lam
        return DualGroupPoint(math.exp(lam), n * s)

    # sampling
    def random_g(self, rng: np.random.Generator, scale: float = 2.0) -> GroupPoint:
        r = scale * math.sqrt(rng.uniform())
        b = r * np.exp(1j * rng.uniform(0, 2 * np.pi))
        a = math.sqrt(1 + r * r) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        return GroupPoint.unchecked(a, b)

    def random_gstar(self, rng: np.random.Generator, scale: float = 2.0) -> DualGroupPoint:
        A = math.exp(rng.uniform(-math.log(2), math.log(2)))
        N = scale * math.sqrt(rng.uniform()) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        return DualGroupPoint(A, N)

    def random_algebra(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        return scale * rng.standard_normal(3)


# --- abelian double --------------------------------------------------------


class AbelianDouble(MatrixDouble):
    """R^n x R^n realized as translations: v -> [[I, v], [0, 1]]."""

    def __init__(self, n: int) -> None:
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.name = f"trivial{n}"
        m = 2 * n + 1
        basis = np.zeros((2 * n, m, m), dtype=complex)
        for a in range(2 * n):
            basis[a, a, m - 1] = 1.0
        self.basis = basis

    def matrix_pairing(self, a: np.ndarray, b: np.ndarray) -> float:
        n = self.n
        u, v = a[: 2 * n, -1].real, b[: 2 * n, -1].real
        return float(u[:n] @ v[n:] + u[n:] @ v[:n])

    def expand_array(self, m: np.ndarray, check: bool = True) -> np.ndarray:
        coords = m[: 2 * self.n, -1].real.copy()
        if check:
            res = np.max(np.abs(self.realize(coords) - m))
            if res > EXPANSION_TOL * max(1.0, float(np.max(np.abs(m)))):
                raise ValueError("matrix is not a translation generator")
        return coords

    def expm(self, x: np.ndarray) -> np.ndarray:
        # generators square to zero
        return np.eye(self.size, dtype=complex) + x

    def embed(self, p: Point) -> np.ndarray:
        if not isinstance(p, VectorPoint) or len(p.coords) != 2 * self.n:
            raise TypeError("expected a VectorPoint of length 2n")
        m = np.eye(self.size, dtype=complex)
        m[: 2 * self.n, -1] = p.coords
        return m

    def _point(self, m: np.ndarray, block: slice) -> VectorPoint:
        v = m[: 2 * self.n, -1].real.copy()
        other = np.ones(2 * self.n, bool)
        other[block] = False
        scale = max(1.0, float(np.max(np.abs(v))))
        if np.max(np.abs(m[:, :-1] - np.eye(self.size)[:, :-1])) > 1e-9 or np.any(
            np.abs(v[other]) > 1e-9 * scale
        ):
            raise ValueError("matrix is not in the requested subgroup")
        v[other] = 0.0
        return VectorPoint(tuple(v))

    def g_from_matrix(self, m: np.ndarray, renormalize: bool = False) -> VectorPoint:
        return self._point(m, slice(0, self.n))

    def gstar_from_matrix(self, m: np.ndarray, renormalize: bool = False) -> VectorPoint:
        return self._point(m, slice(self.n, 2 * self.n))

    def g_point(self, x) -> VectorPoint:
        return VectorPoint(tuple(np.concatenate([np.asarray(x, float), np.zeros(self.n)])))

    def gstar_point(self, xi) -> VectorPoint:
        return VectorPoint(tuple(np.concatenate([np.zeros(self.n), np.asarray(xi, float)])))

    def margin(self, d: np.ndarray, order: Order) -> float:
        return 1.0

    def factorize(self, d: np.ndarray, order: Order) -> Factorization:
        v = self.expand_array(d - np.eye(self.size))
        n = self.n
        return Factorization(self.g_point(v[:n]), self.gstar_point(v[n:]), Order(order), 1.0)

    def exp_g(self, x: np.ndarray) -> VectorPoint:
        return self.g_point(x)

    def exp_gstar(self, xi: np.ndarray) -> VectorPoint:
        return self.gstar_point(xi)

    # dyadic samples keep finite-difference arithmetic exact in the null control
    def random_g(self, rng: np.random.Generator, scale: float = 2.0) -> VectorPoint:
        return self.g_point(rng.integers(-16, 17, self.n) / 8.0)

    def random_gstar(self, rng: np.random.Generator, scale: float = 2.0) -> VectorPoint:
        return self.gstar_point(rng.integers(-16, 17, self.n) / 8.0)

    def random_algebra(self, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
        return rng.integers(-8, 9, self.n) / 8.0
