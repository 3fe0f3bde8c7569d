"""Structure-constant computations on finite-dimensional Lie bialgebras.

All tensors are dense float arrays.  ``c[i, j, k]`` is the coefficient of
``e_k`` in ``[e_i, e_j]``.  Vectors of the double are stored with the
``g`` block first and the ``g*`` block second, i.e. in the basis
``(e_1..e_n, f^1..f^n)`` with ``<e_i, f^j> = delta_ij``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.linalg import null_space

SPAN_TOL = 1e-10


@dataclass(frozen=True)
class LieAlgebraData:
    c: np.ndarray
    basis_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        c = np.asarray(self.c, dtype=float)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise ValueError(f"structure tensor must be n x n x n, got {c.shape}")
        if not np.allclose(c, -c.transpose(1, 0, 2), atol=1e-12, rtol=0):
            raise ValueError("structure constants are not antisymmetric in (i, j)")
        object.__setattr__(self, "c", c)
        labels = tuple(self.basis_labels) or tuple(f"e{i}" for i in range(c.shape[0]))
        if len(labels) != c.shape[0]:
            raise ValueError("basis_labels length does not match dimension")
        object.__setattr__(self, "basis_labels", labels)

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    def ad(self, x: np.ndarray) -> np.ndarray:
        """Matrix of ad_x, acting on coordinate column vectors."""
        return np.einsum("i,ijk->kj", np.asarray(x, dtype=float), self.c)

    @classmethod
    def abelian(cls, n: int, prefix: str = "e") -> LieAlgebraData:
        return cls(np.zeros((n, n, n)), tuple(f"{prefix}{i}" for i in range(n)))


@dataclass(frozen=True)
class LieBialgebraData:
    """A Lie algebra ``g`` and a bracket on its dual, in dual bases."""

    g: LieAlgebraData
    g_star: LieAlgebraData

    def __post_init__(self) -> None:
        if self.g.dim != self.g_star.dim:
            raise ValueError("g and g* must have the same dimension")

    @property
    def dim(self) -> int:
        return self.g.dim


@dataclass(frozen=True)
class DoubleVector:
    """``X + xi`` in the double, ``x`` in the e-basis and ``xi`` in the f-basis."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float).reshape(-1)
        xi = np.asarray(self.xi, dtype=float).reshape(-1)
        if x.shape != xi.shape:
            raise ValueError("g and g* blocks must have equal length")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(xi))):
            raise ValueError("non-finite DoubleVector")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "xi", xi)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.xi])

    @classmethod
    def from_array(cls, v: np.ndarray) -> DoubleVector:
        v = np.asarray(v, dtype=float)
        n = v.shape[0] // 2
        if v.shape != (2 * n,):
            raise ValueError("expected a vector of even length")
        return cls(v[:n], v[n:])

    def __add__(self, other: DoubleVector) -> DoubleVector:
        return DoubleVector(self.x + other.x, self.xi + other.xi)

    def __sub__(self, other: DoubleVector) -> DoubleVector:
        return DoubleVector(self.x - other.x, self.xi - other.xi)

    def __mul__(self, s: float) -> DoubleVector:
        return DoubleVector(s * self.x, s * self.xi)

    __rmul__ = __mul__


@dataclass(frozen=True)
class SubspaceData:
    parent_dim: int
    basis_vectors: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def __post_init__(self) -> None:
        b = np.asarray(self.basis_vectors, dtype=float).reshape(-1, self.parent_dim)
        if b.shape[0] and np.linalg.matrix_rank(b, tol=SPAN_TOL) != b.shape[0]:
            raise ValueError("basis vectors are linearly dependent")
        object.__setattr__(self, "basis_vectors", b)

    @property
    def dim(self) -> int:
        return self.basis_vectors.shape[0]

    @classmethod
    def span(cls, parent_dim: int, vectors: Sequence[Sequence[float]]) -> SubspaceData:
        return cls(parent_dim, np.array(vectors, dtype=float).reshape(-1, parent_dim))

    @classmethod
    def coordinate(cls, parent_dim: int, indices: Sequence[int]) -> SubspaceData:
        return cls(parent_dim, np.eye(parent_dim)[list(indices)])

    def contains(self, v: np.ndarray, tol: float = SPAN_TOL) -> bool:
        return span_residual(self, v) <= tol

    def same_span(self, other: SubspaceData, tol: float = SPAN_TOL) -> bool:
        if self.parent_dim != other.parent_dim or self.dim != other.dim:
            return False
        if self.dim == 0:
            return True
        stacked = np.vstack([self.basis_vectors, other.basis_vectors])
        return np.linalg.matrix_rank(stacked, tol=tol) == self.dim


def _check_dim(a: LieAlgebraData, *vs: np.ndarray) -> None:
    for v in vs:
        if np.shape(v) != (a.dim,):
            raise ValueError(f"expected vector of length {a.dim}, got shape {np.shape(v)}")


def bracket(a: LieAlgebraData, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    _check_dim(a, x, y)
    return np.einsum("i,j,ijk->k", x, y, a.c)


def jacobi_defect(a: LieAlgebraData) -> float:
    c = a.c
    # J[i,j,k,l] = sum_m c_ij^m c_mk^l + cyclic
    t = np.einsum("ijm,mkl->ijkl", c, c)
    cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return float(np.max(np.abs(cyc))) if cyc.size else 0.0


def cobracket(b: LieBialgebraData) -> np.ndarray:
    """delta(e_k) as the n x n tensor T[k] with T[k][i, j] = <e_k, [f^i, f^j]>."""
    return b.g_star.c.transpose(2, 0, 1)


def cocycle_defect(b: LieBialgebraData) -> float:
    """Max-norm of ``delta([X,Y]) - ad_X delta(Y) + ad_Y delta(X)`` on basis pairs."""
    n = b.dim
    c = b.g.c
    delta = cobracket(b)
    ads = [b.g.ad(np.eye(n)[i]) for i in range(n)]

    def act(i: int, t: np.ndarray) -> np.ndarray:
        return ads[i] @ t + t @ ads[i].T

    worst = 0.0
    for i in range(n):
        for j in range(n):
            lhs = np.einsum("k,kab->ab", c[i, j], delta)
            r = lhs - act(i, delta[j]) + act(j, delta[i])
            worst = max(worst, float(np.max(np.abs(r))) if r.size else 0.0)
    return worst


def coadjoint(c: np.ndarray, x: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """ad*_x eta for x in an algebra with constants c and eta in its dual.

    Sign convention: <ad*_x eta, y> = -<eta, [x, y]>.
    """
    return -np.einsum("i,ikl,l->k", x, c, eta)


def double_bracket(b: LieBialgebraData, u: DoubleVector, v: DoubleVector) -> DoubleVector:
    n = b.dim
    if u.n != n or v.n != n:
        raise ValueError(f"DoubleVector dimension mismatch: expected {n}")
    c, cs = b.g.c, b.g_star.c
    X, xi, Y, eta = u.x, u.xi, v.x, v.xi
    g_part = (
        np.einsum("i,j,ijk->k", X, Y, c)
        - coadjoint(cs, eta, X)
        + coadjoint(cs, xi, Y)
    )
    gs_part = (
        np.einsum("i,j,ijk->k", xi, eta, cs)
        + coadjoint(c, X, eta)
        - coadjoint(c, Y, xi)
    )
    return DoubleVector(g_part, gs_part)


def double_structure_constants(b: LieBialgebraData) -> np.ndarray:
    """Structure tensor of the double in the basis (e_1..e_n, f^1..f^n)."""
    n = b.dim
    basis = [DoubleVector.from_array(row) for row in np.eye(2 * n)]
    out = np.zeros((2 * n, 2 * n, 2 * n))
    for i, u in enumerate(basis):
        for j, v in enumerate(basis):
            out[i, j] = double_bracket(b, u, v).as_array()
    return out


def pairing(u: DoubleVector, v: DoubleVector) -> float:
    return float(u.xi @ v.x + v.xi @ u.x)


def pairing_matrix(n: int) -> np.ndarray:
    """Gram matrix of the canonical pairing in the (e, f) basis."""
    z, i = np.zeros((n, n)), np.eye(n)
    return np.block([[z, i], [i, z]])


def pairing_invariance_defect(b: LieBialgebraData) -> float:
    n = b.dim
    cd = double_structure_constants(b)
    K = pairing_matrix(n)
    # <[u,v],w> + <v,[u,w]> over basis triples
    t = np.einsum("uvk,kw->uvw", cd, K)
    r = t + t.transpose(0, 2, 1)
    return float(np.max(np.abs(r))) if r.size else 0.0


def double_jacobi_defect(b: LieBialgebraData) -> float:
    return jacobi_defect(LieAlgebraData(double_structure_constants(b)))


def double_jacobi_sampled(b: LieBialgebraData, rng: np.random.Generator, samples: int) -> float:
    n = b.dim
    worst = 0.0
    for _ in range(samples):
        u, v, w = (DoubleVector.from_array(rng.standard_normal(2 * n)) for _ in range(3))
        s = (
            double_bracket(b, u, double_bracket(b, v, w))
            + double_bracket(b, v, double_bracket(b, w, u))
            + double_bracket(b, w, double_bracket(b, u, v))
        )
        worst = max(worst, float(np.max(np.abs(s.as_array()))))
    return worst


def span_residual(s: SubspaceData, v: np.ndarray) -> float:
    v = np.asarray(v, dtype=float)
    if s.dim == 0:
        return float(np.linalg.norm(v))
    coef, *_ = np.linalg.lstsq(s.basis_vectors.T, v, rcond=None)
    return float(np.linalg.norm(s.basis_vectors.T @ coef - v))


def annihilator(h: SubspaceData) -> SubspaceData:
    """Basis of ``{xi : <xi, X> = 0 for X in h}`` in dual-basis coordinates."""
    n = h.parent_dim
    if h.dim == 0:
        return SubspaceData(n, np.eye(n))
    if np.linalg.matrix_rank(h.basis_vectors, tol=SPAN_TOL) != h.dim:
        raise ValueError("rank-deficient subspace")
    ns = null_space(h.basis_vectors, rcond=SPAN_TOL)
    return SubspaceData(n, ns.T.reshape(-1, n))


def is_subalgebra(a: LieAlgebraData, s: SubspaceData, tol: float = 1e-9) -> tuple[bool, float]:
    if s.parent_dim != a.dim:
        raise ValueError("subspace does not live in this algebra")
    worst = 0.0
    for i in range(s.dim):
        for j in range(i + 1, s.dim):
            r = span_residual(s, bracket(a, s.basis_vectors[i], s.basis_vectors[j]))
            worst = max(worst, r)
    return worst <= tol, worst


def load_structure_constants(path: str | Path, dim: int | None = None) -> LieAlgebraData:
    """Read ``i j k value`` lines (0-based); ``#`` comments and blank lines are skipped."""
    entries: list[tuple[int, int, int, float]] = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"{path}:{lineno}: expected 'i j k value'")
        i, j, k = (int(p) for p in parts[:3])
        entries.append((i, j, k, float(parts[3])))
    n = dim if dim is not None else 1 + max((max(e[:3]) for e in entries), default=-1)
    c = np.zeros((n, n, n))
    for i, j, k, val in entries:
        c[i, j, k] = val
    return LieAlgebraData(c)
