"""Dressing actions, dressing vector fields and dressing flows."""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algebra import DoubleVector
from .groups import (
    Factorization,
    GroupPoint,
    MatrixDouble,
    NotFactorizable,
    Order,
    Point,
)

ESCAPE_MARGIN = 1e-8
ESCAPE_TOL = 1e-6
MAX_STEPS = 1_000_000


def factorize(double: MatrixDouble, d: np.ndarray, order: Order | str) -> Factorization:
    return double.factorize(d, Order(order))


def dress(double: MatrixDouble, g: Point, gamma: Point) -> tuple[Point, Point]:
    """Refactor g gamma = (^g gamma)(g^gamma); returns both parts."""
    f = double.factorize(double.embed(g) @ double.embed(gamma), Order.GSTAR_G)
    return f.gamma, f.g


def dress_left(double: MatrixDouble, g: Point, gamma: Point) -> Point:
    return dress(double, g, gamma)[0]


def dress_right(double: MatrixDouble, g: Point, gamma: Point) -> Point:
    return dress(double, g, gamma)[1]


def _g_vec(double: MatrixDouble, x: np.ndarray) -> np.ndarray:
    return np.concatenate([np.asarray(x, float), np.zeros(double.n)])


def _gs_vec(double: MatrixDouble, xi: np.ndarray) -> np.ndarray:
    return np.concatenate([np.zeros(double.n), np.asarray(xi, float)])


def dressing_field_on_Gstar(double: MatrixDouble, x: np.ndarray, gamma: Point) -> np.ndarray:
    """Left-trivialized value p_{g*}(Ad_{gamma^-1} X) of the G-dressing field at gamma."""
    m = double.embed(gamma)
    return double.ad_array(np.linalg.inv(m), _g_vec(double, x))[double.n :]


def dressing_field_on_G(double: MatrixDouble, xi: np.ndarray, g: Point) -> np.ndarray:
    """Right-trivialized value p_g(Ad_g xi) of the G*-dressing field at g."""
    return double.ad_array(double.embed(g), _gs_vec(double, xi))[: double.n]


def sharp_form_check(double: MatrixDouble, x: np.ndarray, gamma: Point, pi_gstar=None) -> float:
    """Compare S_X(gamma) with pi_{G*}^sharp of the right-invariant form X.

    Both sides are brought to the right-trivialized frame of G*.  ``pi_gstar``
    may be replaced by a deliberately broken tensor for mutation tests.
    """
    from . import tensors

    pi = (pi_gstar or tensors.pi_Gstar)(double, gamma)
    rhs = tensors.sharp(pi, tensors.FrameVector(x, tensors.Frame.RIGHT)).coords
    left = dressing_field_on_Gstar(double, x, gamma)
    lhs = tensors.left_to_right_gstar(double, gamma, left)
    return float(np.max(np.abs(lhs - rhs)))


def sharp_form_check_G(double: MatrixDouble, xi: np.ndarray, g: Point, sign: float = -1.0) -> float:
    """Compare S_xi(g) with sign * pi_G^sharp(l*_{g^-1} xi), right-trivialized."""
    from . import tensors

    pi = tensors.pi_G(double, g)
    omega = tensors.left_covector_to_right_g(double, g, xi)
    rhs = sign * tensors.sharp(pi, tensors.FrameVector(omega, tensors.Frame.RIGHT)).coords
    lhs = dressing_field_on_G(double, xi, g)
    return float(np.max(np.abs(lhs - rhs)))


# --- flows -----------------------------------------------------------------


class Termination(enum.Enum):
    COMPLETED = "Completed"
    ESCAPED = "Escaped"
    STEP_LIMIT = "StepLimit"


@dataclass
class FlowTrace:
    times: list[float] = field(default_factory=list)
    points: list[Point] = field(default_factory=list)
    margins: list[float] = field(default_factory=list)
    termination: Termination = Termination.COMPLETED
    t_escape: float | None = None

    def reason(self) -> str:
        if self.termination is Termination.ESCAPED:
            return f"Escaped(t_escape={self.t_escape:.10f})"
        return self.termination.value

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        su11 = bool(self.points) and isinstance(self.points[0], GroupPoint)
        if su11:
            buf.write("t,re_alpha,im_alpha,re_beta,im_beta,margin\n")
        else:
            k = len(self.points[0].params()) if self.points else 0
            buf.write(",".join(["t"] + [f"p{i}" for i in range(k)] + ["margin"]) + "\n")
        for t, p, m in zip(self.times, self.points, self.margins):
            vals = [t, *p.params(), m]
            buf.write(",".join(repr(float(v)) for v in vals) + "\n")
        buf.write(f"# termination={self.reason()}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def _exact_point(double: MatrixDouble, d0: np.ndarray, xi: np.ndarray, t: float):
    d = d0 @ double.exp_d(_gs_vec(double, t * np.asarray(xi, float)))
    return d, double.margin(d, Order.GSTAR_G)


def _locate_escape(double, d0, xi, t_ok: float, t_bad: float, threshold: float, tol: float) -> float:
    lo, hi = t_ok, t_bad
    while abs(hi - lo) > tol / 64:
        mid = 0.5 * (lo + hi)
        if _exact_point(double, d0, xi, mid)[1] > threshold:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _time_grid(t_end: float, dt: float, max_steps: int) -> tuple[np.ndarray, bool]:
    if not dt > 0:
        raise ValueError("dt must be positive")
    k = int(math.ceil(abs(t_end) / dt - 1e-12))
    limited = k > max_steps
    k = min(k, max_steps)
    ts = np.sign(t_end) * dt * np.arange(k + 1) + 0.0  # no -0.0 at the start
    if not limited and k > 0:
        ts[-1] = t_end
    return ts, limited


def flow(
    double: MatrixDouble,
    start: Point,
    xi: np.ndarray,
    t_end: float,
    dt: float,
    *,
    method: str = "exact",
    max_steps: int = MAX_STEPS,
    escape_margin: float = ESCAPE_MARGIN,
    escape_tol: float = ESCAPE_TOL,
) -> FlowTrace:
    """Integrate t -> start^{exp(t xi)}, the flow of the G*-dressing field on G.

    ``method="exact"`` refactors d(t) = start exp(t xi) at each grid time;
    ``method="rk4"`` integrates the right-trivialized field with fixed-step
    RK4 and renormalizes onto the group after every step.  Both stop with
    ``Escaped`` once the G*.G margin of d(t) drops below ``escape_margin``;
    the escape time is then bisected on the margin to ``escape_tol``.
    """
    xi = np.asarray(xi, dtype=float)
    ts, limited = _time_grid(t_end, dt, max_steps)
    d0 = double.embed(start)
    trace = FlowTrace()
    state = d0.copy()
    xi_mat = double.realize(_gs_vec(double, xi))

    def field_(m: np.ndarray) -> np.ndarray:
        y = double.expand_array(m @ xi_mat @ np.linalg.inv(m), check=False)
        y[double.n :] = 0.0
        return double.realize(y) @ m

    for i, t in enumerate(ts):
        d, margin = _exact_point(double, d0, xi, t)
        if margin <= escape_margin:
            trace.termination = Termination.ESCAPED
            trace.t_escape = _locate_escape(double, d0, xi, ts[i - 1], t, escape_margin, escape_tol)
            return trace
        if method == "exact":
            point = double.factorize(d, Order.GSTAR_G).g
        elif method == "rk4":
            if i > 0:
                h = t - ts[i - 1]
                k1 = field_(state)
                k2 = field_(state + 0.5 * h * k1)
                k3 = field_(state + 0.5 * h * k2)
                k4 = field_(state + h * k3)
                state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            point = double.g_from_matrix(state, renormalize=True)
            state = double.embed(point)
        else:
            raise ValueError(f"unknown method {method!r}")
        trace.times.append(float(t))
        trace.points.append(point)
        trace.margins.append(float(margin))
    if limited:
        trace.termination = Termination.STEP_LIMIT
    return trace


def trace_deviation(a: FlowTrace, b: FlowTrace, min_margin: float = 0.0) -> float:
    """Max parameter difference on the common time grid where both margins exceed ``min_margin``."""
    worst = 0.0
    for ta, pa, ma, tb, pb, mb in zip(a.times, a.points, a.margins, b.times, b.points, b.margins):
        if abs(ta - tb) > 1e-12:
            raise ValueError("traces are on different grids")
        if min(ma, mb) < min_margin:
            continue
        worst = max(worst, float(np.max(np.abs(pa.params() - pb.params()))))
    return worst
