"""Command-line front end.

Exit codes: 0 success, 1 a check or residual failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Sequence

import numpy as np

from . import dressing as dr
from . import verify
from .groupoid import NotComposable
from .groups import GroupPoint, NotFactorizable, Order, VectorPoint
from .models import REGISTRY, ModelError, get_model

REPORT_HELP = """\
report schema (JSON):
  {"schema": 1, "model": str, "suite": str, "samples": int|null,
   "environment": {"precision", "seed", "python", "numpy", "scipy", "platform"},
   "records": [{"id", "kind", "samples", "max_defect", "tolerance", "pass"}, ...],
   "pass": bool}
records are sorted by id; a record passes iff max_defect <= tolerance.
kind "bound" marks lower bounds phrased as defects (for example 1/min|det|).
"""

ORBIT_HELP = """\
CSV schema (su11): t,re_alpha,im_alpha,re_beta,im_beta,margin
(trivial: t,p0..p{2n-1},margin), one row per step, then a trailing line
'# termination=Completed|Escaped(t_escape=...)|StepLimit'.
"""

DEMO_HELP = """\
transcript schema (JSON): {"schema": 1, "model", "inputs", "a", "b",
  "product" | "error", "checks": {name: {"value", "tolerance", "pass"}}, "pass"}
reduced elements: {"z": [...], "gamma1": {...}, "gamma2": {...}, "residuals": {...}}.
su11 base points are "re,im" of z in the unit disc; anchors are the h^perp
coordinates (p1, p2) of log(gamma2), i.e. gamma2 = (A=1, N = i p1 - p2).
"""


class UsageError(Exception):
    pass


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",") if v.strip()])
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _model(name: str):
    try:
        return get_model(name)
    except ModelError as exc:
        raise UsageError(str(exc)) from exc


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=False)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# --- verify -----------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    _model(args.model)
    if args.samples is not None and args.samples < 1:
        raise UsageError("--samples must be positive")
    t0 = time.perf_counter()
    report = verify.run(args.model, args.suite, args.seed, args.samples)
    _emit(report, args.out)
    failed = [r["id"] for r in report["records"] if not r["pass"]]
    summary = f"{len(report['records']) - len(failed)}/{len(report['records'])} checks passed in {time.perf_counter() - t0:.1f}s"
    print(summary + (f"; failed: {', '.join(failed)}" if failed else ""), file=sys.stderr)
    return 0 if report["pass"] else 1


# --- orbit ------------------------------------------------------------------


def cmd_orbit(args: argparse.Namespace) -> int:
    m = _model(args.model)
    d = m.double
    xi = _floats(args.xi)
    if len(xi) != d.n:
        raise UsageError(f"--xi needs {d.n} coordinates")
    try:
        if m.name == "su11":
            start = GroupPoint(complex(args.alpha), complex(args.beta))
        else:
            if args.point is None:
                raise UsageError("--point is required for this model")
            start = d.g_point(_floats(args.point))
    except ValueError as exc:
        raise UsageError(f"invalid start point: {exc}") from exc
    try:
        trace = dr.flow(d, start, xi, args.t_end, args.dt, method=args.method, max_steps=args.max_steps)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    text = trace.to_csv(args.out)
    if not args.out:
        sys.stdout.write(text)
    print(f"termination={trace.reason()} steps={len(trace.times)}", file=sys.stderr)
    return 0


# --- factorize --------------------------------------------------------------


def cmd_factorize(args: argparse.Namespace) -> int:
    m = _model(args.model)
    d = m.double
    if m.name == "su11":
        try:
            entries = [complex(v) for v in args.matrix.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad matrix entry: {exc}") from exc
        if len(entries) != 4:
            raise UsageError("--matrix needs 4 comma-separated complex entries (row-major)")
        x = np.array(entries, dtype=complex).reshape(2, 2)
        det = x[0, 0] * x[1, 1] - x[0, 1] * x[1, 0]
        if abs(det - 1) > 1e-9:
            raise UsageError(f"matrix must have determinant 1 (got {det})")
    else:
        v = _floats(args.matrix)
        if len(v) != 2 * d.n:
            raise UsageError(f"--matrix needs {2 * d.n} translation coordinates for this model")
        x = d.exp_d(v)
    order = Order(args.order)
    try:
        f = d.factorize(x, order)
    except NotFactorizable as exc:
        _emit({"order": order.value, "factorizable": False, "margin": exc.margin}, None)
        return 1
    rec = d.embed(f.g) @ d.embed(f.gamma) if order is Order.G_GSTAR else d.embed(f.gamma) @ d.embed(f.g)
    _emit(
        {
            "order": order.value,
            "factorizable": True,
            "margin": f.margin,
            "g": f.g.to_json(),
            "gamma": f.gamma.to_json(),
            "residual": float(np.max(np.abs(rec - x))),
        },
        None,
    )
    return 0


# --- reduce-demo ------------------------------------------------------------


def _anchor(m, p: np.ndarray):
    basis = m.subgroup.h_perp.basis_vectors
    if len(p) != basis.shape[0]:
        raise UsageError(f"anchor needs {basis.shape[0]} coordinates")
    return m.hooks.hperp_exp(basis.T @ p)


def _reduced(m, q: np.ndarray, p: np.ndarray):
    R = m.reduction
    if len(q) != m.hooks.q_dim:
        raise UsageError(f"base point needs {m.hooks.q_dim} coordinates")
    try:
        g = m.hooks.section(q)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return R.canonicalize(m.omega.make_from_target(g, _anchor(m, p)))


def cmd_reduce_demo(args: argparse.Namespace) -> int:
    m = _model(args.model)
    R = m.reduction
    tol = 1e-8
    q1, p1, p2 = _floats(args.z1), _floats(args.anchor1), _floats(args.anchor2)
    checks: dict[str, dict] = {}

    def record(name: str, value: float) -> None:
        checks[name] = {"value": float(value), "tolerance": tol, "pass": bool(value <= tol)}

    out: dict = {"schema": 1, "model": m.name, "inputs": vars(args).copy()}
    out["inputs"].pop("func", None)
    try:
        a = _reduced(m, q1, p1)
        q2 = R.reduced_target(a) if args.z2 is None else _floats(args.z2)
        b = _reduced(m, q2, p2)
    except NotFactorizable as exc:
        out["error"] = {"type": "NotFactorizable", "margin": exc.margin}
        _emit(out, args.out)
        return 1
    out["a"] = {**a.to_json(), "source": list(R.reduced_source(a)), "target": list(R.reduced_target(a))}
    out["b"] = {**b.to_json(), "source": list(R.reduced_source(b)), "target": list(R.reduced_target(b))}
    try:
        ab = R.reduced_mult(a, b)
    except NotComposable as exc:
        out["error"] = {"type": "NotComposable", "detail": str(exc)}
        _emit(out, args.out)
        return 1
    out["product"] = {**ab.to_json(), "source": list(R.reduced_source(ab)), "target": list(R.reduced_target(ab))}
    record("omega_residual", max(a.rep.residual, b.rep.residual, ab.rep.residual))
    record("level_set", max(R.level_defect(x.rep) for x in (a, b, ab)))
    record("product_source", float(np.max(np.abs(R.reduced_source(ab) - R.reduced_source(a)))))
    record("product_target", float(np.max(np.abs(R.reduced_target(ab) - R.reduced_target(b)))))
    ua = R.reduced_unit(R.reduced_source(a))
    record("unit_law", R.class_distance(R.reduced_mult(ua, a), a))
    record("unit_times_unit", R.class_distance(R.reduced_mult(ua, ua), ua))
    record("inverse_law", R.class_distance(R.reduced_mult(a, R.reduced_inverse(a)), ua))
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.replays):
        h = m.hooks.h_point(m.hooks.random_theta(rng))
        worst = max(worst, R.class_distance(R.reduced_mult(a, b, h_shift=h), ab))
    record("representative_independence", worst)
    out["checks"] = checks
    out["pass"] = all(c["pass"] for c in checks.values())
    _emit(out, args.out)
    return 0 if out["pass"] else 1


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="plgroupoid", description="Numerical verification of Poisson-Lie groupoid constructions.")
    sub = p.add_subparsers(dest="command", required=True)
    models = sorted(REGISTRY)

    v = sub.add_parser("verify", help="run verification suites", epilog=REPORT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    v.add_argument("--model", default="su11", choices=models)
    v.add_argument("--suite", default="all", choices=("all",) + verify.SUITES)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=None, help="cap on samples per check (default: each check's own count)")
    v.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("orbit", help="trace a dressing orbit t -> g^exp(t xi)", epilog=ORBIT_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    o.add_argument("--model", default="su11", choices=models)
    o.add_argument("--alpha", default="1", help="complex alpha of the start point (su11)")
    o.add_argument("--beta", default="0", help="complex beta of the start point (su11)")
    o.add_argument("--point", default=None, help="comma-separated start coordinates (trivial)")
    o.add_argument("--xi", required=True, help="comma-separated g* coordinates")
    o.add_argument("--t-end", type=float, required=True)
    o.add_argument("--dt", type=float, default=1e-3)
    o.add_argument("--method", choices=("exact", "rk4"), default="exact")
    o.add_argument("--max-steps", type=int, default=dr.MAX_STEPS)
    o.add_argument("--out", default=None, help="CSV path (default: stdout)")
    o.set_defaults(func=cmd_orbit)

    f = sub.add_parser("factorize", help="factor a double element; exit 1 if no factorization exists")
    f.add_argument("--model", default="su11", choices=models)
    f.add_argument("--matrix", required=True, help="su11: a,b,c,d complex row-major; trivial: 2n coordinates")
    f.add_argument("--order", choices=[o.value for o in Order], default=Order.G_GSTAR.value)
    f.set_defaults(func=cmd_factorize)

    r = sub.add_parser("reduce-demo", help="build and compose two reduced elements", epilog=DEMO_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    r.add_argument("--model", default="su11", choices=models)
    r.add_argument("--z1", default="0,0", help="base point of a")
    r.add_argument("--z2", default=None, help="base point of b (default: target of a)")
    r.add_argument("--anchor1", default="0,0", help="h^perp coordinates of a's anchor")
    r.add_argument("--anchor2", default="0,0", help="h^perp coordinates of b's anchor")
    r.add_argument("--seed", type=int, default=0, help="seed for the randomized representative replays")
    r.add_argument("--replays", type=int, default=8)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_reduce_demo)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
