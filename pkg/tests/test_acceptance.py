"""Acceptance criteria, one test each, at the stated tolerances.

Every test appends a PASS/FAIL line to the terminal summary.
"""

from __future__ import annotations

import time

import pytest

from plgroupoid import verify
from plgroupoid.models import get_model

from conftest import ACCEPTANCE_LINES

SEED = 0


@pytest.fixture(scope="module")
def su11_report():
    t0 = time.perf_counter()
    report = verify.run("su11", "all", SEED)
    return report, time.perf_counter() - t0


def records(report, ids):
    by_id = {r["id"]: r for r in report["records"]}
    missing = [i for i in ids if i not in by_id]
    assert not missing, f"checks not registered: {missing}"
    return [by_id[i] for i in ids]


def run_ids(model, ids):
    m = get_model(model)
    table = {c.id: c for c in verify.CHECKS}
    return [verify.run_check(table[i], m, SEED) for i in ids]


def judge(n, title, recs, extra_ok=True, note=""):
    bad = [r["id"] for r in recs if not r["pass"]]
    ok = not bad and extra_ok
    worst = ", ".join(f"{r['id']}={r['max_defect']:.2e}/{r['tolerance']:.0e}" for r in recs)
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {title} [{worst}]{' ' + note if note else ''}"
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def timed(model, ids):
    t0 = time.perf_counter()
    recs = run_ids(model, ids)
    return recs, time.perf_counter() - t0


def test_criterion_01_bialgebra_identities():
    ids = ["algebra.jacobi", "algebra.cocycle", "algebra.pairing_invariance", "algebra.double_jacobi"]
    recs, dt = timed("su11", ids)
    assert all(r["tolerance"] == 1e-12 for r in recs)
    judge(1, "bialgebra identities exhaustive <= 1e-12", recs, dt < 1.0, f"time={dt:.2f}s (<1s)")


def test_criterion_02_factorization():
    ids = ["groups.factorization_roundtrip", "groups.not_factorizable_iff_margin"]
    recs, dt = timed("su11", ids)
    assert recs[0]["samples"] >= 1000 and recs[0]["tolerance"] == 1e-10
    judge(2, "factorization round trip and refusal iff margin <= 0", recs, dt < 1.0, f"time={dt:.2f}s (<1s)")


def test_criterion_03_dressing_laws(su11_report):
    report, _ = su11_report
    recs = records(report, [
        "dressing.compatibility_right",
        "dressing.compatibility_left",
        "dressing.sharp_form_Gstar",
        "dressing.sharp_form_G",
        "dressing.fd_field_Gstar",
        "dressing.fd_field_G",
    ])
    assert recs[0]["samples"] >= 500 and recs[2]["samples"] >= 300
    assert all(r["tolerance"] <= 1e-9 for r in recs[:4]) and all(r["tolerance"] <= 1e-5 for r in recs[4:])
    judge(3, "dressing compatibility, sharp-form identities, FD fields", recs)


def test_criterion_04_incompleteness_witness():
    ids = ["dressing.escape_witness", "dressing.escape_dt_halving", "dressing.relative_completeness"]
    recs, dt = timed("su11", ids)
    assert all(r["tolerance"] <= 1e-6 for r in recs)
    judge(4, "escape at 1 - sqrt 2, dt-halving stable, H flows complete", recs, dt < 5.0, f"time={dt:.2f}s (<5s)")


def test_criterion_05_tensors(su11_report):
    report, _ = su11_report
    recs = records(report, [
        "tensors.identity_vanishing",
        "tensors.pi_plus_expansions",
        "tensors.nondegeneracy",
        "tensors.multiplicativity_G",
        "tensors.multiplicativity_Gstar",
    ])
    # nondegeneracy is a lower bound |det| >= 1e-6, stored as 1/min|det| <= 1e6
    assert recs[2]["kind"] == "bound" and recs[2]["tolerance"] == 1e6 and recs[2]["samples"] >= 500
    assert recs[3]["samples"] >= 500 and recs[4]["samples"] >= 500
    judge(5, "Poisson tensors: identity, expansions, nondegeneracy, multiplicativity", recs)


def test_criterion_06_groupoid(su11_report):
    report, _ = su11_report
    recs = records(report, [
        "groupoid.axioms_G",
        "groupoid.axioms_Gstar",
        "groupoid.action_axioms",
        "groupoid.J_multiplicative",
        "groupoid.source_poisson",
        "groupoid.target_anti_poisson",
    ])
    assert recs[0]["samples"] >= 500 and recs[1]["samples"] >= 500
    assert recs[3]["tolerance"] == 0.0
    assert recs[4]["tolerance"] <= 1e-5 and recs[5]["tolerance"] <= 1e-5
    judge(6, "groupoid axioms, action, exact J, source/target Poisson", recs)


def test_criterion_07_momentum(su11_report):
    report, _ = su11_report
    recs = records(report, ["groupoid.momentum_identity"])
    assert recs[0]["samples"] >= 100 and recs[0]["tolerance"] == 1e-4
    judge(7, "momentum identity on Omega", recs)


def test_criterion_08_reduction(su11_report):
    report, _ = su11_report
    recs = records(report, [
        "reduction.level_set_closed",
        "reduction.coisotropy",
        "reduction.coisotropy_negative_control",
        "reduction.reduced_axioms",
        "reduction.representative_independence",
        "reduction.coinduced_at_origin",
        "reduction.coinduced_orbit_independence",
        "reduction.cotangent_section_independence",
    ])
    assert recs[1]["samples"] >= 100 and recs[1]["tolerance"] == 1e-4
    # negative control > 1e-2 stored as 1e-2/min <= 1
    assert recs[2]["kind"] == "bound" and recs[2]["tolerance"] == 1.0
    judge(8, "reduction: level set, coisotropy, reduced groupoid, base, cotangent chart", recs)


def test_criterion_09_null_control():
    report = verify.run("trivial", "all", SEED)
    recs = report["records"]
    defects = [r for r in recs if r["kind"] == "defect"]
    assert all(r["tolerance"] <= 1e-14 for r in defects)
    ids = {r["id"] for r in recs}
    assert {"reduction.zero_coinduced_bivector", "reduction.canonical_cotangent_bracket"} <= ids
    worst = max(r["max_defect"] for r in defects)
    judge(9, "trivial model: all defects <= 1e-14, zero reduced base bivector",
          [r for r in recs if r["id"].startswith("reduction.zero") or r["id"].endswith("cotangent_bracket")],
          report["pass"], f"worst defect={worst:.1e} over {len(defects)} checks")


def test_criterion_10_full_run(su11_report):
    report, dt = su11_report
    again = verify.run("su11", "all", SEED)
    same = report["records"] == again["records"]
    failed = [r["id"] for r in report["records"] if not r["pass"]]
    ok = report["pass"] and same and dt < 60.0
    line = (
        f"{'PASS' if ok else 'FAIL'} criterion 10: full su11 verify, {len(report['records'])} checks, "
        f"time={dt:.1f}s (<60s), deterministic={same}" + (f", failed={failed}" if failed else "")
    )
    ACCEPTANCE_LINES.append(line)
    assert ok, line
