"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test prints a single ``criterion NN ... PASS/FAIL`` line (visible with
``pytest -s``; the -v test names mirror them).  Criteria 6 and 7 are known
to fail on Beta (and occasionally Cpy1) steps: exact-word equality of
bounded straight-path weight sets does not survive the removal of a
multiplicative pair, because statically-visible words of algebra-killed
wandering paths disappear.  The analysis lives in the README (Known red checks); the
tests state the criteria faithfully and are expected to stay red there.
"""

import time

import pytest

from goilab.calculus import LCA, LCF
from goilab.checks import (check_algebra_laws, check_compile_fidelity,
                           check_confluence, check_goi_end_to_end,
                           check_label_lemmas, check_net_simulation,
                           check_propagation, check_sigma_termination,
                           check_weight_invariance)
from goilab.corpus import corpus

CORPUS = None


def entries():
    global CORPUS
    if CORPUS is None:
        CORPUS = corpus(max_size=7, classics=True)
    return CORPUS


def report_line(number, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"criterion {number:02d} {name}: {status}{' — ' + detail if detail else ''}")


def test_criterion_01_compile_fidelity():
    start = time.time()
    r = check_compile_fidelity(entries())
    elapsed = time.time() - start
    report_line(1, "compilation fidelity", r["ok"], f"{elapsed:.2f}s")
    assert r["ok"], r["failures"][:5]
    assert elapsed <= 1.0, f"criterion 1 must finish within 1s, took {elapsed:.2f}s"


def test_criterion_02_sigma_termination():
    start = time.time()
    r = check_sigma_termination(entries())
    elapsed = time.time() - start
    report_line(2, "sigma termination", r["ok"],
                f"{r['configurations']} configurations, {elapsed:.1f}s")
    assert r["ok"], r["failures"][:5]
    assert elapsed <= 30.0


def test_criterion_03_propagation():
    r = check_propagation(entries())
    report_line(3, "closed substitutions propagate", r["ok"])
    assert r["ok"], r["failures"][:5]


def test_criterion_04_confluence():
    start = time.time()
    ra = check_confluence(entries(), LCF, fuel=10_000)
    rb = check_confluence(entries(), LCA, fuel=10_000)
    elapsed = time.time() - start
    ok = ra["ok"] and rb["ok"]
    report_line(4, "confluence by exhaustive search", ok,
                f"exhausted={ra['fuel_exhausted'] + rb['fuel_exhausted']}, {elapsed:.1f}s")
    assert ok, (ra["failures"] + rb["failures"])[:5]
    assert elapsed <= 300.0


def test_criterion_05_label_shape_lemmas():
    ra = check_label_lemmas(entries(), LCF)
    rb = check_label_lemmas(entries(), LCA)
    ok = ra["ok"] and rb["ok"]
    report_line(5, "label-shape lemmas", ok)
    assert ok, (ra["failures"] + rb["failures"])[:5]


def test_criterion_06_weight_invariance_lcf_cbv():
    start = time.time()
    r = check_weight_invariance(entries(), LCF)
    elapsed = time.time() - start
    report_line(6, "step invariance of weight sets (lcf/cbv)", r["ok"],
                f"{r['steps_checked']} steps, failing rules {r['failing_rules']}, "
                f"{elapsed:.1f}s")
    assert elapsed <= 600.0
    assert r["ok"], (
        f"bounded weight-set equality fails on rules {r['failing_rules']} "
        f"({len(r['failures'])} steps); statically visible words of "
        f"algebra-killed wandering paths vanish with the multiplicative "
        f"pair -- see README, Known red checks. Sample: {r['failures'][:2]}")


def test_criterion_07_weight_invariance_lca_cbn():
    start = time.time()
    r = check_weight_invariance(entries(), LCA)
    elapsed = time.time() - start
    report_line(7, "step invariance of weight sets (lca/cbn)", r["ok"],
                f"{r['steps_checked']} steps, failing rules {r['failing_rules']}, "
                f"{elapsed:.1f}s")
    assert elapsed <= 600.0
    assert r["ok"], (
        f"bounded weight-set equality fails on rules {r['failing_rules']} "
        f"({len(r['failures'])} steps); see README, Known red checks. "
        f"Sample: {r['failures'][:2]}")


def test_criterion_08_closed_cut_elimination_simulation():
    start = time.time()
    r = check_net_simulation(entries())
    elapsed = time.time() - start
    report_line(8, "closed cut elimination simulates unlabelled reduction",
                r["ok"], f"{r['steps_checked']} steps, {elapsed:.1f}s")
    assert r["ok"], r["failures"][:5]


def test_criterion_09_label_describes_a_path():
    start = time.time()
    r = check_goi_end_to_end(entries())
    elapsed = time.time() - start
    report_line(9, "final labels name straight paths of the initial net",
                r["ok"], f"{r['checked']} normal forms, {elapsed:.1f}s")
    assert r["ok"], r["failures"][:5]
    assert not r["skipped"], r["skipped"]


def test_criterion_10_algebra_unit_laws():
    r = check_algebra_laws(samples=1000, seed=0)
    report_line(10, "algebra unit laws on 1000 random labels", r["ok"])
    assert r["ok"], r["failures"][:5]
