"""Acceptance criteria, one test each.

Every test prints a single ``AC<n> PASS|FAIL ...`` line; the lines are
also repeated in pytest's terminal summary.  Run this file directly to
get just those lines::

    python tests/test_acceptance.py
"""
from __future__ import annotations

import os
import subprocess
import sys
import time

import pytest

from toposites import fixtures
from toposites.sheaf import is_subcanonical
from toposites.workbench.enumerate import enumerate_topologies
from toposites.workbench.report import FINDING, classify_site
from toposites.workbench.siteio import parse_site
from toposites.workbench.sweep import (
    DEFAULT_SWEEP,
    SWEEP_ENV,
    TRIVIAL_ENV,
    bridge_suite,
    classification_sweep,
    enumeration_baselines,
    localic_preorder_sweep,
    sheafification_suite,
    topology_corpus,
)

RESULTS: list[str] = []


def record(n, name, ok, detail):
    line = f"AC{n} {'PASS' if ok else 'FAIL'} {name}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def corpus():
    return topology_corpus(DEFAULT_SWEEP)


@pytest.fixture(scope="module")
def classified(corpus):
    t0 = time.monotonic()
    reports, main, loc = classification_sweep(corpus)
    return reports, main, loc, time.monotonic() - t0


def test_ac1_localic_iff_preorder_literal_bounds():
    # all categories with <= 3 objects and <= 8 arrows, within 60 s
    t0 = time.monotonic()
    res = localic_preorder_sweep((3, 8), deadline=t0 + 60)
    took = time.monotonic() - t0
    ok = res.passed and took < 60
    detail = (f"{res.instances} categories checked in {took:.1f}s"
              + (f"; {res.failures[-1]}" if res.failures else ""))
    assert record(1, "localic iff preorder (<=3 objects, <=8 arrows, <60s)", ok, detail), detail


def test_ac1_localic_iff_preorder_feasible_bounds():
    t0 = time.monotonic()
    res = localic_preorder_sweep((3, 5))
    took = time.monotonic() - t0
    detail = f"{res.instances} categories, {len(res.failures)} mismatches, {took:.1f}s"
    assert record("1b", "localic iff preorder (<=3 objects, <=5 arrows)", res.passed, detail), res.failures


def test_ac2_criteria_match_oracle(classified):
    reports, main, _, took = classified
    ok = main.passed and took < 300
    detail = (f"{main.instances} sites x 4 invariants, {len(main.failures)} disagreements, "
              f"{took:.1f}s")
    assert record(2, "criterion vs oracle: atomic, locally connected, presheaf type, "
                     "well supported", ok, detail), main.failures[:5]


def test_ac3_localic_on_subcanonical_and_findings(classified):
    reports, _, loc, _ = classified
    sub = [r for r in reports if r.subcanonical]
    exact = all(r.rows["localic"].agree for r in sub)
    silent = []
    for r in reports:
        row = r.rows["localic"]
        if row.agree:
            continue
        rec = r.record()
        # a disagreement must surface as a replayable FINDING
        if r.status != FINDING or "document" not in rec:
            silent.append(r.site)
            continue
        again = parse_site(rec["document"], r.site)
        if classify_site(again.category, again.topology).rows["localic"].agree:
            silent.append(r.site)
    ok = loc.passed and exact and not silent
    detail = (f"{len(sub)} subcanonical sites exact={exact}; {loc.findings} findings on "
              f"non-subcanonical sites; {len(silent)} silent divergences")
    assert record(3, "localic sweep", ok, detail), silent[:5]


def test_ac4_sheafification_suite(corpus):
    res = sheafification_suite(corpus)
    detail = f"{res.instances} sieve presheaves over {len(corpus)} sites, {len(res.failures)} failures"
    assert record(4, "sheafification suite", res.passed, detail), res.failures[:5]


def test_ac5_bridge_suite(corpus, classified):
    res, records = bridge_suite(corpus, classified[0])
    dense = sum(1 for r in records if r["dense"])
    detail = (f"{dense} dense subcategories out of {len(records)} checked, "
              f"{len(res.failures)} disagreements, {res.findings} with localic findings")
    assert record(5, "bridge suite", res.passed and dense > 0, detail), res.failures[:5]


def test_ac6_enumeration_baselines(corpus):
    n_one = len(enumerate_topologies(fixtures.one()))
    res = enumeration_baselines(corpus)
    ok = n_one == 2 and res.passed
    detail = (f"ONE has {n_one} topologies; {len(corpus)} topologies valid and "
              f"saturation fixpoints, {len(res.failures)} failures")
    assert record(6, "enumeration baselines", ok, detail), res.failures[:5]


def _selftest_bytes(path):
    env = {k: v for k, v in os.environ.items() if k not in (SWEEP_ENV, TRIVIAL_ENV)}
    proc = subprocess.run([sys.executable, "-m", "toposites", "selftest", "--report", str(path)],
                          env=env, capture_output=True, text=True)
    return proc.returncode, path.read_bytes()


def test_ac7_selftest_deterministic(tmp_path):
    code1, first = _selftest_bytes(tmp_path / "one.jsonl")
    code2, second = _selftest_bytes(tmp_path / "two.jsonl")
    ok = code1 == code2 == 0 and first == second
    lines = first.count(b"\n")
    detail = (f"exit codes {code1}/{code2}, {lines} report lines, "
              f"identical={first == second}")
    assert record(7, "selftest determinism", ok, detail)


def test_findings_are_all_non_subcanonical(classified):
    # not a numbered criterion; guards the FINDING classification itself
    for r in classified[0]:
        if r.status == FINDING:
            assert not is_subcanonical(r.topology)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
