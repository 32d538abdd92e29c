"""Exhaustive corpus sweeps behind ``selftest`` and the acceptance tests.

Corpus bounds come from two environment variables, each ``OBJECTS,ARROWS``:

``TOPOSITES_SWEEP_BOUNDS``
    categories swept with every topology (default ``2,5``).
``TOPOSITES_TRIVIAL_BOUNDS``
    categories swept with the trivial topology only (default ``3,5``).
"""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Mapping, TextIO

from ..criteria import is_localic
from ..fincat import is_preorder
from ..sheaf import (
    is_sheaf,
    is_zero_sieve,
    is_zero_sieve_direct,
    presheaves_isomorphic,
    sheafify,
    sieve_presheaf,
    subsheaves,
    ell,
    unit_is_iso,
)
from ..sieve import Sieve, sieve_bits_on
from ..topology import closed_sieve_bits, saturate_bits, topology_violations, trivial_topology
from .bridge import bridge_check
from .enumerate import (
    MAX_ARROWS,
    MAX_OBJECTS,
    MAX_TOPOLOGY_ARROWS,
    DeadlineExceeded,
    check_bounds,
    enumerate_categories,
    enumerate_topologies,
    iter_categories,
)
from .siteio import Site
from .report import FAILURE, FINDING, ClassificationReport, classify_site, dumps

SWEEP_ENV = "TOPOSITES_SWEEP_BOUNDS"
TRIVIAL_ENV = "TOPOSITES_TRIVIAL_BOUNDS"
DEFAULT_SWEEP = (2, 5)
DEFAULT_TRIVIAL = (3, 5)


class BoundsConfigError(ValueError):
    pass


def parse_bounds(text: str, name: str, max_arrows: int = MAX_ARROWS) -> tuple[int, int]:
    try:
        n, m = (int(x) for x in text.split(","))
    except ValueError:
        raise BoundsConfigError(f"{name}={text!r}: expected OBJECTS,ARROWS") from None
    if not 1 <= n <= MAX_OBJECTS or not n <= m <= max_arrows:
        raise BoundsConfigError(f"{name}={text!r}: need 1 <= OBJECTS <= {MAX_OBJECTS} "
                                f"and OBJECTS <= ARROWS <= {max_arrows}")
    return n, m


def corpus_bounds(env: Mapping[str, str] | None = None) -> tuple[tuple[int, int], tuple[int, int]]:
    """``(sweep_bounds, trivial_bounds)`` after applying the overrides."""
    env = os.environ if env is None else env
    sweep = DEFAULT_SWEEP
    trivial = DEFAULT_TRIVIAL
    if env.get(SWEEP_ENV):
        sweep = parse_bounds(env[SWEEP_ENV], SWEEP_ENV, MAX_TOPOLOGY_ARROWS)
    if env.get(TRIVIAL_ENV):
        trivial = parse_bounds(env[TRIVIAL_ENV], TRIVIAL_ENV)
    return sweep, trivial


@dataclass
class SuiteResult:
    name: str
    instances: int = 0
    failures: list = field(default_factory=list)
    findings: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, what):
        self.failures.append(what)

    def record(self) -> dict:
        return {"kind": "suite", "name": self.name, "passed": self.passed,
                "instances": self.instances, "findings": self.findings,
                "failures": self.failures[:20], "failure_count": len(self.failures)}


def topology_corpus(bounds=DEFAULT_SWEEP) -> list[Site]:
    """Every category within ``bounds`` plus the named fixtures, each with
    every topology; sorted by site id."""
    out = []
    for cid, C in enumerate_categories(*bounds, include_named=True):
        for k, J in enumerate(enumerate_topologies(C)):
            out.append(Site(f"{cid}/J{k:02d}", C, J))
    out.sort(key=lambda s: s.id)
    return out


# -- suites --------------------------------------------------------------------


def localic_preorder_sweep(bounds=DEFAULT_TRIVIAL, deadline: float | None = None) -> SuiteResult:
    """With the trivial topology, localic exactly when the category is a preorder.

    Categories are checked as they are generated; if ``deadline`` (a
    ``time.monotonic()`` value) passes first, the suite fails and records
    how far it got.
    """
    check_bounds(*bounds)
    res = SuiteResult(f"localic-vs-preorder {bounds[0]},{bounds[1]}")
    try:
        for _, C in iter_categories(*bounds, deadline=deadline):
            res.instances += 1
            if bool(is_localic(C, trivial_topology(C))) != is_preorder(C):
                res.fail(f"{len(C.objects)}o{len(C.arrows)}a#{res.instances}")
            if deadline is not None and time.monotonic() > deadline:
                raise DeadlineExceeded
    except DeadlineExceeded:
        res.fail(f"deadline exceeded after {res.instances} categories")
    return res


def classification_sweep(sites: list[Site]) -> tuple[list[ClassificationReport], SuiteResult, SuiteResult]:
    """Classify every site; returns the reports and the results of the
    four-invariant sweep and of the localic sweep."""
    reports = []
    main = SuiteResult("criterion-vs-oracle")
    loc = SuiteResult("localic")
    for s in sites:
        r = classify_site(s.category, s.topology, s.id)
        reports.append(r)
        main.instances += 1
        loc.instances += 1
        for name, row in r.rows.items():
            bad = not row.agree or not row.witnesses_ok
            if name == "localic":
                if not row.witnesses_ok or (not row.agree and r.subcanonical):
                    loc.fail(s.id)
                elif not row.agree:
                    loc.findings += 1
            elif bad:
                main.fail(f"{s.id}:{name}")
    return reports, main, loc


def sheafification_suite(sites: list[Site]) -> SuiteResult:
    """Idempotence, unit iso on sheaves, zero test, subobject count."""
    res = SuiteResult("sheafification")
    for s in sites:
        C, J = s.category, s.topology
        for c in C.objects:
            for bits in sieve_bits_on(C, c):
                res.instances += 1
                S = Sieve(c, bits, C)
                P = sieve_presheaf(S)
                F = sheafify(P, J)
                G = sheafify(F.underlying, J)
                if not presheaves_isomorphic(F.underlying, G.underlying):
                    res.fail(f"{s.id}:idempotent:{c}:{bits}")
                if unit_is_iso(F) != is_sheaf(P, J) or not unit_is_iso(G):
                    res.fail(f"{s.id}:unit:{c}:{bits}")
                if is_zero_sieve(S, J) != is_zero_sieve_direct(S, J):
                    res.fail(f"{s.id}:zero:{c}:{bits}")
            if len(subsheaves(ell(J, c), J)) != len(closed_sieve_bits(J, c)):
                res.fail(f"{s.id}:subobjects:{c}")
    return res


def bridge_suite(sites: list[Site], reports: list[ClassificationReport] | None = None
                 ) -> tuple[SuiteResult, list[dict]]:
    """Every dense proper full subcategory classifies like the whole site."""
    res = SuiteResult("bridge")
    records = []
    known = {r.site: r for r in reports or ()}
    for s in sites:
        C = s.category
        for r in range(1, len(C.objects)):
            for D in combinations(C.objects, r):
                v = bridge_check(C, s.topology, D, s.id, known.get(s.id))
                records.append(v.record(s.id))
                if not v.dense:
                    continue
                res.instances += 1
                res.findings += bool(v.tolerated())
                if not v.agree:
                    res.fail(f"{s.id}|{','.join(D)}")
    return res, records


def enumeration_baselines(sites: list[Site]) -> SuiteResult:
    from ..fixtures import one

    res = SuiteResult("enumeration")
    res.instances += 1
    if len(enumerate_topologies(one())) != 2:
        res.fail("ONE")
    for s in sites:
        res.instances += 1
        C, J = s.category, s.topology
        if topology_violations(C, J.covers):
            res.fail(f"{s.id}:invalid")
        if saturate_bits(C, J.covers) != J.covers:
            res.fail(f"{s.id}:not-a-fixpoint")
    return res


# -- selftest ------------------------------------------------------------------


def selftest(out: TextIO, log: TextIO | None = None, env: Mapping[str, str] | None = None) -> bool:
    """Run every suite, write the JSON-lines report to ``out``; timings go to ``log``."""
    sweep, trivial = corpus_bounds(env)

    def note(msg):
        if log is not None:
            print(msg, file=log, flush=True)

    t0 = time.monotonic()
    suites = [localic_preorder_sweep(trivial)]
    note(f"localic-vs-preorder: {time.monotonic() - t0:.1f}s")
    sites = topology_corpus(sweep)
    reports, main, loc = classification_sweep(sites)
    note(f"classification of {len(sites)} sites: {time.monotonic() - t0:.1f}s")
    for r in reports:
        out.write(r.to_json() + "\n")
    bsuite, brecords = bridge_suite(sites, reports)
    for rec in brecords:
        out.write(dumps(rec) + "\n")
    note(f"bridges: {time.monotonic() - t0:.1f}s")
    sh = sheafification_suite(sites)
    note(f"sheafification: {time.monotonic() - t0:.1f}s")
    suites += [main, loc, sh, bsuite, enumeration_baselines(sites)]
    for s in suites:
        out.write(dumps(s.record()) + "\n")
        note(f"{'PASS' if s.passed else 'FAIL'} {s.name}: {s.instances} instances, "
             f"{len(s.failures)} failures, {s.findings} findings")
    return all(s.passed for s in suites)


def iter_findings(reports: list[ClassificationReport]) -> Iterator[ClassificationReport]:
    return (r for r in reports if r.status == FINDING)


def iter_failures(reports: list[ClassificationReport]) -> Iterator[ClassificationReport]:
    return (r for r in reports if r.status == FAILURE)
