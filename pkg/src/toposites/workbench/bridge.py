"""Compare a site with a dense full subcategory carrying the induced topology.

When every object is covered by a sieve generated from arrows out of
``D``, both sites present the same topos, so every invariant must come
out the same on either side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..criteria import INVARIANTS
from ..fincat import FiniteCategory
from ..sieve import bits_of, generate_bits, sieve_bits_on
from ..topology import GrothendieckTopology, saturate_bits
from .report import ClassificationReport, classify_site


@dataclass
class BridgeVerdict:
    subcategory: tuple[str, ...]
    dense: bool
    # first object (in category order) not covered from D, when not dense
    witness: str | None = None
    induced: GrothendieckTopology | None = None
    full: ClassificationReport | None = None
    restricted: ClassificationReport | None = None
    rows: dict = field(default_factory=dict)

    @property
    def agree(self) -> bool:
        """Oracle rows must match, and so must criterion rows except where a
        localic criterion disagreement is already a finding on either side."""
        for name, row in self.rows.items():
            if not row["oracle"]:
                return False
            if not row["criterion"] and name not in self.tolerated():
                return False
        return True

    def tolerated(self) -> list[str]:
        if not self.dense:
            return []
        return sorted(set(self.full.findings()) | set(self.restricted.findings()))

    def record(self, site: str) -> dict:
        rec = {"kind": "bridge", "site": site, "subcategory": list(self.subcategory),
               "dense": self.dense}
        if not self.dense:
            rec["witness"] = self.witness
            return rec
        rec["agree"] = self.agree
        rec["induced_topology"] = self.induced.to_dict()
        rec["rows"] = self.rows
        rec["findings"] = self.tolerated()
        return rec


def _from_d(C: FiniteCategory, c: str, D) -> int:
    return generate_bits(C, bits_of(C, [f for f in C.into[c] if C.dom[f] in D]))


def is_dense(C: FiniteCategory, J: GrothendieckTopology, D: Iterable[str]) -> str | None:
    """``None`` if ``D`` is J-dense, else the first object it fails to cover."""
    D = set(D)
    for c in C.objects:
        if _from_d(C, c, D) not in J.covers[c]:
            return c
    return None


def induced_topology(C: FiniteCategory, J: GrothendieckTopology, sub: FiniteCategory) -> GrothendieckTopology:
    """Sieves on ``sub`` whose generated sieve in ``C`` covers, then saturated."""
    start = {}
    for d in sub.objects:
        start[d] = {R for R in sieve_bits_on(sub, d)
                    if generate_bits(C, bits_of(C, [sub.arrows[i] for i in _idx(R)])) in J.covers[d]}
    return GrothendieckTopology(sub, saturate_bits(sub, start))


def _idx(bits):
    i = 0
    while bits:
        if bits & 1:
            yield i
        bits >>= 1
        i += 1


def bridge_check(C: FiniteCategory, J: GrothendieckTopology, D: Iterable[str],
                 site: str | None = None, full: ClassificationReport | None = None) -> BridgeVerdict:
    """Check density of ``D`` and, if dense, compare both classifications.

    ``full`` may pass an existing report for ``(C, J)`` to avoid redoing it.
    """
    D = list(D)
    unknown = [d for d in D if d not in C.objects]
    if unknown:
        raise ValueError(f"unknown objects in subcategory: {', '.join(unknown)}")
    if not D and not all(0 in J.covers[c] for c in C.objects):
        raise ValueError("empty subcategory is only allowed on a degenerate site")
    objs = tuple(o for o in C.objects if o in set(D))
    bad = is_dense(C, J, objs)
    if bad is not None:
        return BridgeVerdict(objs, False, bad)
    sub = C.full_subcategory(objs)
    K = induced_topology(C, J, sub)
    site = site or C.name or "site"
    full = full or classify_site(C, J, site)
    restricted = classify_site(sub, K, f"{site}|{','.join(objs)}")
    rows = {n: {"full": full.rows[n].oracle, "restricted": restricted.rows[n].oracle,
                "oracle": full.rows[n].oracle == restricted.rows[n].oracle,
                "criterion": full.rows[n].criterion == restricted.rows[n].criterion}
            for n in INVARIANTS}
    return BridgeVerdict(objs, True, None, K, full, restricted, rows)
