"""Per-site classification: criterion and oracle side by side."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..criteria import CRITERIA, INVARIANTS, recheck
from ..fincat import FiniteCategory
from ..oracle import oracle_invariant, recheck_oracle
from ..sheaf import is_subcanonical
from ..topology import GrothendieckTopology, zero_ideal
from .siteio import site_document

OK = "ok"
FINDING = "FINDING"
FAILURE = "FAILURE"


@dataclass
class InvariantRow:
    invariant: str
    criterion: bool
    oracle: bool
    criterion_witness: dict
    oracle_witness: dict
    witnesses_ok: bool

    @property
    def agree(self) -> bool:
        return self.criterion == self.oracle

    def record(self) -> dict:
        return {
            "criterion": self.criterion,
            "oracle": self.oracle,
            "agree": self.agree,
            "witnesses_ok": self.witnesses_ok,
            "criterion_witness": self.criterion_witness,
            "oracle_witness": self.oracle_witness,
        }


@dataclass
class ClassificationReport:
    site: str
    category: FiniteCategory
    topology: GrothendieckTopology
    subcanonical: bool
    degenerate_objects: list[str]
    rows: dict[str, InvariantRow] = field(default_factory=dict)

    def findings(self) -> list[str]:
        """Disagreements tolerated as findings: localic on non-subcanonical sites."""
        return [n for n, r in self.rows.items()
                if not r.agree and n == "localic" and not self.subcanonical]

    def failures(self) -> list[str]:
        out = []
        for n, r in self.rows.items():
            if not r.witnesses_ok or (not r.agree and n not in self.findings()):
                out.append(n)
        return out

    @property
    def status(self) -> str:
        if self.failures():
            return FAILURE
        return FINDING if self.findings() else OK

    def verdicts(self, side: str = "oracle") -> dict[str, bool]:
        return {n: getattr(r, side) for n, r in self.rows.items()}

    def record(self) -> dict:
        rec = {
            "kind": "site",
            "site": self.site,
            "status": self.status,
            "objects": len(self.category.objects),
            "arrows": len(self.category.arrows),
            "topology_size": self.topology.size(),
            "subcanonical": self.subcanonical,
            "degenerate_objects": self.degenerate_objects,
            "verdicts": {n: [r.criterion, r.oracle] for n, r in self.rows.items()},
            "rows": {n: r.record() for n, r in self.rows.items()},
        }
        if self.status != OK:
            rec["findings"] = self.findings()
            rec["failures"] = self.failures()
            rec["document"] = site_document(self.category, self.topology)
        return rec

    def to_json(self) -> str:
        return dumps(self.record())


def dumps(record: dict) -> str:
    """One report line; key order is the insertion order of ``record``."""
    return json.dumps(record, separators=(",", ":"), default=_jsonable)


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def classify_site(C: FiniteCategory, J: GrothendieckTopology, site: str | None = None) -> ClassificationReport:
    """Run every criterion and every oracle check on ``(C, J)``."""
    rep = ClassificationReport(
        site=site or C.name or "site",
        category=C,
        topology=J,
        subcanonical=is_subcanonical(J),
        degenerate_objects=sorted(zero_ideal(J).members),
    )
    for name in INVARIANTS:
        cv = CRITERIA[name](C, J)
        ov = oracle_invariant(C, J, name)
        ok = recheck(name, C, J, cv) and recheck_oracle(C, J, name, ov)
        rep.rows[name] = InvariantRow(name, bool(cv.value), bool(ov.value),
                                      cv.witness, ov.witness, ok)
    return rep
