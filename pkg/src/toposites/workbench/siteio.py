"""Site files: one JSON document holding a finite category and a topology.

Layout::

    {
      "objects":    ["a", "b"],
      "arrows":     [{"id": "u", "dom": "a", "cod": "b"}, ...],
      "identities": {"a": "id_a", "b": "id_b"},
      "compose":    [{"g": "v", "f": "u", "result": "w"}, ...],
      "topology":   {"covers": {"b": [["u"], ["id_b", "u"]], ...}}
    }

``topology`` may instead be ``{"coverage": {...}, "saturate": true}``, in
which case each listed family is turned into the sieve it generates and
the result is closed under the topology axioms.  Compositions with an
identity may be left out.  A missing ``topology`` means the trivial one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..fincat import FiniteCategory, ValidationError, Violation, validate_category
from ..topology import GrothendieckTopology, saturate, trivial_topology, validate_topology

SITE_KEYS = ("objects", "arrows", "identities", "compose", "topology")
REQUIRED_KEYS = ("objects", "arrows", "identities")


class SiteFormatError(ValidationError):
    pass


@dataclass
class Site:
    id: str
    category: FiniteCategory
    topology: GrothendieckTopology
    # the coverage a topology was saturated from, if it came from one
    coverage: dict | None = field(default=None, compare=False)

    def document(self) -> dict:
        return site_document(self.category, self.topology)


def _reject_unknown(where, got, allowed):
    extra = sorted(set(got) - set(allowed))
    if extra:
        raise SiteFormatError(f"unknown keys in {where}: {', '.join(extra)}",
                              [Violation("unknown key", (where, k)) for k in extra])


def _family_lists(where, raw):
    if not isinstance(raw, dict):
        raise SiteFormatError(f"{where} must map objects to lists of arrow lists")
    out = {}
    for c, fams in raw.items():
        if not isinstance(fams, list) or not all(isinstance(f, list) for f in fams):
            raise SiteFormatError(f"{where}[{c!r}] must be a list of arrow lists")
        for fam in fams:
            if not all(isinstance(a, str) for a in fam):
                raise SiteFormatError(f"{where}[{c!r}] holds a non-string arrow id")
        out[c] = fams
    return out


def parse_site(doc: dict, site_id: str = "site") -> Site:
    """Validate a site document and build the site it describes."""
    if not isinstance(doc, dict):
        raise SiteFormatError("site document must be a JSON object")
    _reject_unknown("site", doc, SITE_KEYS)
    missing = [k for k in REQUIRED_KEYS if k not in doc]
    if missing:
        raise SiteFormatError(f"missing keys: {', '.join(missing)}",
                              [Violation("missing key", (k,)) for k in missing])
    C = validate_category({k: doc[k] for k in SITE_KEYS[:4] if k in doc})
    C.name = site_id
    top = doc.get("topology")
    if top is None:
        return Site(site_id, C, trivial_topology(C))
    if not isinstance(top, dict):
        raise SiteFormatError("topology must be an object")
    if "covers" in top:
        _reject_unknown("topology", top, ("covers",))
        covers = _family_lists("topology.covers", top["covers"])
        _reject_unknown("topology.covers", covers, C.objects)
        return Site(site_id, C, validate_topology(C, covers))
    if "coverage" in top:
        _reject_unknown("topology", top, ("coverage", "saturate"))
        if top.get("saturate") is not True:
            raise SiteFormatError('a coverage needs "saturate": true')
        coverage = _family_lists("topology.coverage", top["coverage"])
        return Site(site_id, C, saturate(C, coverage), coverage)
    raise SiteFormatError('topology needs either "covers" or "coverage"')


def load_site(path: str | Path) -> Site:
    """Read a site file; the site id is the file name without extension."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SiteFormatError(f"{path}: not valid JSON ({exc})") from None
    return parse_site(doc, path.stem)


def site_document(C: FiniteCategory, J: GrothendieckTopology) -> dict:
    """The extensional site document for ``(C, J)``; ``parse_site`` inverts it."""
    doc = C.to_dict()
    doc["topology"] = J.to_dict()
    return doc


def dump_site(C: FiniteCategory, J: GrothendieckTopology) -> str:
    return json.dumps(site_document(C, J), indent=2) + "\n"
