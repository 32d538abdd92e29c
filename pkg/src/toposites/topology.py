"""Grothendieck topologies on finite categories.

Topologies are stored extensionally: for every object the full set of
covering sieves (as bit-sets).  At the sizes this package targets that is
small, and it makes the axiom checks, saturation and enumeration direct.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping

from .fincat import FiniteCategory, ValidationError, Violation
from .sieve import (
    Sieve,
    bits_of,
    generate_bits,
    make_sieve,
    maximal_bits,
    members_of,
    pullback_bits,
    sieve_bits_on,
)


class TopologyError(ValidationError):
    pass


class GrothendieckTopology:
    def __init__(self, category: FiniteCategory, covers: Mapping[str, Iterable[int]]):
        self.category = category
        self.covers: dict[str, frozenset[int]] = {
            c: frozenset(covers.get(c, ())) for c in category.objects
        }
        # memo for derived data (closures, sheafifications, ...); same key, same value
        self._memo: dict = {}

    def covering_sieves(self, c: str) -> list[Sieve]:
        C = self.category
        return [Sieve(c, b, C) for b in sorted(self.covers[c], key=lambda b: (b.bit_count(), b))]

    def is_covering(self, S: Sieve) -> bool:
        return S.bits in self.covers[S.codomain]

    def covers_empty(self, c: str) -> bool:
        return 0 in self.covers[c]

    def size(self) -> int:
        return sum(len(v) for v in self.covers.values())

    def key(self) -> tuple:
        return tuple((c, tuple(sorted(self.covers[c]))) for c in self.category.objects)

    def to_dict(self) -> dict:
        """``{"covers": {object: [[arrow ids], ...]}}`` in canonical order."""
        C = self.category
        return {"covers": {
            c: [list(members_of(C, b)) for b in sorted(self.covers[c], key=lambda b: (b.bit_count(), b))]
            for c in C.objects
        }}

    def memo(self, key, compute):
        try:
            return self._memo[key]
        except KeyError:
            val = self._memo[key] = compute()
            return val

    def __eq__(self, other):
        if not isinstance(other, GrothendieckTopology):
            return NotImplemented
        return self.category == other.category and self.covers == other.covers

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"<GrothendieckTopology {self.size()} covering sieves>"


def _as_bits(C, c, s) -> int:
    if isinstance(s, Sieve):
        if s.codomain != c:
            raise TopologyError("sieve listed under the wrong object", [Violation("codomain", (c, repr(s)))])
        return s.bits
    return make_sieve(C, c, s).bits


def topology_violations(C: FiniteCategory, covers: Mapping[str, frozenset[int]]) -> list[Violation]:
    out = []
    for c in C.objects:
        if maximal_bits(C, c) not in covers[c]:
            out.append(Violation("maximality", (c,)))
    for h in C.arrows:
        hi, c, d = C.index[h], C.cod[h], C.dom[h]
        for S in sorted(covers[c]):
            p = pullback_bits(C, hi, S)
            if p not in covers[d]:
                out.append(Violation("stability", (c, members_of(C, S), h)))
    for c in C.objects:
        for S in sorted(covers[c]):
            arrows = [C.index[f] for f in members_of(C, S)]
            for R in sieve_bits_on(C, c):
                if R in covers[c]:
                    continue
                if all(pullback_bits(C, f, R) in covers[C.dom[C.arrows[f]]] for f in arrows):
                    out.append(Violation("transitivity", (c, members_of(C, S), members_of(C, R))))
    return out


def validate_topology(C: FiniteCategory, raw) -> GrothendieckTopology:
    """Check the three axioms exhaustively.

    ``raw`` maps each object to an iterable of sieves (``Sieve`` values or
    member lists).  Objects that are not mentioned get no covers, which
    violates maximality.
    """
    if isinstance(raw, GrothendieckTopology):
        covers = raw.covers
    else:
        covers = {c: frozenset(_as_bits(C, c, s) for s in raw.get(c, ())) for c in C.objects}
        unknown = set(raw) - set(C.objects)
        if unknown:
            raise TopologyError("covers listed for unknown objects",
                                [Violation("unknown object", (x,)) for x in sorted(unknown)])
    v = topology_violations(C, covers)
    if v:
        raise TopologyError("not a Grothendieck topology", v)
    return GrothendieckTopology(C, covers)


def saturate_bits(C: FiniteCategory, start: Mapping[str, Iterable[int]]) -> dict[str, frozenset[int]]:
    J = {c: set(start.get(c, ())) | {maximal_bits(C, c)} for c in C.objects}
    sieves = {c: sieve_bits_on(C, c) for c in C.objects}
    changed = True
    while changed:
        changed = False
        for h in C.arrows:
            hi, c, d = C.index[h], C.cod[h], C.dom[h]
            for S in list(J[c]):
                p = pullback_bits(C, hi, S)
                if p not in J[d]:
                    J[d].add(p)
                    changed = True
        for c in C.objects:
            for R in sieves[c]:
                if R in J[c]:
                    continue
                for S in list(J[c]):
                    if all(pullback_bits(C, f, R) in J[C.dom[C.arrows[f]]]
                           for f in _indices(S)):
                        J[c].add(R)
                        changed = True
                        break
    return {c: frozenset(v) for c, v in J.items()}


def _indices(bits):
    i = 0
    while bits:
        if bits & 1:
            yield i
        bits >>= 1
        i += 1


def saturate(C: FiniteCategory, coverage: Mapping[str, Iterable] | None = None) -> GrothendieckTopology:
    """Smallest topology in which every listed family covers its object.

    Each entry of ``coverage[c]`` is a ``Sieve`` or any iterable of arrows
    into ``c``; the latter is read as a covering family and replaced by the
    sieve it generates.
    """
    coverage = coverage or {}
    start = {}
    for c, fams in coverage.items():
        if c not in C.objects:
            raise TopologyError("coverage for unknown object", [Violation("unknown object", (c,))])
        bucket = start.setdefault(c, set())
        for fam in fams:
            if isinstance(fam, Sieve):
                bucket.add(fam.bits)
                continue
            fam = list(fam)
            bad = [f for f in fam if C.cod[f] != c]
            if bad:
                raise TopologyError("covering family with wrong codomain",
                                    [Violation("codomain", (c, f)) for f in bad])
            bucket.add(generate_bits(C, bits_of(C, fam)))
    return GrothendieckTopology(C, saturate_bits(C, start))


def trivial_topology(C: FiniteCategory) -> GrothendieckTopology:
    return GrothendieckTopology(C, {c: {maximal_bits(C, c)} for c in C.objects})


def closure_bits(J: GrothendieckTopology, c: str, bits: int) -> int:
    key = ("closure", c, bits)
    got = J._memo.get(key)
    if got is None:
        C = J.category
        got = 0
        for f in C.into[c]:
            i = C.index[f]
            if pullback_bits(C, i, bits) in J.covers[C.dom[f]]:
                got |= 1 << i
        J._memo[key] = got
    return got


def closure(J: GrothendieckTopology, S: Sieve) -> Sieve:
    """``{f into c | f*(S) covers dom(f)}``."""
    return Sieve(S.codomain, closure_bits(J, S.codomain, S.bits), S.category)


def is_closed(J: GrothendieckTopology, S: Sieve) -> bool:
    return closure_bits(J, S.codomain, S.bits) == S.bits


def is_covering_by_closure(J: GrothendieckTopology, S: Sieve) -> bool:
    return closure_bits(J, S.codomain, S.bits) == maximal_bits(J.category, S.codomain)


def closed_sieve_bits(J: GrothendieckTopology, c: str) -> tuple[int, ...]:
    return J.memo(("closed", c), lambda: tuple(
        b for b in sieve_bits_on(J.category, c) if closure_bits(J, c, b) == b))


def closed_sieves(J: GrothendieckTopology, c: str) -> list[Sieve]:
    return [Sieve(c, b, J.category) for b in closed_sieve_bits(J, c)]


def dense_bits(J: GrothendieckTopology, T: int, S: int) -> bool:
    C = J.category
    for f in _indices(S):
        if pullback_bits(C, f, T) not in J.covers[C.dom[C.arrows[f]]]:
            return False
    return True


def is_dense_in(J: GrothendieckTopology, T: Sieve, S: Sieve) -> bool:
    """Whether ``f*(T)`` covers for every ``f`` in ``S`` (``T ⊆ S`` required)."""
    if T.codomain != S.codomain or not T <= S:
        raise ValueError(f"{T!r} is not a subsieve of {S!r}")
    return dense_bits(J, T.bits, S.bits)


def is_zero_object(J: GrothendieckTopology, c: str) -> bool:
    return 0 in J.covers[c]


# -- J-ideals ------------------------------------------------------------------


@dataclass(frozen=True)
class JIdeal:
    members: frozenset

    def __contains__(self, c):
        return c in self.members

    def __repr__(self):
        return "JIdeal{" + ", ".join(sorted(self.members)) + "}"


def is_j_ideal(J: GrothendieckTopology, objs: Iterable[str]) -> bool:
    C = J.category
    I = set(objs)
    for f in C.arrows:
        if C.cod[f] in I and C.dom[f] not in I:
            return False
    for c in C.objects:
        if c in I:
            continue
        for S in J.covers[c]:
            if all(C.dom[f] in I for f in members_of(C, S)):
                return False
    return True


def j_ideals(C: FiniteCategory, J: GrothendieckTopology) -> list[JIdeal]:
    """Every downward-closed, J-closed set of objects, smallest first."""
    out = []
    for r in range(len(C.objects) + 1):
        for objs in combinations(C.objects, r):
            if is_j_ideal(J, objs):
                out.append(JIdeal(frozenset(objs)))
    return out


def zero_ideal(J: GrothendieckTopology) -> JIdeal:
    return JIdeal(frozenset(c for c in J.category.objects if 0 in J.covers[c]))
