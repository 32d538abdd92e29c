"""Decide topos invariants by computing inside ``Sh(C, J)``.

Nothing here calls into :mod:`toposites.criteria`; agreement between the
two modules is meant to be evidence, so they only share the sieve,
topology and sheafification layers.

Subobjects of ``l(c)`` are named by J-closed sieves on ``c``.  Object
properties are decided on the sheafified objects themselves (value sets,
supports, isomorphism with the initial sheaf, natural transformations),
and epimorphic families of subobjects by comparing the closure of their
union with the target sieve.
"""
from __future__ import annotations

from dataclasses import dataclass

from .fincat import FiniteCategory
from .sheaf import (
    SheafObject,
    a_J_of_sieve,
    ell,
    is_zero_sheaf,
    natural_transformations,
    sieve_on_sheaf_is_epimorphic,
)
from .sieve import Sieve, bits_of, maximal_bits
from .topology import GrothendieckTopology, closed_sieve_bits, closure_bits

KINDS = ("subterminal", "atom", "indecomposable", "irreducible", "well-supported")


@dataclass(frozen=True)
class ObjectProperty:
    kind: str
    subject: Sieve

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown property {self.kind!r}")


@dataclass
class OracleVerdict:
    value: bool
    witness: dict

    def __bool__(self):
        return self.value


def _subject_sieve(J: GrothendieckTopology, subject) -> Sieve:
    C = J.category
    if isinstance(subject, str):
        if subject not in C.objects:
            raise ValueError(f"unknown object {subject!r}")
        return Sieve(subject, maximal_bits(C, subject), C)
    if not isinstance(subject, Sieve):
        raise TypeError(f"subject must be an object or a Sieve, got {subject!r}")
    if closure_bits(J, subject.codomain, subject.bits) != subject.bits:
        raise ValueError(f"{subject!r} is not J-closed")
    return subject


def _sheaf(J, S) -> SheafObject:
    return a_J_of_sieve(S, J)[0]


def _is_zero(J, S: Sieve) -> bool:
    return J.memo(("o_zero", S.codomain, S.bits), lambda: is_zero_sheaf(_sheaf(J, S), J))


def _closed_subsieves(J, S: Sieve) -> list[Sieve]:
    C = J.category
    return [Sieve(S.codomain, T, C) for T in closed_sieve_bits(J, S.codomain) if not T & ~S.bits]


def _covers_subject(J, parts, S: Sieve) -> bool:
    arrows = set()
    for T in parts:
        arrows.update(T.members)
    return sieve_on_sheaf_is_epimorphic(arrows, S, J)


def _subterminal(J, S):
    return all(len(v) <= 1 for v in _sheaf(J, S).value.values())


def _atom(J, S):
    if _is_zero(J, S):
        return False
    return len(_closed_subsieves(J, S)) == 2


def _indecomposable(J, S):
    parts = [T for T in _closed_subsieves(J, S) if not _is_zero(J, T)]

    def disjoint(T, U):
        return _is_zero(J, T & U)

    def rec(start, chosen):
        if len(chosen) >= 2 and _covers_subject(J, chosen, S):
            return True
        for i in range(start, len(parts)):
            if all(disjoint(parts[i], U) for U in chosen):
                chosen.append(parts[i])
                if rec(i + 1, chosen):
                    return True
                chosen.pop()
        return False

    return not rec(0, [])


def _well_supported(J, S):
    C = J.category
    F = _sheaf(J, S)
    for d in C.objects:
        support = 0
        for g in C.into[d]:
            if F.value[C.dom[g]]:
                support |= 1 << C.index[g]
        if support not in J.covers[d]:
            return False
    return True


# -- irreducibility via split epimorphisms -------------------------------------


def _homs(J, key, A, B):
    return J.memo(("o_hom",) + key, lambda: list(natural_transformations(A, B)))


def _transpose(J, S: Sieve, d: str):
    """``{x: x̂}`` where ``x̂ : l(d) -> a_J(S)`` is the map picking ``x ∈ a_J(S)(d)``."""
    C = J.category
    P = _sheaf(J, S).underlying
    ld = ell(J, d)
    generic = ld.unit.components[d][C.identity[d]]
    out = {}
    for m in _homs(J, ("to", S.codomain, S.bits, d), ld.underlying, P):
        out[m[d][generic]] = m
    return out


def _irreducible(J, S):
    """``P = a_J(S)`` is irreducible iff the elements ``x: l(d) -> P`` that
    are not split epimorphisms do not jointly cover ``P``."""
    C = J.category
    P = _sheaf(J, S).underlying
    non_split = {}
    for d in C.objects:
        if not P.value[d]:
            non_split[d] = set()
            continue
        sections = _homs(J, ("from", S.codomain, S.bits, d), P, ell(J, d).underlying)
        hats = _transpose(J, S, d)
        bad = set()
        for x in P.value[d]:
            xh = hats[x]
            split = any(
                all(xh[e][s[e][z]] == z for e in C.objects for z in P.value[e])
                for s in sections
            )
            if not split:
                bad.add(x)
        non_split[d] = bad
    for e in C.objects:
        for z in P.value[e]:
            hit = 0
            for g in C.into[e]:
                if P.action[g, z] in non_split[C.dom[g]]:
                    hit |= 1 << C.index[g]
            if hit not in J.covers[e]:
                return True
    return False


_DECIDERS = {
    "subterminal": _subterminal,
    "atom": _atom,
    "indecomposable": _indecomposable,
    "irreducible": _irreducible,
    "well-supported": _well_supported,
}


def oracle_object_property(J: GrothendieckTopology, subject, kind: str) -> bool:
    """Decide ``kind`` for the subobject ``a_J(S)`` of ``l(c)``.

    ``subject`` is a J-closed sieve or an object (meaning ``l(c)`` itself).
    """
    if kind not in _DECIDERS:
        raise ValueError(f"unknown property {kind!r}")
    S = _subject_sieve(J, subject)
    return J.memo(("oracle", kind, S.codomain, S.bits), lambda: _DECIDERS[kind](J, S))


# -- invariants ----------------------------------------------------------------

_KIND_OF = {
    "localic": "subterminal",
    "atomic": "atom",
    "locally_connected": "indecomposable",
    "well_supported": "well-supported",
}


def _separated_by_subobjects(C, J, kind):
    witness = {}
    for c in C.objects:
        M = Sieve(c, maximal_bits(C, c), C)
        good = [S for S in _closed_subsieves(J, M) if oracle_object_property(J, S, kind)]
        if not _covers_subject(J, good, M):
            return OracleVerdict(False, {"object": c,
                                         "subobjects": [list(S.members) for S in good]})
        witness[c] = [list(S.members) for S in good]
    return OracleVerdict(True, {"covers": witness})


def _irreducible_candidates(C, J):
    # every irreducible is a retract of some l(d), hence a subobject a_J(S)
    out = []
    for d in C.objects:
        for S in _closed_subsieves(J, Sieve(d, maximal_bits(C, d), C)):
            if oracle_object_property(J, S, "irreducible"):
                out.append(S)
    return out


def _images_dense(C, J, c, candidates):
    """Whether the maps from the candidates into ``l(c)`` are jointly epimorphic.

    Returns the flag and the candidates with at least one map into ``l(c)``.
    """
    L = ell(J, c).underlying
    image = {e: set() for e in C.objects}
    sources = []
    for S in candidates:
        P = _sheaf(J, S).underlying
        maps = _homs(J, ("into", S.codomain, S.bits, c), P, L)
        if maps:
            sources.append(list(S.members))
        for m in maps:
            for e in C.objects:
                image[e].update(m[e].values())
    for e in C.objects:
        for z in L.value[e]:
            hit = 0
            for g in C.into[e]:
                if L.action[g, z] in image[C.dom[g]]:
                    hit |= 1 << C.index[g]
            if hit not in J.covers[e]:
                return False, sources
    return True, sources


def _presheaf_type(C, J):
    candidates = _irreducible_candidates(C, J)
    witness = {}
    for c in C.objects:
        ok, sources = _images_dense(C, J, c, candidates)
        if not ok:
            return OracleVerdict(False, {"object": c, "irreducibles": sources})
        witness[c] = sources
    return OracleVerdict(True, {"covers": witness})


def oracle_invariant(C: FiniteCategory, J: GrothendieckTopology, invariant: str) -> OracleVerdict:
    if invariant == "presheaf_type":
        return _presheaf_type(C, J)
    if invariant not in _KIND_OF:
        raise ValueError(f"unknown invariant {invariant!r}")
    return _separated_by_subobjects(C, J, _KIND_OF[invariant])


def recheck_oracle(C: FiniteCategory, J: GrothendieckTopology, invariant: str,
                   verdict: OracleVerdict) -> bool:
    """Re-validate an oracle witness.

    Positive witnesses list, per object, the subobjects used; each must
    have the property and together they must cover.  Negative witnesses
    name an object and all subobjects with the property at it; the list
    must be complete and must fail to cover.
    """
    w = verdict.witness

    def sieves(c, lists):
        return [Sieve(c, bits_of(C, s), C) for s in lists]

    if invariant == "presheaf_type":
        if verdict.value:
            for c, srcs in w["covers"].items():
                # an irreducible is never the initial sheaf, so no listed sieve is empty
                cands = [Sieve(C.cod[s[0]], bits_of(C, s), C) for s in srcs]
                if not all(_irreducible(J, S) for S in cands):
                    return False
                if not _images_dense(C, J, c, cands)[0]:
                    return False
            return set(w["covers"]) == set(C.objects)
        ok, sources = _images_dense(C, J, w["object"], _irreducible_candidates(C, J))
        return not ok and sources == w["irreducibles"]
    kind = _KIND_OF[invariant]
    if verdict.value:
        for c, lists in w["covers"].items():
            parts = sieves(c, lists)
            if not all(_DECIDERS[kind](J, S) for S in parts):
                return False
            if not _covers_subject(J, parts, Sieve(c, maximal_bits(C, c), C)):
                return False
        return set(w["covers"]) == set(C.objects)
    c = w["object"]
    M = Sieve(c, maximal_bits(C, c), C)
    good = [S for S in _closed_subsieves(J, M) if _DECIDERS[kind](J, S)]
    return [list(S.members) for S in good] == w["subobjects"] and not _covers_subject(J, good, M)
