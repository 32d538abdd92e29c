"""Site-level tests for topos invariants.

Each ``is_*`` / ``has_*`` function decides a property of ``Sh(C, J)``
purely from the combinatorics of the site: sieves, pullbacks, covers and
(for the presheaf-type test on non-subcanonical sites) the functor ``l``.
Every verdict carries a witness that can be re-checked independently.

Family searches take the union over *all* admissible components, which is
the best possible family because covering is upward closed; the witness
lists, in canonical order, the components that actually add arrows.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .fincat import FiniteCategory
from .sieve import (
    Sieve,
    bits_of,
    generate_bits,
    maximal_bits,
    members_of,
    pullback_bits,
    sieve_bits_on,
)
from .sheaf import ell_map, eta, is_subcanonical
from .topology import (
    GrothendieckTopology,
    JIdeal,
    _indices,
    closed_sieve_bits,
    closure_bits,
    dense_bits,
    j_ideals,
)


@dataclass
class CriterionVerdict:
    value: bool
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.value


@dataclass(frozen=True)
class IMatchingFamily:
    """A compatible choice of arrows ``alpha[d]: d -> target`` for ``d`` in an ideal."""

    ideal: JIdeal
    target: str
    alpha: tuple  # ((object, arrow), ...) sorted by object

    def arrows(self) -> tuple[str, ...]:
        return tuple(a for _, a in self.alpha)

    def as_dict(self):
        return {"ideal": sorted(self.ideal.members), "alpha": dict(self.alpha)}


class CriterionError(ValueError):
    pass


def _check_site(C, J):
    if J.category is not C and J.category != C:
        raise CriterionError("topology belongs to a different category")


def _zero(J, d):
    return 0 in J.covers[d]


def _require_closed(J, S):
    if closure_bits(J, S.codomain, S.bits) != S.bits:
        raise CriterionError(f"{S!r} is not J-closed")


def _sieve_list(C, bits):
    return list(members_of(C, bits))


# -- localic -------------------------------------------------------------------


def i_matching_families(C: FiniteCategory, ideal: JIdeal, c: str) -> list[IMatchingFamily]:
    objs = sorted(ideal.members)
    out = []
    choice: dict = {}
    links = [(g, C.dom[g], C.cod[g]) for g in C.arrows
             if C.dom[g] in ideal.members and C.cod[g] in ideal.members]

    def consistent(d):
        for g, src, tgt in links:
            if (src == d or tgt == d) and src in choice and tgt in choice:
                if C.compose(choice[tgt], g) != choice[src]:
                    return False
        return True

    def rec(i):
        if i == len(objs):
            out.append(IMatchingFamily(ideal, c, tuple((d, choice[d]) for d in objs)))
            return
        d = objs[i]
        for a in C.hom(d, c):
            choice[d] = a
            if consistent(d):
                rec(i + 1)
            del choice[d]

    rec(0)
    return out


def is_localic(C: FiniteCategory, J: GrothendieckTopology) -> CriterionVerdict:
    """Subterminal separation, tested through ideals and their matching families."""
    _check_site(C, J)
    ideals = j_ideals(C, J)
    per_object = {}
    for c in C.objects:
        gens = 0
        used = []
        for I in ideals:
            for alpha in i_matching_families(C, I, c):
                s = bits_of(C, alpha.arrows())
                if s & ~gens:
                    used.append(alpha.as_dict())
                    gens |= s
        sieve = generate_bits(C, gens)
        if sieve not in J.covers[c]:
            return CriterionVerdict(False, {"object": c, "best_sieve": _sieve_list(C, sieve)})
        per_object[c] = {"families": used, "sieve": _sieve_list(C, sieve)}
    return CriterionVerdict(True, {"covers": per_object})


def _equalizes_everything(C: FiniteCategory, f: str) -> bool:
    d = C.dom[f]
    for e in C.objects:
        images = {C.compose(f, g) for g in C.hom(e, d)}
        if len(images) > 1:
            return False
    return True


def localic_geometric_shortcut(C: FiniteCategory, coverage: Mapping[str, Iterable] | None) -> CriterionVerdict:
    """Localic test for a site the caller declares geometric.

    Looks for a covering family, among those supplied in ``coverage`` plus
    the identity family, whose arrows each identify all parallel pairs
    into their domain.
    """
    if coverage is None:
        raise CriterionError("site is not presented by a coverage")
    chosen = {}
    for c in C.objects:
        families = [list(fam) for fam in coverage.get(c, ())] + [[C.identity[c]]]
        for fam in families:
            if all(_equalizes_everything(C, f) for f in fam):
                chosen[c] = fam
                break
        else:
            return CriterionVerdict(False, {"object": c})
    return CriterionVerdict(True, {"families": chosen})


# -- atomic --------------------------------------------------------------------


def _atom_bits(J, c, S):
    C = J.category
    if all(_zero(J, C.dom[C.arrows[f]]) for f in _indices(S)):
        return False
    for T in sieve_bits_on(C, c):
        if T & ~S:
            continue
        if dense_bits(J, T, S):
            continue
        if all(_zero(J, C.dom[C.arrows[g]]) for g in _indices(T)):
            continue
        return False
    return True


def is_atom_sieve(S: Sieve, J: GrothendieckTopology) -> bool:
    """Whether ``a_J(S)`` is an atom, for a J-closed sieve ``S``."""
    _require_closed(J, S)
    return J.memo(("atom_sieve", S.codomain, S.bits), lambda: _atom_bits(J, S.codomain, S.bits))


def _atomic_generator(J, f: str) -> bool:
    C = J.category
    d = C.dom[f]
    if _zero(J, d):
        return False
    fi = C.index[f]
    for k in C.into[d]:
        g = C.compose(f, k)
        if _zero(J, C.dom[g]):
            continue
        pg = generate_bits(C, 1 << C.index[g])
        if pullback_bits(C, fi, pg) not in J.covers[d]:
            return False
    return True


def is_atomic(C: FiniteCategory, J: GrothendieckTopology, method: str = "principal") -> CriterionVerdict:
    """Atomic separation.

    ``method="principal"`` tests single generating arrows; ``"full"`` tests
    every J-closed sieve with :func:`is_atom_sieve`.  The two must agree.
    """
    _check_site(C, J)
    per_object = {}
    for c in C.objects:
        if method == "principal":
            good = [f for f in C.into[c] if _atomic_generator(J, f)]
            sieve = generate_bits(C, bits_of(C, good))
            detail = {"generators": good}
        elif method == "full":
            atoms = [S for S in closed_sieve_bits(J, c) if is_atom_sieve(Sieve(c, S, C), J)]
            sieve = 0
            for S in atoms:
                sieve |= S
            detail = {"atoms": [_sieve_list(C, S) for S in atoms]}
        else:
            raise ValueError(f"unknown method {method!r}")
        if sieve not in J.covers[c]:
            return CriterionVerdict(False, {"object": c, "best_sieve": _sieve_list(C, sieve)})
        detail["sieve"] = _sieve_list(C, sieve)
        per_object[c] = detail
    return CriterionVerdict(True, {"covers": per_object})


# -- locally connected ---------------------------------------------------------


def _decomposition(J, c, S):
    """A family of pairwise zero-disjoint subsieves, none dense in ``S``,
    whose union is dense in ``S``; ``None`` if there is none."""
    C = J.category
    zero_arrows = 0
    for f in C.into[c]:
        if _zero(J, C.dom[f]):
            zero_arrows |= 1 << C.index[f]
    # a dense member would satisfy the conclusion, so only non-dense ones matter
    cands = [T for T in sieve_bits_on(C, c) if not T & ~S and not dense_bits(J, T, S)]
    best = []

    def rec(start, chosen, union):
        if chosen and dense_bits(J, union, S):
            best.append(list(chosen))
            return True
        for i in range(start, len(cands)):
            T = cands[i]
            if all(not (T & U & ~zero_arrows) for U in chosen):
                chosen.append(T)
                if rec(i + 1, chosen, union | T):
                    return True
                chosen.pop()
        return False

    rec(0, [], 0)
    return best[0] if best else None


def is_indecomposable_sieve(S: Sieve, J: GrothendieckTopology) -> bool:
    """Whether ``a_J(S)`` admits no non-trivial coproduct splitting.

    Quantifies over non-empty families of subsieves whose pairwise
    intersections contain only arrows out of zero-covered objects.
    """
    _require_closed(J, S)
    return J.memo(("indec", S.codomain, S.bits),
                  lambda: _decomposition(J, S.codomain, S.bits) is None)


def decomposition_witness(S: Sieve, J: GrothendieckTopology):
    fam = _decomposition(J, S.codomain, S.bits)
    return None if fam is None else [Sieve(S.codomain, T, S.category) for T in fam]


def is_locally_connected(C: FiniteCategory, J: GrothendieckTopology) -> CriterionVerdict:
    _check_site(C, J)
    per_object = {}
    for c in C.objects:
        parts = [S for S in closed_sieve_bits(J, c) if is_indecomposable_sieve(Sieve(c, S, C), J)]
        union = 0
        used = []
        for S in parts:
            if S & ~union:
                used.append(_sieve_list(C, S))
                union |= S
        if union not in J.covers[c]:
            return CriterionVerdict(False, {"object": c, "best_sieve": _sieve_list(C, union)})
        per_object[c] = {"sieves": used, "union": _sieve_list(C, union)}
    return CriterionVerdict(True, {"covers": per_object})


# -- presheaf type -------------------------------------------------------------


def _ell_image(J, g: str, at: str) -> frozenset:
    return J.memo(("l_image", g, at), lambda: frozenset(ell_map(J, g).components[at].values()))


def overline_bits(J: GrothendieckTopology, c: str, bits: int) -> int:
    def compute():
        C = J.category
        out = 0
        members = members_of(C, bits)
        for f in C.into[c]:
            target = eta(J, f)
            d = C.dom[f]
            if any(target in _ell_image(J, g, d) for g in members):
                out |= 1 << C.index[f]
        if out & ~closure_bits(J, c, bits):
            raise AssertionError("overline escaped the J-closure")
        return out
    return J.memo(("overline", c, bits), compute)


def overline(S: Sieve, J: GrothendieckTopology) -> Sieve:
    """Arrows ``f`` such that ``l(f)`` factors through ``l(g)`` for some ``g ∈ S``."""
    return Sieve(S.codomain, overline_bits(J, S.codomain, S.bits), S.category)


def is_l_closed(S: Sieve, J: GrothendieckTopology) -> bool:
    return overline_bits(J, S.codomain, S.bits) == S.bits


def is_irreducible_principal(f: str, J: GrothendieckTopology) -> bool:
    """Whether ``l((f))`` is irreducible.

    For every l-closed ``S ⊆ (f)``: ``f*(S)`` covers ``dom f`` iff ``f ∈ S``.
    On subcanonical sites every sieve is l-closed and the filter is skipped.
    """
    def compute():
        C = J.category
        c, fi = C.cod[f], C.index[f]
        pf = generate_bits(C, 1 << fi)
        skip_filter = is_subcanonical(J)
        for S in sieve_bits_on(C, c):
            if S & ~pf:
                continue
            if not skip_filter and overline_bits(J, c, S) != S:
                continue
            if (pullback_bits(C, fi, S) in J.covers[C.dom[f]]) != bool(S >> fi & 1):
                return False
        return True
    return J.memo(("irreducible", f), compute)


def is_presheaf_type(C: FiniteCategory, J: GrothendieckTopology) -> CriterionVerdict:
    """Separation by irreducibles, through composable pairs ``(k, w)``."""
    _check_site(C, J)
    good = {k for k in C.arrows if is_irreducible_principal(k, J)}
    per_object = {}
    for c in C.objects:
        gens = 0
        pairs = []
        for w in C.into[c]:
            for k in C.into[C.dom[w]]:
                if k not in good:
                    continue
                wk = 1 << C.index[C.compose(w, k)]
                if wk & ~gens:
                    pairs.append([k, w])
                    gens |= wk
        sieve = generate_bits(C, gens)
        if sieve not in J.covers[c]:
            return CriterionVerdict(False, {"object": c, "best_sieve": _sieve_list(C, sieve)})
        per_object[c] = {"pairs": pairs, "sieve": _sieve_list(C, sieve)}
    return CriterionVerdict(True, {"covers": per_object})


# -- well-supported ------------------------------------------------------------


def _reaches(C, d, c):
    return bool(C.hom(d, c))


def has_separating_well_supported(C: FiniteCategory, J: GrothendieckTopology,
                                  geometric: bool = False) -> CriterionVerdict:
    """Separation by well-supported objects.

    On the trivial topology the answer is also computed by the
    "arrows between every pair of objects" shortcut, and with
    ``geometric=True`` by the initial/terminal shortcut; any mismatch with
    the general test raises ``AssertionError``.
    """
    _check_site(C, J)
    verdict = _well_supported_general(C, J)
    if all(J.covers[c] == {maximal_bits(C, c)} for c in C.objects):
        if well_supported_presheaf_shortcut(C) != verdict.value:
            raise AssertionError("presheaf shortcut disagrees with the general test")
    if geometric:
        if well_supported_geometric_shortcut(C, J) != verdict.value:
            raise AssertionError("geometric shortcut disagrees with the general test")
    return verdict


def _well_supported_general(C, J):
    per_object = {}
    for c in C.objects:
        if _zero(J, c):
            per_object[c] = "zero"
            continue
        chosen = {}
        for d in C.objects:
            for S in sorted(J.covers[d], key=lambda b: (b.bit_count(), b)):
                if all(_reaches(C, C.dom[C.arrows[f]], c) for f in _indices(S)):
                    chosen[d] = _sieve_list(C, S)
                    break
            else:
                return CriterionVerdict(False, {"object": c, "uncovered": d})
        per_object[c] = chosen
    return CriterionVerdict(True, {"covers": per_object})


def well_supported_presheaf_shortcut(C: FiniteCategory) -> bool:
    return all(C.hom(c, d) for c in C.objects for d in C.objects)


def _terminal(C):
    for t in C.objects:
        if all(len(C.hom(c, t)) == 1 for c in C.objects):
            return t
    return None


def _initial(C):
    for i in C.objects:
        if all(len(C.hom(i, c)) == 1 for c in C.objects):
            return i
    return None


def well_supported_geometric_shortcut(C: FiniteCategory, J: GrothendieckTopology) -> bool:
    """Every object is initial or its arrow to the terminal object covers."""
    t, i = _terminal(C), _initial(C)
    if t is None or i is None:
        raise CriterionError("geometric shortcut needs initial and terminal objects")
    for c in C.objects:
        if len(C.hom(c, i)) == 1 and len(C.hom(i, c)) == 1:
            # c ≅ initial: both composites are forced to be identities
            continue
        bang = C.hom(c, t)[0]
        if generate_bits(C, 1 << C.index[bang]) not in J.covers[t]:
            return False
    return True


# -- witness re-checking -------------------------------------------------------


def recheck(name: str, C: FiniteCategory, J: GrothendieckTopology, verdict: CriterionVerdict) -> bool:
    """Re-validate a positive verdict's witness from scratch.

    Negative verdicts carry the failing object and the best sieve found;
    those are re-checked to be non-covering.
    """
    w = verdict.witness
    if not verdict.value:
        if "best_sieve" in w:
            return bits_of(C, w["best_sieve"]) not in J.covers[w["object"]]
        return True
    if name == "well_supported":
        for c, info in w["covers"].items():
            if info == "zero":
                if not _zero(J, c):
                    return False
                continue
            for d, S in info.items():
                if bits_of(C, S) not in J.covers[d]:
                    return False
                if not all(C.hom(C.dom[f], c) for f in S):
                    return False
        return True
    for c, info in w["covers"].items():
        if name == "localic":
            gens = 0
            for fam in info["families"]:
                ideal = set(fam["ideal"])
                alpha = fam["alpha"]
                for g in C.arrows:
                    if C.dom[g] in ideal and C.cod[g] in ideal:
                        if C.compose(alpha[C.cod[g]], g) != alpha[C.dom[g]]:
                            return False
                gens |= bits_of(C, alpha.values())
            S = generate_bits(C, gens)
        elif name == "atomic":
            if "generators" in info:
                if not all(_atomic_generator(J, f) for f in info["generators"]):
                    return False
                S = generate_bits(C, bits_of(C, info["generators"]))
            else:
                S = 0
                for s in info["atoms"]:
                    if not is_atom_sieve(Sieve(c, bits_of(C, s), C), J):
                        return False
                    S |= bits_of(C, s)
        elif name == "locally_connected":
            S = 0
            for s in info["sieves"]:
                if not is_indecomposable_sieve(Sieve(c, bits_of(C, s), C), J):
                    return False
                S |= bits_of(C, s)
        elif name == "presheaf_type":
            gens = 0
            for k, wv in info["pairs"]:
                if C.cod[k] != C.dom[wv] or not is_irreducible_principal(k, J):
                    return False
                gens |= 1 << C.index[C.compose(wv, k)]
            S = generate_bits(C, gens)
        else:
            raise ValueError(name)
        if S not in J.covers[c]:
            return False
    return True


INVARIANTS = ("localic", "atomic", "locally_connected", "presheaf_type", "well_supported")

CRITERIA = {
    "localic": is_localic,
    "atomic": is_atomic,
    "locally_connected": is_locally_connected,
    "presheaf_type": is_presheaf_type,
    "well_supported": has_separating_well_supported,
}
