"""Sheafification of finite presheaves and the topos-side computations.

The associated sheaf is the plus construction applied twice.  ``plus``
computes the colimit over covering sieves literally: one node per matching
family over each covering sieve, nodes merged by union-find along every
refinement ``T ⊆ S`` of covering sieves.  ``plus_via_minimal_cover`` is an
independent shortcut (on a finite site the covering sieves of ``c`` have a
least element) kept for cross-checking.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .fincat import FiniteCategory, Presheaf, PresheafMap, representable
from .sieve import (
    Sieve,
    bits_of,
    generate_bits,
    maximal_bits,
    members_of,
    pullback_bits,
)
from .topology import GrothendieckTopology, closure_bits, closed_sieve_bits

_UNSET = object()


# -- natural transformations ---------------------------------------------------


def _orbits(P: Presheaf):
    C = P.category
    return {(c, x): [(C.dom[g], P.action[g, x], g) for g in C.into[c]]
            for c, x in P.elements()}


def natural_transformations(A: Presheaf, B: Presheaf, injective: bool = False):
    """Yield every natural transformation ``A -> B`` as ``{object: {x: y}}``.

    Backtracking over the elements of ``A``: choosing the image of ``x``
    forces the images of all its restrictions, and conflicts prune.
    Elements with small orbits go first, so that by the time an element is
    reached most of its restrictions are placed and its candidates can be
    looked up rather than scanned.
    """
    C = A.category
    orbit = _orbits(A)
    elements = sorted(A.elements(), key=lambda e: len({(d, y) for d, y, _ in orbit[e]}))
    # (g, w) -> elements z of B with B(g)(z) = w
    index: dict = {}
    for c in C.objects:
        for z in B.value[c]:
            for g in C.into[c]:
                index.setdefault((g, B.action[g, z]), []).append(z)
    assign: dict = {}
    used = {c: {} for c in C.objects}

    def place(d, y, w, added):
        prev = assign.get((d, y), _UNSET)
        if prev is _UNSET:
            if injective:
                if w in used[d]:
                    return False
                used[d][w] = y
            assign[d, y] = w
            added.append((d, y))
            return True
        return prev == w

    def candidates(c, x):
        best = None
        for d, y, g in orbit[c, x]:
            w = assign.get((d, y), _UNSET)
            if w is _UNSET:
                continue
            zs = index.get((g, w), ())
            if best is None or len(zs) < len(best):
                best = zs
                if not zs:
                    break
        return B.value[c] if best is None else best

    def rec(i):
        while i < len(elements) and elements[i] in assign:
            i += 1
        if i == len(elements):
            comps = {c: {} for c in C.objects}
            for (d, y), w in assign.items():
                comps[d][y] = w
            yield comps
            return
        c, x = elements[i]
        for z in candidates(c, x):
            added = []
            ok = all(place(d, y, B.action[g, z], added) for d, y, g in orbit[c, x])
            if ok:
                yield from rec(i + 1)
            for key in added:
                w = assign.pop(key)
                if injective:
                    del used[key[0]][w]

    yield from rec(0)


def presheaves_isomorphic(P: Presheaf, Q: Presheaf) -> bool:
    if P.sizes() != Q.sizes():
        return False
    for _ in natural_transformations(P, Q, injective=True):
        return True
    return False


# -- sieves as presheaves ------------------------------------------------------


def sieve_presheaf(S: Sieve) -> Presheaf:
    """``S`` as a subpresheaf of ``C(-, c)``; elements are arrow ids."""
    C = S.category
    members = S.members
    value = {d: tuple(f for f in members if C.dom[f] == d) for d in C.objects}
    action = {(h, f): C.compose(f, h) for f in members for h in C.into[C.dom[f]]}
    return Presheaf(C, value, action)


def empty_presheaf(C: FiniteCategory) -> Presheaf:
    return Presheaf(C, {}, {})


def matching_families(S: Sieve, P: Presheaf) -> list[dict]:
    """All compatible choices ``f ↦ x_f ∈ P(dom f)`` over the members of ``S``."""
    out = []
    for comps in natural_transformations(sieve_presheaf(S), P):
        fam = {}
        for m in comps.values():
            fam.update(m)
        out.append(fam)
    return out


def sheaf_failure(P: Presheaf, J: GrothendieckTopology):
    """First ``(c, S)`` where gluing fails, or ``None`` if ``P`` is a sheaf."""
    C = J.category
    for c in C.objects:
        for S in J.covering_sieves(c):
            members = S.members
            fams = {tuple(fam[f] for f in members) for fam in matching_families(S, P)}
            restricted = {tuple(P.action[f, x] for f in members) for x in P.value[c]}
            if len(restricted) != len(P.value[c]) or restricted != fams:
                return c, S
    return None


def is_sheaf(P: Presheaf, J: GrothendieckTopology) -> bool:
    return sheaf_failure(P, J) is None


def is_subcanonical(J: GrothendieckTopology) -> bool:
    C = J.category
    return J.memo("subcanonical", lambda: all(
        is_sheaf(representable(C, c), J) for c in C.objects))


# -- plus construction ---------------------------------------------------------


@dataclass
class PlusStage:
    """One application of the plus construction, with enough bookkeeping
    to push presheaf maps through it."""

    source: Presheaf
    result: Presheaf
    unit: PresheafMap
    # object -> {(sieve bits, family tuple): class label}
    classes: dict = field(repr=False)


class _UnionFind:
    def __init__(self):
        self.parent = []

    def add(self):
        self.parent.append(len(self.parent))
        return len(self.parent) - 1

    def find(self, i):
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, i, j):
        i, j = self.find(i), self.find(j)
        if i != j:
            if j < i:
                i, j = j, i
            self.parent[j] = i


def _ordered_covers(J, c):
    return sorted(J.covers[c], key=lambda b: (-b.bit_count(), b))


def plus(P: Presheaf, J: GrothendieckTopology) -> PlusStage:
    C = J.category
    idx = C.index
    classes: dict = {}
    reps: dict = {}
    for c in C.objects:
        uf = _UnionFind()
        node_of: dict = {}
        node_keys = []
        members = {}
        for S in _ordered_covers(J, c):
            members[S] = members_of(C, S)
            for fam in matching_families(Sieve(c, S, C), P):
                key = (S, tuple(fam[f] for f in members[S]))
                node_of[key] = uf.add()
                node_keys.append(key)
        covers = list(members)
        for S in covers:
            pos = {f: i for i, f in enumerate(members[S])}
            for T in covers:
                if T == S or T & ~S:
                    continue
                sel = [pos[f] for f in members[T]]
                for key in node_keys:
                    if key[0] != S:
                        continue
                    sub = (T, tuple(key[1][i] for i in sel))
                    uf.union(node_of[key], node_of[sub])
        label_of_root: dict = {}
        table = {}
        rep = []
        for key in node_keys:
            r = uf.find(node_of[key])
            if r not in label_of_root:
                label_of_root[r] = len(label_of_root)
                rep.append(key)
            table[key] = label_of_root[r]
        classes[c] = table
        reps[c] = rep
    value = {c: tuple(range(len(reps[c]))) for c in C.objects}
    action = {}
    for h in C.arrows:
        c, d, hi = C.cod[h], C.dom[h], idx[h]
        for k, (S, fam) in enumerate(reps[c]):
            pos = {f: i for i, f in enumerate(members_of(C, S))}
            pb = pullback_bits(C, hi, S)
            sub = tuple(fam[pos[C.compose(h, g)]] for g in members_of(C, pb))
            action[h, k] = classes[d][pb, sub]
    result = Presheaf(C, value, action)
    unit = {}
    for c in C.objects:
        M = maximal_bits(C, c)
        ms = members_of(C, M)
        unit[c] = {x: classes[c][M, tuple(P.action[f, x] for f in ms)] for x in P.value[c]}
    return PlusStage(P, result, PresheafMap(P, result, unit), classes)


def plus_map(phi: PresheafMap, A: PlusStage, B: PlusStage) -> PresheafMap:
    """``phi⁺ : A.result -> B.result`` for ``phi : A.source -> B.source``."""
    C = phi.source.category
    comps = {}
    for c in C.objects:
        m = {}
        for (S, fam), k in A.classes[c].items():
            if k in m:
                continue
            ms = members_of(C, S)
            image = tuple(phi.components[C.dom[f]][x] for f, x in zip(ms, fam))
            m[k] = B.classes[c][S, image]
        comps[c] = m
    return PresheafMap(A.result, B.result, comps)


def plus_via_minimal_cover(P: Presheaf, J: GrothendieckTopology) -> Presheaf:
    """``P⁺(c)`` as matching families over the intersection of all covers of ``c``."""
    C = J.category
    least = {}
    for c in C.objects:
        b = maximal_bits(C, c)
        for S in J.covers[c]:
            b &= S
        least[c] = b
    fams = {c: [tuple(f[a] for a in members_of(C, least[c]))
                 for f in matching_families(Sieve(c, least[c], C), P)] for c in C.objects}
    label = {c: {fam: i for i, fam in enumerate(fams[c])} for c in C.objects}
    action = {}
    for h in C.arrows:
        c, d = C.cod[h], C.dom[h]
        pos = {f: i for i, f in enumerate(members_of(C, least[c]))}
        for fam, k in label[c].items():
            # least[d] ⊆ h*(least[c]) because the pullback covers d
            sub = tuple(fam[pos[C.compose(h, g)]] for g in members_of(C, least[d]))
            action[h, k] = label[d][sub]
    return Presheaf(C, {c: tuple(range(len(fams[c]))) for c in C.objects}, action)


# -- sheafification ------------------------------------------------------------


@dataclass
class SheafObject:
    """A sheaf obtained by sheafifying ``source``.

    ``underlying`` is the sheaf itself and ``unit`` the map
    ``source -> underlying``.
    """

    underlying: Presheaf
    topology: GrothendieckTopology = field(repr=False)
    source: Presheaf = field(repr=False)
    unit: PresheafMap = field(repr=False)
    stages: tuple = field(repr=False)

    @property
    def value(self):
        return self.underlying.value

    def sizes(self):
        return self.underlying.sizes()


def sheafify(P: Presheaf, J: GrothendieckTopology) -> SheafObject:
    first = plus(P, J)
    second = plus(first.result, J)
    unit = first.unit.then(second.unit)
    return SheafObject(second.result, J, P, unit, (first, second))


def sheafify_map(phi: PresheafMap, A: SheafObject, B: SheafObject) -> PresheafMap:
    m1 = plus_map(phi, A.stages[0], B.stages[0])
    return plus_map(m1, A.stages[1], B.stages[1])


def unit_is_iso(F: SheafObject) -> bool:
    return F.unit.is_bijective()


def yoneda(J: GrothendieckTopology, c: str) -> Presheaf:
    return J.memo(("y", c), lambda: representable(J.category, c))


def ell(J: GrothendieckTopology, c: str) -> SheafObject:
    """``l(c)``: the sheafified representable at ``c``."""
    return J.memo(("l", c), lambda: sheafify(yoneda(J, c), J))


def ell_map(J: GrothendieckTopology, f: str) -> PresheafMap:
    """``l(f) : l(dom f) -> l(cod f)``."""
    def compute():
        C = J.category
        d, c = C.dom[f], C.cod[f]
        yd, yc = yoneda(J, d), yoneda(J, c)
        comps = {e: {x: C.compose(f, x) for x in yd.value[e]} for e in C.objects}
        return sheafify_map(PresheafMap(yd, yc, comps), ell(J, d), ell(J, c))
    return J.memo(("l_map", f), compute)


def eta(J: GrothendieckTopology, f: str):
    """The element of ``l(cod f)`` at ``dom f`` named by ``f``."""
    C = J.category
    return ell(J, C.cod[f]).unit.components[C.dom[f]][f]


def a_J_of_sieve(S: Sieve, J: GrothendieckTopology) -> tuple[SheafObject, PresheafMap]:
    """``a_J(S)`` together with its monomorphism into ``l(c)``."""
    def compute():
        C = J.category
        c = S.codomain
        SP = sieve_presheaf(S)
        F = sheafify(SP, J)
        incl = PresheafMap(SP, yoneda(J, c), {d: {f: f for f in SP.value[d]} for d in C.objects})
        return F, sheafify_map(incl, F, ell(J, c))
    return J.memo(("aJ", S.codomain, S.bits), compute)


def initial_sheaf(J: GrothendieckTopology) -> SheafObject:
    return J.memo("initial", lambda: sheafify(empty_presheaf(J.category), J))


def is_zero_sheaf(F: SheafObject | Presheaf, J: GrothendieckTopology) -> bool:
    P = F.underlying if isinstance(F, SheafObject) else F
    return presheaves_isomorphic(P, initial_sheaf(J).underlying)


def is_zero_sieve(S: Sieve, J: GrothendieckTopology) -> bool:
    """``a_J(S) ≅ 0``: every member of ``S`` has a domain covered by ``∅``."""
    C = J.category
    return all(0 in J.covers[C.dom[f]] for f in S.members)


def is_zero_sieve_direct(S: Sieve, J: GrothendieckTopology) -> bool:
    return J.memo(("zero_direct", S.codomain, S.bits),
                  lambda: is_zero_sheaf(a_J_of_sieve(S, J)[0], J))


def subobjects_of_ell(J: GrothendieckTopology, c: str) -> list[Sieve]:
    """Subobjects of ``l(c)``, one J-closed sieve per subobject."""
    return [Sieve(c, b, J.category) for b in closed_sieve_bits(J, c)]


def subpresheaves(P: Presheaf) -> list[dict]:
    """Every subpresheaf of ``P`` as ``{object: frozenset}``."""
    C = P.category
    orbit = _orbits(P)
    elems = list(P.elements())
    empty = tuple(frozenset() for _ in C.objects)
    pos = {c: i for i, c in enumerate(C.objects)}
    seen = {empty}
    frontier = [empty]
    while frontier:
        nxt = []
        for Q in frontier:
            for c, x in elems:
                if x in Q[pos[c]]:
                    continue
                add = [set(s) for s in Q]
                for d, y, _ in orbit[c, x]:
                    add[pos[d]].add(y)
                R = tuple(frozenset(s) for s in add)
                if R not in seen:
                    seen.add(R)
                    nxt.append(R)
        frontier = nxt
    out = sorted(seen, key=lambda Q: (sum(map(len, Q)), [sorted(map(repr, s)) for s in Q]))
    return [{c: Q[pos[c]] for c in C.objects} for Q in out]


def restrict_presheaf(P: Presheaf, sub: dict) -> Presheaf:
    C = P.category
    value = {c: tuple(x for x in P.value[c] if x in sub[c]) for c in C.objects}
    action = {(f, x): P.action[f, x] for f in C.arrows for x in value[C.cod[f]]}
    return Presheaf(C, value, action)


def closure_of_subpresheaf(P: Presheaf, sub: dict, J: GrothendieckTopology) -> dict:
    """Elements ``x`` whose sieve ``{f | P(f)(x) ∈ sub}`` covers."""
    C = P.category
    out = {}
    for c in C.objects:
        keep = set()
        for x in P.value[c]:
            bits = 0
            for g in C.into[c]:
                if P.action[g, x] in sub[C.dom[g]]:
                    bits |= 1 << C.index[g]
            if bits in J.covers[c]:
                keep.add(x)
        out[c] = frozenset(keep)
    return out


def subsheaves(F: SheafObject | Presheaf, J: GrothendieckTopology) -> list[dict]:
    """Subpresheaves of the sheaf ``F`` that are themselves sheaves.

    Walks the lattice of closed subpresheaves: each step adds the orbit of
    one element and closes.  Every result is checked with :func:`is_sheaf`.
    """
    P = F.underlying if isinstance(F, SheafObject) else F
    C = P.category
    orbit = _orbits(P)
    elems = list(P.elements())

    def key(Q):
        return tuple(Q[c] for c in C.objects)

    start = closure_of_subpresheaf(P, {c: frozenset() for c in C.objects}, J)
    seen = {key(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for Q in frontier:
            for c, x in elems:
                if x in Q[c]:
                    continue
                grown = {d: set(Q[d]) for d in C.objects}
                for d, y, _ in orbit[c, x]:
                    grown[d].add(y)
                R = closure_of_subpresheaf(P, grown, J)
                if key(R) not in seen:
                    seen[key(R)] = R
                    nxt.append(R)
        frontier = nxt
    out = [Q for Q in seen.values() if is_sheaf(restrict_presheaf(P, Q), J)]
    out.sort(key=lambda Q: (sum(map(len, Q.values())), [sorted(map(repr, Q[c])) for c in C.objects]))
    return out


def sieve_on_sheaf_is_epimorphic(R, S: Sieve, J: GrothendieckTopology) -> bool:
    """Whether a sieve on ``a_J(S)`` is epimorphic.

    ``R`` is given by the arrows ``f ∈ S`` whose factorization through
    ``a_J(S)`` it contains.  ``S`` must be J-closed.
    """
    C = J.category
    c = S.codomain
    if closure_bits(J, c, S.bits) != S.bits:
        raise ValueError(f"{S!r} is not J-closed")
    picked = bits_of(C, (f for f in R if f in S))
    return closure_bits(J, c, generate_bits(C, picked)) == S.bits

