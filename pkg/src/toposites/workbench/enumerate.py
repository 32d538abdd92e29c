"""Exhaustive enumeration of small categories and of their topologies."""
from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import permutations, product

from ..fincat import FiniteCategory
from ..fixtures import NAMED
from ..sieve import maximal_bits, sieve_bits_on
from ..topology import GrothendieckTopology, saturate_bits, topology_violations

# hard limits; beyond these the enumerations stop being desk-scale
MAX_OBJECTS = 4
MAX_ARROWS = 10
MAX_TOPOLOGY_ARROWS = 8


class BoundsError(ValueError):
    pass


class DeadlineExceeded(RuntimeError):
    pass


# -- categories ----------------------------------------------------------------


def _obj_name(i):
    return "ABCDEFGH"[i]


def _hom_matrices(n, max_arrows):
    cells = [(i, j) for i in range(n) for j in range(n)]
    budget = max_arrows - n
    if budget < 0:
        return

    def rec(k, left, acc):
        if k == len(cells):
            yield tuple(acc)
            return
        i, j = cells[k]
        base = 1 if i == j else 0
        for extra in range(left + 1):
            acc.append(base + extra)
            yield from rec(k + 1, left - extra, acc)
            acc.pop()

    for flat in rec(0, budget, []):
        H = tuple(tuple(flat[i * n:(i + 1) * n]) for i in range(n))
        if H == min(_permute_matrix(H, p) for p in permutations(range(n))):
            yield H


def _permute_matrix(H, p):
    # p[new] = old
    n = len(H)
    return tuple(tuple(H[p[i]][p[j]] for j in range(n)) for i in range(n))


@dataclass
class _Frame:
    n: int
    H: tuple
    arrows: list      # (i, j, k); k == 0 on the diagonal is the identity
    dom: list
    cod: list
    index: dict


def _frame(H):
    n = len(H)
    arrows = [(i, j, k) for i in range(n) for j in range(n) for k in range(H[i][j])]
    return _Frame(n, H, arrows, [a[0] for a in arrows], [a[1] for a in arrows],
                  {a: x for x, a in enumerate(arrows)})


def _is_id(fr, x):
    i, j, k = fr.arrows[x]
    return i == j and k == 0


def _compositions(fr, deadline=None):
    """Yield every associative composition table on the frame ``fr``."""
    m = len(fr.arrows)
    table = [[-1] * m for _ in range(m)]
    for f in range(m):
        for g in range(m):
            if fr.cod[f] != fr.dom[g]:
                continue
            if _is_id(fr, g):
                table[g][f] = f
            elif _is_id(fr, f):
                table[g][f] = g
    todo = [(g, f) for f in range(m) for g in range(m)
            if fr.cod[f] == fr.dom[g] and table[g][f] < 0]
    options = {(g, f): [x for x in range(m) if fr.dom[x] == fr.dom[f] and fr.cod[x] == fr.cod[g]]
               for g, f in todo}
    after = {g: [h for h in range(m) if fr.dom[h] == fr.cod[g]] for g in range(m)}
    before = {f: [e for e in range(m) if fr.cod[e] == fr.dom[f]] for f in range(m)}

    def assoc(h, g, f):
        gf, hg = table[g][f], table[h][g]
        if gf < 0 or hg < 0:
            return True
        a, b = table[h][gf], table[hg][f]
        return a < 0 or b < 0 or a == b

    pairs = [(x, y) for y in range(m) for x in range(m) if fr.cod[y] == fr.dom[x]]

    def ok(g, f):
        for h in after[g]:
            if not assoc(h, g, f):
                return False
        for e in before[f]:
            if not assoc(g, f, e):
                return False
        # the new entry can also be the outer product of a triple
        for x, y in pairs:
            t = table[x][y]
            if t == f and not assoc(g, x, y):
                return False
            if t == g and not assoc(x, y, f):
                return False
        return True

    def rec(i):
        if deadline is not None and time.monotonic() > deadline:
            raise DeadlineExceeded
        if i == len(todo):
            yield [row[:] for row in table]
            return
        g, f = todo[i]
        for x in options[g, f]:
            table[g][f] = x
            if ok(g, f):
                yield from rec(i + 1)
        table[g][f] = -1

    yield from rec(0)


def _relabelings(fr):
    n = len(fr.H)
    for p in permutations(range(n)):
        if _permute_matrix(fr.H, p) != fr.H:
            continue
        # p[new] = old; inv[old] = new
        inv = [0] * n
        for new, old in enumerate(p):
            inv[old] = new
        blocks = []
        for i in range(n):
            for j in range(n):
                cnt = fr.H[i][j]
                start = 1 if i == j else 0
                blocks.append((i, j, list(permutations(range(start, cnt)))))
        for choice in product(*(b[2] for b in blocks)):
            amap = {}
            for (i, j, _), perm in zip(blocks, choice):
                start = 1 if i == j else 0
                if i == j:
                    amap[fr.index[i, j, 0]] = fr.index[inv[i], inv[j], 0]
                for k, newk in zip(range(start, fr.H[i][j]), perm):
                    amap[fr.index[i, j, k]] = fr.index[inv[i], inv[j], newk]
            yield amap


def _canonical(fr, table, relabelings):
    m = len(fr.arrows)
    best = None
    for amap in relabelings:
        new = [[-1] * m for _ in range(m)]
        for g in range(m):
            for f in range(m):
                if table[g][f] >= 0:
                    new[amap[g]][amap[f]] = amap[table[g][f]]
        code = tuple(tuple(r) for r in new)
        if best is None or code < best:
            best = code
    return best


def _build(fr, table, name=None):
    def aname(x):
        i, j, k = fr.arrows[x]
        if i == j and k == 0:
            return f"id{_obj_name(i)}"
        return f"{_obj_name(i)}{_obj_name(j)}{k}"
    objs = [_obj_name(i) for i in range(fr.n)]
    arrows = [(aname(x), _obj_name(fr.dom[x]), _obj_name(fr.cod[x])) for x in range(len(fr.arrows))]
    comp = {(aname(g), aname(f)): aname(table[g][f])
            for g in range(len(fr.arrows)) for f in range(len(fr.arrows)) if table[g][f] >= 0}
    ids = {_obj_name(i): aname(fr.index[i, i, 0]) for i in range(fr.n)}
    return FiniteCategory(objs, arrows, ids, comp, name=name)


def iter_categories(max_objects: int, max_arrows: int, deadline: float | None = None):
    """Yield ``(key, category)`` for every category up to isomorphism.

    ``key`` is a canonical code; two categories get the same key iff they
    are isomorphic.  Stops with :class:`DeadlineExceeded` once
    ``time.monotonic()`` passes ``deadline``.
    """
    for n in range(1, max_objects + 1):
        for total in range(n, max_arrows + 1):
            for H in _hom_matrices(n, total):
                if sum(map(sum, H)) != total:
                    continue
                fr = _frame(H)
                rel = list(_relabelings(fr))
                seen = {}
                for table in _compositions(fr, deadline):
                    code = _canonical(fr, table, rel)
                    if code not in seen:
                        seen[code] = table
                for code in sorted(seen):
                    yield (H, code), _build(fr, seen[code])


def canonical_key(C: FiniteCategory):
    """Isomorphism-invariant key compatible with :func:`iter_categories`."""
    objs = list(C.objects)
    n = len(objs)
    H0 = tuple(tuple(len(C.hom(a, b)) for b in objs) for a in objs)
    best = None
    for p in permutations(range(n)):
        H = _permute_matrix(H0, p)
        if best is None or H < best[0]:
            best = (H, p)
    H, p = best
    fr = _frame(H)
    # map frame arrows to category arrows for this particular object order
    new_objs = [objs[p[i]] for i in range(n)]
    m = len(fr.arrows)
    table = [[-1] * m for _ in range(m)]
    x_of = {}
    for i in range(n):
        for j in range(n):
            hs = list(C.hom(new_objs[i], new_objs[j]))
            if i == j:
                hs.remove(C.identity[new_objs[i]])
                hs = [C.identity[new_objs[i]]] + hs
            for k, a in enumerate(hs):
                x_of[a] = fr.index[i, j, k]
    for (g, f), h in C.composition.items():
        table[x_of[g]][x_of[f]] = x_of[h]
    return H, _canonical(fr, table, list(_relabelings(fr)))


def check_bounds(max_objects: int, max_arrows: int) -> None:
    if not 1 <= max_objects <= MAX_OBJECTS or not 1 <= max_arrows <= MAX_ARROWS:
        raise BoundsError(f"bounds ({max_objects}, {max_arrows}) outside "
                          f"(1..{MAX_OBJECTS}, 1..{MAX_ARROWS})")


def enumerate_categories(max_objects: int, max_arrows: int, include_named: bool = False,
                         deadline: float | None = None) -> list[tuple[str, FiniteCategory]]:
    """Every category with at most the given numbers of objects and arrows
    (arrows include identities), up to isomorphism, as ``(id, category)``.

    Members isomorphic to a named fixture carry the fixture's name as id.
    With ``include_named`` the named fixtures outside the bounds are added.
    """
    check_bounds(max_objects, max_arrows)
    named = {canonical_key(f()): name for name, f in NAMED.items()}
    out = []
    found = set()
    counter = {}
    for key, C in iter_categories(max_objects, max_arrows, deadline):
        n, m = len(C.objects), len(C.arrows)
        if key in named:
            cid = named[key]
            found.add(key)
        else:
            counter[n, m] = counter.get((n, m), 0) + 1
            cid = f"cat-{n}o{m}a-{counter[n, m]:03d}"
        C.name = cid
        out.append((cid, C))
    if include_named:
        for key, name in sorted(named.items(), key=lambda kv: kv[1]):
            if key not in found:
                C = NAMED[name]()
                out.append((name, C))
    return out


# -- topologies ----------------------------------------------------------------


def enumerate_topologies(C: FiniteCategory) -> list[GrothendieckTopology]:
    """All Grothendieck topologies on ``C``, smallest first.

    Topologies are closed under intersection, so every one of them is
    reached from the trivial topology by repeatedly adding one sieve and
    saturating.
    """
    if len(C.arrows) > MAX_TOPOLOGY_ARROWS:
        raise BoundsError(f"{len(C.arrows)} arrows exceeds the topology bound {MAX_TOPOLOGY_ARROWS}")
    sieves = {c: sieve_bits_on(C, c) for c in C.objects}
    start = {c: frozenset([maximal_bits(C, c)]) for c in C.objects}

    def key(J):
        return tuple(tuple(sorted(J[c])) for c in C.objects)

    seen = {key(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for J in frontier:
            for c in C.objects:
                for S in sieves[c]:
                    if S in J[c]:
                        continue
                    grown = dict(J)
                    grown[c] = J[c] | {S}
                    K = saturate_bits(C, grown)
                    k = key(K)
                    if k not in seen:
                        seen[k] = K
                        nxt.append(K)
        frontier = nxt
    ordered = sorted(seen.items(), key=lambda kv: (sum(len(x) for x in kv[0]), kv[0]))
    return [GrothendieckTopology(C, J) for _, J in ordered]


def enumerate_topologies_brute(C: FiniteCategory) -> list[GrothendieckTopology]:
    """Reference enumeration: test every per-object set of sieves."""
    from itertools import chain, combinations

    per_object = []
    for c in C.objects:
        rest = [s for s in sieve_bits_on(C, c) if s != maximal_bits(C, c)]
        subsets = chain.from_iterable(combinations(rest, r) for r in range(len(rest) + 1))
        per_object.append([frozenset(s) | {maximal_bits(C, c)} for s in subsets])
    out = []
    for combo in product(*per_object):
        covers = dict(zip(C.objects, combo))
        if not topology_violations(C, covers):
            out.append(GrothendieckTopology(C, covers))
    out.sort(key=lambda J: (J.size(), J.key()))
    return out
